#pragma once

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "sesim/domain.hpp"

namespace sesim {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A complete, immutable experiment input: population, prices, horizon.
struct Scenario {
    std::vector<Prosumer> prosumers;
    Tariffs tariffs;
    int days = 0;
    std::uint64_t seed = 0;

    int hours() const { return days * kHoursPerDay; }
};

// ---- timestamps -------------------------------------------------------------
// Series start at 2021-07-01T00:00:00; hours index from there.

namespace detail {

// Howard Hinnant's days-from-civil.
inline long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

inline void civil_from_days(long z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

inline constexpr long kEpochDay = 18809;  // days_from_civil(2021, 7, 1)

}  // namespace detail

inline std::string hour_to_iso(long hour_index) {
    long day = detail::kEpochDay + hour_index / 24;
    int h = static_cast<int>(hour_index % 24);
    int y;
    unsigned m, d;
    detail::civil_from_days(day, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00", y, m, d, h);
    return buf;
}

inline long iso_to_hour(const std::string& ts) {
    int y, mo, d, h, mi, s;
    if (std::sscanf(ts.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6 ||
        mi != 0 || s != 0 || h < 0 || h > 23)
        throw ParseError("bad ISO-8601 hourly timestamp: " + ts);
    return (detail::days_from_civil(y, mo, d) - detail::kEpochDay) * 24 + h;
}

// ---- price forecast ---------------------------------------------------------

/// Persistence forecast of the spot price at t+1 using only data at or before t.
inline double forecast_price(const std::vector<double>& history, std::size_t t) {
    if (t + 1 >= 24) return history.at(t + 1 - 24);
    return history.at(t);  // not enough history, fall back to last observation
}

// ---- synthetic generation ---------------------------------------------------

struct GenParams {
    int n_prosumers = 50;
    int days = 30;
    std::uint64_t seed = 1;
    double mismatch_frac = 0.2;     // share of low-PV, evening-heavy households
    double mean_demand_low = 16.0;  // kWh/day band for the population
    double mean_demand_high = 24.0;
    double pv_peak_kw = 10.0;  // uniform ratings, also recorded in the manifest
    double ess_capacity_kwh = 15.0;
    double ess_power_kw = 7.5;
};

/// Deterministic synthetic scenario: clear-sky PV bell, double-peak residential
/// demand, mean-reverting spot prices with evening spikes.
inline Scenario generate_synthetic(const GenParams& gp) {
    if (gp.n_prosumers < 1) throw ConfigError("need at least one prosumer");
    std::mt19937_64 rng(gp.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int hours = gp.days * kHoursPerDay;

    Scenario sc;
    sc.days = gp.days;
    sc.seed = gp.seed;

    // TOU schedule: off-peak nights, shoulder daytime, peak evenings.
    sc.tariffs.tou_price.assign(kHoursPerDay, 0.25);
    for (int h = 0; h < kHoursPerDay; ++h) {
        if (h < 7 || h >= 22) sc.tariffs.tou_price[h] = 0.15;
        if (h >= 17 && h < 21) sc.tariffs.tou_price[h] = 0.35;
    }
    sc.tariffs.fit_price = 0.05;

    // Spot price: daily shape + AR(1) noise + occasional evening spikes.
    sc.tariffs.spot_series.resize(hours);
    double ar = 0.0;
    for (int t = 0; t < hours; ++t) {
        int h = t % kHoursPerDay;
        double shape = 0.06;
        if (h >= 10 && h < 15) shape = 0.02;  // solar depression
        if (h >= 17 && h < 21) shape = 0.28;
        if (h >= 21 || h < 5) shape = 0.04;
        ar = 0.8 * ar + 0.02 * (2.0 * uni(rng) - 1.0);
        double spike = 0.0;
        if (h >= 17 && h < 21 && uni(rng) < 0.05) spike = 0.5 + 1.0 * uni(rng);
        sc.tariffs.spot_series[t] = shape + ar + spike;
    }

    sc.prosumers.resize(gp.n_prosumers);
    for (int j = 0; j < gp.n_prosumers; ++j) {
        Prosumer& p = sc.prosumers[j];
        p.id = j;
        p.pv_peak_kw = gp.pv_peak_kw;
        p.ess_capacity_kwh = gp.ess_capacity_kwh;
        p.ess_power_kw = gp.ess_power_kw;
        p.demand_series.resize(hours);
        p.pv_series.resize(hours);

        const bool mismatched = uni(rng) < gp.mismatch_frac;
        const double pv_scale = mismatched ? 0.05 + 0.05 * uni(rng) : 0.6 + 0.4 * uni(rng);
        const double morning = mismatched ? 1.0 + 0.5 * uni(rng) : 0.5 + 0.5 * uni(rng);
        const double evening = mismatched ? 2.5 + 1.0 * uni(rng) : 1.5 + 1.0 * uni(rng);
        const double target_daily =
            gp.mean_demand_low + (gp.mean_demand_high - gp.mean_demand_low) * uni(rng);

        // Shape one day, rescale to the target daily energy, then apply noise.
        std::vector<double> day_shape(kHoursPerDay);
        double shape_sum = 0.0;
        for (int h = 0; h < kHoursPerDay; ++h) {
            double v = 0.3;
            v += morning * std::exp(-0.5 * std::pow((h - 7.5) / 1.5, 2));
            v += evening * std::exp(-0.5 * std::pow((h - 19.0) / 2.0, 2));
            day_shape[h] = v;
            shape_sum += v;
        }
        const double demand_scale = target_daily / shape_sum;

        std::vector<double> day_factor(gp.days);  // cloud cover, one draw per day
        for (int d = 0; d < gp.days; ++d) day_factor[d] = 0.7 + 0.3 * uni(rng);

        for (int t = 0; t < hours; ++t) {
            int h = t % kHoursPerDay;
            double bell = 0.0;
            if (h > 6 && h < 18) {
                double x = std::sin(M_PI * (h - 6) / 12.0);
                bell = x * x;
            }
            p.pv_series[t] = p.pv_peak_kw * pv_scale * bell * day_factor[t / kHoursPerDay] *
                             (0.9 + 0.2 * uni(rng));
            p.demand_series[t] = demand_scale * day_shape[h] * (0.9 + 0.2 * uni(rng));
        }
        p.validate();
    }
    return sc;
}

// ---- CSV schemas ------------------------------------------------------------
// prosumers.csv: timestamp,prosumer_id,demand_kw,pv_kw
// prices.csv:    timestamp,spot_price,tou_price
// manifest:      key=value naming the files and static ratings

inline void write_scenario(const Scenario& sc, const std::string& dir) {
    const int hours = sc.hours();
    {
        std::ofstream out(dir + "/prosumers.csv");
        if (!out) throw ParseError("cannot write " + dir + "/prosumers.csv");
        out << "timestamp,prosumer_id,demand_kw,pv_kw\n";
        char buf[96];
        for (int t = 0; t < hours; ++t) {
            std::string ts = hour_to_iso(t);
            for (const auto& p : sc.prosumers) {
                std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g\n", ts.c_str(), p.id,
                              p.demand_series[t], p.pv_series[t]);
                out << buf;
            }
        }
    }
    {
        std::ofstream out(dir + "/prices.csv");
        out << "timestamp,spot_price,tou_price\n";
        char buf[96];
        for (int t = 0; t < hours; ++t) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n", hour_to_iso(t).c_str(),
                          sc.tariffs.spot(t), sc.tariffs.tou(t));
            out << buf;
        }
    }
    {
        std::ofstream out(dir + "/scenario.manifest");
        out.precision(17);
        out << "prosumers_csv=prosumers.csv\nprices_csv=prices.csv\n"
            << "fit_price=" << sc.tariffs.fit_price << "\n"
            << "pv_peak_kw=" << (sc.prosumers.empty() ? 10.0 : sc.prosumers[0].pv_peak_kw) << "\n"
            << "ess_capacity_kwh="
            << (sc.prosumers.empty() ? 15.0 : sc.prosumers[0].ess_capacity_kwh) << "\n"
            << "ess_power_kw=" << (sc.prosumers.empty() ? 7.5 : sc.prosumers[0].ess_power_kw)
            << "\n"
            << "days=" << sc.days << "\nseed=" << sc.seed << "\n";
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_number(const std::string& s, const std::string& file, int lineno) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        if (!std::isfinite(v)) throw std::invalid_argument("nonfinite");
        return v;
    } catch (const std::exception&) {
        throw ParseError(file + ":" + std::to_string(lineno) + ": non-numeric cell '" + s + "'");
    }
}

}  // namespace detail

inline Scenario load_scenario(const std::string& manifest_path) {
    auto kv = read_kv_file(manifest_path);
    auto dir = manifest_path.substr(0, manifest_path.find_last_of('/') + 1);
    auto need = [&](const char* k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw ParseError("manifest missing key: " + std::string(k));
        return it->second;
    };

    Scenario sc;
    sc.days = std::stoi(need("days"));
    sc.seed = std::stoull(need("seed"));
    sc.tariffs.fit_price = std::stod(need("fit_price"));
    const double pv_peak = std::stod(need("pv_peak_kw"));
    const double ess_cap = std::stod(need("ess_capacity_kwh"));
    const double ess_pow = std::stod(need("ess_power_kw"));
    const int hours = sc.hours();

    // Prices.
    {
        const std::string path = dir + need("prices_csv");
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open " + path);
        std::string line;
        int lineno = 0;
        std::getline(in, line);
        ++lineno;
        if (line.rfind("timestamp,spot_price,tou_price", 0) != 0)
            throw ParseError(path + ":1: unexpected header");
        sc.tariffs.spot_series.assign(hours, 0.0);
        std::vector<double> tou(hours, 0.0);
        long expect = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto cells = detail::split_csv_line(line);
            if (cells.size() != 3)
                throw ParseError(path + ":" + std::to_string(lineno) + ": expected 3 columns");
            long t = iso_to_hour(cells[0]);
            if (t != expect)
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 (t < expect ? ": duplicate or misordered timestamp "
                                             : ": missing hour before ") +
                                 cells[0]);
            if (t >= hours)
                throw ParseError(path + ":" + std::to_string(lineno) + ": extra rows past horizon");
            sc.tariffs.spot_series[t] = detail::parse_number(cells[1], path, lineno);
            tou[t] = detail::parse_number(cells[2], path, lineno);
            ++expect;
        }
        if (expect != hours)
            throw ParseError(path + ": expected " + std::to_string(hours) + " hourly rows, got " +
                             std::to_string(expect));
        // TOU repeats daily; keep the 24-hour schedule.
        sc.tariffs.tou_price.assign(tou.begin(), tou.begin() + kHoursPerDay);
        for (int t = 0; t < hours; ++t)
            if (tou[t] != sc.tariffs.tou_price[t % 24])
                throw ParseError(path + ": tou_price must repeat with a 24h period (hour " +
                                 std::to_string(t) + ")");
    }

    // Prosumer series, grouped per timestamp.
    {
        const std::string path = dir + need("prosumers_csv");
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open " + path);
        std::string line;
        int lineno = 0;
        std::getline(in, line);
        ++lineno;
        if (line.rfind("timestamp,prosumer_id,demand_kw,pv_kw", 0) != 0)
            throw ParseError(path + ":1: unexpected header");
        std::map<int, std::vector<double>> demand, pv;
        std::map<int, long> next_hour;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto cells = detail::split_csv_line(line);
            if (cells.size() != 4)
                throw ParseError(path + ":" + std::to_string(lineno) + ": expected 4 columns");
            long t = iso_to_hour(cells[0]);
            int id = static_cast<int>(detail::parse_number(cells[1], path, lineno));
            long& expect = next_hour.emplace(id, 0).first->second;
            if (t != expect)
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 (t < expect ? ": duplicate timestamp for prosumer "
                                             : ": gap in series for prosumer ") +
                                 std::to_string(id) + " at " + cells[0]);
            demand[id].push_back(detail::parse_number(cells[2], path, lineno));
            pv[id].push_back(detail::parse_number(cells[3], path, lineno));
            ++expect;
        }
        for (auto& [id, hrs] : next_hour)
            if (hrs != hours)
                throw ParseError(path + ": prosumer " + std::to_string(id) + " has " +
                                 std::to_string(hrs) + " rows, expected " + std::to_string(hours));
        for (auto& [id, d] : demand) {
            Prosumer p;
            p.id = id;
            p.pv_peak_kw = pv_peak;
            p.ess_capacity_kwh = ess_cap;
            p.ess_power_kw = ess_pow;
            p.demand_series = std::move(d);
            p.pv_series = std::move(pv[id]);
            p.validate();
            sc.prosumers.push_back(std::move(p));
        }
    }
    return sc;
}

}  // namespace sesim
