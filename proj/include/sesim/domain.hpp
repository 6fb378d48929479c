#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sesim {

// One simulation step is one hour; all power*time products assume this.
inline constexpr double kDtHours = 1.0;
inline constexpr int kHoursPerDay = 24;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ContractViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A household with rooftop PV and a battery it contributes to the pool.
struct Prosumer {
    int id = 0;
    double pv_peak_kw = 0.0;
    double ess_capacity_kwh = 0.0;
    double ess_power_kw = 0.0;          // p^m, caps both deposit and withdrawal
    std::vector<double> demand_series;  // kW per hour
    std::vector<double> pv_series;      // kW per hour
    bool active = true;

    void validate() const {
        if (pv_peak_kw <= 0.0 || ess_capacity_kwh <= 0.0 || ess_power_kw <= 0.0)
            throw ConfigError("prosumer " + std::to_string(id) + ": ratings must be positive");
        if (demand_series.size() != pv_series.size())
            throw ConfigError("prosumer " + std::to_string(id) + ": series length mismatch");
        for (double d : demand_series)
            if (!(d >= 0.0)) throw ConfigError("negative demand");
        for (double g : pv_series)
            if (!(g >= 0.0)) throw ConfigError("negative pv");
    }
};

struct Tariffs {
    std::vector<double> tou_price;   // retail $/kWh, hourly
    double fit_price = 0.05;         // feed-in tariff $/kWh
    std::vector<double> spot_series; // wholesale $/kWh, may be negative

    double tou(std::size_t t) const { return tou_price[t % tou_price.size()]; }
    double spot(std::size_t t) const { return spot_series.at(t); }
};

/// All tunables of the deposit/withdrawal service and virtual-operation triggers.
struct SesConfig {
    double eta_ch = 0.95;
    double eta_dis = 1.05;  // divisor convention: discharge removes P/eta_dis from store
    double beta_fit = 0.8;
    double beta_tou = 1.2;
    double beta_sdr_up = 0.9, beta_sdr_low = 0.1;
    double beta_soc_up = 0.9, beta_soc_low = 0.1;
    double beta_ao_up = 0.85, beta_ao_low = 0.15;
    // Degradation slope and unit capital cost have no published values; these
    // defaults are ours, not the source model's.
    double k_e = 0.5;          // % capacity-life per 100 cycles (linearized)
    double gamma_ses = 300.0;  // $/kWh unit capital cost
    double xi_pro = 0.3;
    double xi_esp = 0.3;
    double alpha_dps_max = 1.5;
    double alpha_wtd_min = 0.5;
    int ao_window_hours = 30 * 24;  // trailing window for arbitrage-factor normalization

    double eta_adm() const { return eta_ch / eta_dis; }

    void validate() const {
        if (!(eta_ch > 0.0 && eta_ch <= 1.0 && eta_dis >= 1.0))
            throw ConfigError("require 0 < eta_ch <= 1 <= eta_dis");
        if (!(beta_fit < 1.0 && beta_tou > 1.0))
            throw ConfigError("require beta_fit < 1 < beta_tou");
        auto band = [](double lo, double up) { return lo >= 0.0 && lo < up && up <= 1.0; };
        if (!band(beta_sdr_low, beta_sdr_up) || !band(beta_soc_low, beta_soc_up) ||
            !band(beta_ao_low, beta_ao_up))
            throw ConfigError("trigger thresholds must satisfy 0 <= LOW < UP <= 1");
        if (!(alpha_dps_max >= 1.0 && alpha_wtd_min > 0.0 && alpha_wtd_min <= 1.0))
            throw ConfigError("coefficient bounds out of range");
        if (ao_window_hours < 2) throw ConfigError("ao_window_hours too small");
    }
};

/// Aggregate storage of all pooled batteries, treated as one asset.
struct SesState {
    double energy_kwh = 0.0;
    double capacity_kwh = 0.0;
    double max_charge_kw = 0.0;
    double max_discharge_kw = 0.0;

    double soc() const { return capacity_kwh > 0.0 ? energy_kwh / capacity_kwh : 0.0; }
};

inline SesState aggregate_ses(const std::vector<Prosumer>& prosumers) {
    SesState s;
    int active = 0;
    for (const auto& p : prosumers) {
        if (!p.active) continue;
        ++active;
        s.capacity_kwh += p.ess_capacity_kwh;
        s.max_charge_kw += p.ess_power_kw;
        s.max_discharge_kw += p.ess_power_kw;
    }
    if (active == 0) throw ConfigError("aggregate_ses: no active prosumers");
    s.energy_kwh = 0.5 * s.capacity_kwh;  // unspecified initial SOC; midpoint
    return s;
}

// ---- key=value config file -------------------------------------------------

inline std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline SesConfig load_ses_config(const std::string& path) {
    auto kv = read_kv_file(path);
    SesConfig c;
    auto get = [&](const char* key, double& field) {
        auto it = kv.find(key);
        if (it != kv.end()) field = std::stod(it->second);
    };
    get("eta_ch", c.eta_ch);
    get("eta_dis", c.eta_dis);
    get("beta_fit", c.beta_fit);
    get("beta_tou", c.beta_tou);
    get("beta_sdr_up", c.beta_sdr_up);
    get("beta_sdr_low", c.beta_sdr_low);
    get("beta_soc_up", c.beta_soc_up);
    get("beta_soc_low", c.beta_soc_low);
    get("beta_ao_up", c.beta_ao_up);
    get("beta_ao_low", c.beta_ao_low);
    get("k_e", c.k_e);
    get("gamma_ses", c.gamma_ses);
    get("xi_pro", c.xi_pro);
    get("xi_esp", c.xi_esp);
    get("alpha_dps_max", c.alpha_dps_max);
    get("alpha_wtd_min", c.alpha_wtd_min);
    if (auto it = kv.find("ao_window_hours"); it != kv.end())
        c.ao_window_hours = std::stoi(it->second);
    c.validate();
    return c;
}

inline void save_ses_config(const SesConfig& c, const std::string& path) {
    std::ofstream out(path);
    out.precision(17);
    out << "eta_ch=" << c.eta_ch << "\neta_dis=" << c.eta_dis
        << "\nbeta_fit=" << c.beta_fit << "\nbeta_tou=" << c.beta_tou
        << "\nbeta_sdr_up=" << c.beta_sdr_up << "\nbeta_sdr_low=" << c.beta_sdr_low
        << "\nbeta_soc_up=" << c.beta_soc_up << "\nbeta_soc_low=" << c.beta_soc_low
        << "\nbeta_ao_up=" << c.beta_ao_up << "\nbeta_ao_low=" << c.beta_ao_low
        << "\nk_e=" << c.k_e << "\ngamma_ses=" << c.gamma_ses
        << "\nxi_pro=" << c.xi_pro << "\nxi_esp=" << c.xi_esp
        << "\nalpha_dps_max=" << c.alpha_dps_max << "\nalpha_wtd_min=" << c.alpha_wtd_min
        << "\nao_window_hours=" << c.ao_window_hours << "\n";
}

}  // namespace sesim
