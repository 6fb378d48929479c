#pragma once

#include <algorithm>
#include <deque>
#include <numeric>

#include "sesim/domain.hpp"

namespace sesim {

/// Hourly action pair plus market trade powers, as issued by the operator.
struct DwsCoefficients {
    double alpha_dps = 1.0;  // >= 1
    double alpha_wtd = 1.0;  // in (0, 1]
    double trade_charge_kw = 0.0;
    double trade_discharge_kw = 0.0;
};

/// Per-prosumer flows for one hour. Virtual components never exceed the
/// physical request; deposit and withdrawal are mutually exclusive per hour.
struct HourFlows {
    std::vector<double> deposit;     // P^dps, kW
    std::vector<double> withdraw;    // P^wtd, kW
    std::vector<double> v_deposit;   // P^dps,V, kW
    std::vector<double> v_withdraw;  // P^wtd,V, kW

    explicit HourFlows(std::size_t n = 0)
        : deposit(n, 0.0), withdraw(n, 0.0), v_deposit(n, 0.0), v_withdraw(n, 0.0) {}

    std::size_t size() const { return deposit.size(); }
    double total_deposit() const { return std::accumulate(deposit.begin(), deposit.end(), 0.0); }
    double total_withdraw() const { return std::accumulate(withdraw.begin(), withdraw.end(), 0.0); }
    double physical_deposit() const {
        double s = 0.0;
        for (std::size_t j = 0; j < size(); ++j) s += deposit[j] - v_deposit[j];
        return s;
    }
    double physical_withdraw() const {
        double s = 0.0;
        for (std::size_t j = 0; j < size(); ++j) s += withdraw[j] - v_withdraw[j];
        return s;
    }
    double virtual_deposit() const {
        return std::accumulate(v_deposit.begin(), v_deposit.end(), 0.0);
    }
    double virtual_withdraw() const {
        return std::accumulate(v_withdraw.begin(), v_withdraw.end(), 0.0);
    }
};

/// Running kWh-credit balances plus the settlement mirror entries of one day.
struct CreditLedger {
    std::vector<double> credit;

    struct Settlement {
        int prosumer = 0;
        double amount = 0.0;  // $ received by the prosumer (negative = pays)
    };
    std::vector<Settlement> day_settlements;

    explicit CreditLedger(std::size_t n = 0) : credit(n, 0.0) {}
};

struct Factors {
    double f_sdr = 0.5;
    double f_soc = 0.5;
    double f_ao = 0.5;
    double raw_sdr = 0.0;  // F^SDR* before the [-1,1] -> [0,1] map
    double raw_ao = 0.0;   // $/kWh price edge before windowed normalization
};

/// Trailing min-max window used to normalize the arbitrage-opportunity factor.
class AoWindow {
  public:
    explicit AoWindow(int window_hours = 720) : window_(window_hours) {}

    double normalize(double raw) {
        history_.push_back(raw);
        if (static_cast<int>(history_.size()) > window_) history_.pop_front();
        auto [lo, hi] = std::minmax_element(history_.begin(), history_.end());
        if (*hi - *lo < 1e-12) return 0.5;
        return std::clamp((raw - *lo) / (*hi - *lo), 0.0, 1.0);
    }

  private:
    int window_;
    std::deque<double> history_;
};

/// Deposit/withdraw request of one prosumer for hour t: surplus is banked,
/// deficits draw on the pool only while credit is positive.
inline std::pair<double, double> prosumer_flows(const Prosumer& p, std::size_t t, double credit) {
    const double g = p.pv_series.at(t);
    const double d = p.demand_series.at(t);
    double deposit = 0.0, withdraw = 0.0;
    if (g > d) {
        deposit = std::min(g - d, p.ess_power_kw);
    } else if (d > g && credit > 0.0) {
        withdraw = std::min(d - g, p.ess_power_kw);
    }
    return {deposit, withdraw};
}

/// Credit accrual; identical whether flows end up routed physical or virtual.
inline void update_credit(CreditLedger& ledger, const HourFlows& flows,
                          const DwsCoefficients& coeffs, const SesConfig& cfg) {
    if (coeffs.alpha_dps < 1.0 || coeffs.alpha_dps > cfg.alpha_dps_max + 1e-12 ||
        coeffs.alpha_wtd > 1.0 || coeffs.alpha_wtd < cfg.alpha_wtd_min - 1e-12)
        throw ContractViolation("DWS coefficient out of bounds");
    const double eta_adm = cfg.eta_adm();
    for (std::size_t j = 0; j < flows.size(); ++j)
        ledger.credit[j] += (coeffs.alpha_dps * flows.deposit[j] * eta_adm -
                             coeffs.alpha_wtd * flows.withdraw[j]) *
                            kDtHours;
}

/// 24-hour persistence forecast of the next spot price, causal in t.
inline double forecast_spot(const Tariffs& tariffs, std::size_t t) {
    if (t + 1 >= 24) return tariffs.spot_series.at(t + 1 - 24);
    return tariffs.spot_series.at(t);
}

inline Factors compute_factors(const SesState& ses, const HourFlows& flows,
                               const Tariffs& tariffs, std::size_t t, AoWindow& ao_window) {
    const double p_max = std::max(ses.max_charge_kw, ses.max_discharge_kw);
    if (p_max <= 0.0) throw ConfigError("compute_factors: P_MAX must be positive");
    if (tariffs.spot_series.empty()) throw ConfigError("compute_factors: empty price series");

    Factors f;
    f.raw_sdr = (flows.total_deposit() - flows.total_withdraw()) / p_max;
    f.f_sdr = std::clamp((f.raw_sdr + 1.0) / 2.0, 0.0, 1.0);
    f.f_soc = ses.capacity_kwh > 0.0 ? ses.energy_kwh / ses.capacity_kwh : 0.0;
    f.raw_ao = forecast_spot(tariffs, t) - tariffs.spot(t);
    f.f_ao = ao_window.normalize(f.raw_ao);
    return f;
}

/// Trigger-threshold routing: all-or-nothing per hour and direction.
/// Returns (storage triggered, extraction triggered).
inline std::pair<bool, bool> route_virtual(HourFlows& flows, const Factors& f,
                                           const SesConfig& cfg) {
    const bool store_virtual =
        f.f_sdr > cfg.beta_sdr_up || f.f_soc > cfg.beta_soc_up || f.f_ao > cfg.beta_ao_up;
    const bool extract_virtual =
        f.f_sdr < cfg.beta_sdr_low || f.f_soc < cfg.beta_soc_low || f.f_ao < cfg.beta_ao_low;
    for (std::size_t j = 0; j < flows.size(); ++j) {
        flows.v_deposit[j] = store_virtual ? flows.deposit[j] : 0.0;
        flows.v_withdraw[j] = extract_virtual ? flows.withdraw[j] : 0.0;
    }
    return {store_virtual, extract_virtual};
}

struct DaySettlement {
    double ses_revenue = 0.0;  // R^CR: prosumers paying off negative credit
    double ses_cost = 0.0;     // C^CR: pool buying out positive credit
    std::vector<double> prosumer_revenue;  // R^CR_j, from positive credit
    std::vector<double> prosumer_cost;     // C^CR_j, from negative credit
};

/// End-of-day unified settlement. Positive credit is bought out at
/// beta_fit * FIT; negative credit is charged at beta_tou * mean TOU.
/// All credits reset to zero.
inline DaySettlement settle_day(CreditLedger& ledger, double mean_tou, const Tariffs& tariffs,
                                const SesConfig& cfg) {
    DaySettlement s;
    const std::size_t n = ledger.credit.size();
    s.prosumer_revenue.assign(n, 0.0);
    s.prosumer_cost.assign(n, 0.0);
    const double lambda_dps = cfg.beta_fit * tariffs.fit_price;
    const double lambda_wtd = cfg.beta_tou * mean_tou;
    ledger.day_settlements.clear();
    for (std::size_t j = 0; j < n; ++j) {
        const double gamma = ledger.credit[j];
        if (gamma > 0.0) {
            const double amount = gamma * lambda_dps;
            s.ses_cost += amount;
            s.prosumer_revenue[j] = amount;
            ledger.day_settlements.push_back({static_cast<int>(j), amount});
        } else if (gamma < 0.0) {
            const double amount = -gamma * lambda_wtd;
            s.ses_revenue += amount;
            s.prosumer_cost[j] = amount;
            ledger.day_settlements.push_back({static_cast<int>(j), -amount});
        }
        ledger.credit[j] = 0.0;
    }
    return s;
}

/// Demand-weighted mean TOU price over one day, used as the settlement price.
inline double day_mean_tou(const Tariffs& tariffs, const std::vector<const Prosumer*>& participants,
                           int day) {
    double num = 0.0, den = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
        const std::size_t t = static_cast<std::size_t>(day) * kHoursPerDay + h;
        double demand = 0.0;
        for (const Prosumer* p : participants) demand += p->demand_series.at(t);
        num += tariffs.tou(t) * demand;
        den += demand;
    }
    if (den <= 0.0) {
        for (int h = 0; h < kHoursPerDay; ++h) num += tariffs.tou(h);
        return num / kHoursPerDay;
    }
    return num / den;
}

/// G_dw, the aggregate electricity-gain index of the coefficient history.
inline double deposit_withdraw_gain(const std::vector<DwsCoefficients>& history) {
    if (history.empty()) throw ConfigError("deposit_withdraw_gain: empty history");
    double sum = 0.0;
    for (const auto& c : history) {
        if (c.alpha_wtd <= 0.0) throw ContractViolation("alpha_wtd must be positive");
        sum += c.alpha_dps / c.alpha_wtd;
    }
    return sum / static_cast<double>(history.size());
}

}  // namespace sesim
