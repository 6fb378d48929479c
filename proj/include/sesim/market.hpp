#pragma once

#include "sesim/dws.hpp"

namespace sesim {

struct TradePowers {
    double charge_kw = 0.0;     // P^SPO,ch
    double discharge_kw = 0.0;  // P^SPO,dis
};

/// Cash components of a single simulated hour.
struct HourResult {
    double trade_revenue = 0.0;      // as-printed sign convention: buying weighs positive
    double degradation_cost = 0.0;
    double virtual_revenue = 0.0;    // R^VS increment
    double virtual_cost = 0.0;       // C^VS increment
    double energy_kwh = 0.0;         // SES energy after the step
};

/// Advance the aggregate store by one hour. Infeasible requests are repaired
/// in a fixed order: market trade is curtailed first, then prosumer flows are
/// rerouted virtual. Prosumer-side totals are never changed by the repair.
inline SesState step_soc(const SesState& ses, HourFlows& flows, TradePowers& trade,
                         const SesConfig& cfg) {
    if (trade.charge_kw < 0.0 || trade.discharge_kw < 0.0)
        throw ContractViolation("trade powers must be nonnegative");
    if (trade.charge_kw > 0.0 && trade.discharge_kw > 0.0)
        throw ContractViolation("simultaneous market charge and discharge");

    const double eta_ch = cfg.eta_ch, eta_dis = cfg.eta_dis;

    auto phys_dps = [&] { return flows.physical_deposit(); };
    auto phys_wtd = [&] { return flows.physical_withdraw(); };

    // Power caps: trade curtailment alone suffices because per-prosumer flows
    // are already capped by the same unit ratings that sum to the cap.
    trade.charge_kw = std::min(trade.charge_kw, std::max(0.0, ses.max_charge_kw - phys_dps()));
    trade.discharge_kw =
        std::min(trade.discharge_kw, std::max(0.0, ses.max_discharge_kw - phys_wtd()));

    auto reroute_deposits = [&](double reduce_kw) {
        const double total = phys_dps();
        if (total <= 0.0) return;
        const double frac = std::min(1.0, reduce_kw / total);
        for (std::size_t j = 0; j < flows.size(); ++j)
            flows.v_deposit[j] += frac * (flows.deposit[j] - flows.v_deposit[j]);
    };
    auto reroute_withdrawals = [&](double reduce_kw) {
        const double total = phys_wtd();
        if (total <= 0.0) return;
        const double frac = std::min(1.0, reduce_kw / total);
        for (std::size_t j = 0; j < flows.size(); ++j)
            flows.v_withdraw[j] += frac * (flows.withdraw[j] - flows.v_withdraw[j]);
    };

    auto delta = [&] {
        return ((phys_dps() + trade.charge_kw) * eta_ch -
                (phys_wtd() + trade.discharge_kw) / eta_dis) *
               kDtHours;
    };

    double d = delta();
    if (ses.energy_kwh + d > ses.capacity_kwh) {
        double excess = ses.energy_kwh + d - ses.capacity_kwh;
        const double cut = std::min(trade.charge_kw, excess / (eta_ch * kDtHours));
        trade.charge_kw -= cut;
        d = delta();
        if (ses.energy_kwh + d > ses.capacity_kwh) {
            excess = ses.energy_kwh + d - ses.capacity_kwh;
            reroute_deposits(excess / (eta_ch * kDtHours));
            d = delta();
        }
    } else if (ses.energy_kwh + d < 0.0) {
        double shortfall = -(ses.energy_kwh + d);
        const double cut = std::min(trade.discharge_kw, shortfall * eta_dis / kDtHours);
        trade.discharge_kw -= cut;
        d = delta();
        if (ses.energy_kwh + d < 0.0) {
            shortfall = -(ses.energy_kwh + d);
            reroute_withdrawals(shortfall * eta_dis / kDtHours);
            d = delta();
        }
    }

    SesState next = ses;
    next.energy_kwh = std::clamp(ses.energy_kwh + d, 0.0, ses.capacity_kwh);
    return next;
}

/// Trading cash of one hour under the source sign convention (buying enters
/// with positive weight). Use conventional_trade_cash for the economic view.
inline double trade_revenue(const TradePowers& trade, double spot_price, const SesConfig& cfg) {
    return spot_price *
           (trade.charge_kw * cfg.eta_ch - trade.discharge_kw / cfg.eta_dis) * kDtHours;
}

/// Sell revenue minus buy cost: the reading a market operator would expect.
inline double conventional_trade_cash(const TradePowers& trade, double spot_price) {
    return spot_price * (trade.discharge_kw - trade.charge_kw) * kDtHours;
}

/// Linearized cycle-wear cost applied to total physical discharge.
inline double degradation_cost(const TradePowers& trade, const HourFlows& flows,
                               const SesConfig& cfg) {
    const double discharge = trade.discharge_kw + flows.physical_withdraw();
    return (cfg.k_e / 100.0) * cfg.gamma_ses * discharge * kDtHours;
}

/// Wholesale cash of the virtually routed flows: (R^VS, C^VS) increments.
inline std::pair<double, double> virtual_cash(const HourFlows& flows, double spot_price) {
    return {flows.virtual_deposit() * spot_price * kDtHours,
            flows.virtual_withdraw() * spot_price * kDtHours};
}

// ---- standalone household baseline -------------------------------------------

/// Greedy self-consumption trace of one prosumer running its own battery:
/// charge surplus, discharge deficits. An hour is billed (at full deficit)
/// only when demand exceeds PV and the battery is empty.
struct StandaloneTrace {
    std::vector<double> hourly_bill;  // $ per hour, same length as the series

    double day_bill(int day) const {
        double s = 0.0;
        for (int h = 0; h < kHoursPerDay; ++h) s += hourly_bill[day * kHoursPerDay + h];
        return s;
    }
    double total() const {
        return std::accumulate(hourly_bill.begin(), hourly_bill.end(), 0.0);
    }
};

inline StandaloneTrace baseline_bill(const Prosumer& p, const Tariffs& tariffs,
                                     const SesConfig& cfg) {
    StandaloneTrace tr;
    const std::size_t hours = p.demand_series.size();
    tr.hourly_bill.assign(hours, 0.0);
    double e = 0.5 * p.ess_capacity_kwh;
    for (std::size_t t = 0; t < hours; ++t) {
        const double g = p.pv_series[t], d = p.demand_series[t];
        if (g > d) {
            const double surplus = std::min(g - d, p.ess_power_kw);
            const double room = (p.ess_capacity_kwh - e) / cfg.eta_ch / kDtHours;
            e += std::min(surplus, room) * cfg.eta_ch * kDtHours;
        } else if (d > g) {
            if (e <= 1e-12) {
                tr.hourly_bill[t] = tariffs.tou(t) * (d - g) * kDtHours;
            } else {
                const double deficit = std::min(d - g, p.ess_power_kw);
                const double avail = e * cfg.eta_dis / kDtHours;  // deliverable power
                e -= std::min(deficit, avail) / cfg.eta_dis * kDtHours;
            }
        }
    }
    return tr;
}

// ---- prosumer bills -----------------------------------------------------------

struct BillStatement {
    double net_load_cost = 0.0;   // C^NET_j
    double credit_revenue = 0.0;  // R^CR_j
    double credit_cost = 0.0;     // C^CR_j
    double bill = 0.0;            // B_j
    double baseline_bill = 0.0;   // B^ORI_j
    double reduction = 0.0;       // R_bill,j

    static BillStatement make(double net_load_cost, double credit_revenue, double credit_cost,
                              double baseline) {
        BillStatement b;
        b.net_load_cost = net_load_cost;
        b.credit_revenue = credit_revenue;
        b.credit_cost = credit_cost;
        b.bill = net_load_cost - credit_revenue + credit_cost;
        b.baseline_bill = baseline;
        b.reduction = baseline - b.bill;
        return b;
    }
};

/// Daily cash summary of the whole pool.
struct DayResult {
    double trade_revenue = 0.0;     // R^TRD
    double credit_revenue = 0.0;    // R^CR
    double credit_cost = 0.0;       // C^CR
    double virtual_revenue = 0.0;   // R^VS
    double virtual_cost = 0.0;      // C^VS
    double degradation_cost = 0.0;  // C^SES
    std::vector<BillStatement> bills;

    double ses_profit() const {
        return trade_revenue + credit_revenue - credit_cost + virtual_revenue - virtual_cost -
               degradation_cost;
    }
    double bill_reduction_sum() const {
        double s = 0.0;
        for (const auto& b : bills) s += b.reduction;
        return s;
    }
};

/// Daily objective: pool profit plus total household bill reduction.
inline double objective(const DayResult& day) {
    return day.ses_profit() + day.bill_reduction_sum();
}

}  // namespace sesim
