#pragma once

#include "sesim/td3.hpp"

namespace sesim {

inline constexpr int kConstructionDays = 7;
inline constexpr double kProfitFloor = 0.8;      // of construction-period mean
inline constexpr int kLowProfitDaysToRebuild = 7;

/// Ablation switches. Case 1 = everything on; Case 2 drops trigger-based
/// virtual operation; Case 3 drops reconstruction; Case 4 fixes the
/// coefficients at 1 and skips matching.
struct CaseConfig {
    bool dynamic_coefficients = true;
    bool matching = true;
    bool virtual_ops = true;
    bool reconstruction = true;

    static CaseConfig from_case(int number) {
        CaseConfig c;
        switch (number) {
            case 1: break;
            case 2: c.virtual_ops = false; break;
            case 3: c.reconstruction = false; break;
            case 4:
                c.dynamic_coefficients = false;
                c.matching = false;
                break;
            default: throw ConfigError("unknown case: " + std::to_string(number));
        }
        return c;
    }
};

/// Disable trigger-based virtual routing by making the trigger bands
/// unreachable (factors live in [0,1] and the comparisons are strict).
/// Feasibility rerouting inside step_soc is unaffected.
inline SesConfig apply_case(SesConfig cfg, const CaseConfig& c) {
    if (!c.virtual_ops) {
        cfg.beta_sdr_low = cfg.beta_soc_low = cfg.beta_ao_low = 0.0;
        cfg.beta_sdr_up = cfg.beta_soc_up = cfg.beta_ao_up = 1.0;
    }
    if (!c.dynamic_coefficients) {
        cfg.alpha_dps_max = 1.0;
        cfg.alpha_wtd_min = 1.0;
    }
    return cfg;
}

// ---- policies ----------------------------------------------------------------

struct Policy {
    virtual ~Policy() = default;
    virtual RawAction act(std::span<const double> state) = 0;
};

struct AgentPolicy final : Policy {
    explicit AgentPolicy(Td3Agent& agent) : agent(&agent) {}
    RawAction act(std::span<const double> state) override { return agent->act(state, false); }
    Td3Agent* agent;
};

struct RandomPolicy final : Policy {
    explicit RandomPolicy(std::uint64_t seed) : rng(seed) {}
    RawAction act(std::span<const double>) override {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        return {u(rng), u(rng), u(rng), u(rng)};
    }
    std::mt19937_64 rng;
};

/// Never trade, neutral coefficients: the do-nothing reference.
struct PassivePolicy final : Policy {
    RawAction act(std::span<const double>) override { return {1.0, 1.0, -1.0, -1.0}; }
};

// ---- phase bookkeeping ---------------------------------------------------------

struct Phase {
    enum class Kind { Construction, Operation };
    Kind kind = Kind::Construction;
    int day_index = 0;
    double reference_profit = 0.0;  // construction-period mean daily pool profit
    int below_count = 0;            // consecutive sub-80% operation days

    /// Feed one operation day's profit; true when reconstruction must fire.
    bool record_operation_day(double daily_profit) {
        if (daily_profit < kProfitFloor * reference_profit)
            ++below_count;
        else
            below_count = 0;
        return below_count >= kLowProfitDaysToRebuild;
    }
};

// ---- drivers -------------------------------------------------------------------

/// Step a simulation through whole days under a policy.
inline void simulate_days(SesSimulation& sim, Policy& policy, const SesConfig& cfg, int n_days,
                          bool factors_only = false) {
    for (int d = 0; d < n_days; ++d) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            const auto state = make_state(sim.peek_factors(), h, factors_only);
            sim.apply(map_action(policy.act(state), cfg, sim.ses()));
        }
    }
}

/// Per-prosumer totals across a span of completed days.
inline std::vector<BillStatement> total_bills(const std::vector<DayResult>& days) {
    if (days.empty()) return {};
    std::vector<BillStatement> totals(days[0].bills.size());
    for (const auto& day : days)
        for (std::size_t j = 0; j < day.bills.size(); ++j) {
            totals[j].net_load_cost += day.bills[j].net_load_cost;
            totals[j].credit_revenue += day.bills[j].credit_revenue;
            totals[j].credit_cost += day.bills[j].credit_cost;
            totals[j].bill += day.bills[j].bill;
            totals[j].baseline_bill += day.bills[j].baseline_bill;
            totals[j].reduction += day.bills[j].reduction;
        }
    return totals;
}

struct ConstructionResult {
    std::vector<DayResult> days;
    std::vector<BillStatement> bill_totals;  // indexed like the recruit pool
    MatchOutcome matching;                   // ids are recruit-pool indices
    double mean_daily_profit = 0.0;
    std::vector<DwsCoefficients> coeff_history;
};

/// Trial period: run every recruit for kConstructionDays, then apply the
/// mutual-selection contract (vacuous when matching is disabled).
inline ConstructionResult run_construction(const Scenario& scenario, const SesConfig& cfg,
                                           const CaseConfig& case_cfg, Policy& policy,
                                           const std::vector<int>& recruits, int start_day,
                                           bool factors_only = false) {
    SesSimulation sim(scenario, cfg, recruits, start_day);
    simulate_days(sim, policy, cfg, kConstructionDays, factors_only);

    ConstructionResult out;
    out.days = sim.completed_days();
    out.bill_totals = total_bills(out.days);
    out.coeff_history = sim.coefficient_history();
    const double xi =
        case_cfg.matching ? contract_threshold(cfg.xi_pro, cfg.xi_esp) : 0.0;
    out.matching = evaluate_matching(out.bill_totals, xi);
    if (!case_cfg.matching) {  // contract disabled entirely: everyone stays
        out.matching.retained.resize(recruits.size());
        for (std::size_t j = 0; j < recruits.size(); ++j)
            out.matching.retained[j] = static_cast<int>(j);
        out.matching.exited.clear();
    }
    for (const auto& d : out.days) out.mean_daily_profit += d.ses_profit();
    out.mean_daily_profit /= static_cast<double>(out.days.size());
    return out;
}

struct OperationResult {
    std::vector<DayResult> days;
    std::vector<DwsCoefficients> coeff_history;
    bool reconstruct = false;  // the 80% monitor fired
    int days_run = 0;
};

/// Long-term operation with the profit monitor; stops at the horizon or when
/// seven consecutive days fall below 80% of the construction-period mean.
inline OperationResult run_operation(const Scenario& scenario, const SesConfig& cfg,
                                     Policy& policy, const std::vector<int>& retained,
                                     int start_day, int end_day, double reference_profit,
                                     bool monitor_enabled, bool factors_only = false) {
    OperationResult out;
    if (retained.empty() || start_day >= end_day) return out;
    SesSimulation sim(scenario, cfg, retained, start_day);
    Phase phase{Phase::Kind::Operation, start_day, reference_profit, 0};
    for (int day = start_day; day < end_day; ++day) {
        simulate_days(sim, policy, cfg, 1, factors_only);
        ++out.days_run;
        const double profit = sim.completed_days().back().ses_profit();
        if (phase.record_operation_day(profit) && monitor_enabled) {
            out.reconstruct = true;
            break;
        }
    }
    out.days = sim.completed_days();
    out.coeff_history = sim.coefficient_history();
    return out;
}

struct RunSummary {
    std::vector<DayResult> days;             // construction + operation, in order
    std::vector<int> participants_per_day;
    std::vector<DwsCoefficients> coeff_history;
    MatchOutcome first_matching;             // from the first construction
    std::vector<BillStatement> first_construction_bills;
    int reconstructions = 0;

    double mean_daily_objective() const {
        double s = 0.0;
        for (const auto& d : days) s += objective(d);
        return days.empty() ? 0.0 : s / static_cast<double>(days.size());
    }
    double total_objective() const {
        double s = 0.0;
        for (const auto& d : days) s += objective(d);
        return s;
    }
};

/// Full lifecycle over the scenario horizon: construction, matching,
/// operation, and (case permitting) reconstruction with the original
/// recruit pool.
inline RunSummary run_case(const Scenario& scenario, const SesConfig& base_cfg,
                           const CaseConfig& case_cfg, Policy& policy,
                           bool factors_only = false) {
    const SesConfig cfg = apply_case(base_cfg, case_cfg);
    std::vector<int> recruits(scenario.prosumers.size());
    for (std::size_t j = 0; j < recruits.size(); ++j) recruits[j] = static_cast<int>(j);

    RunSummary summary;
    int day = 0;
    bool first = true;
    while (day + kConstructionDays <= scenario.days) {
        auto cons =
            run_construction(scenario, cfg, case_cfg, policy, recruits, day, factors_only);
        if (first) {
            summary.first_matching = cons.matching;
            summary.first_construction_bills = cons.bill_totals;
            first = false;
        }
        for (const auto& d : cons.days) {
            summary.days.push_back(d);
            summary.participants_per_day.push_back(static_cast<int>(recruits.size()));
        }
        summary.coeff_history.insert(summary.coeff_history.end(), cons.coeff_history.begin(),
                                     cons.coeff_history.end());
        day += kConstructionDays;

        std::vector<int> retained;
        for (int local : cons.matching.retained) retained.push_back(recruits[local]);
        if (retained.empty()) break;  // nobody signed; the pool dissolves

        auto op = run_operation(scenario, cfg, policy, retained, day, scenario.days,
                                cons.mean_daily_profit, case_cfg.reconstruction, factors_only);
        for (const auto& d : op.days) {
            summary.days.push_back(d);
            summary.participants_per_day.push_back(static_cast<int>(retained.size()));
        }
        summary.coeff_history.insert(summary.coeff_history.end(), op.coeff_history.begin(),
                                     op.coeff_history.end());
        day += op.days_run;
        if (!op.reconstruct) break;
        ++summary.reconstructions;
    }
    return summary;
}

}  // namespace sesim
