#pragma once

#include "sesim/train.hpp"

namespace sesim {

/// FNV-1a over the canonical config text; stamped on every report row so a
/// row is reproducible from (seed, config) alone.
inline std::uint64_t config_hash(const SesConfig& c) {
    std::ostringstream ss;
    ss.precision(17);
    ss << c.eta_ch << '|' << c.eta_dis << '|' << c.beta_fit << '|' << c.beta_tou << '|'
       << c.beta_sdr_up << '|' << c.beta_sdr_low << '|' << c.beta_soc_up << '|' << c.beta_soc_low
       << '|' << c.beta_ao_up << '|' << c.beta_ao_low << '|' << c.k_e << '|' << c.gamma_ses << '|'
       << c.xi_pro << '|' << c.xi_esp << '|' << c.alpha_dps_max << '|' << c.alpha_wtd_min << '|'
       << c.ao_window_hours;
    std::uint64_t h = 14695981039346656037ULL;
    for (char ch : ss.str()) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    return h;
}

/// Bill with neither PV self-storage nor the pool: every deficit bought at TOU.
inline double bill_without_ess(const Prosumer& p, const Tariffs& tariffs) {
    double s = 0.0;
    for (std::size_t t = 0; t < p.demand_series.size(); ++t)
        s += tariffs.tou(t) * std::max(p.demand_series[t] - p.pv_series[t], 0.0) * kDtHours;
    return s;
}

/// Characteristic grounding for the two-player profit split: the operator
/// alone owns no storage, the prosumer block alone is worth its standalone
/// battery savings, the grand coalition is worth the pool profit.
inline Allocation allocate_run(const Scenario& scenario, const SesConfig& cfg,
                               const std::vector<int>& retained, const RunSummary& run) {
    double v_pro = 0.0;
    std::vector<const Prosumer*> members;
    for (int idx : retained) {
        const Prosumer& p = scenario.prosumers[idx];
        members.push_back(&p);
        v_pro += bill_without_ess(p, scenario.tariffs) - baseline_bill(p, scenario.tariffs, cfg).total();
    }
    double v_grand = 0.0;
    for (const auto& d : run.days) v_grand += d.ses_profit();
    Allocation a = shapley_split(0.0, 0.0, v_pro, v_grand);
    a.per_prosumer = allocate_by_capacity(a.prosumer_pool, members);
    return a;
}

inline void write_daily_csv(const RunSummary& run, std::uint64_t seed, std::uint64_t cfg_hash,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "day,participants,trade_revenue,credit_revenue,credit_cost,virtual_revenue,"
           "virtual_cost,degradation_cost,ses_profit,bill_reduction,objective,seed,config\n";
    char buf[320];
    for (std::size_t d = 0; d < run.days.size(); ++d) {
        const auto& r = run.days[d];
        std::snprintf(buf, sizeof buf,
                      "%zu,%d,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%llu,%016llx\n", d,
                      run.participants_per_day[d], r.trade_revenue, r.credit_revenue,
                      r.credit_cost, r.virtual_revenue, r.virtual_cost, r.degradation_cost,
                      r.ses_profit(), r.bill_reduction_sum(), objective(r),
                      static_cast<unsigned long long>(seed),
                      static_cast<unsigned long long>(cfg_hash));
        out << buf;
    }
}

inline void write_matching_csv(const MatchOutcome& m, const std::vector<BillStatement>& bills,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "prosumer,baseline_bill,bill,ratio,retained\n";
    std::vector<bool> keep(bills.size(), false);
    for (int j : m.retained) keep[j] = true;
    char buf[160];
    for (std::size_t j = 0; j < bills.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%zu,%.9f,%.9f,%.9f,%d\n", j, bills[j].baseline_bill,
                      bills[j].bill, m.ratio[j], keep[j] ? 1 : 0);
        out << buf;
    }
}

struct XiSweepRow {
    double xi = 0.0;
    int retained = 0;
    double mean_daily_objective = 0.0;
    double mean_bill_reduction = 0.0;   // $/participant/day over the run
    double participant_profit = 0.0;    // allocated $/participant/day
    double esp_profit = 0.0;            // allocated $/day
    double g_dw = 1.0;
};

inline std::vector<XiSweepRow> sweep_xi(const Scenario& scenario, const SesConfig& base_cfg,
                                        Policy& policy, const std::vector<double>& grid) {
    std::vector<XiSweepRow> rows;
    for (double xi : grid) {
        SesConfig cfg = base_cfg;
        cfg.xi_pro = xi;
        cfg.xi_esp = 0.0;  // sweep isolates the prosumer-side threshold
        RunSummary run = run_case(scenario, cfg, CaseConfig::from_case(1), policy);

        XiSweepRow row;
        row.xi = xi;
        row.retained = static_cast<int>(run.first_matching.retained.size());
        row.mean_daily_objective = run.mean_daily_objective();
        row.g_dw = deposit_withdraw_gain(run.coeff_history);

        std::vector<int> retained;
        for (int local : run.first_matching.retained) retained.push_back(local);
        if (!retained.empty() && !run.days.empty()) {
            double red = 0.0;
            for (const auto& d : run.days) red += d.bill_reduction_sum();
            row.mean_bill_reduction =
                red / static_cast<double>(run.days.size() * retained.size());
            Allocation a = allocate_run(scenario, cfg, retained, run);
            row.esp_profit = a.esp_share / static_cast<double>(run.days.size());
            row.participant_profit =
                a.prosumer_pool / static_cast<double>(run.days.size() * retained.size());
        }
        rows.push_back(row);
    }
    return rows;
}

inline void write_xi_csv(const std::vector<XiSweepRow>& rows, std::uint64_t seed,
                         std::uint64_t cfg_hash, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "xi,retained,mean_daily_objective,mean_bill_reduction,participant_profit,"
           "esp_profit,g_dw,seed,config\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.2f,%d,%.9f,%.9f,%.9f,%.9f,%.9f,%llu,%016llx\n", r.xi,
                      r.retained, r.mean_daily_objective, r.mean_bill_reduction,
                      r.participant_profit, r.esp_profit, r.g_dw,
                      static_cast<unsigned long long>(seed),
                      static_cast<unsigned long long>(cfg_hash));
        out << buf;
    }
}

struct TriggerSweepCell {
    double beta_sdr_low = 0.0;
    double beta_ao_low = 0.0;
    double mean_daily_profit = 0.0;  // SES profit
    double trigger_rate = 0.0;       // share of hours with a fired trigger
};

inline std::vector<TriggerSweepCell> sweep_triggers(const Scenario& scenario,
                                                    const SesConfig& base_cfg, Policy& policy,
                                                    const std::vector<double>& grid) {
    std::vector<TriggerSweepCell> cells;
    for (double sdr_low : grid) {
        for (double ao_low : grid) {
            SesConfig cfg = base_cfg;
            cfg.beta_sdr_low = sdr_low;
            cfg.beta_sdr_up = 1.0 - sdr_low;
            cfg.beta_ao_low = ao_low;
            cfg.beta_ao_up = 1.0 - ao_low;

            SesSimulation sim(scenario, cfg, all_prosumers(scenario), 0);
            simulate_days(sim, policy, cfg, scenario.days);

            TriggerSweepCell cell;
            cell.beta_sdr_low = sdr_low;
            cell.beta_ao_low = ao_low;
            for (const auto& d : sim.completed_days()) cell.mean_daily_profit += d.ses_profit();
            cell.mean_daily_profit /= static_cast<double>(sim.completed_days().size());
            cell.trigger_rate = sim.trigger_rate();
            cells.push_back(cell);
        }
    }
    return cells;
}

inline void write_trigger_csv(const std::vector<TriggerSweepCell>& cells, std::uint64_t seed,
                              std::uint64_t cfg_hash, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "beta_sdr_low,beta_ao_low,mean_daily_profit,trigger_rate,seed,config\n";
    char buf[192];
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f,%.9f,%.9f,%llu,%016llx\n", c.beta_sdr_low,
                      c.beta_ao_low, c.mean_daily_profit, c.trigger_rate,
                      static_cast<unsigned long long>(seed),
                      static_cast<unsigned long long>(cfg_hash));
        out << buf;
    }
}

struct AblationRow {
    int case_number = 1;
    double participant_profit = 0.0;  // $/participant/day, mean over seeds
    double esp_profit = 0.0;          // $/day
    double total_objective = 0.0;     // $/day
    double loss_vs_case1 = 0.0;       // percent
    double participants = 0.0;        // mean retained count
};

inline void write_ablation_csv(const std::vector<AblationRow>& rows, std::uint64_t cfg_hash,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "case,participant_profit,esp_profit,total_objective,loss_vs_case1_pct,participants,"
           "config\n";
    char buf[192];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.9f,%.9f,%.9f,%.9f,%.2f,%016llx\n", r.case_number,
                      r.participant_profit, r.esp_profit, r.total_objective, r.loss_vs_case1,
                      r.participants, static_cast<unsigned long long>(cfg_hash));
        out << buf;
    }
}

}  // namespace sesim
