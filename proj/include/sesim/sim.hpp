#pragma once

#include "sesim/data.hpp"
#include "sesim/matching.hpp"

namespace sesim {

/// Everything that happened in one simulated hour, sufficient to recompute
/// every cash figure from scratch.
struct HourTrace {
    long hour = 0;  // global scenario hour
    Factors factors;
    DwsCoefficients coeffs;       // as issued
    TradePowers trade;            // post-repair
    HourFlows flows;              // post-routing, post-repair
    double spot = 0.0;
    double energy_after = 0.0;
    double reward = 0.0;          // hourly objective increment
    double trade_revenue = 0.0;
    double degradation_cost = 0.0;
    double virtual_revenue = 0.0;
    double virtual_cost = 0.0;
    double settlement_net = 0.0;  // day-end transfer terms folded into hour 23
    std::vector<double> credit_after;
};

/// One pool of prosumers stepping through scenario hours under issued
/// coefficients and trades. Deterministic; owns no RNG.
class SesSimulation {
  public:
    SesSimulation(const Scenario& scenario, const SesConfig& cfg, std::vector<int> participants,
                  int start_day = 0, bool record_trace = false)
        : scenario_(&scenario),
          cfg_(cfg),
          participants_(std::move(participants)),
          ao_(cfg.ao_window_hours),
          hour_(static_cast<long>(start_day) * kHoursPerDay),
          record_trace_(record_trace) {
        if (participants_.empty()) throw ConfigError("simulation needs participants");
        std::vector<Prosumer> active;
        for (int idx : participants_) {
            ppts_.push_back(&scenario.prosumers.at(idx));
            active.push_back(scenario.prosumers.at(idx));
        }
        ses_ = aggregate_ses(active);
        ledger_ = CreditLedger(participants_.size());
        day_cnet_.assign(participants_.size(), 0.0);
        for (const Prosumer* p : ppts_)
            baseline_.push_back(baseline_bill(*p, scenario.tariffs, cfg_));
        // Seed the arbitrage-factor window with the pre-start history so the
        // normalization is meaningful from hour 0. Strictly causal.
        for (long t = std::max(0L, hour_ - cfg_.ao_window_hours); t < hour_; ++t)
            ao_.normalize(forecast_spot(scenario.tariffs, t) - scenario.tariffs.spot(t));
    }

    std::size_t n_participants() const { return participants_.size(); }
    const std::vector<int>& participants() const { return participants_; }
    long hour() const { return hour_; }
    int day() const { return static_cast<int>(hour_ / kHoursPerDay); }
    const SesState& ses() const { return ses_; }
    const CreditLedger& ledger() const { return ledger_; }
    const std::vector<DayResult>& completed_days() const { return days_; }
    const std::vector<HourTrace>& trace() const { return trace_; }
    const std::vector<DwsCoefficients>& coefficient_history() const { return coeff_history_; }
    bool exhausted() const { return hour_ >= scenario_->hours(); }

    /// Share of simulated hours where a virtual-operation trigger fired.
    double trigger_rate() const {
        return total_hours_ > 0 ? static_cast<double>(trigger_hours_) / total_hours_ : 0.0;
    }

    /// Flows requested this hour and the resulting factor triple. Computed
    /// once per hour, before the operator picks an action.
    const Factors& peek_factors() {
        if (!pending_valid_) {
            pending_flows_ = HourFlows(participants_.size());
            for (std::size_t j = 0; j < ppts_.size(); ++j) {
                auto [dps, wtd] = prosumer_flows(*ppts_[j], hour_, ledger_.credit[j]);
                pending_flows_.deposit[j] = dps;
                pending_flows_.withdraw[j] = wtd;
            }
            pending_factors_ =
                compute_factors(ses_, pending_flows_, scenario_->tariffs, hour_, ao_);
            pending_valid_ = true;
        }
        return pending_factors_;
    }

    /// Execute the current hour under the issued action. Returns the hourly
    /// objective increment (day-end settlement folded into hour 23).
    double apply(const DwsCoefficients& action) {
        if (exhausted()) throw ConfigError("simulation past scenario horizon");
        peek_factors();
        pending_valid_ = false;

        HourFlows flows = pending_flows_;
        const auto [store_trig, extract_trig] = route_virtual(flows, pending_factors_, cfg_);
        if (store_trig || extract_trig) ++trigger_hours_;
        ++total_hours_;

        TradePowers trade{action.trade_charge_kw, action.trade_discharge_kw};
        ses_ = step_soc(ses_, flows, trade, cfg_);
        update_credit(ledger_, flows, action, cfg_);
        coeff_history_.push_back(action);

        const double spot = scenario_->tariffs.spot(hour_);
        const double r_trd = trade_revenue(trade, spot, cfg_);
        const double c_deg = degradation_cost(trade, flows, cfg_);
        auto [r_vs, c_vs] = virtual_cash(flows, spot);

        day_.trade_revenue += r_trd;
        day_.degradation_cost += c_deg;
        day_.virtual_revenue += r_vs;
        day_.virtual_cost += c_vs;

        // Prosumer-side hourly cash: baseline bill avoided minus net-load cost.
        double bill_delta = 0.0;
        const double tou = scenario_->tariffs.tou(hour_);
        for (std::size_t j = 0; j < ppts_.size(); ++j) {
            const double g = ppts_[j]->pv_series[hour_];
            const double d = ppts_[j]->demand_series[hour_];
            const double uncovered = std::max(d - g, 0.0) - flows.withdraw[j];
            const double cnet = tou * uncovered * kDtHours;
            day_cnet_[j] += cnet;
            bill_delta += baseline_[j].hourly_bill[hour_] - cnet;
        }

        double settlement_net = 0.0;
        const int h = static_cast<int>(hour_ % kHoursPerDay);
        if (h == kHoursPerDay - 1) settlement_net = finish_day();

        const double reward = r_trd + r_vs - c_vs - c_deg + bill_delta + settlement_net;

        if (record_trace_) {
            HourTrace tr;
            tr.hour = hour_;
            tr.factors = pending_factors_;
            tr.coeffs = action;
            tr.trade = trade;
            tr.flows = flows;
            tr.spot = spot;
            tr.energy_after = ses_.energy_kwh;
            tr.reward = reward;
            tr.trade_revenue = r_trd;
            tr.degradation_cost = c_deg;
            tr.virtual_revenue = r_vs;
            tr.virtual_cost = c_vs;
            tr.settlement_net = settlement_net;
            tr.credit_after = ledger_.credit;
            trace_.push_back(std::move(tr));
        }

        ++hour_;
        return reward;
    }

    /// Ledger dump per the service interface: day, hour, prosumer, credit,
    /// flows and virtual-routing flags. Requires record_trace.
    void dump_ledger_csv(std::ostream& out) const {
        out << "day,hour,prosumer,credit,deposit_kw,withdraw_kw,virtual_deposit,virtual_withdraw\n";
        char buf[160];
        for (const auto& tr : trace_) {
            for (std::size_t j = 0; j < participants_.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%ld,%ld,%d,%.9f,%.9f,%.9f,%d,%d\n",
                              tr.hour / kHoursPerDay, tr.hour % kHoursPerDay,
                              participants_[j], tr.credit_after[j], tr.flows.deposit[j],
                              tr.flows.withdraw[j], tr.flows.v_deposit[j] > 0.0,
                              tr.flows.v_withdraw[j] > 0.0);
                out << buf;
            }
        }
    }

  private:
    double finish_day() {
        const double mean_tou = day_mean_tou(scenario_->tariffs, ppts_, day());
        DaySettlement st = settle_day(ledger_, mean_tou, scenario_->tariffs, cfg_);
        day_.credit_revenue = st.ses_revenue;
        day_.credit_cost = st.ses_cost;

        double prosumer_settlement_net = 0.0;
        for (std::size_t j = 0; j < ppts_.size(); ++j) {
            day_.bills.push_back(BillStatement::make(day_cnet_[j], st.prosumer_revenue[j],
                                                     st.prosumer_cost[j],
                                                     baseline_[j].day_bill(day())));
            prosumer_settlement_net += st.prosumer_revenue[j] - st.prosumer_cost[j];
        }
        // The two settlement sides are mirrors; their sum is zero by identity
        // and both enter the objective explicitly.
        const double net =
            (st.ses_revenue - st.ses_cost) + prosumer_settlement_net;

        days_.push_back(std::move(day_));
        day_ = DayResult{};
        std::fill(day_cnet_.begin(), day_cnet_.end(), 0.0);
        return net;
    }

    const Scenario* scenario_;
    SesConfig cfg_;
    std::vector<int> participants_;
    std::vector<const Prosumer*> ppts_;
    std::vector<StandaloneTrace> baseline_;
    SesState ses_;
    CreditLedger ledger_;
    AoWindow ao_;
    long hour_;
    bool record_trace_;
    long trigger_hours_ = 0;
    long total_hours_ = 0;

    DayResult day_;
    std::vector<double> day_cnet_;
    std::vector<DayResult> days_;
    std::vector<DwsCoefficients> coeff_history_;
    std::vector<HourTrace> trace_;

    HourFlows pending_flows_;
    Factors pending_factors_;
    bool pending_valid_ = false;
};

}  // namespace sesim
