#pragma once

#include <array>
#include <memory>

#include "sesim/sim.hpp"

namespace sesim {

/// Normalized agent output, one value per action dimension in [-1, 1].
using RawAction = std::array<double, 4>;

/// Affine map from the agent's normalized outputs to bounded coefficients and
/// trade powers. Simultaneous charge/discharge requests are netted.
inline DwsCoefficients map_action(const RawAction& raw, const SesConfig& cfg,
                                  const SesState& ses) {
    auto unit = [](double x) { return std::clamp(x, -1.0, 1.0); };
    DwsCoefficients a;
    a.alpha_dps = 1.0 + (unit(raw[0]) + 1.0) / 2.0 * (cfg.alpha_dps_max - 1.0);
    a.alpha_wtd = cfg.alpha_wtd_min + (unit(raw[1]) + 1.0) / 2.0 * (1.0 - cfg.alpha_wtd_min);
    double ch = (unit(raw[2]) + 1.0) / 2.0 * ses.max_charge_kw;
    double dis = (unit(raw[3]) + 1.0) / 2.0 * ses.max_discharge_kw;
    const double net = ch - dis;
    a.trade_charge_kw = std::max(net, 0.0);
    a.trade_discharge_kw = std::max(-net, 0.0);
    return a;
}

/// Observation vector: the three factors, optionally augmented with a cyclic
/// hour-of-day encoding and day progress.
inline std::vector<double> make_state(const Factors& f, int hour_in_day, bool factors_only) {
    std::vector<double> s{f.f_sdr, f.f_soc, f.f_ao};
    if (!factors_only) {
        const double ang = 2.0 * M_PI * hour_in_day / kHoursPerDay;
        s.push_back(std::sin(ang));
        s.push_back(std::cos(ang));
        s.push_back(static_cast<double>(hour_in_day) / kHoursPerDay);
    }
    return s;
}

struct EnvStep {
    std::vector<double> state;
    double reward = 0.0;  // unscaled $, hourly objective increment
    bool done = false;
};

/// 24-step episodes, one per scenario day. Stepping is a pure function of
/// (scenario, config, participants, day, action log); no hidden randomness.
class Environment {
  public:
    Environment(const Scenario& scenario, const SesConfig& cfg, std::vector<int> participants,
                bool factors_only_state = false)
        : scenario_(&scenario),
          cfg_(cfg),
          participants_(std::move(participants)),
          factors_only_(factors_only_state) {}

    int state_dim() const { return factors_only_ ? 3 : 6; }
    static constexpr int action_dim() { return 4; }
    const SesConfig& config() const { return cfg_; }
    const SesState& ses() const { return sim_->ses(); }
    SesSimulation& sim() { return *sim_; }

    std::vector<double> reset(int day, bool record_trace = false) {
        if (day < 0 || day >= scenario_->days) throw ConfigError("reset: day out of range");
        sim_ = std::make_unique<SesSimulation>(*scenario_, cfg_, participants_, day,
                                               record_trace);
        hour_in_day_ = 0;
        return observe();
    }

    EnvStep step(const RawAction& raw) {
        if (!sim_ || hour_in_day_ >= kHoursPerDay) throw ConfigError("step: episode not active");
        const DwsCoefficients action = map_action(raw, cfg_, sim_->ses());
        EnvStep out;
        out.reward = sim_->apply(action);
        ++hour_in_day_;
        out.done = hour_in_day_ == kHoursPerDay;
        if (!out.done) out.state = observe();
        return out;
    }

    /// Completed-day cash summary; valid once done.
    const DayResult& day_result() const { return sim_->completed_days().back(); }

  private:
    std::vector<double> observe() {
        return make_state(sim_->peek_factors(), hour_in_day_, factors_only_);
    }

    const Scenario* scenario_;
    SesConfig cfg_;
    std::vector<int> participants_;
    bool factors_only_;
    std::unique_ptr<SesSimulation> sim_;
    int hour_in_day_ = 0;
};

}  // namespace sesim
