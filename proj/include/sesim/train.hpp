#pragma once

#include <limits>
#include <optional>

#include "sesim/lifecycle.hpp"

namespace sesim {

enum class AgentKind { Cnepr, PlainTd3, Random };

inline AgentKind parse_agent_kind(const std::string& s) {
    if (s == "cnepr") return AgentKind::Cnepr;
    if (s == "td3") return AgentKind::PlainTd3;
    if (s == "random") return AgentKind::Random;
    throw ConfigError("unknown agent kind: " + s + " (expected cnepr|td3|random)");
}

struct TrainConfig {
    AgentKind kind = AgentKind::Cnepr;
    std::uint64_t seed = 1;
    int episodes = 2000;
    int batch = 64;
    std::size_t warmup_steps = 500;
    double reward_scale = 1e-3;  // rewards are thousands of $/day; scaled for stable critics
    double rho_high = 0.8;
    double tau = 0.6;
    int bins = 5;  // L = M = N
    std::size_t pool_capacity = 10000;
    std::size_t uniform_capacity = 50000;
    // keep the best greedy-eval weights seen during training; TD3 runs drift
    // in and out of good policies, so the final episode is a bad place to stop
    int eval_every = 200;  // episodes between greedy evals (0 disables)
    int eval_days = 7;     // horizon prefix scored by that eval
    bool factors_only = false;
    int case_number = 1;
};

struct TrainResult {
    Td3Agent agent;
    std::vector<double> episode_returns;  // unscaled $/day
};

/// Bounded uniform replay, the plain-TD3 ablation baseline.
class UniformBuffer {
  public:
    explicit UniformBuffer(std::size_t capacity) : capacity_(capacity) {}
    void insert(TransitionPtr t) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[next_] = std::move(t);
            next_ = (next_ + 1) % capacity_;
        }
    }
    std::size_t size() const { return data_.size(); }
    std::vector<TransitionPtr> sample(std::size_t batch, std::mt19937_64& rng) const {
        return sample_minibatch(data_, batch, rng);
    }

  private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<TransitionPtr> data_;
};

inline std::vector<int> all_prosumers(const Scenario& scenario) {
    std::vector<int> ids(scenario.prosumers.size());
    for (std::size_t j = 0; j < ids.size(); ++j) ids[j] = static_cast<int>(j);
    return ids;
}

/// Train an agent on 24-step day episodes over the full recruit pool.
/// Deterministic given (scenario, config, seed).
inline TrainResult train(const Scenario& scenario, const SesConfig& base_cfg,
                         const TrainConfig& tc) {
    const SesConfig cfg = apply_case(base_cfg, CaseConfig::from_case(tc.case_number));
    Environment env(scenario, cfg, all_prosumers(scenario), tc.factors_only);

    Td3Config ac;
    ac.state_dim = env.state_dim();
    TrainResult out{Td3Agent(ac, tc.seed), {}};
    std::mt19937_64 rng(tc.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<int> pick_day(0, scenario.days - 1);
    std::uniform_real_distribution<double> uaction(-1.0, 1.0);

    PoolSet pools(tc.bins, tc.bins, tc.bins, tc.pool_capacity);
    UniformBuffer uniform(tc.uniform_capacity);
    std::size_t steps = 0;

    const int eval_days = std::min(tc.eval_days, scenario.days);
    auto greedy_score = [&]() {
        AgentPolicy greedy(out.agent);
        SesSimulation sim(scenario, cfg, all_prosumers(scenario), 0);
        simulate_days(sim, greedy, cfg, eval_days, tc.factors_only);
        double s = 0.0;
        for (const auto& d : sim.completed_days()) s += objective(d);
        return s / static_cast<double>(eval_days);
    };
    double best_score = -std::numeric_limits<double>::infinity();
    std::optional<Td3Agent> best;

    for (int ep = 0; ep < tc.episodes; ++ep) {
        auto state = env.reset(pick_day(rng));
        double ep_return = 0.0;
        for (int h = 0; h < kHoursPerDay; ++h) {
            RawAction raw;
            if (tc.kind == AgentKind::Random || steps < tc.warmup_steps)
                raw = {uaction(rng), uaction(rng), uaction(rng), uaction(rng)};
            else
                raw = out.agent.act(state, true);

            EnvStep step = env.step(raw);
            ep_return += step.reward;

            if (tc.kind != AgentKind::Random) {
                auto t = std::make_shared<LabeledTransition>();
                t->state = state;
                t->action = raw;
                t->reward = step.reward * tc.reward_scale;
                t->next_state = step.done ? state : step.state;
                t->done = step.done;
                PoolSet::assign_labels(*t, tc.bins, tc.bins, tc.bins);
                if (tc.kind == AgentKind::Cnepr)
                    pools.insert(t);
                else
                    uniform.insert(std::move(t));

                ++steps;
                if (steps >= tc.warmup_steps) {
                    std::vector<TransitionPtr> batch;
                    if (tc.kind == AgentKind::Cnepr)
                        batch = pools.draw_batch(tc.rho_high, tc.tau,
                                                 static_cast<std::size_t>(tc.batch), rng);
                    else if (uniform.size() >= static_cast<std::size_t>(tc.batch))
                        batch = uniform.sample(static_cast<std::size_t>(tc.batch), rng);
                    if (!batch.empty()) out.agent.train_on_batch(batch);
                }
            } else {
                ++steps;
            }
            if (!step.done) state = std::move(step.state);
        }
        out.episode_returns.push_back(ep_return);

        if (tc.kind != AgentKind::Random && tc.eval_every > 0 &&
            (ep + 1) % tc.eval_every == 0 && steps >= tc.warmup_steps) {
            const double score = greedy_score();
            if (score > best_score) {
                best_score = score;
                best = out.agent;
            }
        }
    }
    if (best && greedy_score() < best_score) out.agent = std::move(*best);
    return out;
}

inline void write_curve_csv(const std::vector<double>& returns, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "episode,return\n";
    char buf[64];
    for (std::size_t i = 0; i < returns.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.9f\n", i, returns[i]);
        out << buf;
    }
}

/// Mean daily objective of a policy over the whole scenario horizon with the
/// full population (no matching); the apples-to-apples learning-signal metric.
inline double eval_mean_daily_objective(const Scenario& scenario, const SesConfig& cfg,
                                        Policy& policy, bool factors_only = false) {
    SesSimulation sim(scenario, cfg, all_prosumers(scenario), 0);
    simulate_days(sim, policy, cfg, scenario.days, factors_only);
    double s = 0.0;
    for (const auto& d : sim.completed_days()) s += objective(d);
    return s / static_cast<double>(sim.completed_days().size());
}

}  // namespace sesim
