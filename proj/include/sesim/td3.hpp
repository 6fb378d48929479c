#pragma once

#include "sesim/mlp.hpp"
#include "sesim/replay.hpp"

namespace sesim {

struct Td3Config {
    int state_dim = 6;
    int hidden = 64;         // two hidden layers of this width
    double gamma = 0.9;
    double lr = 0.001;
    double momentum = 0.9;
    int policy_delay = 2;
    double polyak = 0.005;
    double target_noise = 0.2;
    double target_noise_clip = 0.5;
    double explore_noise = 0.1;
};

struct TrainLosses {
    double critic = 0.0;
    double actor = 0.0;
    bool actor_updated = false;
};

/// Twin-delayed actor-critic over hand-written dense networks. The actor
/// emits normalized actions in [-1,1]^4; callers map them to bounds.
class Td3Agent {
  public:
    Td3Agent() = default;
    Td3Agent(const Td3Config& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
        const int s = cfg.state_dim, h = cfg.hidden;
        actor_ = Mlp({s, h, h, 4}, Mlp::Output::Tanh);
        critic1_ = Mlp({s + 4, h, h, 1}, Mlp::Output::Linear);
        critic2_ = Mlp({s + 4, h, h, 1}, Mlp::Output::Linear);
        actor_.init(rng_);
        critic1_.init(rng_);
        critic2_.init(rng_);
        actor_t_ = actor_;
        critic1_t_ = critic1_;
        critic2_t_ = critic2_;
    }

    const Td3Config& config() const { return cfg_; }
    Mlp& actor() { return actor_; }
    Mlp& critic1() { return critic1_; }

    RawAction act(std::span<const double> state, bool explore) {
        std::vector<double> y;
        actor_.forward(state, y);
        RawAction a{};
        std::normal_distribution<double> noise(0.0, cfg_.explore_noise);
        for (int i = 0; i < 4; ++i) {
            a[i] = y[i];
            if (explore) a[i] = std::clamp(a[i] + noise(rng_), -1.0, 1.0);
        }
        return a;
    }

    double q_value(std::span<const double> state, const RawAction& action) {
        std::vector<double> in(state.begin(), state.end());
        in.insert(in.end(), action.begin(), action.end());
        std::vector<double> y;
        critic1_.forward(in, y);
        return y[0];
    }

    /// One gradient step on a minibatch: clipped double-Q critic targets with
    /// smoothed target actions; actor and target nets update every
    /// policy_delay calls.
    TrainLosses train_on_batch(const std::vector<TransitionPtr>& batch) {
        TrainLosses losses;
        if (batch.empty()) return losses;
        const double inv_b = 1.0 / static_cast<double>(batch.size());
        std::normal_distribution<double> noise(0.0, cfg_.target_noise);

        std::vector<double> targets(batch.size());
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const auto& t = *batch[b];
            double q_next = 0.0;
            if (!t.done) {
                std::vector<double> a_next;
                actor_t_.forward(t.next_state, a_next);
                std::vector<double> in(t.next_state.begin(), t.next_state.end());
                for (int i = 0; i < 4; ++i) {
                    const double eps = std::clamp(noise(rng_), -cfg_.target_noise_clip,
                                                  cfg_.target_noise_clip);
                    in.push_back(std::clamp(a_next[i] + eps, -1.0, 1.0));
                }
                std::vector<double> q1, q2;
                critic1_t_.forward(in, q1);
                critic2_t_.forward(in, q2);
                q_next = std::min(q1[0], q2[0]);
            }
            targets[b] = t.reward + cfg_.gamma * (t.done ? 0.0 : 1.0) * q_next;
        }

        Mlp::Cache cache;
        std::vector<double> q, dy(1);
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const auto& t = *batch[b];
            std::vector<double> in(t.state.begin(), t.state.end());
            in.insert(in.end(), t.action.begin(), t.action.end());
            for (Mlp* critic : {&critic1_, &critic2_}) {
                critic->forward(in, q, &cache);
                const double err = q[0] - targets[b];
                losses.critic += err * err * inv_b * 0.5;
                dy[0] = 2.0 * err * inv_b;
                critic->backward(cache, dy);
            }
        }
        critic1_.sgd_step(cfg_.lr, cfg_.momentum);
        critic2_.sgd_step(cfg_.lr, cfg_.momentum);

        if (++updates_ % cfg_.policy_delay == 0) {
            losses.actor_updated = true;
            Mlp::Cache actor_cache, critic_cache;
            std::vector<double> a, qv, din;
            for (const auto& tp : batch) {
                const auto& t = *tp;
                actor_.forward(t.state, a, &actor_cache);
                std::vector<double> in(t.state.begin(), t.state.end());
                in.insert(in.end(), a.begin(), a.end());
                critic1_.forward(in, qv, &critic_cache);
                losses.actor -= qv[0] * inv_b;
                dy[0] = -inv_b;  // maximize Q
                critic1_.backward(critic_cache, dy, &din);
                actor_.backward(actor_cache,
                                std::span<const double>(din).subspan(cfg_.state_dim, 4));
            }
            critic1_.zero_grads();  // critic params are fixed in the actor step
            actor_.sgd_step(cfg_.lr, cfg_.momentum);

            actor_t_.polyak_from(actor_, cfg_.polyak);
            critic1_t_.polyak_from(critic1_, cfg_.polyak);
            critic2_t_.polyak_from(critic2_, cfg_.polyak);
        }
        return losses;
    }

    // ---- checkpointing -------------------------------------------------------

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot write checkpoint: " + path);
        out.precision(17);
        out << "sesim-td3 v1\n";
        out << cfg_.state_dim << ' ' << cfg_.hidden << ' ' << cfg_.gamma << ' ' << cfg_.lr << ' '
            << cfg_.momentum << ' ' << cfg_.policy_delay << ' ' << cfg_.polyak << ' '
            << cfg_.target_noise << ' ' << cfg_.target_noise_clip << ' ' << cfg_.explore_noise
            << ' ' << updates_ << '\n';
        for (const Mlp* net :
             {&actor_, &critic1_, &critic2_, &actor_t_, &critic1_t_, &critic2_t_}) {
            for (double p : net->params()) out << p << ' ';
            out << '\n';
        }
    }

    static Td3Agent load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read checkpoint: " + path);
        std::string magic, version;
        in >> magic >> version;
        if (magic != "sesim-td3" || version != "v1")
            throw ConfigError("unrecognized checkpoint format: " + path);
        Td3Config cfg;
        std::uint64_t updates = 0;
        in >> cfg.state_dim >> cfg.hidden >> cfg.gamma >> cfg.lr >> cfg.momentum >>
            cfg.policy_delay >> cfg.polyak >> cfg.target_noise >> cfg.target_noise_clip >>
            cfg.explore_noise >> updates;
        Td3Agent agent(cfg, 0);
        agent.updates_ = updates;
        for (Mlp* net : {&agent.actor_, &agent.critic1_, &agent.critic2_, &agent.actor_t_,
                         &agent.critic1_t_, &agent.critic2_t_}) {
            for (double& p : net->params())
                if (!(in >> p)) throw ConfigError("truncated checkpoint: " + path);
        }
        return agent;
    }

  private:
    Td3Config cfg_;
    Mlp actor_, critic1_, critic2_;
    Mlp actor_t_, critic1_t_, critic2_t_;
    std::mt19937_64 rng_;
    std::uint64_t updates_ = 0;
};

}  // namespace sesim
