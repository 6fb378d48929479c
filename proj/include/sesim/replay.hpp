#pragma once

#include <deque>
#include <memory>
#include <ostream>
#include <random>

#include "sesim/env.hpp"

namespace sesim {

/// One MDP step plus the three sub-label indices obtained by binning the
/// state factors. Labels are 1-based.
struct LabeledTransition {
    std::vector<double> state;
    RawAction action{};  // normalized agent output
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
    int l = 1, m = 1, n = 1;
};

using TransitionPtr = std::shared_ptr<const LabeledTransition>;

inline int bin_label(double f, int bins) {
    const int idx = static_cast<int>(std::clamp(f, 0.0, 1.0) * bins) + 1;
    return std::min(idx, bins);
}

enum class LabelAxis { Sdr = 0, Soc = 1, Ao = 2 };

/// The (L+M+N) coupled pool pairs: a high-value and a low-value bounded FIFO
/// per sub-label, with a running mean reward per pair. One stored transition
/// is referenced from exactly one pair per axis.
class PoolSet {
  public:
    struct Pair {
        std::deque<TransitionPtr> high;  // pool with subscript 1
        std::deque<TransitionPtr> low;   // pool with subscript 2
        double mean_reward = 0.0;
        std::size_t size() const { return high.size() + low.size(); }
    };

    PoolSet(int L = 5, int M = 5, int N = 5, std::size_t capacity = 10000,
            double mean_decay = 0.99)
        : L_(L), M_(M), N_(N), capacity_(capacity), decay_(mean_decay), pairs_(L + M + N) {
        if (L < 1 || M < 1 || N < 1) throw ConfigError("PoolSet needs at least one bin per axis");
    }

    int bins(LabelAxis axis) const { return axis == LabelAxis::Sdr ? L_ : axis == LabelAxis::Soc ? M_ : N_; }
    std::size_t pool_count() const { return pairs_.size() * 2; }
    std::size_t capacity() const { return capacity_; }
    std::size_t total_inserted() const { return inserted_; }

    const Pair& pair(LabelAxis axis, int label) const { return pairs_[pair_index(axis, label)]; }

    /// Labels of the most recently inserted transition (the "current" labels
    /// used for neighborhood reconstruction).
    std::array<int, 3> last_labels() const { return {last_l_, last_m_, last_n_}; }

    static void assign_labels(LabeledTransition& t, int L, int M, int N) {
        t.l = bin_label(t.state.at(0), L);
        t.m = bin_label(t.state.at(1), M);
        t.n = bin_label(t.state.at(2), N);
    }

    /// Place the transition once per axis: above the pair's running mean goes
    /// to the high pool, otherwise (ties included) to the low pool. The mean
    /// is renewed after each placement. FIFO eviction at capacity.
    void insert(TransitionPtr t) {
        if (t->l < 1 || t->l > L_ || t->m < 1 || t->m > M_ || t->n < 1 || t->n > N_)
            throw ContractViolation("transition labels out of range");
        place(pairs_[pair_index(LabelAxis::Sdr, t->l)], t);
        place(pairs_[pair_index(LabelAxis::Soc, t->m)], t);
        place(pairs_[pair_index(LabelAxis::Ao, t->n)], t);
        last_l_ = t->l;
        last_m_ = t->m;
        last_n_ = t->n;
        ++inserted_;
    }

    /// Training batch via the full pipeline (label selection under the
    /// distance bound, high/low recombination, uniform minibatch) without
    /// materializing intermediate pools. Distribution-equivalent to
    /// recombine + reconstruct + sample_minibatch.
    std::vector<TransitionPtr> draw_batch(double rho_high, double tau, std::size_t batch,
                                          std::mt19937_64& rng, int max_retry = 64) const {
        const auto [l, m, n] = select_labels(tau, rng, max_retry);
        const Pair* sel[3] = {&pair(LabelAxis::Sdr, l), &pair(LabelAxis::Soc, m),
                              &pair(LabelAxis::Ao, n)};
        double weights[3];
        double total = 0.0;
        for (int i = 0; i < 3; ++i) total += weights[i] = static_cast<double>(sel[i]->size());
        std::vector<TransitionPtr> out;
        if (total == 0.0) return out;
        out.reserve(batch);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (std::size_t b = 0; b < batch; ++b) {
            double r = uni(rng) * total;
            int i = 0;
            while (i < 2 && r >= weights[i]) r -= weights[i++];
            out.push_back(draw_from_pair(*sel[i], rho_high, rng));
        }
        return out;
    }

    /// Label triple selection under the normalized distance bound, with
    /// bounded retries and exact-label fallback.
    std::array<int, 3> select_labels(double tau, std::mt19937_64& rng, int max_retry = 64) const {
        std::uniform_int_distribution<int> dl(1, L_), dm(1, M_), dn(1, N_);
        for (int r = 0; r < max_retry; ++r) {
            const int l = dl(rng), m = dm(rng), n = dn(rng);
            if (label_distance(l, m, n) <= tau &&
                (pair(LabelAxis::Sdr, l).size() + pair(LabelAxis::Soc, m).size() +
                 pair(LabelAxis::Ao, n).size()) > 0)
                return {l, m, n};
        }
        return {last_l_, last_m_, last_n_};  // fallback: exact-label pools
    }

    /// |l'-l|/L + |m'-m|/M + |n'-n|/N against the last inserted labels.
    double label_distance(int l, int m, int n) const {
        return std::abs(last_l_ - l) / static_cast<double>(L_) +
               std::abs(last_m_ - m) / static_cast<double>(M_) +
               std::abs(last_n_ - n) / static_cast<double>(N_);
    }

    static TransitionPtr draw_from_pair(const Pair& p, double rho_high, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const std::deque<TransitionPtr>* pool =
            (uni(rng) < rho_high) ? &p.high : &p.low;
        if (pool->empty()) pool = pool == &p.high ? &p.low : &p.high;
        std::uniform_int_distribution<std::size_t> pick(0, pool->size() - 1);
        return (*pool)[pick(rng)];
    }

    void dump_occupancy_csv(std::ostream& out) const {
        out << "axis,label,high_size,low_size,mean_reward\n";
        const char* names[3] = {"sdr", "soc", "ao"};
        for (int axis = 0; axis < 3; ++axis) {
            const int bins_n = bins(static_cast<LabelAxis>(axis));
            for (int label = 1; label <= bins_n; ++label) {
                const Pair& p = pair(static_cast<LabelAxis>(axis), label);
                out << names[axis] << ',' << label << ',' << p.high.size() << ',' << p.low.size()
                    << ',' << p.mean_reward << '\n';
            }
        }
    }

  private:
    std::size_t pair_index(LabelAxis axis, int label) const {
        const int base = axis == LabelAxis::Sdr ? 0 : axis == LabelAxis::Soc ? L_ : L_ + M_;
        return static_cast<std::size_t>(base + label - 1);
    }

    void place(Pair& p, const TransitionPtr& t) {
        auto& pool = t->reward > p.mean_reward ? p.high : p.low;
        pool.push_back(t);
        if (pool.size() > capacity_) pool.pop_front();
        p.mean_reward = decay_ * p.mean_reward + (1.0 - decay_) * t->reward;
    }

    int L_, M_, N_;
    std::size_t capacity_;
    double decay_;
    std::vector<Pair> pairs_;
    int last_l_ = 1, last_m_ = 1, last_n_ = 1;
    std::size_t inserted_ = 0;
};

// ---- materialized pipeline stages ------------------------------------------

struct CombinedPool {
    LabelAxis axis{};
    int label = 1;
    std::vector<TransitionPtr> samples;
};

/// Build one combined pool per sub-label by drawing each slot from the high
/// pool with probability rho_high, else from the low pool. Empty pairs are
/// skipped.
inline std::vector<CombinedPool> recombine(const PoolSet& pools, double rho_high,
                                           std::mt19937_64& rng) {
    if (!(rho_high > 0.0 && rho_high < 1.0) && rho_high != 1.0 && rho_high != 0.0)
        throw ConfigError("rho_high must be a probability");
    std::vector<CombinedPool> out;
    for (int axis = 0; axis < 3; ++axis) {
        const auto a = static_cast<LabelAxis>(axis);
        for (int label = 1; label <= pools.bins(a); ++label) {
            const auto& p = pools.pair(a, label);
            if (p.size() == 0) continue;
            CombinedPool c{a, label, {}};
            c.samples.reserve(p.size());
            for (std::size_t i = 0; i < p.size(); ++i)
                c.samples.push_back(PoolSet::draw_from_pair(p, rho_high, rng));
            out.push_back(std::move(c));
        }
    }
    return out;
}

/// Select one combined pool per axis whose labels satisfy the normalized
/// distance bound around (l', m', n'), retrying on rejection; the accepted
/// pools merge into the training pool.
inline std::vector<TransitionPtr> reconstruct(const std::vector<CombinedPool>& combined,
                                              std::array<int, 3> current, double tau,
                                              std::array<int, 3> bins, std::mt19937_64& rng,
                                              int max_retry = 64) {
    if (tau < 0.0) throw ConfigError("tau must be nonnegative");
    auto find = [&](LabelAxis axis, int label) -> const CombinedPool* {
        for (const auto& c : combined)
            if (c.axis == axis && c.label == label) return &c;
        return nullptr;
    };
    auto merge = [&](int l, int m, int n) {
        std::vector<TransitionPtr> pool;
        const int labels[3] = {l, m, n};
        for (int axis = 0; axis < 3; ++axis)
            if (const CombinedPool* c = find(static_cast<LabelAxis>(axis), labels[axis]))
                pool.insert(pool.end(), c->samples.begin(), c->samples.end());
        return pool;
    };

    std::uniform_int_distribution<int> dl(1, bins[0]), dm(1, bins[1]), dn(1, bins[2]);
    for (int r = 0; r < max_retry; ++r) {
        const int l = dl(rng), m = dm(rng), n = dn(rng);
        const double dist = std::abs(current[0] - l) / static_cast<double>(bins[0]) +
                            std::abs(current[1] - m) / static_cast<double>(bins[1]) +
                            std::abs(current[2] - n) / static_cast<double>(bins[2]);
        if (dist > tau) continue;
        auto pool = merge(l, m, n);
        if (!pool.empty()) return pool;
    }
    return merge(current[0], current[1], current[2]);  // fallback: exact labels
}

/// Uniform minibatch with replacement.
inline std::vector<TransitionPtr> sample_minibatch(const std::vector<TransitionPtr>& pool,
                                                   std::size_t batch, std::mt19937_64& rng) {
    if (pool.empty()) throw ConfigError("sample_minibatch: empty pool");
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<TransitionPtr> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(pool[pick(rng)]);
    return out;
}

}  // namespace sesim
