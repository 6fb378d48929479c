#pragma once

#include <cassert>
#include <random>
#include <span>

#include "sesim/domain.hpp"

namespace sesim {

/// Dense feed-forward network, tanh hidden units, tanh or linear output.
/// Parameters and gradients live in one flat buffer so optimizer steps,
/// Polyak updates and checkpointing are trivial loops.
class Mlp {
  public:
    enum class Output { Tanh, Linear };

    Mlp() = default;
    Mlp(std::vector<int> sizes, Output out) : sizes_(std::move(sizes)), out_(out) {
        if (sizes_.size() < 2) throw ConfigError("Mlp needs at least input and output sizes");
        std::size_t n = 0;
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            w_off_.push_back(n);
            n += static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
            b_off_.push_back(n);
            n += sizes_[l + 1];
        }
        params_.assign(n, 0.0);
        grads_.assign(n, 0.0);
        momentum_.assign(n, 0.0);
    }

    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }
    std::size_t n_params() const { return params_.size(); }
    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }
    std::span<double> grads() { return grads_; }
    const std::vector<int>& sizes() const { return sizes_; }

    void init(std::mt19937_64& rng) {
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
            std::uniform_real_distribution<double> u(-bound, bound);
            double* w = params_.data() + w_off_[l];
            for (int i = 0; i < sizes_[l + 1] * sizes_[l]; ++i) w[i] = u(rng);
            double* b = params_.data() + b_off_[l];
            for (int i = 0; i < sizes_[l + 1]; ++i) b[i] = u(rng);
        }
    }

    /// Per-sample activations retained for the backward pass.
    struct Cache {
        std::vector<std::vector<double>> act;  // act[0] = input, act[L] = output
        std::vector<std::vector<double>> pre;  // pre-activations per layer
    };

    void forward(std::span<const double> x, std::vector<double>& y, Cache* cache = nullptr) const {
        if (static_cast<int>(x.size()) != sizes_.front())
            throw ConfigError("Mlp::forward: input dimension mismatch");
        const std::size_t layers = sizes_.size() - 1;
        if (cache) {
            cache->act.assign(layers + 1, {});
            cache->pre.assign(layers, {});
            cache->act[0].assign(x.begin(), x.end());
        }
        std::vector<double> cur(x.begin(), x.end()), next;
        for (std::size_t l = 0; l < layers; ++l) {
            const int in = sizes_[l], out = sizes_[l + 1];
            next.assign(out, 0.0);
            const double* w = params_.data() + w_off_[l];
            const double* b = params_.data() + b_off_[l];
            for (int i = 0; i < out; ++i) {
                double z = b[i];
                const double* wr = w + static_cast<std::size_t>(i) * in;
                for (int k = 0; k < in; ++k) z += wr[k] * cur[k];
                next[i] = z;
            }
            if (cache) cache->pre[l] = next;
            const bool squash = l + 1 < layers || out_ == Output::Tanh;
            if (squash)
                for (double& v : next) v = std::tanh(v);
            if (cache) cache->act[l + 1] = next;
            cur.swap(next);
        }
        y = std::move(cur);
    }

    /// Accumulate parameter gradients for one sample; optionally return the
    /// gradient with respect to the input (needed to push critic gradients
    /// through to the actor).
    void backward(const Cache& cache, std::span<const double> dy,
                  std::vector<double>* dx = nullptr) {
        const std::size_t layers = sizes_.size() - 1;
        std::vector<double> delta(dy.begin(), dy.end()), prev;
        for (std::size_t li = layers; li-- > 0;) {
            const int in = sizes_[li], out = sizes_[li + 1];
            const bool squash = li + 1 < layers || out_ == Output::Tanh;
            if (squash)
                for (int i = 0; i < out; ++i) {
                    const double a = cache.act[li + 1][i];
                    delta[i] *= 1.0 - a * a;
                }
            double* gw = grads_.data() + w_off_[li];
            double* gb = grads_.data() + b_off_[li];
            const double* w = params_.data() + w_off_[li];
            const double* a_prev = cache.act[li].data();
            prev.assign(in, 0.0);
            for (int i = 0; i < out; ++i) {
                const double d = delta[i];
                gb[i] += d;
                double* gwr = gw + static_cast<std::size_t>(i) * in;
                const double* wr = w + static_cast<std::size_t>(i) * in;
                for (int k = 0; k < in; ++k) {
                    gwr[k] += d * a_prev[k];
                    prev[k] += d * wr[k];
                }
            }
            delta.swap(prev);
        }
        if (dx) *dx = std::move(delta);
    }

    /// Gradient descent with classical momentum; clears the gradient buffer.
    void sgd_step(double lr, double momentum = 0.9) {
        for (std::size_t i = 0; i < params_.size(); ++i) {
            momentum_[i] = momentum * momentum_[i] + grads_[i];
            params_[i] -= lr * momentum_[i];
            grads_[i] = 0.0;
        }
    }

    void zero_grads() { std::fill(grads_.begin(), grads_.end(), 0.0); }

    /// target <- rho * online + (1 - rho) * target
    void polyak_from(const Mlp& online, double rho) {
        assert(params_.size() == online.params_.size());
        for (std::size_t i = 0; i < params_.size(); ++i)
            params_[i] = rho * online.params_[i] + (1.0 - rho) * params_[i];
    }

  private:
    std::vector<int> sizes_;
    Output out_ = Output::Linear;
    std::vector<std::size_t> w_off_, b_off_;
    std::vector<double> params_, grads_, momentum_;
};

}  // namespace sesim
