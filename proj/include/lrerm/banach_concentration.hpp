#pragma once

// Hoeffding-type deviation bound for means of bounded i.i.d. vectors in a space
// of Rademacher type q, and a Monte Carlo check of its violation rate in l^q.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lr_core.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace lrerm {

struct ConcentrationSpec {
    double q = 2.0;
    double type_constant = 1.0;
    double beta = 1.0;
    std::size_t n = 1;
    double tau = 1.0;

    void validate() const {
        if (!(q > 1.0 && q <= 2.0)) throw std::invalid_argument("concentration: q must lie in (1, 2]");
        if (!(type_constant >= 1.0)) throw std::invalid_argument("concentration: T must be >= 1");
        if (!(beta > 0.0)) throw std::invalid_argument("concentration: beta must be > 0");
        if (n == 0) throw std::invalid_argument("concentration: n must be >= 1");
        if (!(tau > 0.0)) throw std::invalid_argument("concentration: tau must be > 0");
    }
};

/// 4 beta T / n^{1-1/q} + 2 beta sqrt(2 tau / n) + 4 tau beta / (3 n)
inline double hoeffding_bound(const ConcentrationSpec& s) {
    s.validate();
    const double n = static_cast<double>(s.n);
    return 4.0 * s.beta * s.type_constant / std::pow(n, 1.0 - 1.0 / s.q) + 2.0 * s.beta * std::sqrt(2.0 * s.tau / n) +
           4.0 * s.tau * s.beta / (3.0 * n);
}

/// Bounded random vector with exactly known mean.
struct VectorSampler {
    std::size_t dim;
    std::vector<double> mean;
    std::function<void(Rng&, std::span<double>)> draw;
};

/// Coordinates +-beta / d^{1/q}, so every draw has l^q norm exactly beta and mean 0.
inline VectorSampler rademacher_sampler(std::size_t dim, double beta, double q) {
    if (dim == 0) throw std::invalid_argument("rademacher_sampler: dim must be >= 1");
    const double a = beta / std::pow(static_cast<double>(dim), 1.0 / q);
    return {dim, std::vector<double>(dim, 0.0), [a](Rng& rng, std::span<double> out) {
                for (double& v : out) v = a * rng.sign();
            }};
}

inline VectorSampler constant_sampler(std::vector<double> value) {
    const std::size_t d = value.size();
    auto v = value;
    return {d, std::move(value), [v = std::move(v)](Rng&, std::span<double> out) {
                std::copy(v.begin(), v.end(), out.begin());
            }};
}

/// Fraction of trials with ||(1/n) sum (U_i - E U_i)||_q >= hoeffding_bound(spec).
inline double violation_rate(const ConcentrationSpec& spec, const VectorSampler& sampler, std::size_t trials,
                             std::uint64_t seed = 0, std::size_t threads = 1) {
    if (trials == 0) throw std::invalid_argument("violation_rate: trials must be >= 1");
    const double bound = hoeffding_bound(spec);
    std::atomic<std::size_t> hits{0};
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(seed, {static_cast<std::uint64_t>(spec.n), static_cast<std::uint64_t>(t)});
        std::vector<double> u(sampler.dim);
        std::vector<double> acc(sampler.dim, 0.0);
        for (std::size_t i = 0; i < spec.n; ++i) {
            sampler.draw(rng, u);
            if (lp_norm(u, spec.q) > spec.beta * (1.0 + 1e-12)) {
                throw std::domain_error("violation_rate: sampler draw exceeds the almost-sure bound beta");
            }
            for (std::size_t k = 0; k < sampler.dim; ++k) acc[k] += u[k] - sampler.mean[k];
        }
        for (double& v : acc) v /= static_cast<double>(spec.n);
        if (lp_norm(acc, spec.q) >= bound) ++hits;
    });
    return static_cast<double>(hits.load()) / static_cast<double>(trials);
}

struct TypeConstant {
    double q;
    double constant;
    bool verified;
};

/// Rademacher type and a type constant; for l^q with q < 2 the constant 1 is a configurable
/// default, not a proven value.
inline TypeConstant type_constant_hilbert() { return {2.0, 1.0, true}; }
inline TypeConstant type_constant_lq(double q, double constant = 1.0) {
    if (!(q > 1.0)) throw std::invalid_argument("type_constant: q must be > 1");
    if (q >= 2.0) return {2.0, q == 2.0 ? 1.0 : constant, q == 2.0};
    return {q, constant, false};
}

}  // namespace lrerm
