#pragma once

// Regularized empirical risk minimization
//   P(u) = (1/n) sum_i l(y_i, (Au)(x_i)) + lambda G(u)
// with proximal solvers, dual objective, dual recovery and certificates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dictionary.hpp"
#include "losses.hpp"
#include "lr_core.hpp"
#include "regularizers.hpp"

namespace lrerm {

struct Observation {
    double x;
    double y;
};

class ErmProblem {
public:
    ErmProblem(Dictionary dict, Regularizer reg, Loss loss, std::vector<Observation> sample, double lambda)
        : dict_(std::move(dict)), reg_(std::move(reg)), loss_(loss), sample_(std::move(sample)), lambda_(lambda) {
        if (sample_.empty()) throw std::invalid_argument("ErmProblem: sample must be non-empty");
        if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw std::invalid_argument("ErmProblem: lambda must be > 0");
        if (reg_.size() != dict_.size()) throw std::invalid_argument("ErmProblem: regularizer/dictionary size mismatch");
        if (reg_.exponent() != dict_.exponent()) throw std::invalid_argument("ErmProblem: exponent mismatch");
        const std::size_t k = dict_.size();
        phi_.resize(sample_.size() * k);
        for (std::size_t i = 0; i < sample_.size(); ++i) {
            const double x = sample_[i].x;
            if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("ErmProblem: x_i must lie in [0,1]");
            if (!std::isfinite(sample_[i].y)) throw std::invalid_argument("ErmProblem: y_i must be finite");
            dict_.features_into(x, std::span<double>(phi_).subspan(i * k, k));
        }
    }

    [[nodiscard]] const Dictionary& dict() const noexcept { return dict_; }
    [[nodiscard]] const Regularizer& reg() const noexcept { return reg_; }
    [[nodiscard]] const Loss& loss() const noexcept { return loss_; }
    [[nodiscard]] std::span<const Observation> sample() const noexcept { return sample_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] std::size_t n() const noexcept { return sample_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return dict_.size(); }
    [[nodiscard]] double r() const noexcept { return dict_.exponent(); }

    /// Lambda(x_i) as a coefficient row.
    [[nodiscard]] std::span<const double> features(std::size_t i) const {
        return std::span<const double>(phi_).subspan(i * dim(), dim());
    }

    [[nodiscard]] ErmProblem with_lambda(double lambda) const {
        return ErmProblem(dict_, reg_, loss_, sample_, lambda);
    }
    [[nodiscard]] ErmProblem without(std::size_t i) const {
        if (i >= n() || n() < 2) throw std::out_of_range("ErmProblem::without: bad index");
        std::vector<Observation> s = sample_;
        s.erase(s.begin() + static_cast<std::ptrdiff_t>(i));
        return ErmProblem(dict_, reg_, loss_, std::move(s), lambda_);
    }

    /// (Au)(x_i) for all i.
    [[nodiscard]] std::vector<double> predictions(std::span<const double> u) const {
        check(u.size());
        std::vector<double> z(n());
        for (std::size_t i = 0; i < n(); ++i) z[i] = pairing(u, features(i));
        return z;
    }

    [[nodiscard]] double empirical_risk(std::span<const double> u) const {
        const auto z = predictions(u);
        double acc = 0.0;
        for (std::size_t i = 0; i < n(); ++i) acc += loss_value(loss_, sample_[i].y, z[i]);
        return acc / static_cast<double>(n());
    }

    [[nodiscard]] double objective(std::span<const double> u) const {
        return empirical_risk(u) + lambda_ * reg_.value(u);
    }
    [[nodiscard]] double objective(const SeqVector& u) const { return objective(u.coeffs()); }

    /// Gradient of the empirical risk (differentiable losses only).
    [[nodiscard]] std::vector<double> risk_gradient(std::span<const double> u) const {
        const auto z = predictions(u);
        std::vector<double> g(dim(), 0.0);
        const double inv_n = 1.0 / static_cast<double>(n());
        for (std::size_t i = 0; i < n(); ++i) {
            const double d = loss_deriv(loss_, sample_[i].y, z[i]) * inv_n;
            const auto f = features(i);
            for (std::size_t k = 0; k < dim(); ++k) g[k] += d * f[k];
        }
        return g;
    }

    /// (1/n) sum_i ||Lambda(x_i)||_2^2, a scale for initial step sizes.
    [[nodiscard]] double mean_feature_sq() const {
        double acc = 0.0;
        for (double v : phi_) acc += v * v;
        return acc / static_cast<double>(n());
    }

private:
    void check(std::size_t k) const {
        if (k != dim()) throw std::invalid_argument("ErmProblem: coefficient length mismatch");
    }

    Dictionary dict_;
    Regularizer reg_;
    Loss loss_;
    std::vector<Observation> sample_;
    double lambda_;
    std::vector<double> phi_;
};

struct Solution {
    SeqVector u;
    double objective = 0.0;
    double kkt_residual = 0.0;
    /// Dual certificate w_i = -h_i / n (h_i a loss subgradient selection, rescaled into dom G*).
    std::vector<double> dual_coeffs;
    std::optional<double> duality_gap;
    std::size_t iterations = 0;
    bool converged = false;
    /// Objective after each accepted iteration, when requested.
    std::vector<double> objective_trace;
};

/// Stationarity data at u: selected loss subgradients, xi = -(1/(n lambda)) sum Lambda_i h_i,
/// and per-coordinate distances from xi to dG(u).
struct KktReport {
    std::vector<double> h;
    std::vector<double> xi;
    std::vector<double> distances;
    double residual = 0.0;
};

inline KktReport kkt_report(const ErmProblem& prob, std::span<const double> u) {
    KktReport rep;
    const auto z = prob.predictions(u);
    rep.h.resize(prob.n());
    for (std::size_t i = 0; i < prob.n(); ++i) {
        rep.h[i] = loss_subgrad(prob.loss(), prob.sample()[i].y, z[i]).min_abs();
    }
    rep.xi.assign(prob.dim(), 0.0);
    const double scale = -1.0 / (static_cast<double>(prob.n()) * prob.lambda());
    for (std::size_t i = 0; i < prob.n(); ++i) {
        const auto f = prob.features(i);
        for (std::size_t k = 0; k < prob.dim(); ++k) rep.xi[k] += rep.h[i] * f[k];
    }
    for (double& v : rep.xi) v *= scale;
    rep.distances = prob.reg().subdiff_distances(u, rep.xi);
    for (double d : rep.distances) rep.residual = std::max(rep.residual, d);
    return rep;
}

/// (1/lambda) sum_i Lambda(x_i) w_i
inline std::vector<double> dual_point(const ErmProblem& prob, std::span<const double> w) {
    if (w.size() != prob.n()) throw std::invalid_argument("dual_point: need one coefficient per observation");
    std::vector<double> s(prob.dim(), 0.0);
    for (std::size_t i = 0; i < prob.n(); ++i) {
        const auto f = prob.features(i);
        for (std::size_t k = 0; k < prob.dim(); ++k) s[k] += w[i] * f[k];
    }
    for (double& v : s) v /= prob.lambda();
    return s;
}

/// D(w) = lambda G*((1/lambda) sum Lambda_i w_i) + (1/n) sum l*(y_i, -n w_i).
/// Weak duality: P(u) + D(w) >= 0 for all u, w.
inline double dual_objective(const ErmProblem& prob, std::span<const double> w) {
    const auto s = dual_point(prob, w);
    double g = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double v = conjugate_atom(prob.reg().atom(k), s[k]);
        if (!std::isfinite(v)) {
            throw std::overflow_error("dual_objective: regularizer conjugate infinite at coordinate " + std::to_string(k));
        }
        g += v;
    }
    const double nn = static_cast<double>(prob.n());
    double l = 0.0;
    for (std::size_t i = 0; i < prob.n(); ++i) {
        const double v = loss_conjugate(prob.loss(), prob.sample()[i].y, -nn * w[i]);
        if (!std::isfinite(v)) {
            throw std::overflow_error("dual_objective: loss conjugate infinite at observation " + std::to_string(i));
        }
        l += v;
    }
    return prob.lambda() * g + l / nn;
}

/// P(u) + D(w), or nullopt when D(w) is infinite.
inline std::optional<double> duality_gap(const ErmProblem& prob, std::span<const double> u, std::span<const double> w) {
    try {
        return prob.objective(u) + dual_objective(prob, w);
    } catch (const std::overflow_error&) {
        return std::nullopt;
    }
}

/// u = grad G*((1/lambda) sum Lambda_i w_i)
inline SeqVector recover_from_dual(const ErmProblem& prob, std::span<const double> w) {
    if (!prob.reg().smooth_conjugate()) throw std::domain_error("recover_from_dual: G* not differentiable (eta_k = 0)");
    return SeqVector(prob.reg().conjugate_gradient(dual_point(prob, w)), prob.r());
}

namespace detail {

// Dual witness w_i = -theta h_i / n, with theta rescaling (1/lambda) sum Lambda_i w_i into dom G*
// when some atoms have eta = 0.
inline std::vector<double> feasible_witness(const ErmProblem& prob, std::span<const double> h) {
    const double nn = static_cast<double>(prob.n());
    std::vector<double> w(prob.n());
    for (std::size_t i = 0; i < prob.n(); ++i) w[i] = -h[i] / nn;
    const auto s = dual_point(prob, w);
    double theta = 1.0;
    for (std::size_t k = 0; k < prob.dim(); ++k) {
        const auto& a = prob.reg().atom(k);
        // Stay a few ulps inside the domain.
        const double cap = a.weight() * (1.0 - 1e-15);
        if (a.eta() == 0.0 && a.kind() == PenaltyKind::abs_weight && std::fabs(s[k]) > cap) {
            theta = std::min(theta, cap / std::fabs(s[k]));
        }
    }
    for (double& v : w) v *= theta;
    return w;
}

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
    return acc;
}

// Packs u with its KKT residual and the tightest available dual certificate; `alt_h` is an
// optional second subgradient selection (e.g. an ergodic average) to certify with.
inline Solution finish(const ErmProblem& prob, std::vector<double> u, std::size_t iterations, bool converged,
                       std::span<const double> alt_h = {}) {
    const auto rep = kkt_report(prob, u);
    Solution sol{SeqVector(u, prob.r()), prob.objective(u), rep.residual, {}, std::nullopt, iterations, converged, {}};
    sol.dual_coeffs = feasible_witness(prob, rep.h);
    sol.duality_gap = duality_gap(prob, u, sol.dual_coeffs);
    if (!alt_h.empty()) {
        auto w = feasible_witness(prob, alt_h);
        const auto g = duality_gap(prob, u, w);
        if (g && (!sol.duality_gap || *g < *sol.duality_gap)) {
            sol.duality_gap = g;
            sol.dual_coeffs = std::move(w);
        }
    }
    return sol;
}

}  // namespace detail

enum class SolverMethod { automatic, accelerated, proximal_gradient, subgradient };

struct SolverOptions {
    double tol = 1e-9;
    std::size_t max_iter = 200000;
    SolverMethod method = SolverMethod::automatic;
    bool record_trace = false;
};

namespace detail {

// Proximal gradient with backtracking; accelerated variant is monotone FISTA with restart.
inline Solution solve_smooth(const ErmProblem& prob, const SolverOptions& opt, bool accelerate) {
    const std::size_t k = prob.dim();
    const double lam = prob.lambda();
    const auto& reg = prob.reg();
    const bool allow_shrink = !accelerate;
    double lip = std::max(prob.mean_feature_sq(), 1e-12);
    if (prob.loss().kind() == LossKind::power) lip *= prob.loss().p() * (prob.loss().p() - 1.0);
    if (prob.loss().kind() == LossKind::logistic) lip *= 0.25;
    lip = std::max(lip, 1e-12);

    std::vector<double> x(k, 0.0);
    std::vector<double> y = x;
    double fx = prob.objective(x);
    double t = 1.0;
    int stalled = 0;
    std::vector<double> trace;
    if (opt.record_trace) trace.push_back(fx);
    const auto done = [&](std::vector<double> u, std::size_t it, bool ok) {
        Solution sol = finish(prob, std::move(u), it, ok);
        sol.objective_trace = std::move(trace);
        return sol;
    };
    auto rep = kkt_report(prob, x);
    if (rep.residual <= opt.tol) return done(x, 0, true);

    for (std::size_t it = 1; it <= opt.max_iter; ++it) {
        const auto g = prob.risk_gradient(y);
        const double fy = prob.empirical_risk(y);
        std::vector<double> z(k);
        std::vector<double> v(k);
        for (int bt = 0; bt < 200; ++bt) {
            const double step = 1.0 / lip;
            for (std::size_t j = 0; j < k; ++j) v[j] = y[j] - step * g[j];
            z = reg.prox(v, step * lam);
            double lin = fy;
            for (std::size_t j = 0; j < k; ++j) lin += g[j] * (z[j] - y[j]);
            lin += 0.5 * lip * sq_dist(z, y);
            const double fz = prob.empirical_risk(z);
            if (fz <= lin + 1e-15 * (1.0 + std::fabs(fy))) break;
            lip *= 2.0;
        }
        const double fz_total = prob.objective(z);
        // Ties at rounding level count as descent.
        const bool descent = fz_total <= fx + 1e-14 * (1.0 + std::fabs(fx));
        std::vector<double> x_new = descent ? z : x;
        const double fx_new = descent ? fz_total : fx;

        if (accelerate) {
            const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            // Restart momentum when the objective stalls or the step points uphill.
            double dir = 0.0;
            for (std::size_t j = 0; j < k; ++j) dir += (y[j] - z[j]) * (z[j] - x[j]);
            if (!descent || dir > 0.0) {
                t = 1.0;
                y = x_new;
            } else {
                for (std::size_t j = 0; j < k; ++j) {
                    y[j] = x_new[j] + (t / t_new) * (z[j] - x_new[j]) + ((t - 1.0) / t_new) * (x_new[j] - x[j]);
                }
                t = t_new;
            }
        } else {
            y = x_new;
            if (allow_shrink) lip *= 0.9;
        }
        x = std::move(x_new);
        fx = fx_new;
        if (opt.record_trace) trace.push_back(fx);

        rep = kkt_report(prob, x);
        if (rep.residual <= opt.tol) return done(x, it, true);
        // Repeated rejected steps from the same point: no further progress in floating point.
        stalled = descent ? 0 : stalled + 1;
        if (stalled > 50) return done(x, it, false);
    }
    return done(x, opt.max_iter, false);
}

// Proximal subgradient with diminishing steps, stopping on the duality gap or the KKT residual.
// The step-weighted average of the loss subgradients serves as the dual certificate.
inline Solution solve_nonsmooth(const ErmProblem& prob, const SolverOptions& opt) {
    const std::size_t k = prob.dim();
    const double lam = prob.lambda();
    const double a0 = 1.0 / std::max(std::sqrt(prob.mean_feature_sq()), 1e-12);
    std::vector<double> x(k, 0.0);
    std::vector<double> best = x;
    double f_best = prob.objective(x);
    const double nn = static_cast<double>(prob.n());
    std::vector<double> h_sum(prob.n(), 0.0);
    double step_sum = 0.0;
    std::vector<double> h_avg(prob.n());
    const auto averaged = [&] {
        for (std::size_t i = 0; i < prob.n(); ++i) h_avg[i] = h_sum[i] / step_sum;
        return std::span<const double>(h_avg);
    };
    for (std::size_t it = 1; it <= opt.max_iter; ++it) {
        const auto z = prob.predictions(x);
        const double step = a0 / std::sqrt(static_cast<double>(it));
        std::vector<double> g(k, 0.0);
        for (std::size_t i = 0; i < prob.n(); ++i) {
            const double hi = loss_subgrad(prob.loss(), prob.sample()[i].y, z[i]).min_abs();
            h_sum[i] += step * hi;
            const double h = hi / nn;
            const auto f = prob.features(i);
            for (std::size_t j = 0; j < k; ++j) g[j] += h * f[j];
        }
        step_sum += step;
        std::vector<double> v(k);
        for (std::size_t j = 0; j < k; ++j) v[j] = x[j] - step * g[j];
        x = prob.reg().prox(v, step * lam);
        const double fx = prob.objective(x);
        if (fx < f_best) {
            f_best = fx;
            best = x;
        }
        if (it % 50 == 0 || it == opt.max_iter) {
            Solution sol = finish(prob, best, it, false, averaged());
            if (sol.kkt_residual <= opt.tol || (sol.duality_gap && *sol.duality_gap <= opt.tol)) {
                sol.converged = true;
                return sol;
            }
        }
    }
    return finish(prob, best, opt.max_iter, false, averaged());
}

}  // namespace detail

/// Minimize the regularized empirical risk. Returns the best iterate; converged is false
/// when max_iter was exhausted before the KKT residual (or duality gap) reached tol.
inline Solution solve_primal(const ErmProblem& prob, const SolverOptions& opt = {}) {
    if (!(opt.tol > 0.0)) throw std::invalid_argument("solve_primal: tol must be > 0");
    const bool smooth = prob.loss().differentiable();
    SolverMethod m = opt.method;
    if (m == SolverMethod::automatic) {
        if (!smooth) {
            m = SolverMethod::subgradient;
        } else if (prob.loss().kind() == LossKind::power && prob.loss().p() < 2.0) {
            m = SolverMethod::proximal_gradient;
        } else {
            m = SolverMethod::accelerated;
        }
    }
    if (!smooth && m != SolverMethod::subgradient) {
        throw std::invalid_argument("solve_primal: gradient methods need a differentiable loss");
    }
    switch (m) {
        case SolverMethod::accelerated: return detail::solve_smooth(prob, opt, true);
        case SolverMethod::proximal_gradient: return detail::solve_smooth(prob, opt, false);
        default: return detail::solve_nonsmooth(prob, opt);
    }
}

struct DualSolution {
    std::vector<double> w;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Minimize D(w) by accelerated gradient with backtracking. Needs a power loss with p > 1
/// and eta_k > 0 for every atom, so that D is differentiable.
inline DualSolution solve_dual(const ErmProblem& prob, const SolverOptions& opt = {}) {
    if (prob.loss().kind() != LossKind::power || prob.loss().p() <= 1.0) {
        throw std::invalid_argument("solve_dual: implemented for power losses with p > 1");
    }
    if (!prob.reg().smooth_conjugate()) throw std::invalid_argument("solve_dual: needs eta_k > 0 for all k");
    const std::size_t n = prob.n();
    const double nn = static_cast<double>(n);
    const double p = prob.loss().p();
    const double ps = conjugate_exponent(p);

    const auto grad = [&](std::span<const double> w) {
        const auto s = dual_point(prob, w);
        const auto u = prob.reg().conjugate_gradient(s);
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = -nn * w[i];
            const double y = prob.sample()[i].y;
            // d/dw (1/n) l*(y, -n w) = -(y + sign(v)(p-1)(p*)/p (|v|/p)^{p*-1})
            const double dl = y + (p - 1.0) * ps / p * signed_power(v / p, ps - 1.0);
            g[i] = pairing(u, prob.features(i)) - dl;
        }
        return g;
    };

    std::vector<double> w(n, 0.0);
    std::vector<double> y = w;
    double dw = dual_objective(prob, w);
    double t = 1.0;
    double lip = 1.0;
    for (std::size_t it = 1; it <= opt.max_iter; ++it) {
        const auto g = grad(y);
        const double dy = dual_objective(prob, y);
        std::vector<double> z(n);
        double dz = 0.0;
        for (int bt = 0; bt < 200; ++bt) {
            for (std::size_t i = 0; i < n; ++i) z[i] = y[i] - g[i] / lip;
            dz = dual_objective(prob, z);
            double quad = dy;
            for (std::size_t i = 0; i < n; ++i) quad += g[i] * (z[i] - y[i]);
            quad += 0.5 * lip * detail::sq_dist(z, y);
            if (dz <= quad + 1e-15 * (1.0 + std::fabs(dy))) break;
            lip *= 2.0;
        }
        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const bool descent = dz <= dw + 1e-14 * (1.0 + std::fabs(dw));
        std::vector<double> w_new = descent ? z : w;
        if (!descent) {
            t = 1.0;
            y = w_new;
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                y[i] = w_new[i] + (t / t_new) * (z[i] - w_new[i]) + ((t - 1.0) / t_new) * (w_new[i] - w[i]);
            }
            t = t_new;
        }
        w = std::move(w_new);
        if (descent) dw = dz;
        const auto gw = grad(w);
        double gmax = 0.0;
        for (double v : gw) gmax = std::max(gmax, std::fabs(v));
        if (gmax <= opt.tol) return {w, dw, it, true};
    }
    return {w, dw, opt.max_iter, false};
}

/// Diagnostic for the a priori bound on the representer coefficients:
///   (1/n) sum |h_i| <= (p-1)(1/n) sum b(y_i) + 3 p c (1 + ||Lambda||_p^{p-1} ||u||^{p-1}).
struct RepresenterBound {
    double h_l1;
    double bound;
    bool holds;
};

inline RepresenterBound representer_bound(const ErmProblem& prob, const Solution& sol) {
    const auto rep = kkt_report(prob, sol.u.coeffs());
    const double nn = static_cast<double>(prob.n());
    const double p = prob.loss().p();
    double h1 = 0.0;
    double b1 = 0.0;
    double lam_p = 0.0;
    for (std::size_t i = 0; i < prob.n(); ++i) {
        h1 += std::fabs(rep.h[i]);
        b1 += prob.loss().growth_b(prob.sample()[i].y);
        lam_p += std::pow(lp_norm(prob.features(i), prob.dict().dual_exponent()), p);
    }
    h1 /= nn;
    b1 /= nn;
    const double lam_norm = std::pow(lam_p / nn, 1.0 / p);
    const double bound = (p - 1.0) * b1 +
                         3.0 * p * prob.loss().growth_c() *
                             (1.0 + std::pow(lam_norm, p - 1.0) * std::pow(sol.u.norm(), p - 1.0));
    return {h1, bound, h1 <= bound};
}

struct SensitivityReport {
    double distance;  // ||u_B - u_A||_r
    double lhs;       // psi_lo(distance) / distance
    double rhs;       // (||E_B(Lambda h) - E_A(Lambda h)||_{r*} + eps_A + eps_B) / lambda
    bool holds;
};

/// Stability of the regularized solution under a change of sample: the weakened modulus of
/// total convexity at the distance between the two solutions is dominated by the mean-embedding
/// discrepancy of Lambda h (h the loss subgradient at solution A) plus solver slacks.
inline SensitivityReport sensitivity_check(const ErmProblem& a, const ErmProblem& b, const Solution& sa,
                                           const Solution& sb, const ModulusBound& mb) {
    if (a.dim() != b.dim() || a.lambda() != b.lambda() || a.r() != b.r()) {
        throw std::invalid_argument("sensitivity_check: problems must share dictionary and lambda");
    }
    if (sa.u.size() != a.dim() || sb.u.size() != b.dim()) throw std::invalid_argument("sensitivity_check: bad solution");
    const std::size_t k = a.dim();
    const double rs = a.dict().dual_exponent();

    const auto rep_a = kkt_report(a, sa.u.coeffs());
    const auto rep_b = kkt_report(b, sb.u.coeffs());

    // h is a function of (x, y): the selection at w = (A u_A)(x).
    const auto mean_embed = [&](const ErmProblem& prob) {
        std::vector<double> m(k, 0.0);
        const auto z = prob.predictions(sa.u.coeffs());
        for (std::size_t i = 0; i < prob.n(); ++i) {
            const double h = loss_subgrad(prob.loss(), prob.sample()[i].y, z[i]).min_abs();
            const auto f = prob.features(i);
            for (std::size_t j = 0; j < k; ++j) m[j] += h * f[j];
        }
        for (double& v : m) v /= static_cast<double>(prob.n());
        return m;
    };
    const auto ma = mean_embed(a);
    const auto mbv = mean_embed(b);
    std::vector<double> diff(k);
    for (std::size_t j = 0; j < k; ++j) diff[j] = mbv[j] - ma[j];
    const double eps_a = a.lambda() * lp_norm(rep_a.distances, rs);
    const double eps_b = b.lambda() * lp_norm(rep_b.distances, rs);
    const double rhs = (lp_norm(diff, rs) + eps_a + eps_b) / a.lambda();

    std::vector<double> du(k);
    for (std::size_t j = 0; j < k; ++j) du[j] = sb.u[j] - sa.u[j];
    const double t = lp_norm(du, a.r());
    ModulusBound local = mb;
    local.rho = std::max(mb.rho, sa.u.norm());
    const double lhs = t == 0.0 ? 0.0 : modulus_lower_bound(local, t) / t;
    return {t, lhs, rhs, lhs <= rhs + 1e-9};
}

}  // namespace lrerm
