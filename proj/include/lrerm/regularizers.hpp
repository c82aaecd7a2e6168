#pragma once

// Separable regularizers G(u) = sum_k g_k(mu_k) with g_k = h_k + eta_k |.|^r,
// their proximal maps, conjugates, subdifferentials, and lower bounds on the
// modulus of total convexity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lr_core.hpp"

namespace lrerm {

enum class PenaltyKind { abs_weight, box, zero };

class AtomPenalty {
public:
    /// h(t) = w |t|
    static AtomPenalty abs_weight(double w, double eta, double r) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("abs penalty: w must be finite and >= 0");
        return AtomPenalty(PenaltyKind::abs_weight, w, 0.0, 0.0, eta, r);
    }
    /// h = indicator of [a, b], a <= 0 <= b
    static AtomPenalty box(double a, double b, double eta, double r) {
        if (!(a <= 0.0 && 0.0 <= b)) throw std::invalid_argument("box penalty: need a <= 0 <= b");
        return AtomPenalty(PenaltyKind::box, 0.0, a, b, eta, r);
    }
    static AtomPenalty zero(double eta, double r) { return AtomPenalty(PenaltyKind::zero, 0.0, 0.0, 0.0, eta, r); }

    [[nodiscard]] PenaltyKind kind() const noexcept { return kind_; }
    [[nodiscard]] double weight() const noexcept { return w_; }
    [[nodiscard]] double lower() const noexcept { return a_; }
    [[nodiscard]] double upper() const noexcept { return b_; }
    [[nodiscard]] double eta() const noexcept { return eta_; }
    [[nodiscard]] double exponent() const noexcept { return r_; }

    [[nodiscard]] bool in_domain(double t) const noexcept {
        return kind_ != PenaltyKind::box || (t >= a_ && t <= b_);
    }

private:
    AtomPenalty(PenaltyKind kind, double w, double a, double b, double eta, double r)
        : kind_(kind), w_(w), a_(a), b_(b), eta_(eta), r_(r) {
        if (!(eta_ >= 0.0) || !std::isfinite(eta_)) throw std::invalid_argument("penalty: eta must be finite and >= 0");
        if (!(r_ > 1.0) || std::isinf(r_)) throw std::invalid_argument("penalty: r must lie in (1, +inf)");
    }

    PenaltyKind kind_;
    double w_;
    double a_;
    double b_;
    double eta_;
    double r_;
};

/// g(t) = h(t) + eta |t|^r, +inf outside dom h.
inline double g_value(const AtomPenalty& g, double t) {
    if (!g.in_domain(t)) return kInf;
    const double smooth = g.eta() == 0.0 ? 0.0 : g.eta() * abs_power(t, g.exponent());
    return g.weight() * std::fabs(t) + smooth;
}

/// Full subdifferential of g at t.
inline Interval g_subdiff(const AtomPenalty& g, double t) {
    if (!g.in_domain(t)) return Interval::empty();
    const double d = g.eta() * g.exponent() * signed_power(t, g.exponent() - 1.0);
    switch (g.kind()) {
        case PenaltyKind::abs_weight:
            if (t > 0.0) return Interval::point(d + g.weight());
            if (t < 0.0) return Interval::point(d - g.weight());
            return {-g.weight(), g.weight()};
        case PenaltyKind::box: {
            const bool at_lo = t == g.lower();
            const bool at_hi = t == g.upper();
            return {at_lo ? -kInf : d, at_hi ? kInf : d};
        }
        case PenaltyKind::zero: return Interval::point(d);
    }
    return Interval::empty();
}

namespace detail {

// Root of t + c t^{r-1} = m on [0, m], m > 0, c >= 0: safeguarded Newton with bisection.
inline double solve_power_shrink(double m, double c, double r) {
    if (c == 0.0) return m;
    const auto f = [&](double t) { return t + c * abs_power(t, r - 1.0) - m; };
    double lo = 0.0;
    double hi = m;
    // Start from the better of the two one-term approximations.
    double t = std::min(m, abs_power(m / c, 1.0 / (r - 1.0)));
    for (int it = 0; it < 200; ++it) {
        const double ft = f(t);
        if (ft == 0.0) return t;
        if (ft < 0.0) {
            lo = t;
        } else {
            hi = t;
        }
        if (hi - lo <= 1e-16 * m) break;
        const double df = 1.0 + c * (r - 1.0) * abs_power(t, r - 2.0);
        double next = t - ft / df;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (next == t) break;
        t = next;
    }
    return t;
}

}  // namespace detail

/// argmin_t (t - v)^2 / (2 step) + g(t)
inline double prox_atom(const AtomPenalty& g, double v, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("prox_atom: step must be > 0");
    const double r = g.exponent();
    const double c = step * g.eta() * r;
    const double w = g.kind() == PenaltyKind::abs_weight ? g.weight() : 0.0;
    const double mag = std::fabs(v);
    if (mag <= step * w) return 0.0;
    const double m = mag - step * w;
    double t = detail::solve_power_shrink(m, c, r);
    t = v < 0.0 ? -t : t;
    if (g.kind() == PenaltyKind::box) t = std::clamp(t, g.lower(), g.upper());
    return t;
}

/// Maximizer t* of s t - g(t); requires eta > 0 or a bounded box.
inline double conjugate_argmax(const AtomPenalty& g, double s) {
    const double r = g.exponent();
    const double w = g.kind() == PenaltyKind::abs_weight ? g.weight() : 0.0;
    if (g.eta() == 0.0) {
        if (g.kind() == PenaltyKind::box) {
            if (s > 0.0) return g.upper();
            if (s < 0.0) return g.lower();
            return 0.0;
        }
        throw std::domain_error("conjugate gradient undefined for eta = 0 atom");
    }
    const double excess = std::max(std::fabs(s) - w, 0.0);
    double t = abs_power(excess / (g.eta() * r), 1.0 / (r - 1.0));
    t = s < 0.0 ? -t : t;
    if (g.kind() == PenaltyKind::box) t = std::clamp(t, g.lower(), g.upper());
    return t;
}

/// g*(s) = sup_t { s t - g(t) }, possibly +inf.
inline double conjugate_atom(const AtomPenalty& g, double s) {
    const double r = g.exponent();
    const double w = g.kind() == PenaltyKind::abs_weight ? g.weight() : 0.0;
    if (g.eta() == 0.0) {
        if (g.kind() == PenaltyKind::box) return std::max(s * g.lower(), s * g.upper());
        return std::fabs(s) <= w ? 0.0 : kInf;
    }
    if (r == 2.0 && g.kind() != PenaltyKind::box) {
        const double e = std::max(std::fabs(s) - w, 0.0);
        return e * e / (4.0 * g.eta());
    }
    const double t = conjugate_argmax(g, s);
    if (t == 0.0) return 0.0;
    return std::max(0.0, s * t - g_value(g, t));
}

/// Derivative of g* at s (g* is differentiable when eta > 0).
inline double conjugate_grad(const AtomPenalty& g, double s) {
    if (g.eta() == 0.0) throw std::domain_error("conjugate gradient undefined for eta = 0 atom");
    return conjugate_argmax(g, s);
}

class Regularizer {
public:
    Regularizer(std::vector<AtomPenalty> atoms, double r) : atoms_(std::move(atoms)), r_(r) {
        if (atoms_.empty()) throw std::invalid_argument("Regularizer: needs at least one atom");
        for (const auto& a : atoms_) {
            if (a.exponent() != r_) throw std::invalid_argument("Regularizer: atom exponent mismatch");
        }
    }

    /// All atoms share h and eta.
    static Regularizer uniform(const AtomPenalty& atom, std::size_t size) {
        return Regularizer(std::vector<AtomPenalty>(size, atom), atom.exponent());
    }

    [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }
    [[nodiscard]] double exponent() const noexcept { return r_; }
    [[nodiscard]] const AtomPenalty& atom(std::size_t k) const { return atoms_[k]; }
    [[nodiscard]] std::span<const AtomPenalty> atoms() const noexcept { return atoms_; }

    [[nodiscard]] double eta_min() const noexcept {
        double e = kInf;
        for (const auto& a : atoms_) e = std::min(e, a.eta());
        return e;
    }

    [[nodiscard]] bool smooth_conjugate() const noexcept { return eta_min() > 0.0; }

    [[nodiscard]] double value(std::span<const double> u) const {
        check(u.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) acc += g_value(atoms_[k], u[k]);
        return acc;
    }
    [[nodiscard]] double value(const SeqVector& u) const { return value(u.coeffs()); }

    [[nodiscard]] std::vector<double> prox(std::span<const double> v, double step) const {
        check(v.size());
        std::vector<double> out(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) out[k] = prox_atom(atoms_[k], v[k], step);
        return out;
    }

    [[nodiscard]] double conjugate(std::span<const double> s) const {
        check(s.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) acc += conjugate_atom(atoms_[k], s[k]);
        return acc;
    }

    [[nodiscard]] std::vector<double> conjugate_gradient(std::span<const double> s) const {
        check(s.size());
        std::vector<double> out(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) out[k] = conjugate_grad(atoms_[k], s[k]);
        return out;
    }

    /// Per-coordinate distance from xi_k to the subdifferential of g_k at mu_k.
    [[nodiscard]] std::vector<double> subdiff_distances(std::span<const double> u, std::span<const double> xi) const {
        check(u.size());
        check(xi.size());
        std::vector<double> d(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) d[k] = g_subdiff(atoms_[k], u[k]).distance(xi[k]);
        return d;
    }

private:
    void check(std::size_t n) const {
        if (n != atoms_.size()) throw std::invalid_argument("Regularizer: dimension mismatch");
    }

    std::vector<AtomPenalty> atoms_;
    double r_;
};

/// max_k dist(xi_k, dg_k(mu_k)); zero iff xi lies in dG(u).
inline double subdiff_residual(const Regularizer& reg, const SeqVector& u, const SeqVector& xi) {
    const auto d = reg.subdiff_distances(u.coeffs(), xi.coeffs());
    double m = 0.0;
    for (double v : d) m = std::max(m, v);
    return m;
}

/// Constant beta in the modulus lower bound of eta ||.||_r^r.
inline double default_beta(double r) {
    if (!(r > 1.0) || std::isinf(r)) throw std::domain_error("default_beta: r must lie in (1, +inf)");
    if (r <= 2.0) return (7.0 / 32.0) * r * (r - 1.0) * (1.0 - std::pow(2.0 / 3.0, r - 1.0));
    const double kr = 4.0 * (2.0 + std::sqrt(3.0)) *
                      std::min({1.0, (r - 1.0) * (2.0 - std::sqrt(3.0)), 1.0 - std::pow(2.0 / 3.0, r / 2.0)});
    return kr / (r * std::pow(4.0, r));
}

struct ModulusBound {
    double eta;
    double beta;
    double r;
    double q;
    double rho;

    static ModulusBound make(double eta, double r, double rho, double beta = -1.0) {
        if (!(eta > 0.0)) throw std::invalid_argument("ModulusBound: eta must be > 0");
        if (!(rho >= 0.0)) throw std::invalid_argument("ModulusBound: rho must be >= 0");
        const double b = beta > 0.0 ? beta : default_beta(r);
        return {eta, b, r, std::max(2.0, r), rho};
    }
    static ModulusBound make(const Regularizer& reg, double rho) {
        return make(reg.eta_min(), reg.exponent(), rho);
    }
};

/// psi_lo(t): eta beta t^r if r >= q, eta beta t^q / (rho + t)^{q - r} otherwise.
inline double modulus_lower_bound(const ModulusBound& mb, double t) {
    if (t < 0.0) throw std::domain_error("modulus_lower_bound: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double eb = mb.eta * mb.beta;
    if (mb.r >= mb.q) return eb * std::pow(t, mb.r);
    return eb * std::pow(t, mb.q) / std::pow(mb.rho + t, mb.q - mb.r);
}

inline MonotoneFn modulus_lower_bound_fn(const ModulusBound& mb) {
    return MonotoneFn([mb](double t) { return modulus_lower_bound(mb, t); });
}

/// Closed-form upper bound on the quasi-inverse of t -> psi_lo(t) / t.
inline double modulus_quasi_inverse(const ModulusBound& mb, double s) {
    if (s < 0.0) throw std::domain_error("modulus_quasi_inverse: s must be >= 0");
    if (s == 0.0) return 0.0;
    const double eb = mb.eta * mb.beta;
    if (mb.r >= mb.q || mb.rho == 0.0) return std::pow(s / eb, 1.0 / (mb.r - 1.0));
    const double z = s / (eb * std::pow(mb.rho, mb.r - 1.0));
    return std::pow(2.0, mb.q) * mb.rho * std::max(std::pow(z, 1.0 / (mb.q - 1.0)), std::pow(z, 1.0 / (mb.r - 1.0)));
}

}  // namespace lrerm
