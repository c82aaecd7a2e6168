#pragma once

// Finite-dimensional l^r(K) sequence spaces: norms, conjugate exponents,
// p-duality maps and upper-quasi inverses of increasing functions.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lrerm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// |x|^e with 0 mapped to 0.
inline double abs_power(double x, double e) {
    if (x == 0.0) return 0.0;
    if (e == 1.0) return std::fabs(x);
    return std::pow(std::fabs(x), e);
}

/// sign(x) * |x|^e, with 0 mapped to 0 exactly (no NaN for e < 1).
inline double signed_power(double x, double e) {
    const double mag = abs_power(x, e);
    return x < 0.0 ? -mag : mag;
}

/// Conjugate exponent p* of p in [1, +inf]:  1/p + 1/p* = 1.
inline double conjugate_exponent(double p) {
    if (std::isnan(p) || p < 1.0) {
        throw std::domain_error("conjugate_exponent: p must lie in [1, +inf], got " +
                                std::to_string(p));
    }
    if (p == 1.0) return kInf;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

/// Closed interval [lo, hi] with possibly infinite endpoints; lo > hi encodes the empty set.
struct Interval {
    double lo;
    double hi;

    static Interval point(double v) { return {v, v}; }
    static Interval empty() { return {kInf, -kInf}; }
    static Interval all() { return {-kInf, kInf}; }

    [[nodiscard]] bool is_empty() const noexcept { return lo > hi; }
    [[nodiscard]] bool contains(double v) const noexcept { return v >= lo && v <= hi; }
    /// Distance from v to the interval; +inf for the empty set.
    [[nodiscard]] double distance(double v) const noexcept {
        if (is_empty()) return kInf;
        if (v < lo) return lo - v;
        if (v > hi) return v - hi;
        return 0.0;
    }
    /// Element of minimal absolute value.
    [[nodiscard]] double min_abs() const noexcept {
        if (lo > 0.0) return lo;
        if (hi < 0.0) return hi;
        return 0.0;
    }
    [[nodiscard]] Interval shifted(double c) const noexcept { return {lo + c, hi + c}; }
    [[nodiscard]] Interval scaled(double c) const noexcept {
        if (is_empty()) return empty();
        if (c == 0.0) return point(0.0);
        return c > 0.0 ? Interval{lo * c, hi * c} : Interval{hi * c, lo * c};
    }
};

/// Finitely supported element of l^r(K): coefficients mu_0..mu_{K-1} plus the exponent r.
class SeqVector {
public:
    SeqVector(std::vector<double> coeffs, double r) : coeffs_(std::move(coeffs)), r_(r) {
        if (!(r_ > 1.0) || std::isinf(r_)) {
            throw std::invalid_argument("SeqVector: exponent must lie in (1, +inf)");
        }
        for (double c : coeffs_) {
            if (!std::isfinite(c)) throw std::invalid_argument("SeqVector: non-finite coefficient");
        }
    }

    static SeqVector zeros(std::size_t size, double r) {
        return SeqVector(std::vector<double>(size, 0.0), r);
    }
    static SeqVector unit(std::size_t size, std::size_t j, double r) {
        std::vector<double> c(size, 0.0);
        c.at(j) = 1.0;
        return SeqVector(std::move(c), r);
    }

    [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }
    [[nodiscard]] double exponent() const noexcept { return r_; }
    [[nodiscard]] std::span<const double> coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return coeffs_; }
    [[nodiscard]] double operator[](std::size_t k) const { return coeffs_[k]; }

    /// (sum |mu_k|^r)^{1/r}
    [[nodiscard]] double norm() const {
        double scale = 0.0;
        for (double c : coeffs_) scale = std::fmax(scale, std::fabs(c));
        if (scale == 0.0) return 0.0;
        double acc = 0.0;
        for (double c : coeffs_) acc += std::pow(std::fabs(c) / scale, r_);
        return scale * std::pow(acc, 1.0 / r_);
    }

    /// sum |mu_k|^r
    [[nodiscard]] double norm_pow() const {
        double acc = 0.0;
        for (double c : coeffs_) acc += abs_power(c, r_);
        return acc;
    }

    friend bool operator==(const SeqVector&, const SeqVector&) = default;

private:
    std::vector<double> coeffs_;
    double r_;
};

/// l^p norm of a plain coefficient span, p in (1, +inf) or p = 1.
inline double lp_norm(std::span<const double> v, double p) {
    double scale = 0.0;
    for (double c : v) scale = std::fmax(scale, std::fabs(c));
    if (scale == 0.0) return 0.0;
    if (std::isinf(p)) return scale;
    double acc = 0.0;
    for (double c : v) acc += std::pow(std::fabs(c) / scale, p);
    return scale * std::pow(acc, 1.0 / p);
}

/// Canonical pairing <u, w> between l^r and l^{r*}.
inline double pairing(std::span<const double> u, std::span<const double> w) {
    if (u.size() != w.size()) throw std::invalid_argument("pairing: length mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) acc += u[k] * w[k];
    return acc;
}

inline double pairing(const SeqVector& u, const SeqVector& w) {
    return pairing(u.coeffs(), w.coeffs());
}

/// r-duality map J_r of l^r: componentwise |mu|^{r-1} sign(mu); lands in l^{r*}.
inline SeqVector duality_map(const SeqVector& u) {
    const double r = u.exponent();
    std::vector<double> out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = signed_power(u[k], r - 1.0);
    return SeqVector(std::move(out), conjugate_exponent(r));
}

/// J_r^{-1} = J_{r*}: maps w in l^{r*} back to l^r.
inline SeqVector inverse_duality_map(const SeqVector& w, double r) {
    const double rs = conjugate_exponent(r);
    if (std::fabs(w.exponent() - rs) > 1e-12 * rs) {
        throw std::invalid_argument("inverse_duality_map: w must carry exponent r*");
    }
    std::vector<double> out(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) out[k] = signed_power(w[k], rs - 1.0);
    return SeqVector(std::move(out), r);
}

/// Increasing function on [0, +inf) with phi(0) = 0 and phi > 0 on (0, +inf).
class MonotoneFn {
public:
    explicit MonotoneFn(std::function<double(double)> fn) : fn_(std::move(fn)) {}
    double operator()(double t) const { return fn_(t); }

    /// Sampled check of the class invariants on [0, ub].
    [[nodiscard]] bool sampled_valid(double ub, std::size_t samples = 1000) const {
        if (fn_(0.0) != 0.0) return false;
        double prev = 0.0;
        for (std::size_t i = 1; i <= samples; ++i) {
            const double t = ub * static_cast<double>(i) / static_cast<double>(samples);
            const double v = fn_(t);
            if (!(v > 0.0) || v < prev) return false;
            prev = v;
        }
        return true;
    }

private:
    std::function<double(double)> fn_;
};

struct QuasiInverse {
    double value;
    /// false when phi(search_ub) <= s, i.e. the supremum was not reached on the range.
    bool bounded;
};

/// Upper-quasi inverse phi^(s) = sup{t >= 0 : phi(t) <= s}, searched on [0, search_ub]
/// by bisection to absolute tolerance 1e-10. s < 0 yields +inf.
inline QuasiInverse quasi_inverse(const MonotoneFn& phi, double s, double search_ub) {
    constexpr double kTol = 1e-10;
    if (s < 0.0) return {kInf, true};
    if (!(search_ub > 0.0)) throw std::invalid_argument("quasi_inverse: search_ub must be > 0");
    if (phi(search_ub) <= s) return {search_ub, false};
    double lo = 0.0;  // phi(lo) <= s
    double hi = search_ub;  // phi(hi) > s
    while (hi - lo > kTol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(mid) <= s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {hi, true};
}

}  // namespace lrerm
