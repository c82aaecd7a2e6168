#pragma once

// Dictionaries (phi_k) on X = [0,1], the synthesis operator A, the feature map
// Lambda and the scalar Banach-space kernel K_r.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lr_core.hpp"

namespace lrerm {

enum class DictionaryKind { trig, monomial, hat, custom };

inline std::string to_string(DictionaryKind kind) {
    switch (kind) {
        case DictionaryKind::trig: return "trig";
        case DictionaryKind::monomial: return "monomial";
        case DictionaryKind::hat: return "hat";
        case DictionaryKind::custom: return "custom";
    }
    return "custom";
}

using ScalarFn = std::function<double(double)>;

namespace detail {

inline void check_point(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("dictionary: point must lie in [0,1], got " + std::to_string(x));
    }
}

// Golden-section maximization of a (locally unimodal) function on [a, b].
inline double golden_max(const std::function<double(double)>& f, double a, double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return std::max({f(a), f(b), fc, fd});
}

}  // namespace detail

class Dictionary {
public:
    /// Custom dictionary with a caller-declared bound sigma on ||Lambda(x)||_{r*}.
    Dictionary(std::vector<ScalarFn> atoms, double r, double sigma)
        : Dictionary(DictionaryKind::custom, std::move(atoms), r, 0.0) {
        sigma_ = sigma;
        if (!(sigma_ > 0.0)) throw std::invalid_argument("Dictionary: sigma must be > 0");
    }

    /// phi_0 = 1, phi_{2j-1} = cos(2 pi j x)/j^s, phi_{2j} = sin(2 pi j x)/j^s.
    static Dictionary trig(std::size_t size, double decay, double r) {
        if (size == 0) throw std::invalid_argument("trig dictionary: size must be >= 1");
        std::vector<ScalarFn> atoms;
        atoms.reserve(size);
        atoms.emplace_back([](double) { return 1.0; });
        for (std::size_t k = 1; k < size; ++k) {
            const std::size_t j = (k + 1) / 2;
            const double freq = 2.0 * std::numbers::pi * static_cast<double>(j);
            const double scale = std::pow(static_cast<double>(j), -decay);
            if (k % 2 == 1) {
                atoms.emplace_back([freq, scale](double x) { return scale * std::cos(freq * x); });
            } else {
                atoms.emplace_back([freq, scale](double x) { return scale * std::sin(freq * x); });
            }
        }
        Dictionary d(DictionaryKind::trig, std::move(atoms), r, decay);
        d.sigma_ = d.compute_sigma();
        return d;
    }

    /// phi_k(x) = x^k, k = 0..K-1.
    static Dictionary monomial(std::size_t size, double r) {
        if (size == 0) throw std::invalid_argument("monomial dictionary: size must be >= 1");
        std::vector<ScalarFn> atoms;
        atoms.reserve(size);
        for (std::size_t k = 0; k < size; ++k) {
            const int e = static_cast<int>(k);
            atoms.emplace_back([e](double x) { return e == 0 ? 1.0 : std::pow(x, e); });
        }
        Dictionary d(DictionaryKind::monomial, std::move(atoms), r, 0.0);
        d.sigma_ = d.compute_sigma();
        return d;
    }

    /// Piecewise-linear hat functions centred at the nodes j/(K-1), K >= 2.
    static Dictionary hat(std::size_t size, double r) {
        if (size < 2) throw std::invalid_argument("hat dictionary: size must be >= 2");
        const double h = 1.0 / static_cast<double>(size - 1);
        std::vector<ScalarFn> atoms;
        atoms.reserve(size);
        for (std::size_t j = 0; j < size; ++j) {
            const double node = static_cast<double>(j) * h;
            atoms.emplace_back([node, h](double x) { return std::max(0.0, 1.0 - std::fabs(x - node) / h); });
        }
        Dictionary d(DictionaryKind::hat, std::move(atoms), r, 0.0);
        d.sigma_ = d.compute_sigma();
        return d;
    }

    [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }
    [[nodiscard]] double exponent() const noexcept { return r_; }
    [[nodiscard]] double dual_exponent() const noexcept { return rs_; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] double decay() const noexcept { return decay_; }
    [[nodiscard]] DictionaryKind kind() const noexcept { return kind_; }

    [[nodiscard]] double atom(std::size_t k, double x) const { return atoms_[k](x); }

    /// Lambda(x) = (phi_k(x))_k written into out (size K), no range check.
    void features_into(double x, std::span<double> out) const {
        for (std::size_t k = 0; k < atoms_.size(); ++k) out[k] = atoms_[k](x);
    }

    /// (sum_k |phi_k(x)|^{r*})^{1/r*}
    [[nodiscard]] double feature_norm(double x) const {
        std::vector<double> f(size());
        features_into(x, f);
        return lp_norm(f, rs_);
    }

    /// Numerical rank of the sampled synthesis matrix [phi_k(x_i)] on an m-point grid.
    /// Diagnostic only; full rank is necessary for injectivity of A on span(phi).
    [[nodiscard]] std::size_t numerical_rank(std::size_t grid = 1000, double rel_tol = 1e-10) const {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(grid), static_cast<Eigen::Index>(size()));
        for (std::size_t i = 0; i < grid; ++i) {
            const double x = grid == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(grid - 1);
            for (std::size_t k = 0; k < size(); ++k) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = atoms_[k](x);
            }
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
        qr.setThreshold(rel_tol);
        return static_cast<std::size_t>(qr.rank());
    }

private:
    Dictionary(DictionaryKind kind, std::vector<ScalarFn> atoms, double r, double decay)
        : kind_(kind), atoms_(std::move(atoms)), r_(r), rs_(0.0), sigma_(0.0), decay_(decay) {
        if (!(r_ > 1.0) || std::isinf(r_)) throw std::invalid_argument("Dictionary: r must lie in (1, +inf)");
        if (atoms_.empty()) throw std::invalid_argument("Dictionary: needs at least one atom");
        rs_ = conjugate_exponent(r_);
    }

    // sup_x ||Lambda(x)||_{r*}: 10^4-point grid, then golden-section refinement
    // around every grid local maximum.
    [[nodiscard]] double compute_sigma() const {
        constexpr std::size_t kGrid = 10000;
        std::vector<double> vals(kGrid + 1);
        for (std::size_t i = 0; i <= kGrid; ++i) vals[i] = feature_norm(static_cast<double>(i) / kGrid);
        double best = *std::max_element(vals.begin(), vals.end());
        const auto f = [this](double x) { return feature_norm(x); };
        for (std::size_t i = 0; i <= kGrid; ++i) {
            const bool left_ok = i == 0 || vals[i] >= vals[i - 1];
            const bool right_ok = i == kGrid || vals[i] >= vals[i + 1];
            if (!(left_ok && right_ok)) continue;
            const double a = static_cast<double>(i == 0 ? 0 : i - 1) / kGrid;
            const double b = static_cast<double>(i == kGrid ? kGrid : i + 1) / kGrid;
            best = std::max(best, detail::golden_max(f, a, b));
        }
        return best;
    }

    DictionaryKind kind_;
    std::vector<ScalarFn> atoms_;
    double r_;
    double rs_;
    double sigma_;
    double decay_;
};

/// Lambda(x) = (phi_k(x))_k as an element of l^{r*}.
inline SeqVector feature_map(const Dictionary& dict, double x) {
    detail::check_point(x);
    std::vector<double> f(dict.size());
    dict.features_into(x, f);
    return SeqVector(std::move(f), dict.dual_exponent());
}

/// (Au)(x) = sum_k mu_k phi_k(x), evaluated as <u, Lambda(x)>.
inline double apply_A(const Dictionary& dict, const SeqVector& u, double x) {
    if (u.size() != dict.size()) throw std::invalid_argument("apply_A: coefficient length mismatch");
    if (u.exponent() != dict.exponent()) throw std::invalid_argument("apply_A: exponent mismatch");
    return pairing(u, feature_map(dict, x));
}

/// K_r(x, x') = <J_r^{-1}(Lambda(x)), Lambda(x')> = sum_k |phi_k(x)|^{r*-1} sign(phi_k(x)) phi_k(x').
inline double kernel(const Dictionary& dict, double x, double x2) {
    detail::check_point(x);
    detail::check_point(x2);
    const double e = dict.dual_exponent() - 1.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < dict.size(); ++k) acc += signed_power(dict.atom(k, x), e) * dict.atom(k, x2);
    return acc;
}

/// L^2([0,1]) Gram matrix M_jk = int phi_j phi_k, analytic for trig, adaptive Simpson otherwise.
inline Eigen::MatrixXd gram_matrix(const Dictionary& dict, double tol = 1e-12);

namespace detail {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                          double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b]. The interval is pre-split into 64 panels
/// so that kinks of piecewise-smooth integrands are isolated quickly.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
    constexpr int kPanels = 64;
    double total = 0.0;
    const double h = (b - a) / kPanels;
    for (int i = 0; i < kPanels; ++i) {
        const double lo = a + h * i;
        const double hi = i + 1 == kPanels ? b : a + h * (i + 1);
        const double fa = f(lo);
        const double fb = f(hi);
        const double fm = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += detail::simpson_rec(f, lo, hi, fa, fm, fb, whole, tol / kPanels, 40);
    }
    return total;
}

inline Eigen::MatrixXd gram_matrix(const Dictionary& dict, double tol) {
    const auto k = static_cast<Eigen::Index>(dict.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    if (dict.kind() == DictionaryKind::trig) {
        m(0, 0) = 1.0;
        for (Eigen::Index i = 1; i < k; ++i) {
            const double j = static_cast<double>((i + 1) / 2);
            m(i, i) = 0.5 * std::pow(j, -2.0 * dict.decay());
        }
        return m;
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) {
            const auto a = static_cast<std::size_t>(i);
            const auto b = static_cast<std::size_t>(j);
            const double v = integrate([&](double x) { return dict.atom(a, x) * dict.atom(b, x); }, 0.0, 1.0, tol);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

}  // namespace lrerm
