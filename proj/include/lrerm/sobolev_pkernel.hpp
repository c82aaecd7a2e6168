#pragma once

// Reproducing kernel of W^{1,p}_0([0,1]) in closed form, the unit flux jump of
// the p-Laplacian Green function, and an exact reproducing-property check on
// piecewise-linear functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lr_core.hpp"

namespace lrerm {

/// Continuous piecewise-linear function given by its values at strictly increasing breakpoints.
class PiecewiseLinear {
public:
    PiecewiseLinear(std::vector<double> knots, std::vector<double> values)
        : knots_(std::move(knots)), values_(std::move(values)) {
        if (knots_.size() < 2 || knots_.size() != values_.size()) {
            throw std::invalid_argument("PiecewiseLinear: need >= 2 knots with matching values");
        }
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (!(knots_[i] > knots_[i - 1])) throw std::invalid_argument("PiecewiseLinear: knots must increase");
        }
        if (knots_.front() != 0.0 || knots_.back() != 1.0) {
            throw std::invalid_argument("PiecewiseLinear: knots must span [0,1]");
        }
    }

    /// Hat of height `height` with support [a, b] and peak at c.
    static PiecewiseLinear hat(double a, double c, double b, double height = 1.0) {
        if (!(0.0 <= a && a < c && c < b && b <= 1.0)) throw std::invalid_argument("hat: need 0 <= a < c < b <= 1");
        std::vector<double> k{0.0};
        std::vector<double> v{0.0};
        if (a > 0.0) {
            k.push_back(a);
            v.push_back(0.0);
        }
        k.push_back(c);
        v.push_back(height);
        if (b < 1.0) {
            k.push_back(b);
            v.push_back(0.0);
        }
        k.push_back(1.0);
        v.push_back(0.0);
        return PiecewiseLinear(std::move(k), std::move(v));
    }

    [[nodiscard]] const std::vector<double>& knots() const noexcept { return knots_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    [[nodiscard]] double operator()(double t) const {
        if (t <= knots_.front()) return values_.front();
        if (t >= knots_.back()) return values_.back();
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
        const auto j = static_cast<std::size_t>(it - knots_.begin());
        const double a = knots_[j - 1];
        const double b = knots_[j];
        if (t == a) return values_[j - 1];
        const double w = (t - a) / (b - a);
        return values_[j - 1] + w * (values_[j] - values_[j - 1]);
    }

    [[nodiscard]] bool vanishes_on_boundary() const noexcept {
        return values_.front() == 0.0 && values_.back() == 0.0;
    }

private:
    std::vector<double> knots_;
    std::vector<double> values_;
};

class PKernel {
public:
    explicit PKernel(double p) : p_(p) {
        if (!(p_ > 1.0) || std::isinf(p_)) throw std::invalid_argument("PKernel: p must lie in (1, +inf)");
    }

    [[nodiscard]] double p() const noexcept { return p_; }

    /// D(x) = (x^{p-1} + (1-x)^{p-1})^{1/(p-1)}
    [[nodiscard]] double denominator(double x) const {
        const double e = p_ - 1.0;
        return std::pow(std::pow(x, e) + std::pow(1.0 - x, e), 1.0 / e);
    }

    /// K_p(x, x2) = (1-x) x2 / D for x2 <= x, (1-x2) x / D for x2 >= x.
    [[nodiscard]] double value(double x, double x2) const {
        check_interior(x);
        if (!(x2 >= 0.0 && x2 <= 1.0)) throw std::domain_error("PKernel: x2 must lie in [0,1]");
        const double d = denominator(x);
        return x2 <= x ? (1.0 - x) * x2 / d : (1.0 - x2) * x / d;
    }

    /// K_p(x, .) as an exact piecewise-linear object.
    [[nodiscard]] PiecewiseLinear section(double x) const {
        check_interior(x);
        return PiecewiseLinear({0.0, x, 1.0}, {0.0, x * (1.0 - x) / denominator(x), 0.0});
    }

    /// Jump J(s-) - J(s+) of the flux J(s) = |s|^{p-2} s across x, where s-/s+ are the
    /// slopes of K_p(x, .) left and right of x.
    [[nodiscard]] double flux_jump(double x) const {
        check_interior(x);
        const double d = denominator(x);
        const double sl = (1.0 - x) / d;
        const double sr = -x / d;
        return flux(sl) - flux(sr);
    }

    [[nodiscard]] double flux(double s) const { return signed_power(s, p_ - 1.0); }

private:
    static void check_interior(double x) {
        if (!(x > 0.0 && x < 1.0)) throw std::domain_error("PKernel: x must lie in (0,1)");
    }

    double p_;
};

/// |int_0^1 J(g') f' dt - f(x)| with g = K_p(x, .), summed exactly over merged linear pieces.
inline double reproducing_check(const PKernel& pk, const PiecewiseLinear& f, double x) {
    if (!f.vanishes_on_boundary()) throw std::invalid_argument("reproducing_check: f must vanish at 0 and 1");
    std::vector<double> cuts = f.knots();
    cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const double d = pk.denominator(x);
    const double jl = pk.flux((1.0 - x) / d);
    const double jr = pk.flux(-x / d);
    double acc = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double a = cuts[i - 1];
        const double b = cuts[i];
        const double jg = b <= x ? jl : jr;
        acc += jg * (f(b) - f(a));
    }
    return std::fabs(acc - f(x));
}

}  // namespace lrerm
