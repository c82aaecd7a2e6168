#pragma once

// Pointwise losses l(y, w): values, subdifferentials in w, conjugates, growth
// parameters and Lipschitz constants on bounded sets.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "lr_core.hpp"

namespace lrerm {

enum class LossKind { power, hinge, logistic };

class Loss {
public:
    /// |y - w|^p, p >= 1; y_bound = sup |y| when outputs are bounded.
    static Loss power(double p, std::optional<double> y_bound = std::nullopt) {
        if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("power loss: p must lie in [1, +inf)");
        return Loss(LossKind::power, p, y_bound);
    }
    /// max(0, 1 - y w)
    static Loss hinge(std::optional<double> y_bound = std::nullopt) { return Loss(LossKind::hinge, 1.0, y_bound); }
    /// log(1 + exp(-y w))
    static Loss logistic(std::optional<double> y_bound = std::nullopt) {
        return Loss(LossKind::logistic, 1.0, y_bound);
    }

    [[nodiscard]] LossKind kind() const noexcept { return kind_; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] std::optional<double> y_bound() const noexcept { return y_bound_; }

    [[nodiscard]] bool differentiable() const noexcept {
        return kind_ == LossKind::logistic || (kind_ == LossKind::power && p_ > 1.0);
    }

    /// Growth constant c in l(y, w) <= b(y) + c |w|^p.
    [[nodiscard]] double growth_c() const noexcept {
        if (kind_ == LossKind::power) return std::pow(2.0, p_ - 1.0);
        return kind_ == LossKind::hinge ? std::fabs(y_bound_.value_or(1.0)) : 1.0;
    }
    /// Growth offset b(y) in l(y, w) <= b(y) + c |w|^p.
    [[nodiscard]] double growth_b(double y) const noexcept {
        if (kind_ == LossKind::power) return std::pow(2.0, p_ - 1.0) * std::pow(std::fabs(y), p_);
        return kind_ == LossKind::hinge ? 1.0 : std::log(2.0);
    }

    [[nodiscard]] std::string name() const {
        switch (kind_) {
            case LossKind::power: return "power";
            case LossKind::hinge: return "hinge";
            case LossKind::logistic: return "logistic";
        }
        return "power";
    }

private:
    Loss(LossKind kind, double p, std::optional<double> y_bound) : kind_(kind), p_(p), y_bound_(y_bound) {
        if (y_bound_ && !(*y_bound_ >= 0.0)) throw std::invalid_argument("loss: y_bound must be >= 0");
    }

    LossKind kind_;
    double p_;
    std::optional<double> y_bound_;
};

namespace detail {

// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

// 1 / (1 + exp(z)) without overflow.
inline double logistic_tail(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

inline double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

}  // namespace detail

inline double loss_value(const Loss& loss, double y, double w) {
    switch (loss.kind()) {
        case LossKind::power: {
            const double d = std::fabs(y - w);
            if (loss.p() == 2.0) return d * d;
            if (loss.p() == 1.0) return d;
            return abs_power(d, loss.p());
        }
        case LossKind::hinge: return std::max(0.0, 1.0 - y * w);
        case LossKind::logistic: return detail::softplus(-y * w);
    }
    return 0.0;
}

/// Full subdifferential of w -> l(y, w).
inline Interval loss_subgrad(const Loss& loss, double y, double w) {
    switch (loss.kind()) {
        case LossKind::power: {
            if (loss.p() == 1.0) {
                if (w > y) return Interval::point(1.0);
                if (w < y) return Interval::point(-1.0);
                return {-1.0, 1.0};
            }
            if (loss.p() == 2.0) return Interval::point(2.0 * (w - y));
            return Interval::point(-loss.p() * signed_power(y - w, loss.p() - 1.0));
        }
        case LossKind::hinge: {
            const double m = 1.0 - y * w;
            if (m > 0.0) return Interval::point(-y);
            if (m < 0.0) return Interval::point(0.0);
            return {std::min(-y, 0.0), std::max(-y, 0.0)};
        }
        case LossKind::logistic: return Interval::point(-y * detail::logistic_tail(y * w));
    }
    return Interval::empty();
}

/// Derivative in w; only for differentiable losses.
inline double loss_deriv(const Loss& loss, double y, double w) {
    if (!loss.differentiable()) throw std::domain_error("loss_deriv: loss is not differentiable");
    return loss_subgrad(loss, y, w).lo;
}

/// l*(y, v) = sup_w { v w - l(y, w) }, possibly +inf.
inline double loss_conjugate(const Loss& loss, double y, double v) {
    switch (loss.kind()) {
        case LossKind::power: {
            const double p = loss.p();
            if (p == 1.0) return std::fabs(v) <= 1.0 ? v * y : kInf;
            if (p == 2.0) return v * y + 0.25 * v * v;
            const double ps = conjugate_exponent(p);
            return v * y + (p - 1.0) * abs_power(std::fabs(v) / p, ps);
        }
        case LossKind::hinge: {
            if (y == 0.0) return v == 0.0 ? -1.0 : kInf;
            const double a = v / y;
            return (a >= -1.0 && a <= 0.0) ? a : kInf;
        }
        case LossKind::logistic: {
            if (y == 0.0) return v == 0.0 ? -std::log(2.0) : kInf;
            const double a = v / y;
            if (!(a >= -1.0 && a <= 0.0)) return kInf;
            return detail::xlogx(-a) + detail::xlogx(1.0 + a);
        }
    }
    return kInf;
}

/// Lipschitz constant of w -> l(y, w) on |w| <= rho, |y| <= y_bound.
inline double lipschitz_bound(const Loss& loss, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("lipschitz_bound: rho must be > 0");
    switch (loss.kind()) {
        case LossKind::power: {
            if (loss.p() == 1.0) return 1.0;
            if (!loss.y_bound()) throw std::invalid_argument("lipschitz_bound: power loss with p > 1 needs y_bound");
            return loss.p() * std::pow(rho + *loss.y_bound(), loss.p() - 1.0);
        }
        case LossKind::hinge:
        case LossKind::logistic: return std::fabs(loss.y_bound().value_or(1.0));
    }
    return kInf;
}

/// Generic constant 3 c p max{1, rho^{p-1}} + (p - 1) b for losses with l <= b + c |w|^p.
inline double lipschitz_bound_growth(double p, double b, double c, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("lipschitz_bound_growth: rho must be > 0");
    return 3.0 * c * p * std::max(1.0, std::pow(rho, p - 1.0)) + (p - 1.0) * b;
}

}  // namespace lrerm
