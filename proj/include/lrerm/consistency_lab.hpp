#pragma once

// Consistency experiments: regularization schedules, synthetic well-specified
// models with exact risk, per-cell solves and regularization-path diagnostics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dictionary.hpp"
#include "erm_solver.hpp"
#include "losses.hpp"
#include "lr_core.hpp"
#include "parallel.hpp"
#include "regularizers.hpp"
#include "rng.hpp"

namespace lrerm {

/// lambda_n = lambda0 n^{-gamma}
struct Schedule {
    double lambda0;
    double gamma;
    double r;

    [[nodiscard]] double q() const noexcept { return std::max(2.0, r); }
    [[nodiscard]] double lambda(std::size_t n) const {
        return lambda0 * std::pow(static_cast<double>(n), -gamma);
    }
};

struct ScheduleValidity {
    bool vanishing;
    bool weak;
    bool strong;
};

/// lambda_n n^{1/q} -> inf (weak) and lambda_n n^{1/q} / log n -> inf (strong), with lambda_n -> 0.
inline ScheduleValidity schedule_validity(const Schedule& s) {
    if (!(s.lambda0 > 0.0)) throw std::invalid_argument("schedule: lambda0 must be > 0");
    if (!(s.gamma >= 0.0)) throw std::invalid_argument("schedule: gamma must be >= 0");
    const bool vanishing = s.gamma > 0.0;
    const bool ok = vanishing && s.gamma < 1.0 / s.q();
    return {vanishing, ok, ok};
}

class SyntheticModel {
public:
    SyntheticModel(Dictionary dict, SeqVector true_u, double sigma)
        : dict_(std::move(dict)), true_u_(std::move(true_u)), sigma_(sigma) {
        if (true_u_.size() != dict_.size() || true_u_.exponent() != dict_.exponent()) {
            throw std::invalid_argument("SyntheticModel: true_u does not match the dictionary");
        }
        if (!(sigma_ >= 0.0)) throw std::invalid_argument("SyntheticModel: sigma must be >= 0");
        gram_ = gram_matrix(dict_);
        constexpr int kGrid = 20000;
        for (int i = 0; i <= kGrid; ++i) sup_f_ = std::max(sup_f_, std::fabs(apply_A(dict_, true_u_, double(i) / kGrid)));
    }

    [[nodiscard]] const Dictionary& dict() const noexcept { return dict_; }
    [[nodiscard]] const SeqVector& true_u() const noexcept { return true_u_; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] const Eigen::MatrixXd& gram() const noexcept { return gram_; }
    /// sup_x |(Au*)(x)| on a fine grid.
    [[nodiscard]] double sup_regression() const noexcept { return sup_f_; }
    /// Bound on |y|.
    [[nodiscard]] double y_bound() const noexcept { return sup_f_ + sigma_; }

    /// x ~ U[0,1], y = (Au*)(x) + nu with nu ~ U[-sigma, sigma].
    [[nodiscard]] std::vector<Observation> draw(std::size_t n, Rng& rng) const {
        std::vector<Observation> s(n);
        for (auto& o : s) {
            o.x = rng.uniform();
            o.y = apply_A(dict_, true_u_, o.x) + rng.uniform(-sigma_, sigma_);
        }
        return s;
    }

private:
    Dictionary dict_;
    SeqVector true_u_;
    double sigma_;
    Eigen::MatrixXd gram_;
    double sup_f_ = 0.0;
};

namespace detail {

inline double quad_form(const Eigen::MatrixXd& m, std::span<const double> a, std::span<const double> b) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) d(static_cast<Eigen::Index>(k)) = a[k] - b[k];
    return d.dot(m * d);
}

}  // namespace detail

/// Square-loss excess risk int ((Au)(x) - (Au*)(x))^2 dx.
inline double excess_risk(const SyntheticModel& model, const SeqVector& u) {
    return std::max(0.0, detail::quad_form(model.gram(), u.coeffs(), model.true_u().coeffs()));
}

/// Square-loss risk E (Y - (Au)(X))^2 = excess + sigma^2 / 3.
inline double exact_risk(const SyntheticModel& model, const SeqVector& u) {
    return excess_risk(model, u) + model.sigma() * model.sigma() / 3.0;
}

/// Monte Carlo estimate of E l(Y, (Au)(X)).
inline double monte_carlo_risk(const SyntheticModel& model, const Loss& loss, const SeqVector& u, std::size_t draws,
                               std::uint64_t seed) {
    Rng rng(seed, {0x6d63ULL});
    double acc = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double x = rng.uniform();
        const double y = apply_A(model.dict(), model.true_u(), x) + rng.uniform(-model.sigma(), model.sigma());
        acc += loss_value(loss, y, apply_A(model.dict(), u, x));
    }
    return acc / static_cast<double>(draws);
}

/// Square-loss risk with a fallback to Monte Carlo for other losses.
inline double risk(const SyntheticModel& model, const Loss& loss, const SeqVector& u, std::uint64_t seed = 0) {
    if (loss.kind() == LossKind::power && loss.p() == 2.0) return exact_risk(model, u);
    return monte_carlo_risk(model, loss, u, 1000000, seed);
}

/// Risk minimizer over dom G: u* itself when it is feasible, otherwise the M-metric projection
/// of u* onto the box constraints of G (projected gradient).
inline SeqVector limit_solution(const SyntheticModel& model, const Regularizer& reg) {
    const auto& u = model.true_u();
    bool feasible = true;
    for (std::size_t k = 0; k < u.size(); ++k) feasible = feasible && reg.atom(k).in_domain(u[k]);
    if (feasible) return u;
    const Eigen::MatrixXd& m = model.gram();
    const double step = 1.0 / m.operatorNorm();
    const auto ku = static_cast<Eigen::Index>(u.size());
    Eigen::VectorXd target(ku);
    for (Eigen::Index k = 0; k < ku; ++k) target(k) = u[static_cast<std::size_t>(k)];
    Eigen::VectorXd v = Eigen::VectorXd::Zero(ku);
    const auto project = [&](Eigen::VectorXd& x) {
        for (Eigen::Index k = 0; k < ku; ++k) {
            const auto& a = reg.atom(static_cast<std::size_t>(k));
            if (a.kind() == PenaltyKind::box) x(k) = std::clamp(x(k), a.lower(), a.upper());
        }
    };
    for (int it = 0; it < 200000; ++it) {
        Eigen::VectorXd next = v - step * (m * (v - target));
        project(next);
        const double change = (next - v).lpNorm<Eigen::Infinity>();
        v = std::move(next);
        if (change <= 1e-15) break;
    }
    return SeqVector(std::vector<double>(v.data(), v.data() + ku), u.exponent());
}

/// rho_n = ((||l(., ., 0)||_inf + 1) / (eta beta lambda))^{1/r}
inline double radius_bound(double lambda, double loss0_bound, const ModulusBound& mb) {
    if (!(lambda > 0.0)) throw std::invalid_argument("radius_bound: lambda must be > 0");
    return std::pow((loss0_bound + 1.0) / (mb.eta * mb.beta * lambda), 1.0 / mb.r);
}

struct CellResult {
    std::size_t n;
    std::uint64_t seed;
    double lambda;
    double excess_risk;
    double u_dist;
    double kkt_residual;
    double radius_bound;
    bool within_radius;
    bool converged;
};

struct ConsistencyConfig {
    std::vector<std::size_t> n_grid;
    std::vector<std::uint64_t> seeds;
    std::uint64_t master_seed = 0;
    SolverOptions solver{1e-8, 200000, SolverMethod::automatic};
    std::size_t threads = 1;
};

/// One solve per (n, seed) cell with lambda = schedule(n); rows sorted by (n, seed).
inline std::vector<CellResult> run_consistency(const SyntheticModel& model, const Regularizer& reg,
                                               const Schedule& sched, const ConsistencyConfig& cfg) {
    if (!(reg.eta_min() > 0.0)) throw std::invalid_argument("run_consistency: needs eta_min > 0");
    const Loss loss = Loss::power(2.0, model.y_bound());
    const SeqVector u_dag = limit_solution(model, reg);
    const double loss0 = model.y_bound() * model.y_bound();
    const ModulusBound mb = ModulusBound::make(reg, 0.0);

    std::vector<std::pair<std::size_t, std::uint64_t>> cells;
    for (std::size_t n : cfg.n_grid) {
        for (std::uint64_t s : cfg.seeds) cells.emplace_back(n, s);
    }
    std::sort(cells.begin(), cells.end());
    std::vector<CellResult> out(cells.size());
    parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
        const auto [n, seed] = cells[c];
        Rng rng(cfg.master_seed, {static_cast<std::uint64_t>(n), seed});
        const double lam = sched.lambda(n);
        ErmProblem prob(model.dict(), reg, loss, model.draw(n, rng), lam);
        const Solution sol = solve_primal(prob, cfg.solver);
        std::vector<double> d(sol.u.size());
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = sol.u[k] - u_dag[k];
        const double rho = radius_bound(lam, loss0, mb);
        out[c] = {n,
                  seed,
                  lam,
                  excess_risk(model, sol.u),
                  lp_norm(d, reg.exponent()),
                  sol.kkt_residual,
                  rho,
                  sol.u.norm() <= rho,
                  sol.converged};
    });
    return out;
}

struct PathRow {
    double lambda;
    double risk;          // F(u_lambda)
    double penalty;       // lambda G(u_lambda)
    double norm;          // ||u_lambda - argmin G|| = ||u_lambda||
    double bound;         // modulus quasi-inverse bound on the same distance
    bool within;
    double kkt_residual;
    double gap;
};

/// Lower bound on inf F over dom G: unconstrained least squares for the square loss, 0 otherwise.
inline double risk_lower_bound(const ErmProblem& prob) {
    if (!(prob.loss().kind() == LossKind::power && prob.loss().p() == 2.0)) return 0.0;
    const auto n = static_cast<Eigen::Index>(prob.n());
    const auto k = static_cast<Eigen::Index>(prob.dim());
    Eigen::MatrixXd a(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto f = prob.features(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < k; ++j) a(i, j) = f[static_cast<std::size_t>(j)];
        y(i) = prob.sample()[static_cast<std::size_t>(i)].y;
    }
    const Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(y);
    const double rss = (a * sol - y).squaredNorm() / static_cast<double>(n);
    return std::max(0.0, rss * (1.0 - 1e-12) - 1e-15);
}

/// Solve along a lambda grid and report risk, penalty and the stability bound
///   ||u_lambda|| <= psi^((F(0) - inf F + eps) / lambda),
/// with psi the modulus lower bound of G at its minimizer 0 and eps the duality gap.
inline std::vector<PathRow> path_diagnostics(const ErmProblem& base, const std::vector<double>& lambdas,
                                             const SolverOptions& opt = {1e-10, 200000, SolverMethod::automatic}) {
    if (!(base.reg().eta_min() > 0.0)) throw std::invalid_argument("path_diagnostics: needs eta_min > 0");
    const double inf_f = risk_lower_bound(base);
    const double f0 = base.empirical_risk(std::vector<double>(base.dim(), 0.0));
    const ModulusBound mb = ModulusBound::make(base.reg(), 0.0);
    const MonotoneFn psi = modulus_lower_bound_fn(mb);
    std::vector<PathRow> rows;
    rows.reserve(lambdas.size());
    for (double lam : lambdas) {
        const ErmProblem prob = base.with_lambda(lam);
        const Solution sol = solve_primal(prob, opt);
        const double eps = std::max(0.0, sol.duality_gap.value_or(0.0));
        const double s = (f0 - inf_f + eps) / lam;
        const double closed = std::pow(s / (mb.eta * mb.beta), 1.0 / mb.r);
        const QuasiInverse qi = quasi_inverse(psi, s, 4.0 * closed + 1.0);
        const double bound = qi.bounded ? qi.value : kInf;
        const double norm = sol.u.norm();
        rows.push_back({lam, prob.empirical_risk(sol.u.coeffs()), lam * prob.reg().value(sol.u), norm, bound,
                        norm <= bound, sol.kkt_residual, sol.duality_gap.value_or(kInf)});
    }
    return rows;
}

}  // namespace lrerm
