// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lrerm/lrerm.hpp"
#include "oracles.hpp"

using namespace lrerm;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v) { return format_double(v); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<Observation> random_sample(std::mt19937_64& gen, std::size_t n, bool binary) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Observation> s(n);
    for (auto& o : s) {
        o.x = u(gen);
        const double f = std::cos(2.0 * M_PI * o.x) - 0.7 * o.x + 0.3;
        o.y = binary ? (f + 0.4 * (u(gen) - 0.5) > 0.0 ? 1.0 : -1.0) : f + 0.3 * (u(gen) - 0.5);
    }
    return s;
}

Outcome duality_round_trip() {
    std::mt19937_64 gen(1);
    double worst_trip = 0.0;
    double worst_pair = 0.0;
    for (double r : {1.2, 1.5, 2.0, 3.0, 4.0}) {
        for (int i = 0; i < 1000; ++i) {
            const SeqVector u(oracle::random_vector(gen, 1 + i % 12, 3.0), r);
            const SeqVector back = inverse_duality_map(duality_map(u), r);
            std::vector<double> d(u.size());
            for (std::size_t k = 0; k < u.size(); ++k) d[k] = back[k] - u[k];
            worst_trip = std::max(worst_trip, lp_norm(d, r) / (1.0 + u.norm()));
            const double np = std::pow(u.norm(), r);
            if (np > 0.0) worst_pair = std::max(worst_pair, std::fabs(pairing(u, duality_map(u)) - np) / np);
        }
    }
    return {worst_trip <= 1e-12 && worst_pair <= 1e-12,
            "round trip " + fmt(worst_trip) + ", pairing " + fmt(worst_pair)};
}

Outcome kernel_identities() {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    double worst_diag = 0.0;
    double worst_holder = -kInf;
    for (double r : {1.5, 2.0, 3.0}) {
        const std::vector<Dictionary> dicts{Dictionary::trig(7, 1.0, r), Dictionary::monomial(5, r),
                                            Dictionary::hat(6, r)};
        const double rs = conjugate_exponent(r);
        for (const auto& d : dicts) {
            for (int i = 0; i < 1000; ++i) {
                const double x = ux(gen);
                const double x2 = ux(gen);
                const double kxx = kernel(d, x, x);
                const double fn = std::pow(lp_norm(feature_map(d, x).coeffs(), rs), rs);
                worst_diag = std::max(worst_diag, std::fabs(kxx - fn) / (1.0 + fn));
                const double bound = std::pow(kxx, 1.0 / r) * std::pow(kernel(d, x2, x2), 1.0 / rs);
                worst_holder = std::max(worst_holder, (std::fabs(kernel(d, x, x2)) - bound) / (1.0 + bound));
            }
        }
    }
    return {worst_diag <= 1e-12 && worst_holder <= 1e-12,
            "diagonal " + fmt(worst_diag) + ", holder excess " + fmt(worst_holder)};
}

struct Instance {
    ErmProblem prob;
    bool ridge;
};

std::vector<Instance> solver_instances() {
    std::mt19937_64 gen(3);
    std::vector<Instance> out;
    for (int i = 0; i < 25; ++i) {
        const std::size_t k = 1 + i % 3;
        const std::size_t n = 6 + (i * 7) % 15;
        const double lambda = 0.02 + 0.04 * (i % 5);
        if (i % 5 == 0) {
            const double eta = 0.5 + 0.1 * (i % 4);
            out.push_back({ErmProblem(i % 2 ? Dictionary::monomial(k, 2.0) : Dictionary::trig(k, 1.0, 2.0),
                                      Regularizer::uniform(AtomPenalty::zero(eta, 2.0), k), Loss::power(2.0),
                                      random_sample(gen, n, false), lambda),
                           true});
            continue;
        }
        const double r = i % 4 == 1 ? 1.5 : (i % 4 == 2 ? 3.0 : 2.0);
        std::vector<AtomPenalty> atoms;
        for (std::size_t j = 0; j < k; ++j) {
            if ((i + j) % 3 == 0) atoms.push_back(AtomPenalty::abs_weight(0.1, 0.4, r));
            if ((i + j) % 3 == 1) atoms.push_back(AtomPenalty::box(-0.6, 0.8, 0.3, r));
            if ((i + j) % 3 == 2) atoms.push_back(AtomPenalty::zero(0.8, r));
        }
        const int lk = i % 3;
        const Loss loss = lk == 0 ? Loss::power(2.0) : (lk == 1 ? Loss::power(3.0) : Loss::logistic());
        const Dictionary d = i % 2 ? Dictionary::trig(k, 1.0, r) : Dictionary::monomial(k, r);
        out.push_back({ErmProblem(d, Regularizer(atoms, r), loss, random_sample(gen, n, lk == 2), lambda), false});
    }
    return out;
}

Eigen::MatrixXd design(const ErmProblem& p) {
    Eigen::MatrixXd m(p.n(), p.dim());
    for (std::size_t i = 0; i < p.n(); ++i) {
        for (std::size_t k = 0; k < p.dim(); ++k) m(i, k) = p.features(i)[k];
    }
    return m;
}

Eigen::VectorXd targets(const ErmProblem& p) {
    Eigen::VectorXd y(p.n());
    for (std::size_t i = 0; i < p.n(); ++i) y(i) = p.sample()[i].y;
    return y;
}

Outcome solver_vs_oracle() {
    const auto inst = solver_instances();
    double worst_obj = 0.0;
    double worst_ridge = 0.0;
    double worst_kkt = 0.0;
    double worst_gap = 0.0;
    for (const auto& [p, ridge] : inst) {
        const Solution s = solve_primal(p, {1e-10});
        worst_kkt = std::max(worst_kkt, s.kkt_residual);
        worst_gap = std::max(worst_gap, s.duality_gap.value_or(kInf));
        const auto ref = oracle::grid_refine_min([&](const std::vector<double>& u) { return p.objective(u); }, p.dim(), 3.0);
        const double fr = p.objective(ref);
        worst_obj = std::max(worst_obj, std::fabs(s.objective - fr) / std::fabs(fr));
        if (ridge) {
            const auto ls = oracle::ridge(design(p), targets(p), p.lambda() * p.reg().atom(0).eta());
            for (std::size_t k = 0; k < p.dim(); ++k) worst_ridge = std::max(worst_ridge, std::fabs(s.u[k] - ls[k]));
        }
    }
    return {worst_obj <= 1e-6 && worst_ridge <= 1e-10 && worst_kkt <= 1e-8 && worst_gap <= 1e-6,
            std::to_string(inst.size()) + " instances; objective rel " + fmt(worst_obj) + ", ridge " + fmt(worst_ridge) +
                ", kkt " + fmt(worst_kkt) + ", gap " + fmt(worst_gap)};
}

Outcome representer_structure() {
    const auto inst = solver_instances();
    const double tol = 1e-9;
    double worst_res = 0.0;
    double worst_dual = 0.0;
    std::size_t converged = 0;
    for (const auto& [p, ridge] : inst) {
        const Solution s = solve_primal(p, {tol});
        if (!s.converged) continue;
        ++converged;
        const KktReport rep = kkt_report(p, s.u.coeffs());
        const double res = subdiff_residual(p.reg(), s.u, SeqVector(rep.xi, conjugate_exponent(p.r())));
        worst_res = std::max(worst_res, res);
        if (ridge) {
            const DualSolution d = solve_dual(p, {tol});
            const SeqVector u = recover_from_dual(p, d.w);
            std::vector<double> diff(u.size());
            for (std::size_t k = 0; k < u.size(); ++k) diff[k] = u[k] - s.u[k];
            worst_dual = std::max(worst_dual, lp_norm(diff, p.r()) / (10.0 * std::sqrt(tol) * (1.0 + s.u.norm())));
        }
    }
    return {converged == inst.size() && worst_res <= tol && worst_dual <= 1.0,
            std::to_string(converged) + "/" + std::to_string(inst.size()) + " converged; membership " + fmt(worst_res) +
                ", dual recovery / (10 sqrt tol) " + fmt(worst_dual)};
}

Outcome total_convexity() {
    std::mt19937_64 gen(5);
    double worst = kInf;
    std::size_t checked = 0;
    for (double r : {1.5, 2.0, 3.0}) {
        const Regularizer reg({AtomPenalty::abs_weight(0.2, 0.6, r), AtomPenalty::box(-15.0, 15.0, 1.1, r),
                               AtomPenalty::zero(0.4, r)},
                              r);
        for (double rho : {1.0, 10.0}) {
            const ModulusBound mb = ModulusBound::make(reg, rho);
            std::size_t here = 0;
            while (here < 1000) {
                const SeqVector u0(oracle::random_vector(gen, 3, rho), r);
                const SeqVector u(oracle::random_vector(gen, 3, rho), r);
                if (u0.norm() > rho || u.norm() > rho) continue;
                ++here;
                double lin = 0.0;
                std::vector<double> d(3);
                for (std::size_t k = 0; k < 3; ++k) {
                    const Interval sub = g_subdiff(reg.atom(k), u0[k]);
                    d[k] = u[k] - u0[k];
                    lin += d[k] * (std::isfinite(sub.hi) ? sub.hi : sub.lo);
                }
                const double gap = reg.value(u) - reg.value(u0) - lin - modulus_lower_bound(mb, lp_norm(d, r));
                worst = std::min(worst, gap);
            }
            checked += here;
        }
    }
    return {worst >= -1e-9, std::to_string(checked) + " pairs; worst slack " + fmt(worst)};
}

Outcome sensitivity() {
    std::mt19937_64 gen(6);
    std::size_t held = 0;
    std::size_t total = 0;
    double worst = -kInf;
    for (int i = 0; i < 20; ++i) {
        const double r = i % 3 == 0 ? 1.5 : (i % 3 == 1 ? 2.0 : 3.0);
        const std::size_t k = 2 + i % 4;
        const Regularizer reg = Regularizer::uniform(AtomPenalty::abs_weight(0.05, 0.5 + 0.1 * (i % 3), r), k);
        const Loss loss = i % 4 == 3 ? Loss::logistic() : Loss::power(2.0);
        const ErmProblem p(Dictionary::trig(k, 1.0, r), reg, loss, random_sample(gen, 20 + 3 * i, i % 4 == 3),
                           0.05 + 0.05 * (i % 4));
        const ErmProblem q = p.without(static_cast<std::size_t>(i) % p.n());
        const Solution sa = solve_primal(p, {1e-11});
        const Solution sb = solve_primal(q, {1e-11});
        const SensitivityReport rep = sensitivity_check(p, q, sa, sb, ModulusBound::make(reg, 0.0));
        ++total;
        if (rep.lhs <= rep.rhs + 1e-9) ++held;
        worst = std::max(worst, rep.lhs - rep.rhs);
    }
    return {held == total, std::to_string(held) + "/" + std::to_string(total) + " held; max lhs - rhs " + fmt(worst)};
}

Outcome hoeffding() {
    const std::size_t trials = 10000;
    const VectorSampler s = rademacher_sampler(16, 1.0, 2.0);
    std::size_t ok = 0;
    std::size_t cells = 0;
    double worst = -kInf;
    for (std::size_t n : {50u, 200u}) {
        for (double tau : {1.0, 2.0, 3.0}) {
            const double e = std::exp(-tau);
            const double band = e + 3.0 * std::sqrt(e * (1.0 - e) / static_cast<double>(trials));
            const double rate = violation_rate({2.0, 1.0, 1.0, n, tau}, s, trials, 7);
            ++cells;
            if (rate <= band) ++ok;
            worst = std::max(worst, rate - band);
        }
    }
    return {ok == cells, std::to_string(ok) + "/" + std::to_string(cells) + " cells; max rate - band " + fmt(worst)};
}

Outcome sobolev() {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const PKernel k2(2.0);
    double worst_green = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double x = u(gen);
        while (x == 0.0) x = u(gen);
        const double x2 = u(gen);
        const double g = x2 <= x ? x2 * (1.0 - x) : x * (1.0 - x2);
        worst_green = std::max(worst_green, std::fabs(k2.value(x, x2) - g));
    }
    double worst_flux = 0.0;
    double worst_rep = 0.0;
    std::mt19937_64 fgen(2024);
    std::uniform_real_distribution<double> uv(-2.0, 2.0);
    std::vector<PiecewiseLinear> corpus{PiecewiseLinear({0.0, 1.0}, {0.0, 0.0}), PiecewiseLinear::hat(0.0, 0.3, 1.0),
                                        PiecewiseLinear::hat(0.1, 0.5, 0.9, -1.5), PiecewiseLinear::hat(0.6, 0.7, 0.8, 3.0),
                                        PiecewiseLinear::hat(0.05, 0.1, 0.2, 0.4)};
    while (corpus.size() < 20) {
        const std::size_t m = 2 + corpus.size() % 7;
        std::vector<double> kn{0.0};
        std::vector<double> vals{0.0};
        for (std::size_t j = 1; j <= m; ++j) {
            kn.push_back(static_cast<double>(j) / static_cast<double>(m + 1) + 0.01 * uv(fgen));
            vals.push_back(uv(fgen));
        }
        kn.push_back(1.0);
        vals.push_back(0.0);
        corpus.emplace_back(kn, vals);
    }
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        const PKernel pk(p);
        for (int i = 1; i < 1000; ++i) worst_flux = std::max(worst_flux, std::fabs(pk.flux_jump(i / 1000.0) - 1.0));
        for (const auto& f : corpus) {
            for (int i = 1; i <= 10; ++i) worst_rep = std::max(worst_rep, reproducing_check(pk, f, i / 11.0));
        }
    }
    return {worst_green <= 1e-14 && worst_flux <= 1e-10 && worst_rep <= 1e-10,
            "green " + fmt(worst_green) + ", flux " + fmt(worst_flux) + ", reproducing " + fmt(worst_rep)};
}

Outcome consistency_trend() {
    const double r = 2.0;
    const Dictionary dict = Dictionary::trig(11, 1.0, r);
    const SyntheticModel model(dict, SeqVector({0.4, 1.0, -0.8, 0.6, 0.5, -0.4, 0.3, 0.0, 0.0, 0.0, 0.0}, r), 1.0);
    const Regularizer reg = Regularizer::uniform(AtomPenalty::abs_weight(0.01, 0.01, r), 11);
    ConsistencyConfig cfg;
    cfg.n_grid = {64, 256, 1024, 4096};
    for (std::uint64_t s = 0; s < 20; ++s) cfg.seeds.push_back(s);
    cfg.master_seed = 2718;
    const auto rows = run_consistency(model, reg, {0.5, 0.25, r}, cfg);
    std::vector<double> med_risk;
    std::vector<double> med_dist;
    bool within = true;
    bool conv = true;
    for (std::size_t n : cfg.n_grid) {
        std::vector<double> risk;
        std::vector<double> dist;
        for (const auto& c : rows) {
            if (c.n != n) continue;
            risk.push_back(c.excess_risk);
            dist.push_back(c.u_dist);
            within = within && c.within_radius;
            conv = conv && c.converged;
        }
        med_risk.push_back(median(risk));
        med_dist.push_back(median(dist));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < med_dist.size(); ++i) monotone = monotone && med_dist[i] < med_dist[i - 1];
    const double ratio = med_risk.back() / med_risk.front();

    ConsistencyConfig contrast = cfg;
    contrast.n_grid = {64, 4096};
    contrast.seeds = {0, 1, 2};
    const Schedule invalid{0.5, 0.6, r};
    const auto inv_rows = run_consistency(model, reg, invalid, contrast);
    const bool flagged = !schedule_validity(invalid).weak && schedule_validity({0.5, 0.25, r}).strong;

    std::string d = "risk ratio " + fmt(ratio) + ", median u_dist";
    for (double v : med_dist) d += " " + fmt(v);
    d += within ? ", radius ok" : ", radius VIOLATED";
    if (!conv) d += ", non-converged cells";
    d += flagged ? ", gamma=0.6 flagged invalid (" + std::to_string(inv_rows.size()) + " cells)" : ", flag missing";
    return {ratio <= 0.3 && monotone && within && flagged, d};
}

Outcome regularization_path() {
    const SyntheticModel model(Dictionary::trig(7, 1.0, 2.0), SeqVector({0.3, 0.9, -0.6, 0.4, 0.0, 0.2, 0.0}, 2.0), 0.4);
    Rng rng(42, {300});
    const Regularizer reg = Regularizer::uniform(AtomPenalty::abs_weight(0.05, 0.5, 2.0), 7);
    const ErmProblem base(model.dict(), reg, Loss::power(2.0, model.y_bound()), model.draw(300, rng), 1.0);
    const auto rows = path_diagnostics(base, {1.0, 0.1, 0.01, 0.001});
    bool dominated = true;
    bool decreasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        dominated = dominated && rows[i].within;
        if (i > 0) decreasing = decreasing && rows[i].penalty < rows[i - 1].penalty;
    }
    const double ratio = rows.back().penalty / rows.front().penalty;
    return {dominated && decreasing && ratio <= 0.05,
            "penalty ratio " + fmt(ratio) + (dominated ? ", bound dominates" : ", bound violated")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"duality map round trip and pairing", duality_round_trip},
        {"kernel diagonal and Holder identities", kernel_identities},
        {"solver vs brute-force oracle", solver_vs_oracle},
        {"representer and KKT structure", representer_structure},
        {"total convexity certificate", total_convexity},
        {"leave-one-out sensitivity inequality", sensitivity},
        {"Banach Hoeffding violation rate", hoeffding},
        {"Sobolev p-kernel identities", sobolev},
        {"consistency trend", consistency_trend},
        {"regularization path", regularization_path},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %zu %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
