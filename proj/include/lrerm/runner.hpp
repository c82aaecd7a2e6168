#pragma once

// In-process experiment runner behind the command-line tool: dispatches a
// validated JSON config to the library and writes CSV/JSON artifacts.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "banach_concentration.hpp"
#include "config.hpp"
#include "consistency_lab.hpp"
#include "dictionary.hpp"
#include "erm_solver.hpp"
#include "io.hpp"
#include "sobolev_pkernel.hpp"

namespace lrerm {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitNotConverged = 2 };

struct RunRequest {
    std::string command;
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::size_t threads = 1;
    bool strict = false;
    std::optional<double> p;
};

namespace detail {

struct Artifact {
    std::string body;
    std::optional<std::string> meta;  // sidecar JSON next to the main output
    bool converged = true;
};

inline Json number_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json load_config(const RunRequest& req, bool required) {
    if (!req.config) {
        if (required) throw ConfigError("--config is required for '" + req.command + "'");
        return Json::object();
    }
    std::string text;
    try {
        text = read_file(*req.config);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    return parse_json(text);
}

inline std::uint64_t master_seed(const RunRequest& req, Fields& f) {
    const std::uint64_t from_config = f.count_or("seed", 0);
    return req.seed.value_or(from_config);
}

inline void check_exponents(const Dictionary& d, const Regularizer& g) {
    if (d.exponent() != g.exponent()) throw ConfigError("field regularizer.r must equal dictionary.r");
}

inline SeqVector build_true_u(Fields& f, const Dictionary& d) {
    const std::vector<double> u = f.numbers("true_u");
    if (u.size() != d.size()) throw ConfigError("field true_u must have one entry per dictionary atom");
    return SeqVector(u, d.exponent());
}

inline double build_sigma(Fields& f) {
    const double s = f.number("sigma");
    if (!(s >= 0.0)) throw ConfigError("field sigma must be >= 0");
    return s;
}

inline Artifact run_solve(const RunRequest& req) {
    const Json cfg = load_config(req, true);
    Fields f(cfg, "");
    const std::uint64_t seed = master_seed(req, f);
    const Dictionary dict = build_dictionary(f.object("dictionary"));
    const Regularizer reg = build_regularizer(f.object("regularizer"), dict.size());
    check_exponents(dict, reg);
    const Loss loss = build_loss(f.object("loss"));
    const double lambda = f.positive("lambda");
    SolverOptions opt;
    if (f.has("solver")) opt = build_solver(f.object("solver"));
    std::vector<Observation> sample;
    if (f.has("sample") == f.has("synthetic")) throw ConfigError("exactly one of fields sample, synthetic is required");
    if (f.has("sample")) {
        sample = build_sample(f.raw("sample"), "sample");
    } else {
        Fields s = f.object("synthetic");
        const SeqVector u = build_true_u(s, dict);
        const double sigma = build_sigma(s);
        const std::uint64_t n = s.count("n");
        if (n == 0) throw ConfigError("field synthetic.n must be >= 1");
        s.finish();
        const SyntheticModel model(dict, u, sigma);
        Rng rng(seed, {n});
        sample = model.draw(n, rng);
    }
    f.finish();

    const ErmProblem prob(dict, reg, loss, std::move(sample), lambda);
    const Solution sol = solve_primal(prob, opt);
    Json out;
    out["u"] = sol.u.values();
    out["objective"] = number_json(sol.objective);
    out["kkt_residual"] = number_json(sol.kkt_residual);
    out["duality_gap"] = sol.duality_gap ? number_json(*sol.duality_gap) : Json(nullptr);
    out["iterations"] = sol.iterations;
    out["converged"] = sol.converged;
    return {out.dump(2) + "\n", std::nullopt, sol.converged};
}

inline Artifact run_consistency_cmd(const RunRequest& req) {
    const Json cfg = load_config(req, true);
    Fields f(cfg, "");
    const std::uint64_t seed = master_seed(req, f);
    const Dictionary dict = build_dictionary(f.object("dictionary"));
    const Regularizer reg = build_regularizer(f.object("regularizer"), dict.size());
    check_exponents(dict, reg);
    if (!(reg.eta_min() > 0.0)) throw ConfigError("field regularizer.eta must be > 0 for consistency runs");
    const SeqVector u = build_true_u(f, dict);
    const double sigma = build_sigma(f);
    Fields sf = f.object("schedule");
    const Schedule sched{sf.positive("lambda0"), sf.number("gamma"), dict.exponent()};
    if (!(sched.gamma >= 0.0)) throw ConfigError("field schedule.gamma must be >= 0");
    sf.finish();
    ConsistencyConfig cc;
    for (std::uint64_t n : f.counts("n_grid")) {
        if (n == 0) throw ConfigError("field n_grid entries must be >= 1");
        cc.n_grid.push_back(n);
    }
    if (f.has("seeds") == f.has("num_seeds")) throw ConfigError("exactly one of fields seeds, num_seeds is required");
    if (f.has("seeds")) {
        cc.seeds = f.counts("seeds");
    } else {
        const std::uint64_t k = f.count("num_seeds");
        for (std::uint64_t s = 0; s < k; ++s) cc.seeds.push_back(s);
    }
    if (cc.seeds.empty()) throw ConfigError("field seeds must be non-empty");
    if (f.has("solver")) cc.solver = build_solver(f.object("solver"));
    f.finish();
    cc.master_seed = seed;
    cc.threads = req.threads;

    const SyntheticModel model(dict, u, sigma);
    const auto rows = run_consistency(model, reg, sched, cc);
    CsvTable csv({"n", "seed", "lambda", "excess_risk", "u_dist", "kkt_residual", "radius_bound", "within_radius"});
    bool all_conv = true;
    bool all_within = true;
    for (const auto& r : rows) {
        csv.add_row({cell(std::uint64_t{r.n}), cell(r.seed), cell(r.lambda), cell(r.excess_risk), cell(r.u_dist),
                     cell(r.kkt_residual), cell(r.radius_bound), cell(r.within_radius)});
        all_conv = all_conv && r.converged;
        all_within = all_within && r.within_radius;
    }
    const ScheduleValidity v = schedule_validity(sched);
    Json meta;
    meta["schedule"] = {{"lambda0", sched.lambda0}, {"gamma", sched.gamma}, {"q", sched.q()}};
    meta["vanishing"] = v.vanishing;
    meta["weak_valid"] = v.weak;
    meta["strong_valid"] = v.strong;
    meta["flag"] = v.weak ? "valid" : "invalid";
    meta["all_converged"] = all_conv;
    meta["radius_bound_holds"] = all_within;
    meta["master_seed"] = seed;
    if (!v.weak) std::cerr << "note: schedule gamma = " << format_double(sched.gamma) << " is flagged invalid\n";
    return {csv.str(), meta.dump(2) + "\n", all_conv};
}

inline Artifact run_path(const RunRequest& req) {
    const Json cfg = load_config(req, true);
    Fields f(cfg, "");
    const std::uint64_t seed = master_seed(req, f);
    const Dictionary dict = build_dictionary(f.object("dictionary"));
    const Regularizer reg = build_regularizer(f.object("regularizer"), dict.size());
    check_exponents(dict, reg);
    if (!(reg.eta_min() > 0.0)) throw ConfigError("field regularizer.eta must be > 0 for path diagnostics");
    const SeqVector u = build_true_u(f, dict);
    const double sigma = build_sigma(f);
    const std::uint64_t n = f.count("n");
    if (n == 0) throw ConfigError("field n must be >= 1");
    std::vector<double> lambdas = f.numbers("lambdas");
    for (double l : lambdas) {
        if (!(l > 0.0)) throw ConfigError("field lambdas entries must be > 0");
    }
    SolverOptions opt{1e-10, 200000, SolverMethod::automatic};
    if (f.has("solver")) opt = build_solver(f.object("solver"));
    f.finish();

    const SyntheticModel model(dict, u, sigma);
    Rng rng(seed, {n});
    const ErmProblem base(dict, reg, Loss::power(2.0, model.y_bound()), model.draw(n, rng), lambdas.front());
    const auto rows = path_diagnostics(base, lambdas, opt);
    CsvTable csv({"lambda", "risk", "penalty", "norm", "bound", "within_bound", "kkt_residual", "duality_gap"});
    bool conv = true;
    for (const auto& r : rows) {
        csv.add_row({cell(r.lambda), cell(r.risk), cell(r.penalty), cell(r.norm), cell(r.bound), cell(r.within),
                     cell(r.kkt_residual), cell(r.gap)});
        conv = conv && r.kkt_residual <= opt.tol;
    }
    return {csv.str(), std::nullopt, conv};
}

inline Artifact run_concentration(const RunRequest& req) {
    const Json cfg = load_config(req, true);
    Fields f(cfg, "");
    const std::uint64_t seed = master_seed(req, f);
    const double q = f.number_or("q", 2.0);
    if (!(q > 1.0 && q <= 2.0)) throw ConfigError("field q must lie in (1, 2]");
    const TypeConstant tc = type_constant_lq(q, f.number_or("T", 1.0));
    const double beta = f.number_or("beta", 1.0);
    if (!(beta > 0.0)) throw ConfigError("field beta must be > 0");
    const std::vector<std::uint64_t> ns = f.counts("n");
    const std::vector<double> taus = f.numbers("tau");
    const std::uint64_t trials = f.count_or("trials", 10000);
    const std::uint64_t dim = f.count_or("dim", 16);
    if (trials == 0) throw ConfigError("field trials must be >= 1");
    if (dim == 0) throw ConfigError("field dim must be >= 1");
    if (tc.constant < 1.0) throw ConfigError("field T must be >= 1");
    f.finish();
    for (std::uint64_t n : ns) {
        if (n == 0) throw ConfigError("field n entries must be >= 1");
    }
    for (double t : taus) {
        if (!(t > 0.0)) throw ConfigError("field tau entries must be > 0");
    }
    const VectorSampler sampler = rademacher_sampler(dim, beta, q);
    CsvTable csv({"q", "T", "beta", "n", "tau", "bound", "empirical_rate", "e_minus_tau"});
    for (std::uint64_t n : ns) {
        for (double tau : taus) {
            const ConcentrationSpec spec{q, tc.constant, beta, n, tau};
            const double rate = violation_rate(spec, sampler, trials, seed, req.threads);
            csv.add_row({cell(q), cell(tc.constant), cell(beta), cell(n), cell(tau), cell(hoeffding_bound(spec)),
                         cell(rate), cell(std::exp(-tau))});
        }
    }
    Json meta;
    meta["type_constant_verified"] = tc.verified;
    return {csv.str(), tc.verified ? std::nullopt : std::optional<std::string>(meta.dump(2) + "\n"), true};
}

inline Artifact run_sobolev(const RunRequest& req) {
    const Json cfg = load_config(req, false);
    Fields f(cfg, "");
    std::optional<double> p = req.p;
    if (const Json* v = f.maybe("p")) {
        if (!v->is_number()) throw ConfigError("field p must be a number");
        if (!p) p = v->get<double>();
    }
    const std::uint64_t grid = f.count_or("grid", 10);
    f.finish();
    if (!p) throw ConfigError("field p is required (--p or config)");
    if (!(*p > 1.0) || std::isinf(*p)) throw ConfigError("field p must lie in (1, +inf)");
    if (grid < 2) throw ConfigError("field grid must be >= 2");
    const PKernel pk(*p);
    CsvTable csv({"p", "x", "x2", "kernel", "diagonal", "flux_jump", "reproducing_residual"});
    const double g = static_cast<double>(grid);
    for (std::uint64_t i = 1; i < grid; ++i) {
        const double x = static_cast<double>(i) / g;
        for (std::uint64_t j = 0; j <= grid; ++j) {
            const double x2 = static_cast<double>(j) / g;
            const double res = (j == 0 || j == grid) ? reproducing_check(pk, PiecewiseLinear({0.0, 1.0}, {0.0, 0.0}), x)
                                                     : reproducing_check(pk, pk.section(x2), x);
            csv.add_row({cell(*p), cell(x), cell(x2), cell(pk.value(x, x2)), cell(pk.value(x, x)),
                         cell(pk.flux_jump(x)), cell(res)});
        }
    }
    return {csv.str(), std::nullopt, true};
}

inline Artifact run_kernel(const RunRequest& req) {
    const Json cfg = load_config(req, true);
    Fields f(cfg, "");
    const Dictionary dict = build_dictionary(f.object("dictionary"));
    const std::uint64_t grid = f.count_or("grid", 10);
    if (grid < 1) throw ConfigError("field grid must be >= 1");
    f.finish();
    CsvTable csv({"x", "x2", "kernel", "diag_x", "holder_bound"});
    const double g = static_cast<double>(grid);
    const double r = dict.exponent();
    const double rs = dict.dual_exponent();
    for (std::uint64_t i = 0; i <= grid; ++i) {
        const double x = static_cast<double>(i) / g;
        const double kxx = kernel(dict, x, x);
        for (std::uint64_t j = 0; j <= grid; ++j) {
            const double x2 = static_cast<double>(j) / g;
            const double hb = std::pow(kxx, 1.0 / r) * std::pow(kernel(dict, x2, x2), 1.0 / rs);
            csv.add_row({cell(x), cell(x2), cell(kernel(dict, x, x2)), cell(kxx), cell(hb)});
        }
    }
    return {csv.str(), std::nullopt, true};
}

}  // namespace detail

inline const std::vector<std::string>& run_commands() {
    static const std::vector<std::string> cmds{"solve", "consistency", "path", "concentration", "sobolev", "kernel"};
    return cmds;
}

/// Executes one experiment. Returns 0 on success, 1 on invalid input, 2 when a solver did not
/// converge and strict mode is on. Artifacts go to req.out (atomically) or to `out`.
inline int run(const RunRequest& req, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        if (req.threads == 0) throw ConfigError("--threads must be >= 1");
        detail::Artifact art;
        if (req.command == "solve") {
            art = detail::run_solve(req);
        } else if (req.command == "consistency") {
            art = detail::run_consistency_cmd(req);
        } else if (req.command == "path") {
            art = detail::run_path(req);
        } else if (req.command == "concentration") {
            art = detail::run_concentration(req);
        } else if (req.command == "sobolev") {
            art = detail::run_sobolev(req);
        } else if (req.command == "kernel") {
            art = detail::run_kernel(req);
        } else {
            throw ConfigError("unknown command '" + req.command + "'");
        }
        if (req.out) {
            atomic_write(*req.out, art.body);
            if (art.meta) {
                std::filesystem::path meta = *req.out;
                meta += ".meta.json";
                atomic_write(meta, *art.meta);
            }
        } else {
            out << art.body;
        }
        if (!art.converged) {
            err << "warning: solver did not converge\n";
            if (req.strict) return kExitNotConverged;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

}  // namespace lrerm
