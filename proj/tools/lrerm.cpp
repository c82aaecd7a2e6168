#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lrerm/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Regularized ERM in l^r feature spaces: solver and experiment runner"};
    app.require_subcommand(1);
    CLI::App* run = app.add_subcommand("run", "run one experiment and write its artifact");
    run->require_subcommand(1);

    lrerm::RunRequest req;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    double p = 0.0;
    for (const std::string& name : lrerm::run_commands()) {
        CLI::App* sub = run->add_subcommand(name);
        sub->add_option("--config", config, "experiment config (JSON)");
        sub->add_option("--seed", seed, "master seed, overrides the config");
        sub->add_option("--out", out, "output file; stdout when omitted");
        sub->add_option("--threads", req.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--strict", req.strict, "exit with status 2 if a solver does not converge");
        if (name == "sobolev") sub->add_option("--p", p, "Sobolev exponent p > 1");
        sub->callback([&req, name] { req.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lrerm::kExitInvalid;
    }

    for (CLI::App* sub : run->get_subcommands()) {
        if (sub->get_name() != req.command) continue;
        if (sub->count("--config")) req.config = config;
        if (sub->count("--seed")) req.seed = seed;
        if (sub->count("--out")) req.out = out;
        if (req.command == "sobolev" && sub->count("--p")) req.p = p;
    }
    return lrerm::run(req, std::cout, std::cerr);
}
