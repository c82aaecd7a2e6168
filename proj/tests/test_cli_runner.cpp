#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "lrerm/runner.hpp"

namespace fs = std::filesystem;
using namespace lrerm;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("lrerm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    // Runs the installed binary; returns the exit status and captures stderr.
    int cli(const std::string& args, std::string* err = nullptr) const {
        const fs::path log = dir_ / "stderr.txt";
        const std::string cmd = std::string(LRERM_CLI_PATH) + " " + args + " >/dev/null 2>" + log.string();
        const int status = std::system(cmd.c_str());
        if (err) *err = read_file(log);
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    static std::string config(const std::string& name) {
        return (fs::path(LRERM_SOURCE_DIR) / "configs" / name).string();
    }

    int in_process(RunRequest req, std::string* out, std::string* err) const {
        std::ostringstream o;
        std::ostringstream e;
        const int code = run(req, o, e);
        if (out) *out = o.str();
        if (err) *err = e.str();
        return code;
    }

    fs::path dir_;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::string cellv;
        std::istringstream ls(line);
        while (std::getline(ls, cellv, ',')) row.push_back(cellv);
        rows.push_back(row);
    }
    return rows;
}

const char* kSolve = R"({
  "dictionary": {"type": "monomial", "size": 2, "r": 2},
  "regularizer": {"r": 2, "eta": 1},
  "loss": {"kind": "power", "p": 2},
  "lambda": 0.1,
  "sample": [[0.1, 1.0], [0.5, 0.3], [0.9, -0.2]]
})";

}  // namespace

TEST_F(CliTest, ConsistencyIsDeterministic) {
    const fs::path a = dir_ / "a.csv";
    const fs::path b = dir_ / "b.csv";
    ASSERT_EQ(cli("run consistency --config " + config("consistency_valid.json") + " --seed 7 --out " + a.string()), 0);
    ASSERT_EQ(cli("run consistency --config " + config("consistency_valid.json") + " --seed 7 --threads 2 --out " +
                  b.string()),
              0);
    EXPECT_EQ(read_file(a), read_file(b));
    const auto rows = parse_csv(read_file(a));
    EXPECT_EQ(rows.front(), (std::vector<std::string>{"n", "seed", "lambda", "excess_risk", "u_dist", "kkt_residual",
                                                      "radius_bound", "within_radius"}));
    EXPECT_EQ(rows.size(), 16u);
    const Json meta = parse_json(read_file(dir_ / "a.csv.meta.json"));
    EXPECT_EQ(meta["flag"], "valid");
    EXPECT_EQ(meta["radius_bound_holds"], true);
    ASSERT_EQ(cli("run consistency --config " + config("consistency_valid.json") + " --seed 8 --out " + b.string()), 0);
    EXPECT_NE(read_file(a), read_file(b));
}

TEST_F(CliTest, InvalidScheduleIsFlagged) {
    const fs::path a = dir_ / "inv.csv";
    std::string err;
    ASSERT_EQ(cli("run consistency --config " + config("consistency_invalid.json") + " --out " + a.string(), &err), 0);
    const Json meta = parse_json(read_file(dir_ / "inv.csv.meta.json"));
    EXPECT_EQ(meta["flag"], "invalid");
    EXPECT_EQ(meta["weak_valid"], false);
    EXPECT_NE(err.find("invalid"), std::string::npos);
}

TEST_F(CliTest, NegativeLambdaNamesTheField) {
    std::string text = kSolve;
    text.replace(text.find("0.1,\n"), 3, "-1.0");
    std::string err;
    EXPECT_EQ(cli("run solve --config " + write("neg.json", text).string(), &err), 1);
    EXPECT_NE(err.find("lambda"), std::string::npos) << err;
}

TEST_F(CliTest, MalformedJsonReportsPosition) {
    std::string err;
    EXPECT_EQ(cli("run solve --config " + write("bad.json", "{\n  \"lambda\": 0.1,\n  oops\n}").string(), &err), 1);
    EXPECT_NE(err.find("line 3"), std::string::npos) << err;
    EXPECT_NE(err.find("column"), std::string::npos) << err;
}

TEST_F(CliTest, UnknownFieldRejected) {
    std::string text = kSolve;
    text.replace(text.find("\"lambda\""), 0, "\"lambda_typo\": 3,\n  ");
    std::string err;
    EXPECT_EQ(cli("run solve --config " + write("unk.json", text).string(), &err), 1);
    EXPECT_NE(err.find("lambda_typo"), std::string::npos) << err;
}

TEST_F(CliTest, NestedFieldErrorsCarryPath) {
    std::string text = kSolve;
    text.replace(text.find("\"p\": 2"), 6, "\"p\": 0.5");
    std::string err;
    EXPECT_EQ(cli("run solve --config " + write("p.json", text).string(), &err), 1);
    EXPECT_NE(err.find("loss.p"), std::string::npos) << err;
}

TEST_F(CliTest, SolutionJsonRoundTrips) {
    const fs::path out = dir_ / "nested" / "deeper" / "sol.json";
    ASSERT_EQ(cli("run solve --config " + write("s.json", kSolve).string() + " --out " + out.string()), 0);
    ASSERT_TRUE(fs::exists(out));
    const Json sol = parse_json(read_file(out));
    for (const char* key : {"u", "objective", "kkt_residual", "duality_gap", "iterations", "converged"}) {
        EXPECT_TRUE(sol.contains(key)) << key;
    }
    EXPECT_EQ(sol["u"].size(), 2u);
    EXPECT_TRUE(sol["converged"].get<bool>());
    EXPECT_LE(sol["duality_gap"].get<double>(), 1e-8);
    EXPECT_FALSE(fs::exists(fs::path(out.string() + ".tmp")));

    const std::vector<double> u = sol["u"].get<std::vector<double>>();
    const ErmProblem p(Dictionary::monomial(2, 2.0), Regularizer::uniform(AtomPenalty::zero(1.0, 2.0), 2),
                       Loss::power(2.0), {{0.1, 1.0}, {0.5, 0.3}, {0.9, -0.2}}, 0.1);
    EXPECT_EQ(p.objective(u), sol["objective"].get<double>());
}

TEST_F(CliTest, StrictModeExitsTwoOnNonConvergence) {
    std::string text = kSolve;
    text.replace(text.rfind('}'), 1, ", \"solver\": {\"tol\": 1e-14, \"max_iter\": 1}}");
    const fs::path cfg = write("nc.json", text);
    EXPECT_EQ(cli("run solve --strict --config " + cfg.string()), 2);
    EXPECT_EQ(cli("run solve --config " + cfg.string()), 0);
}

TEST_F(CliTest, SobolevDiagonal) {
    const fs::path out = dir_ / "k.csv";
    ASSERT_EQ(cli("run sobolev --p 2 --out " + out.string()), 0);
    const auto rows = parse_csv(read_file(out));
    ASSERT_GT(rows.size(), 1u);
    EXPECT_EQ(rows[0][4], "diagonal");
    const PKernel pk(2.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double x = std::stod(rows[i][1]);
        EXPECT_NEAR(std::stod(rows[i][4]), x * (1.0 - x) / pk.denominator(x), 1e-15);
        EXPECT_LE(std::stod(rows[i][6]), 1e-10);
        EXPECT_NEAR(std::stod(rows[i][5]), 1.0, 1e-10);
    }
}

TEST_F(CliTest, SobolevNeedsP) {
    std::string err;
    EXPECT_EQ(cli("run sobolev", &err), 1);
    EXPECT_NE(err.find("p"), std::string::npos);
    EXPECT_EQ(cli("run sobolev --p 1"), 1);
    EXPECT_EQ(cli("run sobolev --config " + config("sobolev.json")), 0);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(cli("run bogus"), 1);
    EXPECT_EQ(cli("run solve"), 1);
    EXPECT_EQ(cli("run solve --config " + (dir_ / "missing.json").string()), 1);
    EXPECT_EQ(cli("--help"), 0);
}

TEST_F(CliTest, ShippedConfigsRun) {
    for (const char* c : {"solve", "path", "kernel"}) {
        const std::string cmd = c;
        const fs::path out = dir_ / (cmd + ".out");
        EXPECT_EQ(cli("run " + cmd + " --config " + config(cmd + ".json") + " --out " + out.string()), 0) << c;
        EXPECT_GT(fs::file_size(out), 0u);
    }
    const auto path = parse_csv(read_file(dir_ / "path.out"));
    ASSERT_EQ(path.size(), 5u);
    for (std::size_t i = 1; i < path.size(); ++i) EXPECT_EQ(path[i][5], "true");
}

TEST_F(CliTest, ConcentrationInProcess) {
    const fs::path cfg = write("c.json", R"({"q": 2, "n": [20], "tau": [1, 2], "trials": 500, "dim": 4})");
    RunRequest req;
    req.command = "concentration";
    req.config = cfg;
    std::string out;
    std::string err;
    ASSERT_EQ(in_process(req, &out, &err), 0) << err;
    const auto rows = parse_csv(out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].back(), "e_minus_tau");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double e = std::stod(rows[i][7]);
        EXPECT_LE(std::stod(rows[i][6]), e + 3.0 * std::sqrt(e * (1.0 - e) / 500.0));
    }
    req.seed = 5;
    std::string again;
    ASSERT_EQ(in_process(req, &again, nullptr), 0);
    req.threads = 2;
    std::string threaded;
    ASSERT_EQ(in_process(req, &threaded, nullptr), 0);
    EXPECT_EQ(again, threaded);
}

TEST_F(CliTest, NumbersRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(kInf), "inf");
}
