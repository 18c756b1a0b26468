#include <stdexcept>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "randsplit/cli.hpp"
#include "randsplit/config.hpp"

using namespace randsplit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("randsplit_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int code;
    std::string out, err;
};

CliResult cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

// CSV with the trailing wall-clock column removed.
std::string strip_seconds(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
    return out;
}

const char* kSmall = R"({
  "problem": {"kind": "linear_gaussian", "source_mode": "discrete"},
  "grid_nodes": 21, "Mx": 3, "My": 3,
  "strategy": {"kind": "predictor", "rho": 0.05},
  "step_sizes": [0.125, 0.0625, 0.03125],
  "reps": 5, "seed": 17
})";

}  // namespace

TEST_CASE("parse a full config") {
    const ExperimentConfig cfg = parse_config(R"({
      "problem": {"kind": "plaplace_pulse", "source_mode": "discrete", "r": 0.4, "stencil": "cell_centre"},
      "grid_nodes": 21, "Mx": 2, "My": 3, "overlap": 0.1, "split_mode": "symmetric",
      "strategy": {"kind": "uniform_k", "k": 2, "rho": 0.1, "threshold": 0.002, "coarse_factor": 4},
      "step_sizes": [0.5, 0.25], "reps": 7, "seed": 12345678901,
      "solver": {"newton_tol": 1e-9, "newton_max_iters": 20, "linear_tol": 1e-11, "linear_solver": "direct"},
      "output": "out.csv"
    })");
    CHECK(cfg.problem.kind == ProblemKind::PLaplacePulse);
    CHECK(cfg.problem.r == 0.4);
    CHECK(cfg.problem.stencil == GradientStencil::CellCentre);
    CHECK(cfg.grid_nodes == 21);
    CHECK(cfg.Mx == 2);
    CHECK(cfg.My == 3);
    CHECK(cfg.overlap == 0.1);
    CHECK(cfg.split_mode == SplitMode::Symmetric);
    CHECK(cfg.strategy.kind == StrategyKind::UniformK);
    CHECK(cfg.strategy.k == 2);
    CHECK(cfg.strategy.threshold == 0.002);
    CHECK(cfg.strategy.coarse_factor == 4);
    CHECK(cfg.step_sizes == std::vector<double>{0.5, 0.25});
    CHECK(cfg.reps == 7);
    CHECK(cfg.seed == 12345678901ULL);
    CHECK(cfg.solver.newton_tol == 1e-9);
    CHECK(cfg.solver.newton_max_iters == 20);
    CHECK(cfg.solver.linear_solver == LinearSolverKind::Direct);
    CHECK(cfg.output == "out.csv");
}

TEST_CASE("absent fields keep their defaults") {
    const ExperimentConfig cfg = parse_config(R"({"step_sizes": [0.25]})");
    const ExperimentConfig def;
    CHECK(cfg.grid_nodes == def.grid_nodes);
    CHECK(cfg.reps == 50);
    CHECK(cfg.overlap == 0.2);
    CHECK(cfg.split_mode == SplitMode::PaperCompat);
    CHECK(cfg.solver.newton_tol == 1e-10);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"step_sizes": [0.25], "extra": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"step_sizes": [0.25], "problem": {"p": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"step_sizes": [0.25], "solver": {"tol": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"step_sizes": [0.25], "grid_nodes": "41"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"step_sizes": [0.25], "grid_nodes": 41.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"step_sizes": [0.25], "strategy": {"kind": "greedy"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"step_sizes": [0.3]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"step_sizes": []})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"step_sizes": [0.25], "reps": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"step_sizes": [0.25], "seed": -1})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config round trip") {
    ExperimentConfig cfg = default_config();
    cfg.strategy.kind = StrategyKind::Predictor;
    cfg.strategy.rho = 0.03;
    cfg.seed = 5;
    const ExperimentConfig back = parse_config(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK(back.strategy.rho == 0.03);
    CHECK(back.step_sizes == cfg.step_sizes);
}

TEST_CASE("CSV layout") {
    ErrorRecord r;
    r.strategy = "uniform_k";
    r.param = 2;
    r.h = 0.0078125;
    r.rel_error = 0.1;
    r.std_err = 1.0 / 3.0;
    r.reps = 20;
    r.seconds = 1.23456;
    std::ostringstream out;
    write_csv(out, {r});
    CHECK(out.str() ==
          "strategy,param,h,rel_error,std_err,reps,seconds\n"
          "uniform_k,2,0.0078125,0.10000000000000001,0.33333333333333331,20,1.235\n");
    std::ostringstream gp;
    write_gnuplot(gp, {r});
    CHECK(gp.str() == "# h rel_error\n0.0078125 0.10000000000000001\n");
}

TEST_CASE("cli: version and usage errors") {
    const CliResult v = cli({"version"});
    CHECK(v.code == kExitOk);
    CHECK(v.out.find("randsplit ") == 0);
    CHECK(cli({}).code == kExitConfigError);
    CHECK(cli({"frobnicate"}).code == kExitConfigError);
    CHECK(cli({"run", "--reps", "0"}).code == kExitConfigError);
}

TEST_CASE("cli: check on the default config") {
    const CliResult r = cli({"check"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("all invariants passed") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
    const std::string small = write_file("small.json", kSmall);
    CHECK(cli({"check", "--config", small}).code == kExitOk);
}

TEST_CASE("cli: config errors exit 2, solver failures exit 3") {
    CHECK(cli({"run", "--config", write_file("bad.json", R"({"step_sizes":[0.25],"bogus":true})")}).code ==
          kExitConfigError);
    CHECK(cli({"run", "--config", "/nonexistent.json"}).code == kExitConfigError);
    const std::string failing = write_file("fail.json", R"({
      "problem": {"kind": "plaplace_pulse"}, "grid_nodes": 21, "step_sizes": [0.5], "reps": 2,
      "solver": {"newton_max_iters": 1}})");
    const CliResult r = cli({"run", "--config", failing, "--out", "-"});
    CHECK(r.code == kExitSolverError);
    CHECK(r.err.find("solver error") != std::string::npos);
}

TEST_CASE("cli: run is reproducible and independent of the worker count") {
    const std::string cfg = write_file("repro.json", kSmall);
    const std::string a = (scratch_dir() / "a.csv").string(), b = (scratch_dir() / "b.csv").string(),
                      c = (scratch_dir() / "c.csv").string();
    CHECK(cli({"run", "--config", cfg, "--out", a, "--threads", "1"}).code == kExitOk);
    CHECK(cli({"run", "--config", cfg, "--out", b, "--threads", "1"}).code == kExitOk);
    CHECK(cli({"run", "--config", cfg, "--out", c, "--threads", "3"}).code == kExitOk);
    const std::string ca = strip_seconds(read_file(a));
    CHECK(ca.rfind("strategy,param,h,rel_error,std_err,reps\n", 0) == 0);
    CHECK(std::count(ca.begin(), ca.end(), '\n') == 4);
    CHECK(ca == strip_seconds(read_file(b)));
    CHECK(ca == strip_seconds(read_file(c)));

    const std::string d = (scratch_dir() / "d.csv").string();
    CHECK(cli({"run", "--config", cfg, "--out", d, "--seed", "18"}).code == kExitOk);
    CHECK(ca != strip_seconds(read_file(d)));
}

TEST_CASE("cli: convergence writes the fit and the gnuplot file") {
    const std::string cfg = write_file("conv.json", kSmall);
    const std::string out = (scratch_dir() / "conv.csv").string(), gp = (scratch_dir() / "conv.dat").string();
    const CliResult r = cli({"convergence", "--config", cfg, "--out", out, "--gnuplot", gp, "--reps", "2"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("fit: slope=") != std::string::npos);
    const std::string fit = read_file((scratch_dir() / "conv_fit.csv").string());
    CHECK(fit.rfind("slope,intercept,residual,used_h,dropped_h\n", 0) == 0);
    const std::string g = read_file(gp);
    CHECK(std::count(g.begin(), g.end(), '\n') == 4);
    CHECK(read_file(out).find(",2,") != std::string::npos);

    const std::string two = write_file("two.json", R"({"step_sizes": [0.5, 0.25], "reps": 1})");
    CHECK(cli({"convergence", "--config", two, "--out", "-"}).code == kExitConfigError);
}

TEST_CASE("command line tool binary") {
    const char* exe = std::getenv("RANDSPLIT_CLI");
    if (!exe) return;
    const std::string log = (scratch_dir() / "version.txt").string();
    CHECK(std::system((std::string(exe) + " version > " + log).c_str()) == 0);
    CHECK(read_file(log).find("randsplit") == 0);
    const int status = std::system((std::string(exe) + " run --config /nonexistent.json 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(status) == kExitConfigError);
}
