#include "randsplit/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace randsplit {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items())
        if (!known.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <class Enum, class Parse>
void read_enum(const json& obj, const char* key, Enum& out, Parse parse, const std::string& where) {
    std::string name;
    bool present = obj.contains(key);
    read(obj, key, name, where);
    if (!present) return;
    try {
        out = parse(name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

void read_int(const json& obj, const char* key, int& out, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    out = it->get<int>();
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    reject_unknown(doc,
                   {"problem", "grid_nodes", "Mx", "My", "overlap", "split_mode", "strategy", "step_sizes", "reps",
                    "seed", "solver", "output"},
                   "config");

    ExperimentConfig cfg;
    if (auto it = doc.find("problem"); it != doc.end()) {
        const json& p = *it;
        reject_unknown(p, {"kind", "source_mode", "r", "stencil"}, "problem");
        read_enum(p, "kind", cfg.problem.kind, parse_problem_kind, "problem");
        read_enum(p, "source_mode", cfg.problem.source_mode, parse_source_mode, "problem");
        read_enum(p, "stencil", cfg.problem.stencil, parse_gradient_stencil, "problem");
        read(p, "r", cfg.problem.r, "problem");
    }
    read_int(doc, "grid_nodes", cfg.grid_nodes, "config");
    read_int(doc, "Mx", cfg.Mx, "config");
    read_int(doc, "My", cfg.My, "config");
    read(doc, "overlap", cfg.overlap, "config");
    read_enum(doc, "split_mode", cfg.split_mode, parse_split_mode, "config");
    if (auto it = doc.find("strategy"); it != doc.end()) {
        const json& s = *it;
        reject_unknown(s, {"kind", "k", "rho", "threshold", "coarse_factor"}, "strategy");
        read_enum(s, "kind", cfg.strategy.kind, parse_strategy_kind, "strategy");
        read_int(s, "k", cfg.strategy.k, "strategy");
        read(s, "rho", cfg.strategy.rho, "strategy");
        read(s, "threshold", cfg.strategy.threshold, "strategy");
        read_int(s, "coarse_factor", cfg.strategy.coarse_factor, "strategy");
    }
    read(doc, "step_sizes", cfg.step_sizes, "config");
    read_int(doc, "reps", cfg.reps, "config");
    if (auto it = doc.find("seed"); it != doc.end()) {
        if (!it->is_number_unsigned()) throw ConfigError("config.seed: expected a non-negative integer");
        cfg.seed = it->get<std::uint64_t>();
    }
    if (auto it = doc.find("solver"); it != doc.end()) {
        const json& s = *it;
        reject_unknown(s, {"newton_tol", "newton_max_iters", "linear_tol", "linear_solver"}, "solver");
        read(s, "newton_tol", cfg.solver.newton_tol, "solver");
        read_int(s, "newton_max_iters", cfg.solver.newton_max_iters, "solver");
        read(s, "linear_tol", cfg.solver.linear_tol, "solver");
        read_enum(s, "linear_solver", cfg.solver.linear_solver, parse_linear_solver, "solver");
    }
    read(doc, "output", cfg.output, "config");

    if (cfg.step_sizes.empty()) throw ConfigError("config.step_sizes: at least one step size required");
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["problem"] = {{"kind", to_string(cfg.problem.kind)},
                      {"source_mode", to_string(cfg.problem.source_mode)},
                      {"r", cfg.problem.r},
                      {"stencil", to_string(cfg.problem.stencil)}};
    doc["grid_nodes"] = cfg.grid_nodes;
    doc["Mx"] = cfg.Mx;
    doc["My"] = cfg.My;
    doc["overlap"] = cfg.overlap;
    doc["split_mode"] = to_string(cfg.split_mode);
    doc["strategy"] = {{"kind", to_string(cfg.strategy.kind)},
                       {"k", cfg.strategy.k},
                       {"rho", cfg.strategy.rho},
                       {"threshold", cfg.strategy.threshold},
                       {"coarse_factor", cfg.strategy.coarse_factor}};
    doc["step_sizes"] = cfg.step_sizes;
    doc["reps"] = cfg.reps;
    doc["seed"] = cfg.seed;
    doc["solver"] = {{"newton_tol", cfg.solver.newton_tol},
                     {"newton_max_iters", cfg.solver.newton_max_iters},
                     {"linear_tol", cfg.solver.linear_tol},
                     {"linear_solver", to_string(cfg.solver.linear_solver)}};
    doc["output"] = cfg.output;
    return doc.dump(2);
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.problem.kind = ProblemKind::LinearGaussian;
    cfg.problem.source_mode = SourceMode::Discrete;
    cfg.strategy.kind = StrategyKind::UniformSingle;
    for (int e = 5; e <= 8; ++e) cfg.step_sizes.push_back(std::ldexp(1.0, -e));
    cfg.reps = 20;
    cfg.output = "results.csv";
    return cfg;
}

void write_csv_header(std::ostream& out) { out << "strategy,param,h,rel_error,std_err,reps,seconds\n"; }

void write_csv_row(std::ostream& out, const ErrorRecord& rec) {
    char seconds[32];
    std::snprintf(seconds, sizeof seconds, "%.3f", rec.seconds);
    out << rec.strategy << ',' << number(rec.param) << ',' << number(rec.h) << ',' << number(rec.rel_error) << ','
        << number(rec.std_err) << ',' << rec.reps << ',' << seconds << '\n';
}

void write_csv(std::ostream& out, const std::vector<ErrorRecord>& records) {
    write_csv_header(out);
    for (const ErrorRecord& r : records) write_csv_row(out, r);
}

void write_gnuplot(std::ostream& out, const std::vector<ErrorRecord>& records) {
    out << "# h rel_error\n";
    for (const ErrorRecord& r : records) out << number(r.h) << ' ' << number(r.rel_error) << '\n';
}

}  // namespace randsplit
