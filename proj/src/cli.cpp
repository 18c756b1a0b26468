#include "randsplit/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "randsplit/checks.hpp"
#include "randsplit/config.hpp"

namespace randsplit {

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string gnuplot;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config, "experiment config (JSON); built-in default if omitted");
    cmd->add_option("--seed", opt.seed, "override the config seed");
}

void add_run_options(CLI::App* cmd, Options& opt) {
    add_common(cmd, opt);
    cmd->add_option("--out", opt.out, "CSV output path (overrides config.output; '-' for stdout only)");
    cmd->add_option("--reps", opt.reps, "override the number of realizations")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", opt.threads, "worker threads (0 = available parallelism)");
    cmd->add_option("--gnuplot", opt.gnuplot, "also write a two-column (h, rel_error) file");
}

ExperimentConfig resolve(const Options& opt) {
    ExperimentConfig cfg = opt.config.empty() ? default_config() : load_config(opt.config);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.reps) cfg.reps = *opt.reps;
    if (!opt.out.empty()) cfg.output = opt.out == "-" ? "" : opt.out;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::vector<ErrorRecord> sweep(const ExperimentConfig& cfg, const Options& opt, std::ostream& out) {
    std::vector<ErrorRecord> records;
    std::ofstream file;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) throw ConfigError("cannot write '" + cfg.output + "'");
        write_csv_header(file);
    }
    write_csv_header(out);
    std::vector<double> hs = cfg.step_sizes;
    std::sort(hs.begin(), hs.end(), std::greater<>());
    for (double h : hs) {
        records.push_back(mc_error(cfg, h, McOptions{opt.threads}));
        write_csv_row(out, records.back());
        out.flush();
        if (file) {
            write_csv_row(file, records.back());
            file.flush();
        }
        if (records.back().energy_violations > 0)
            std::cerr << "warning: " << records.back().energy_violations << " energy-inequality violations at h = " << h
                      << '\n';
    }
    if (!opt.gnuplot.empty()) {
        std::ofstream g(opt.gnuplot);
        if (!g) throw ConfigError("cannot write '" + opt.gnuplot + "'");
        write_gnuplot(g, records);
    }
    return records;
}

std::string fit_path(const std::string& csv) {
    if (csv.empty()) return {};
    std::filesystem::path p(csv);
    return (p.parent_path() / (p.stem().string() + "_fit.csv")).string();
}

std::string join_h(const std::vector<double>& hs) {
    std::string s;
    char buf[32];
    for (double h : hs) {
        std::snprintf(buf, sizeof buf, "%.17g", h);
        if (!s.empty()) s += ' ';
        s += buf;
    }
    return s;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Randomized operator splitting for parabolic problems", "randsplit"};
    app.require_subcommand(1);
    Options opt;
    CLI::App* run = app.add_subcommand("run", "Monte Carlo error for every configured step size, as CSV");
    add_run_options(run, opt);
    CLI::App* conv = app.add_subcommand("convergence", "run, then fit the convergence order");
    add_run_options(conv, opt);
    CLI::App* check = app.add_subcommand("check", "invariant and diagnostic suite");
    add_common(check, opt);
    CLI::App* version = app.add_subcommand("version", "print the version");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitConfigError;
    }

    try {
        if (version->parsed()) {
            out << "randsplit " << RANDSPLIT_VERSION << '\n';
            return kExitOk;
        }
        const ExperimentConfig cfg = resolve(opt);
        if (check->parsed()) {
            const CheckReport report = run_checks(cfg);
            report.print(out);
            return report.passed() ? kExitOk : kExitCheckFailed;
        }
        if (conv->parsed() && cfg.step_sizes.size() < 3) throw ConfigError("convergence needs at least 3 step sizes");
        const std::vector<ErrorRecord> records = sweep(cfg, opt, out);
        if (conv->parsed()) {
            ConvergenceFit fit;
            try {
                fit = fit_order(records);
            } catch (const std::invalid_argument& e) {
                err << "fit failed: " << e.what() << '\n';
                return kExitCheckFailed;
            }
            char line[256];
            std::snprintf(line, sizeof line, "fit: slope=%.6f intercept=%.6f residual=%.3e points=%zu dropped=%zu",
                          fit.slope, fit.intercept, fit.residual, fit.used_h.size(), fit.dropped_h.size());
            out << line << '\n';
            if (const std::string path = fit_path(cfg.output); !path.empty()) {
                std::ofstream f(path);
                f << "slope,intercept,residual,used_h,dropped_h\n";
                char nums[128];
                std::snprintf(nums, sizeof nums, "%.17g,%.17g,%.17g", fit.slope, fit.intercept, fit.residual);
                f << nums << ',' << join_h(fit.used_h) << ',' << join_h(fit.dropped_h) << '\n';
            }
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << " (step " << e.step() << ", realization " << e.realization() << ")\n";
        return kExitSolverError;
    }
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace randsplit
