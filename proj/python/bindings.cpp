#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <optional>

#include "randsplit/checks.hpp"
#include "randsplit/config.hpp"
#include "randsplit/harness.hpp"

namespace py = pybind11;
using namespace randsplit;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Nodal values as an (ny, nx) array: arr[j, i] is the node (x_i, y_j).
Array to_numpy(const GridFunction& u) {
    const Grid2D& g = u.grid();
    Array out({g.ny(), g.nx()});
    std::copy(u.values().begin(), u.values().end(), out.mutable_data());
    return out;
}

GridFunction from_numpy(const Grid2D& g, const Array& a) {
    if (a.ndim() != 2 || a.shape(0) != g.ny() || a.shape(1) != g.nx())
        throw std::invalid_argument("expected an array of shape (ny, nx)");
    GridFunction u(g, std::vector<double>(a.data(), a.data() + a.size()));
    u.enforce_boundary();
    return u;
}

ExperimentConfig config_from(const std::string& text) {
    try {
        return parse_config(text);
    } catch (const ConfigError& e) {
        throw py::value_error(e.what());
    }
}

py::dict record_dict(const ErrorRecord& r) {
    py::dict d;
    d["strategy"] = r.strategy;
    d["param"] = r.param;
    d["h"] = r.h;
    d["rel_error"] = r.rel_error;
    d["std_err"] = r.std_err;
    d["reps"] = r.reps;
    d["seconds"] = r.seconds;
    d["energy_violations"] = r.energy_violations;
    d["steps_checked"] = r.steps_checked;
    return d;
}

py::dict fit_dict(const ConvergenceFit& f) {
    py::dict d;
    d["slope"] = f.slope;
    d["intercept"] = f.intercept;
    d["residual"] = f.residual;
    d["used_h"] = f.used_h;
    d["dropped_h"] = f.dropped_h;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Randomized domain-decomposition splitting for p-Laplace evolution problems";
    m.attr("__version__") = RANDSPLIT_VERSION;

    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def("default_config", [] { return config_to_json(default_config()); },
          "Default experiment configuration as JSON text.");
    m.def("normalize_config", [](const std::string& text) { return config_to_json(config_from(text)); },
          py::arg("config"), "Validate a JSON configuration and return it with every field filled in.");

    m.def(
        "mc_error",
        [](const std::string& config, double h, unsigned threads) {
            const ExperimentConfig cfg = config_from(config);
            ErrorRecord r;
            {
                py::gil_scoped_release release;
                r = mc_error(cfg, h, McOptions{threads});
            }
            return record_dict(r);
        },
        py::arg("config"), py::arg("h"), py::arg("threads") = 0,
        "Monte Carlo relative error at constant step h.");

    m.def(
        "sweep",
        [](const std::string& config, unsigned threads) {
            const ExperimentConfig cfg = config_from(config);
            std::vector<ErrorRecord> records;
            {
                py::gil_scoped_release release;
                for (double h : cfg.step_sizes) records.push_back(mc_error(cfg, h, McOptions{threads}));
            }
            py::list out;
            for (const ErrorRecord& r : records) out.append(record_dict(r));
            return out;
        },
        py::arg("config"), py::arg("threads") = 0, "mc_error for every configured step size.");

    m.def(
        "fit_order",
        [](const std::vector<double>& h, const std::vector<double>& err, double h_min, double h_max) {
            if (h.size() != err.size()) throw py::value_error("h and err differ in length");
            std::vector<ErrorRecord> records(h.size());
            for (std::size_t i = 0; i < h.size(); ++i) {
                records[i].h = h[i];
                records[i].rel_error = err[i];
            }
            return fit_dict(fit_order(records, FitRange{h_min, h_max}));
        },
        py::arg("h"), py::arg("err"), py::arg("h_min") = 0.0,
        py::arg("h_max") = std::numeric_limits<double>::infinity(), "Log-log least-squares convergence fit.");

    m.def(
        "run_checks",
        [](const std::string& config) {
            const CheckReport report = run_checks(config_from(config));
            py::list items;
            for (const CheckItem& c : report.items) items.append(py::make_tuple(c.name, c.passed, c.detail));
            return py::make_tuple(report.passed(), items);
        },
        py::arg("config"), "Structural invariant checks. Returns (passed, [(name, passed, detail)]).");

    m.def(
        "exact_solution",
        [](const std::string& kind, double t, int nodes, double r) {
            ManufacturedProblem mp;
            mp.kind = parse_problem_kind(kind);
            mp.r = r;
            return to_numpy(exact_solution(mp, t, build_grid(nodes, nodes, Rect{})));
        },
        py::arg("kind"), py::arg("t"), py::arg("nodes"), py::arg("r") = 0.5,
        "Manufactured solution sampled on the nodes x nodes grid of [-1, 1]^2.");

    m.def(
        "simulate",
        [](const std::string& config, double h, std::uint64_t realization) {
            const ExperimentConfig cfg = config_from(config);
            const Grid2D g = cfg.grid();
            std::optional<Trajectory> traj;
            {
                py::gil_scoped_release release;
                traj.emplace(run_randomized(make_problem(cfg.problem, g), cfg.decomposition(), cfg.strategy,
                                            TimeGrid::with_step(cfg.problem.T(), h), cfg.solver, cfg.seed, realization));
            }
            py::dict d;
            d["final"] = to_numpy(traj->final_state());
            d["reference"] = to_numpy(exact_solution(cfg.problem, cfg.problem.T(), g));
            d["energy_violations"] = traj->energy_violations();
            py::list batches;
            for (const StepInfo& s : traj->steps) batches.append(s.batch.batch);
            d["batches"] = batches;
            return d;
        },
        py::arg("config"), py::arg("h"), py::arg("realization") = 0,
        "One realization of the randomized scheme with the configured strategy and seed.");

    m.def(
        "batch_law",
        [](const std::string& kind, int s, int k, double rho, std::vector<int> active) {
            StrategySpec spec{parse_strategy_kind(kind)};
            spec.k = k;
            spec.rho = rho;
            spec.validate();
            const StepContext ctx{std::move(active)};
            py::list out;
            for (const BatchOutcome& o : enumerate_batch_law(spec, s, &ctx))
                out.append(py::make_tuple(o.probability, o.draw.batch, o.draw.inv_tau));
            return out;
        },
        py::arg("kind"), py::arg("s"), py::arg("k") = 1, py::arg("rho") = 0.01,
        py::arg("active") = std::vector<int>{}, "Exact batch law as [(probability, batch, 1/tau)].");

    m.def(
        "apply_operator",
        [](const Array& u, double p, double alpha, const std::string& stencil) {
            if (u.ndim() != 2) throw py::value_error("expected a 2-D array");
            const Grid2D g = build_grid(static_cast<int>(u.shape(1)), static_cast<int>(u.shape(0)), Rect{});
            return to_numpy(full_operator(g, p, alpha, parse_gradient_stencil(stencil)).apply(from_numpy(g, u)));
        },
        py::arg("u"), py::arg("p"), py::arg("alpha") = 1.0, py::arg("stencil") = "corner",
        "Discrete p-Laplace operator on [-1, 1]^2 applied to nodal values (boundary treated as zero).");
}
