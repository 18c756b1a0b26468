#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "randsplit/harness.hpp"

namespace randsplit {

Grid2D ExperimentConfig::grid() const { return build_grid(grid_nodes, grid_nodes, Rect{}); }

Decomposition ExperimentConfig::decomposition() const { return Decomposition(Mx, My, overlap, split_mode); }

void ExperimentConfig::validate() const {
    if (grid_nodes < 3) throw std::invalid_argument("grid_nodes must be >= 3");
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    strategy.validate();
    solver.validate();
    if (problem.source_mode == SourceMode::Analytic && problem.kind != ProblemKind::LinearGaussian)
        throw std::invalid_argument("analytic source mode requires linear_gaussian");
    for (double h : step_sizes) TimeGrid::with_step(problem.T(), h);
    if (strategy.kind == StrategyKind::Predictor) coarsen(grid(), strategy.coarse_factor);
    decomposition();
}

namespace {

// Neumaier-compensated sum in index order.
double stable_sum(const std::vector<double>& values) {
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

ErrorRecord mc_error(const ExperimentConfig& cfg, double h, const McOptions& options) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const Grid2D grid = cfg.grid();
    const Decomposition dec = cfg.decomposition();
    const ProblemSpec problem = make_problem(cfg.problem, grid);
    const TimeGrid time = TimeGrid::with_step(cfg.problem.T(), h);
    const GridFunction reference = exact_solution(cfg.problem, time.final_time(), grid);

    const int reps = cfg.reps;
    std::vector<double> sq_errors(reps, 0.0);
    std::vector<int> violations(reps, 0);
    std::vector<long> steps(reps, 0);
    std::vector<std::exception_ptr> failures(reps);

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int j = next++; j < reps; j = next++) {
            try {
                const Trajectory traj =
                    run_randomized(problem, dec, cfg.strategy, time, cfg.solver, cfg.seed, static_cast<std::uint64_t>(j));
                const double e = h_norm(traj.final_state() - reference);
                sq_errors[j] = e * e;
                violations[j] = traj.energy_violations();
                steps[j] = static_cast<long>(traj.steps.size());
            } catch (const SolverError& e) {
                failures[j] = std::make_exception_ptr(e.in_realization(j));
            } catch (...) {
                failures[j] = std::current_exception();
            }
        }
    };
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(reps));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    const double mean = stable_sum(sq_errors) / reps;
    double var = 0.0;
    if (reps > 1) {
        std::vector<double> dev(reps);
        for (int j = 0; j < reps; ++j) dev[j] = (sq_errors[j] - mean) * (sq_errors[j] - mean);
        var = stable_sum(dev) / (reps - 1);
    }
    const double ref_norm = h_norm(reference);
    ErrorRecord rec;
    rec.h = h;
    rec.strategy = to_string(cfg.strategy.kind);
    rec.param = cfg.strategy.parameter();
    rec.rel_error = std::sqrt(mean) / ref_norm;
    // Delta method for sqrt(mean): se(sqrt m) = se(m) / (2 sqrt m).
    rec.std_err = mean > 0.0 ? std::sqrt(var / reps) / (2.0 * std::sqrt(mean)) / ref_norm : 0.0;
    rec.reps = reps;
    rec.energy_violations = std::accumulate(violations.begin(), violations.end(), 0);
    rec.steps_checked = std::accumulate(steps.begin(), steps.end(), 0L);
    rec.ref_norm = ref_norm;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

double ConvergenceFit::evaluate(double h) const { return std::exp(intercept + slope * std::log(h)); }

ConvergenceFit fit_order(const std::vector<ErrorRecord>& records, const FitRange& range) {
    std::vector<std::pair<double, double>> pts;  // (h, error), sorted by h ascending
    for (const ErrorRecord& r : records)
        if (r.h >= range.h_min && r.h <= range.h_max) {
            if (!(r.rel_error > 0.0) || !(r.h > 0.0)) throw std::invalid_argument("fit_order: non-positive data");
            pts.emplace_back(r.h, r.rel_error);
        }
    std::sort(pts.begin(), pts.end());

    ConvergenceFit fit;
    std::size_t first = 0;
    while (first + 1 < pts.size()) {
        const auto [h0, e0] = pts[first];
        const auto [h1, e1] = pts[first + 1];
        const double local_slope = std::log(e1 / e0) / std::log(h1 / h0);
        if (local_slope >= 0.2) break;
        fit.dropped_h.push_back(h0);
        ++first;
    }
    if (pts.size() - first < 3) throw std::invalid_argument("fit_order: fewer than 3 usable points");

    const std::size_t n = pts.size() - first;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = first; k < pts.size(); ++k) {
        const double x = std::log(pts[k].first), y = std::log(pts[k].second);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        fit.used_h.push_back(pts[k].first);
    }
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0.0;
    for (std::size_t k = first; k < pts.size(); ++k) {
        const double d = std::log(pts[k].second) - (fit.intercept + fit.slope * std::log(pts[k].first));
        rss += d * d;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

}  // namespace randsplit
