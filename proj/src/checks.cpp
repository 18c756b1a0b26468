#include "randsplit/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace randsplit {

bool CheckReport::passed() const {
    return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
}

void CheckReport::print(std::ostream& out) const {
    for (const CheckItem& c : items) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    out << (passed() ? "all invariants passed" : "invariant violations found") << '\n';
}

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

GridFunction random_field(const Grid2D& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    return GridFunction::sample(grid, [&](double, double) { return dist(rng); });
}

std::vector<StepContext> contexts_for(const StrategySpec& strategy, int s) {
    if (strategy.kind != StrategyKind::Predictor) return {StepContext{}};
    std::vector<StepContext> out(4);
    for (int l = 0; l < s; ++l) out[1].active.push_back(l);
    out[2].active = {0};
    for (int l = 0; l < s; l += 2) out[3].active.push_back(l);
    return out;
}

}  // namespace

CheckReport run_checks(const ExperimentConfig& cfg) {
    CheckReport report;
    const Grid2D grid = cfg.grid();
    const Decomposition dec = cfg.decomposition();
    const int s = dec.size();
    const auto cell_chi = build_partition_of_unity(dec, grid);
    const auto node_chi = node_partition_of_unity(dec, grid);

    {
        double worst = 0.0;
        for (std::size_t c = 0; c < grid.cell_count(); ++c) {
            double sum = 0.0;
            for (int l = 0; l < s; ++l) sum += cell_chi[l](c);
            worst = std::max(worst, std::abs(sum - 1.0));
        }
        for (std::size_t k = 0; k < grid.node_count(); ++k) {
            double sum = 0.0;
            for (int l = 0; l < s; ++l) sum += node_chi[l][k];
            worst = std::max(worst, std::abs(sum - 1.0));
        }
        report.items.push_back({"partition_of_unity", worst <= 1e-12, fmt("max |sum chi - 1| = %.3e", worst)});
    }

    {
        int bad = 0;
        for (int l = 0; l < s; ++l) {
            const Rect& r = dec.subdomains()[l].rect;
            for (int j = 0; j + 1 < grid.ny(); ++j)
                for (int i = 0; i + 1 < grid.nx(); ++i) {
                    const double x = grid.cell_x(i), y = grid.cell_y(j);
                    const double v = cell_chi[l](grid.cell_index(i, j));
                    const bool inside = x > r.ax && x < r.bx && y > r.ay && y < r.by;
                    if (!r.contains(x, y) && v != 0.0) ++bad;
                    if (inside && !(v > 0.0)) ++bad;
                }
        }
        report.items.push_back({"support", bad == 0, fmt("%.0f cell centres violate the support condition", bad)});
    }

    {
        double worst = 0.0;
        for (const StepContext& ctx : contexts_for(cfg.strategy, s)) {
            const auto law = enumerate_batch_law(cfg.strategy, s, &ctx);
            for (std::size_t c = 0; c < grid.cell_count(); ++c) {
                double mean = 0.0;
                for (const BatchOutcome& o : law)
                    for (std::size_t m = 0; m < o.draw.batch.size(); ++m)
                        mean += o.probability * o.draw.inv_tau[m] * cell_chi[o.draw.batch[m]](c);
                worst = std::max(worst, std::abs(mean - 1.0));
            }
        }
        report.items.push_back(
            {"unbiasedness", worst <= 1e-12, fmt("max |E[sum chi_l/tau_l] - 1| = %.3e", worst)});
    }

    const ProblemSpec problem = make_problem(cfg.problem, grid);
    const SplitOperator split(grid, dec, problem.p, problem.alpha, problem.stencil);
    std::mt19937_64 rng(cfg.seed);

    {
        double worst = 0.0;
        const BatchOperator full = split.full(0.0);
        for (int trial = 0; trial < 5; ++trial) {
            const GridFunction u = random_field(grid, rng);
            GridFunction sum(grid);
            for (int l = 0; l < s; ++l) sum += split.component(l, 0.0).apply(u);
            const GridFunction ref = full.apply(u);
            worst = std::max(worst, h_norm(sum - ref) / std::max(h_norm(ref), 1e-300));
        }
        report.items.push_back(
            {"splitting_consistency", worst <= 1e-12, fmt("max relative |sum A_l u - A u| = %.3e", worst)});
    }

    {
        double worst = std::numeric_limits<double>::infinity();
        const StepContext ctx = contexts_for(cfg.strategy, s).back();
        const auto law = enumerate_batch_law(cfg.strategy, s, &ctx);
        for (int trial = 0; trial < 20; ++trial) {
            const BatchDraw& draw = law[trial % law.size()].draw;
            const BatchOperator op = split.batch(draw, 0.0);
            const GridFunction u = random_field(grid, rng), w = random_field(grid, rng);
            const GridFunction du = op.apply(u) - op.apply(w), d = u - w;
            const double scale = h_norm(du) * h_norm(d) + 1e-300;
            worst = std::min(worst, h_inner(du, d) / scale);
        }
        report.items.push_back(
            {"monotonicity", worst >= -1e-10, fmt("min <A u - A w, u - w> / scale = %.3e", worst)});
    }

    {
        const double h = *std::max_element(cfg.step_sizes.begin(), cfg.step_sizes.end());
        const int steps = std::min(4, static_cast<int>(std::lround(cfg.problem.T() / h)));
        std::vector<double> times;
        for (int n = 0; n <= steps; ++n) times.push_back(n * h);
        CheckItem item{"energy_inequality", false, ""};
        try {
            const Trajectory traj =
                run_randomized(problem, dec, cfg.strategy, TimeGrid(times), cfg.solver, cfg.seed, 0);
            double min_ratio = 0.0;
            for (const StepInfo& info : traj.steps)
                min_ratio = std::min(min_ratio, info.energy_slack / info.energy_tolerance);
            item.passed = traj.energy_violations() == 0;
            item.detail = fmt("%.0f steps, min slack/tol = %.3e", steps, min_ratio);
        } catch (const SolverError& e) {
            item.detail = std::string("solver failure: ") + e.what();
        }
        report.items.push_back(item);
    }

    {
        RngStream a(cfg.seed, 3, 7), b(cfg.seed, 3, 7);
        const StepContext ctx = contexts_for(cfg.strategy, s).back();
        const bool same = draw_batch(cfg.strategy, s, a, &ctx) == draw_batch(cfg.strategy, s, b, &ctx);
        report.items.push_back({"stream_reproducibility", same, same ? "identical draws" : "draws differ"});
    }
    return report;
}

}  // namespace randsplit
