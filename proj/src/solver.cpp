#include "randsplit/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "randsplit/log.hpp"

namespace randsplit {

LinearSolverKind parse_linear_solver(const std::string& name) {
    if (name == "cg" || name == "conjugate_gradient") return LinearSolverKind::ConjugateGradient;
    if (name == "direct") return LinearSolverKind::Direct;
    throw std::invalid_argument("unknown linear solver '" + name + "'");
}

std::string to_string(LinearSolverKind kind) { return kind == LinearSolverKind::Direct ? "direct" : "cg"; }

void SolverConfig::validate() const {
    if (!(newton_tol > 0) || !(linear_tol > 0)) throw std::invalid_argument("solver tolerances must be positive");
    if (newton_max_iters < 1) throw std::invalid_argument("newton_max_iters must be >= 1");
    if (!(kappa >= 0)) throw std::invalid_argument("kappa must be non-negative");
}

SolverError::SolverError(Kind kind, const std::string& what, int step, std::int64_t realization)
    : std::runtime_error(what), kind_(kind), step_(step), realization_(realization) {}

SolverError SolverError::at_step(int step) const {
    return SolverError(kind_, std::string(what()) + " (step " + std::to_string(step) + ")", step, realization_);
}

SolverError SolverError::in_realization(std::int64_t realization) const {
    return SolverError(kind_, std::string(what()) + " (realization " + std::to_string(realization) + ")", step_,
                       realization);
}

int Trajectory::energy_violations() const {
    return static_cast<int>(std::count_if(steps.begin(), steps.end(), [](const StepInfo& s) { return !s.energy_ok(); }));
}

namespace {

// Euclidean product over interior nodes; the operator is symmetric in it.
double dot_interior(const GridFunction& a, const GridFunction& b) {
    const Grid2D& g = a.grid();
    double sum = 0.0;
    for (int j = 1; j < g.ny() - 1; ++j) {
        const std::size_t row = g.index(0, j);
        for (int i = 1; i < g.nx() - 1; ++i) sum += a[row + i] * b[row + i];
    }
    return sum;
}

std::vector<std::size_t> interior_nodes(const Grid2D& g) {
    std::vector<std::size_t> nodes;
    for (int j = 1; j < g.ny() - 1; ++j)
        for (int i = 1; i < g.nx() - 1; ++i) nodes.push_back(g.index(i, j));
    return nodes;
}

void direct_solve(const LinearizedOperator& lin, double h, const GridFunction& b, GridFunction& x) {
    const Grid2D& g = b.grid();
    const std::vector<std::size_t> nodes = interior_nodes(g);
    const auto n = static_cast<Eigen::Index>(nodes.size());
    if (n > 4096) throw std::invalid_argument("direct solver is limited to small grids");
    Eigen::MatrixXd m(n, n);
    Eigen::VectorXd rhs(n);
    GridFunction e(g), col(g);
    for (Eigen::Index c = 0; c < n; ++c) {
        e[nodes[c]] = 1.0;
        lin.apply_into(e, col);
        e[nodes[c]] = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) m(r, c) = h * col[nodes[r]] + (r == c ? 1.0 : 0.0);
        rhs(c) = b[nodes[c]];
    }
    const Eigen::VectorXd sol = m.llt().solve(rhs);
    std::span<double> xv = x.values();
    std::fill(xv.begin(), xv.end(), 0.0);
    for (Eigen::Index c = 0; c < n; ++c) x[nodes[c]] = sol(c);
}

}  // namespace

int conjugate_gradient(const LinearizedOperator& lin, double h, const GridFunction& b, GridFunction& x, double rel_tol,
                       int max_iters) {
    const Grid2D& g = b.grid();
    GridFunction r(g), p(g), ap(g);
    auto apply_system = [&](const GridFunction& v, GridFunction& out) {
        lin.apply_into(v, out);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = v[k] + h * out[k];
        out.enforce_boundary();
    };
    apply_system(x, ap);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = b[k] - ap[k];
    r.enforce_boundary();
    const double bnorm = std::sqrt(dot_interior(b, b));
    const double target = rel_tol * (bnorm > 0.0 ? bnorm : 1.0);
    double rr = dot_interior(r, r);
    if (std::sqrt(rr) <= target) return 0;
    p = r;
    for (int it = 1; it <= max_iters; ++it) {
        apply_system(p, ap);
        const double pap = dot_interior(p, ap);
        if (!(pap > 0.0)) return it;
        const double step = rr / pap;
        x.axpy(step, p);
        r.axpy(-step, ap);
        const double rr_new = dot_interior(r, r);
        if (std::sqrt(rr_new) <= target) return it;
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
    }
    return max_iters;
}

double check_energy_inequality(const GridFunction& u_prev, const GridFunction& u_n, double h_n,
                               const BatchOperator& op, const GridFunction& f_n) {
    const double norm_n = h_norm(u_n);
    const double norm_prev = h_norm(u_prev);
    const double jump = h_norm(u_n - u_prev);
    const double dissipation = 2.0 * h_n * op.weighted_seminorm_power(u_n);
    const double lhs = norm_n * norm_n - norm_prev * norm_prev + jump * jump + dissipation;
    return 2.0 * h_n * h_norm(f_n) * norm_n - lhs;
}

double energy_tolerance(const SolverConfig& cfg, const GridFunction& u_prev) {
    const double n = h_norm(u_prev);
    return 10.0 * cfg.newton_tol * (1.0 + n * n);
}

StepResult implicit_step(const GridFunction& u_prev, double t_n, double h_n, const BatchOperator& op,
                         const GridFunction& f_n, const SolverConfig& cfg) {
    (void)t_n;  // op already carries alpha(t_n)
    if (!(h_n > 0.0)) throw std::invalid_argument("implicit_step: step size must be positive");
    if (2.0 * cfg.kappa * h_n >= 1.0) throw std::invalid_argument("implicit_step: step violates 2*kappa*h < 1");
    if (!u_prev.all_finite() || !f_n.all_finite())
        throw SolverError(SolverError::Kind::NonFiniteValue, "implicit_step: non-finite input");

    const Grid2D& g = u_prev.grid();
    GridFunction rhs = u_prev;
    rhs.axpy(h_n, f_n);
    rhs.enforce_boundary();

    StepResult result{rhs, 0, 0, 0.0, 0.0, 0.0, {}, {}};
    if (op.is_zero()) {
        result.residual_history.push_back(0.0);
    } else {
        const double tol = cfg.newton_tol * std::max(1.0, h_norm(u_prev));
        const bool linear = op.p() == 2.0;
        const int max_cg = 10 * static_cast<int>(g.node_count()) + 100;

        GridFunction& u = result.U;
        u = u_prev;
        GridFunction au(g), residual(g), trial(g), trial_res(g), delta(g);
        auto compute_residual = [&](const GridFunction& v, GridFunction& res) {
            op.apply_into(v, au);
            for (std::size_t k = 0; k < res.size(); ++k) res[k] = v[k] + h_n * au[k] - rhs[k];
            res.enforce_boundary();
            return h_norm(res);
        };

        std::optional<LinearizedOperator> lin;
        if (linear) lin.emplace(op.linearize(u));
        double res_norm = compute_residual(u, residual);
        bool converged = false;
        for (int it = 0; it <= cfg.newton_max_iters; ++it) {
            result.residual_history.push_back(res_norm);
            if (!std::isfinite(res_norm))
                throw SolverError(SolverError::Kind::NonFiniteValue, "implicit_step: non-finite residual");
            if (res_norm <= tol) {
                converged = true;
                break;
            }
            if (it == cfg.newton_max_iters) break;
            if (!linear) lin.emplace(op.linearize(u));

            GridFunction minus_res = residual;
            minus_res *= -1.0;
            std::span<double> dv = delta.values();
            std::fill(dv.begin(), dv.end(), 0.0);
            if (cfg.linear_solver == LinearSolverKind::Direct) {
                direct_solve(*lin, h_n, minus_res, delta);
            } else {
                result.linear_iters += conjugate_gradient(*lin, h_n, minus_res, delta, cfg.linear_tol, max_cg);
            }
            ++result.newton_iters;

            // Backtracking on 0.5*|R|^2; the Newton direction is a descent direction.
            double lambda = 1.0;
            bool accepted = false;
            const double merit = 0.5 * res_norm * res_norm;
            double trial_norm = 0.0;
            for (int halving = 0; halving <= 30; ++halving) {
                trial = u;
                trial.axpy(lambda, delta);
                trial_norm = compute_residual(trial, trial_res);
                const bool sufficient = 0.5 * trial_norm * trial_norm <= (1.0 - 1e-4 * lambda) * merit;
                if (std::isfinite(trial_norm) && (sufficient || linear)) {
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!accepted) break;
            std::swap(u, trial);
            std::swap(residual, trial_res);
            res_norm = trial_norm;
        }
        result.final_residual = res_norm;
        if (!converged) {
            std::ostringstream msg;
            msg << "implicit_step: no convergence after " << result.newton_iters << " Newton iterations, residual "
                << res_norm << " > " << tol;
            throw SolverError(SolverError::Kind::NonConvergence, msg.str());
        }
    }
    if (!result.U.all_finite()) throw SolverError(SolverError::Kind::NonFiniteValue, "implicit_step: non-finite state");
    result.energy_slack = check_energy_inequality(u_prev, result.U, h_n, op, f_n);
    result.energy_tolerance = energy_tolerance(cfg, u_prev);
    return result;
}

namespace {

StepInfo info_from(const StepResult& r, int n, double t) {
    return StepInfo{n,
                    t,
                    r.newton_iters,
                    r.linear_iters,
                    r.final_residual,
                    r.energy_slack,
                    r.energy_tolerance,
                    r.batch_used,
                    r.residual_history};
}

void log_step(const StepInfo& s, std::uint64_t realization) {
    if (log_level() < LogLevel::Step) return;
    std::ostringstream line;
    line << "step," << realization << ',' << s.step << ',';
    for (std::size_t m = 0; m < s.batch.batch.size(); ++m) line << (m ? ";" : "") << s.batch.batch[m] + 1;
    line << ',' << s.newton_iters << ',' << s.final_residual << ',' << s.energy_slack;
    log_line(line.str());
    if (log_level() >= LogLevel::Debug) {
        std::ostringstream hist;
        hist << "newton," << realization << ',' << s.step;
        for (double r : s.residual_history) hist << ',' << r;
        log_line(hist.str());
    }
}

void record(Trajectory& traj, const StepResult& r, int n, double t, const RunOptions& options,
            std::uint64_t realization) {
    StepInfo info = info_from(r, n, t);
    log_step(info, realization);
    if (options.on_step) options.on_step(info);
    traj.steps.push_back(std::move(info));
    if (options.keep_states) traj.states.push_back(r.U);
}

}  // namespace

Trajectory run_backward_euler(const ProblemSpec& problem, const TimeGrid& time, const SolverConfig& cfg,
                              const RunOptions& options) {
    problem.validate();
    cfg.validate();
    const Grid2D& g = problem.grid();
    Trajectory traj{time, {problem.u0}, {}};
    GridFunction u = problem.u0;
    for (int n = 1; n <= time.steps(); ++n) {
        const double t = time.t(n), h = time.step(n);
        const BatchOperator op = full_operator(g, problem.p, problem.alpha(t), problem.stencil);
        try {
            StepResult r = implicit_step(u, t, h, op, problem.source(t, g), cfg);
            r.batch_used = BatchDraw{{0}, {1.0}};
            record(traj, r, n, t, options, 0);
            u = std::move(r.U);
        } catch (const SolverError& e) {
            throw e.at_step(n);
        }
    }
    if (!options.keep_states) traj.states.push_back(u);
    return traj;
}

Trajectory run_randomized(const ProblemSpec& problem, const Decomposition& dec, const StrategySpec& strategy,
                          const TimeGrid& time, const SolverConfig& cfg, std::uint64_t seed,
                          std::uint64_t realization, const RunOptions& options) {
    problem.validate();
    cfg.validate();
    strategy.validate();
    const Grid2D& g = problem.grid();
    const SplitOperator split(g, dec, problem.p, problem.alpha, problem.stencil);
    const int s = dec.size();

    // Coarse backward Euler predictor, advanced in lockstep.
    const bool predictor = strategy.kind == StrategyKind::Predictor;
    std::optional<Grid2D> coarse;
    std::optional<GridFunction> z;
    std::vector<std::vector<double>> coarse_chi;
    if (predictor) {
        coarse.emplace(coarsen(g, strategy.coarse_factor));
        z.emplace(restrict_to_coarse(problem.u0, strategy.coarse_factor));
        coarse_chi = node_partition_of_unity(dec, *coarse);
    }

    Trajectory traj{time, {problem.u0}, {}};
    GridFunction u = problem.u0;
    for (int n = 1; n <= time.steps(); ++n) {
        const double t = time.t(n), h = time.step(n);
        try {
            const GridFunction f_full = problem.source(t, g);
            StepContext ctx;
            if (predictor) {
                const GridFunction f_coarse = problem.source(t, *coarse);
                const BatchOperator coarse_op = full_operator(*coarse, problem.p, problem.alpha(t), problem.stencil);
                GridFunction z_next = implicit_step(*z, t, h, coarse_op, f_coarse, cfg).U;
                const GridFunction psi = activity_indicator(*z, z_next, f_coarse, strategy.threshold);
                ctx.active = active_set(psi, coarse_chi, strategy.rho);
                *z = std::move(z_next);
            }
            RngStream rng(seed, realization, static_cast<std::uint64_t>(n));
            BatchDraw draw = draw_batch(strategy, s, rng, predictor ? &ctx : nullptr);
            const BatchOperator op = split.batch(draw, t);
            const GridFunction f_n = split.batch_rhs(f_full, draw);
            StepResult r = implicit_step(u, t, h, op, f_n, cfg);
            r.batch_used = std::move(draw);
            record(traj, r, n, t, options, realization);
            u = std::move(r.U);
        } catch (const SolverError& e) {
            throw e.at_step(n);
        }
    }
    if (!options.keep_states) traj.states.push_back(u);
    return traj;
}

}  // namespace randsplit
