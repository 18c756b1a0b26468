#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "randsplit/decomposition.hpp"
#include "randsplit/grid.hpp"
#include "randsplit/operators.hpp"
#include "randsplit/sampler.hpp"

namespace randsplit {

enum class LinearSolverKind { ConjugateGradient, Direct };

LinearSolverKind parse_linear_solver(const std::string& name);
std::string to_string(LinearSolverKind kind);

struct SolverConfig {
    double newton_tol = 1e-10;
    int newton_max_iters = 50;
    double linear_tol = 1e-12;
    LinearSolverKind linear_solver = LinearSolverKind::ConjugateGradient;
    /// Shift kappa of a kappa-monotone operator family; steps must satisfy
    /// 2*kappa*h < 1. The p-Laplacian family has kappa = 0.
    double kappa = 0.0;

    void validate() const;
};

class SolverError : public std::runtime_error {
public:
    enum class Kind { NonConvergence, NonFiniteValue };

    SolverError(Kind kind, const std::string& what, int step = -1, std::int64_t realization = -1);

    Kind kind() const { return kind_; }
    int step() const { return step_; }
    std::int64_t realization() const { return realization_; }
    SolverError at_step(int step) const;
    SolverError in_realization(std::int64_t realization) const;

private:
    Kind kind_;
    int step_;
    std::int64_t realization_;
};

struct StepResult {
    GridFunction U;
    int newton_iters = 0;
    int linear_iters = 0;
    double final_residual = 0.0;
    double energy_slack = 0.0;
    double energy_tolerance = 0.0;
    BatchDraw batch_used;
    std::vector<double> residual_history;
};

/// Per-step metadata kept by a trajectory (the state itself is optional).
struct StepInfo {
    int step = 0;
    double t = 0.0;
    int newton_iters = 0;
    int linear_iters = 0;
    double final_residual = 0.0;
    double energy_slack = 0.0;
    double energy_tolerance = 0.0;
    BatchDraw batch;
    std::vector<double> residual_history;

    bool energy_ok() const { return energy_slack >= -energy_tolerance; }
};

struct Trajectory {
    TimeGrid time;
    /// U^0..U^N when states were kept, otherwise {U^0, U^N}.
    std::vector<GridFunction> states;
    std::vector<StepInfo> steps;

    const GridFunction& initial_state() const { return states.front(); }
    const GridFunction& final_state() const { return states.back(); }
    int energy_violations() const;
};

struct RunOptions {
    bool keep_states = false;
    /// Called after every accepted step.
    std::function<void(const StepInfo&)> on_step;
};

/// Solves (I + h A_B(t_n)) U = U_prev + h f_n. Linear operators take one
/// solve plus a residual check; p > 2 uses damped Newton with CG inner solves.
/// Throws SolverError on non-convergence or non-finite values.
StepResult implicit_step(const GridFunction& u_prev, double t_n, double h_n, const BatchOperator& op,
                         const GridFunction& f_n, const SolverConfig& cfg);

/// Slack of the pathwise energy inequality
///   |U|^2 - |U_prev|^2 + |U - U_prev|^2 + 2h <A_B U, U> <= 2h |f| |U|.
/// Non-negative up to solver tolerance.
double check_energy_inequality(const GridFunction& u_prev, const GridFunction& u_n, double h_n,
                               const BatchOperator& op, const GridFunction& f_n);
double energy_tolerance(const SolverConfig& cfg, const GridFunction& u_prev);

/// Full (unsplit) backward Euler on the grid of problem.u0.
Trajectory run_backward_euler(const ProblemSpec& problem, const TimeGrid& time, const SolverConfig& cfg,
                              const RunOptions& options = {});

/// One realization of the randomized splitting scheme. Batches are drawn from
/// RngStream(seed, realization, n) at step n.
Trajectory run_randomized(const ProblemSpec& problem, const Decomposition& dec, const StrategySpec& strategy,
                          const TimeGrid& time, const SolverConfig& cfg, std::uint64_t seed,
                          std::uint64_t realization, const RunOptions& options = {});

/// Unpreconditioned CG for (I + h L) x = b on interior nodes. Returns the
/// iteration count; x holds the initial guess on entry.
int conjugate_gradient(const LinearizedOperator& lin, double h, const GridFunction& b, GridFunction& x, double rel_tol,
                       int max_iters);

}  // namespace randsplit
