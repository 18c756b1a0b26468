#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randsplit/decomposition.hpp"
#include "randsplit/grid.hpp"
#include "randsplit/operators.hpp"
#include "randsplit/sampler.hpp"
#include "randsplit/solver.hpp"

namespace randsplit {

enum class ProblemKind { PLaplacePulse, LinearGaussian };
enum class SourceMode { Analytic, Discrete };

ProblemKind parse_problem_kind(const std::string& name);
std::string to_string(ProblemKind kind);
SourceMode parse_source_mode(const std::string& name);
std::string to_string(SourceMode mode);

/// Rotating manufactured solutions on [-1, 1]^2 with centre
/// (r cos 2 pi t, r sin 2 pi t).
///   plaplace_pulse:  p = 4, alpha = 1,   u = [0.03 - 10^{3/8}/4 * |x|^{8/3}]_+^{3/4}
///   linear_gaussian: p = 2, alpha = 0.1, u = exp(-100 |x|^2)
struct ManufacturedProblem {
    ProblemKind kind = ProblemKind::LinearGaussian;
    double r = 0.5;
    SourceMode source_mode = SourceMode::Discrete;
    /// Spatial discretisation of the operator (also used by the discrete source).
    GradientStencil stencil = GradientStencil::Corner;

    double p() const { return kind == ProblemKind::PLaplacePulse ? 4.0 : 2.0; }
    double alpha(double) const { return kind == ProblemKind::PLaplacePulse ? 1.0 : 0.1; }
    double T() const { return 1.0; }
};

/// Closed-form profile (pulse or Gaussian) centred at the origin, and its
/// gradient. Exposed for testing.
double profile(ProblemKind kind, double x, double y);
std::pair<double, double> profile_gradient(ProblemKind kind, double x, double y);

/// Nodal samples of u(t); boundary nodes are set to 0.
GridFunction exact_solution(const ManufacturedProblem& problem, double t, const Grid2D& grid);
/// Nodal samples of du/dt via the rotation chain rule.
GridFunction exact_time_derivative(const ManufacturedProblem& problem, double t, const Grid2D& grid);
/// analytic: nodal samples of du/dt - alpha * Laplacian(u) (linear_gaussian only).
/// discrete: du/dt + A_h(t) u_h(t), so the sampled exact solution solves the
/// semi-discrete system exactly.
GridFunction source_term(const ManufacturedProblem& problem, double t, const Grid2D& grid, SourceMode mode);
GridFunction source_term(const ManufacturedProblem& problem, double t, const Grid2D& grid);

/// ProblemSpec on `grid` with u0 = exact_solution(0).
ProblemSpec make_problem(const ManufacturedProblem& problem, const Grid2D& grid);

struct ExperimentConfig {
    ManufacturedProblem problem;
    int grid_nodes = 41;
    int Mx = 3;
    int My = 1;
    double overlap = 0.2;
    SplitMode split_mode = SplitMode::PaperCompat;
    StrategySpec strategy;
    std::vector<double> step_sizes;
    int reps = 50;
    std::uint64_t seed = 1;
    SolverConfig solver;
    std::string output;

    Grid2D grid() const;
    Decomposition decomposition() const;
    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

struct ErrorRecord {
    double h = 0.0;
    std::string strategy;
    double param = 0.0;
    double rel_error = 0.0;
    double std_err = 0.0;
    int reps = 0;
    double seconds = 0.0;
    /// Diagnostics that are not part of the CSV output.
    int energy_violations = 0;
    long steps_checked = 0;
    double ref_norm = 0.0;
};

struct McOptions {
    /// 0 = hardware concurrency.
    unsigned threads = 0;
};

/// Monte Carlo estimate of (E|U^N - U_ref|^2)^{1/2} / |U_ref| over cfg.reps
/// independent realizations with constant step h. Any failed realization
/// fails the record.
ErrorRecord mc_error(const ExperimentConfig& cfg, double h, const McOptions& options = {});

struct FitRange {
    double h_min = 0.0;
    double h_max = 1e300;
};

struct ConvergenceFit {
    double slope = 0.0;
    double intercept = 0.0;  // log(error) at log(h) = 0
    double residual = 0.0;   // RMS of the log-log residuals
    std::vector<double> used_h;
    std::vector<double> dropped_h;

    double evaluate(double h) const;
};

/// Least-squares line through (log h, log rel_error). The smallest step sizes
/// are dropped while the local slope to the next larger h is below 0.2
/// (an error ratio of 2^0.2 per halving). Throws std::invalid_argument when
/// fewer than 3 points remain.
ConvergenceFit fit_order(const std::vector<ErrorRecord>& records, const FitRange& range = {});

}  // namespace randsplit
