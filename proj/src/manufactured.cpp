#include <cmath>
#include <numbers>
#include <stdexcept>

#include "randsplit/harness.hpp"

namespace randsplit {

namespace {

constexpr double kPulseHeight = 0.03;
const double kPulseSlope = std::pow(10.0, 3.0 / 8.0) / 4.0;
constexpr double kGaussRate = 100.0;

struct Centre {
    double x, y;    // centre position
    double vx, vy;  // centre velocity
};

Centre centre(const ManufacturedProblem& problem, double t) {
    const double w = 2.0 * std::numbers::pi;
    const double c = std::cos(w * t), s = std::sin(w * t);
    return {problem.r * c, problem.r * s, -w * problem.r * s, w * problem.r * c};
}

}  // namespace

ProblemKind parse_problem_kind(const std::string& name) {
    if (name == "plaplace_pulse") return ProblemKind::PLaplacePulse;
    if (name == "linear_gaussian") return ProblemKind::LinearGaussian;
    throw std::invalid_argument("unknown problem kind '" + name + "'");
}

std::string to_string(ProblemKind kind) {
    return kind == ProblemKind::PLaplacePulse ? "plaplace_pulse" : "linear_gaussian";
}

SourceMode parse_source_mode(const std::string& name) {
    if (name == "analytic") return SourceMode::Analytic;
    if (name == "discrete") return SourceMode::Discrete;
    throw std::invalid_argument("unknown source mode '" + name + "'");
}

std::string to_string(SourceMode mode) { return mode == SourceMode::Analytic ? "analytic" : "discrete"; }

double profile(ProblemKind kind, double x, double y) {
    const double q = x * x + y * y;
    if (kind == ProblemKind::LinearGaussian) return std::exp(-kGaussRate * q);
    const double g = kPulseHeight - kPulseSlope * std::pow(q, 4.0 / 3.0);
    return g > 0.0 ? std::pow(g, 0.75) : 0.0;
}

std::pair<double, double> profile_gradient(ProblemKind kind, double x, double y) {
    const double q = x * x + y * y;
    if (kind == ProblemKind::LinearGaussian) {
        const double u = std::exp(-kGaussRate * q);
        return {-2.0 * kGaussRate * x * u, -2.0 * kGaussRate * y * u};
    }
    const double g = kPulseHeight - kPulseSlope * std::pow(q, 4.0 / 3.0);
    if (g <= 0.0) return {0.0, 0.0};
    // d/dx g^{3/4} = -2 c x q^{1/3} g^{-1/4}
    const double factor = -2.0 * kPulseSlope * std::cbrt(q) * std::pow(g, -0.25);
    return {factor * x, factor * y};
}

GridFunction exact_solution(const ManufacturedProblem& problem, double t, const Grid2D& grid) {
    const Centre c = centre(problem, t);
    return GridFunction::sample(grid, [&](double x, double y) { return profile(problem.kind, x - c.x, y - c.y); });
}

GridFunction exact_time_derivative(const ManufacturedProblem& problem, double t, const Grid2D& grid) {
    const Centre c = centre(problem, t);
    return GridFunction::sample(grid, [&](double x, double y) {
        const auto [ux, uy] = profile_gradient(problem.kind, x - c.x, y - c.y);
        return -(ux * c.vx + uy * c.vy);
    });
}

GridFunction source_term(const ManufacturedProblem& problem, double t, const Grid2D& grid, SourceMode mode) {
    if (mode == SourceMode::Analytic) {
        if (problem.kind != ProblemKind::LinearGaussian)
            throw std::invalid_argument("analytic source is only available for linear_gaussian");
        const Centre c = centre(problem, t);
        const double alpha = problem.alpha(t);
        return GridFunction::sample(grid, [&](double x, double y) {
            const double dx = x - c.x, dy = y - c.y, q = dx * dx + dy * dy;
            const double u = std::exp(-kGaussRate * q);
            const double dudt = 2.0 * kGaussRate * u * (dx * c.vx + dy * c.vy);
            const double laplacian = u * (4.0 * kGaussRate * kGaussRate * q - 4.0 * kGaussRate);
            return dudt - alpha * laplacian;
        });
    }
    GridFunction f = exact_time_derivative(problem, t, grid);
    f += full_operator(grid, problem.p(), problem.alpha(t), problem.stencil).apply(exact_solution(problem, t, grid));
    return f;
}

GridFunction source_term(const ManufacturedProblem& problem, double t, const Grid2D& grid) {
    return source_term(problem, t, grid, problem.source_mode);
}

ProblemSpec make_problem(const ManufacturedProblem& problem, const Grid2D& grid) {
    if (problem.source_mode == SourceMode::Analytic && problem.kind != ProblemKind::LinearGaussian)
        throw std::invalid_argument("analytic source is only available for linear_gaussian");
    ProblemSpec spec{problem.p(), [problem](double t) { return problem.alpha(t); }, problem.T(),
                     exact_solution(problem, 0.0, grid),
                     [problem](double t, const Grid2D& g) { return source_term(problem, t, g); }, problem.stencil};
    return spec;
}

}  // namespace randsplit
