#pragma once

#include <functional>
#include <string>
#include <vector>

#include "randsplit/decomposition.hpp"
#include "randsplit/grid.hpp"
#include "randsplit/sampler.hpp"

namespace randsplit {

/// Quadrature of the discrete energy on a grid cell.
///   Corner:     average over the four corners of |g_k|^p, g_k built from the
///               two cell edges meeting at corner k (5-point Laplacian for p = 2).
///   CellCentre: |g|^p at the centre, g the corner-averaged differences of
///               cell_gradient (diagonal 5-point Laplacian for p = 2).
enum class GradientStencil { Corner, CellCentre };

std::string to_string(GradientStencil stencil);
GradientStencil parse_gradient_stencil(const std::string& name);

/// du/dt - div(alpha(t) |grad u|^{p-2} grad u) = f with homogeneous Dirichlet
/// data on the grid of u0.
struct ProblemSpec {
    double p = 2.0;
    std::function<double(double)> alpha = [](double) { return 1.0; };
    double T = 1.0;
    GridFunction u0;
    /// Source sampled on a given grid at time t.
    std::function<GridFunction(double, const Grid2D&)> source;
    GradientStencil stencil = GradientStencil::Corner;

    const Grid2D& grid() const { return u0.grid(); }
    void validate() const;
};

/// Linearisation of a weighted p-Laplacian at a fixed state: per-cell
/// symmetric 2x2 tensors acting on the gradient samples of each cell.
class LinearizedOperator {
public:
    LinearizedOperator(const Grid2D& grid, GradientStencil stencil, std::vector<double> tensors);

    /// Hessian-vector product, scaled by 1/(hx*hy) like the operator itself.
    GridFunction apply(const GridFunction& v) const;
    void apply_into(const GridFunction& v, GridFunction& out) const;

private:
    Grid2D grid_;
    GradientStencil stencil_;
    std::vector<double> tensors_;  // (xx, xy, yy) per gradient sample
};

/// A_B(t) = sum_{l in B} A_l(t) / tau_l, realised as the exact gradient of the
/// convex energy J(u) = sum_c hx*hy*w_c*alpha*Q_c(|grad u|^p) / p with
/// w_c = sum_{l in B} chi_l(c) / tau_l and Q_c the cell quadrature of the
/// stencil. Empty batch = zero operator.
class BatchOperator {
public:
    BatchOperator(const Grid2D& grid, double p, double alpha, CellField weight, bool zero = false,
                  GradientStencil stencil = GradientStencil::Corner);

    const Grid2D& grid() const { return grid_; }
    double p() const { return p_; }
    double alpha() const { return alpha_; }
    const CellField& weight() const { return weight_; }
    bool is_zero() const { return zero_; }
    GradientStencil stencil() const { return stencil_; }

    double energy(const GridFunction& u) const;
    /// dJ(u) divided by the nodal weight hx*hy; zero on boundary nodes.
    GridFunction apply(const GridFunction& u) const;
    void apply_into(const GridFunction& u, GridFunction& out) const;
    GridFunction jacobian_apply(const GridFunction& u, const GridFunction& v) const;
    LinearizedOperator linearize(const GridFunction& u) const;
    /// sum_c hx*hy*w_c*alpha*Q_c(|grad u|^p), i.e. <apply(u), u>_H.
    double weighted_seminorm_power(const GridFunction& u) const;

private:
    Grid2D grid_;
    double p_;
    double alpha_;
    CellField weight_;
    bool zero_;
    GradientStencil stencil_;
};

/// The family {A_l(t)} of a decomposition on one grid.
class SplitOperator {
public:
    SplitOperator(const Grid2D& grid, const Decomposition& dec, double p, std::function<double(double)> alpha,
                  GradientStencil stencil = GradientStencil::Corner);

    const Grid2D& grid() const { return grid_; }
    int size() const { return static_cast<int>(cell_chi_.size()); }
    double p() const { return p_; }
    double alpha(double t) const { return alpha_(t); }
    GradientStencil stencil() const { return stencil_; }
    const std::vector<CellField>& cell_chi() const { return cell_chi_; }
    const std::vector<std::vector<double>>& node_chi() const { return node_chi_; }

    BatchOperator full(double t) const;
    BatchOperator component(int l, double t) const;
    BatchOperator batch(const BatchDraw& draw, double t) const;
    GridFunction batch_rhs(const GridFunction& f_full, const BatchDraw& draw) const;

private:
    Grid2D grid_;
    double p_;
    std::function<double(double)> alpha_;
    GradientStencil stencil_;
    std::vector<CellField> cell_chi_;
    std::vector<std::vector<double>> node_chi_;
};

/// The unsplit operator A(t): unit weights.
BatchOperator full_operator(const Grid2D& grid, double p, double alpha,
                            GradientStencil stencil = GradientStencil::Corner);

/// Nodewise (sum_{l in B} chi_l / tau_l) * f.
GridFunction batch_rhs(const GridFunction& f_full, const BatchDraw& draw,
                       const std::vector<std::vector<double>>& node_chi);

}  // namespace randsplit
