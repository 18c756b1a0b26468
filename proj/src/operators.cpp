#include "randsplit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace randsplit {

void ProblemSpec::validate() const {
    if (!(p >= 2.0)) throw std::invalid_argument("problem: p must be >= 2");
    if (!(T > 0.0)) throw std::invalid_argument("problem: T must be positive");
    if (!alpha) throw std::invalid_argument("problem: alpha is not set");
    if (!source) throw std::invalid_argument("problem: source is not set");
    if (!u0.all_finite()) throw std::invalid_argument("problem: initial data is not finite");
}

namespace {

// |g|^{p-2} with exact fast paths for the common exponents.
inline double flux_factor(double g2, double p) {
    if (p == 2.0) return 1.0;
    if (p == 4.0) return g2;
    return g2 > 0.0 ? std::pow(g2, 0.5 * (p - 2.0)) : 0.0;
}

// Gradient samples of one cell. Corner stencil: sample k uses the x-edge
// (bottom for k < 2, top otherwise) and the y-edge (left for even k, right
// otherwise), each with quadrature weight 1/4. CellCentre stencil: one sample
// of corner-averaged differences.
struct CellSamples {
    double gx[4], gy[4];
};

// Loops over cells, handing the gradient samples to `body`, which writes the
// per-sample (x, y) fluxes; these are scattered back onto the corners.
template <class Body>
void scatter_cells(const Grid2D& g, GradientStencil stencil, const GridFunction& u, GridFunction& out, Body&& body) {
    const int nx = g.nx();
    std::span<const double> uv = u.values();
    std::span<double> ov = out.values();
    std::fill(ov.begin(), ov.end(), 0.0);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    double fx[4], fy[4];
    for (int j = 0; j < g.ny() - 1; ++j) {
        for (int i = 0; i < nx - 1; ++i) {
            const std::size_t k00 = static_cast<std::size_t>(j) * nx + i, k10 = k00 + 1, k01 = k00 + nx,
                              k11 = k01 + 1;
            const double bottom = ihx * (uv[k10] - uv[k00]), top = ihx * (uv[k11] - uv[k01]);
            const double left = ihy * (uv[k01] - uv[k00]), right = ihy * (uv[k11] - uv[k10]);
            const std::size_t c = g.cell_index(i, j);
            if (stencil == GradientStencil::Corner) {
                const CellSamples smp{{bottom, bottom, top, top}, {left, right, left, right}};
                if (!body(c, smp, fx, fy)) continue;
                const double xb = ihx * 0.25 * (fx[0] + fx[1]), xt = ihx * 0.25 * (fx[2] + fx[3]);
                const double yl = ihy * 0.25 * (fy[0] + fy[2]), yr = ihy * 0.25 * (fy[1] + fy[3]);
                ov[k00] += -xb - yl;
                ov[k10] += xb - yr;
                ov[k01] += -xt + yl;
                ov[k11] += xt + yr;
            } else {
                CellSamples smp{};
                smp.gx[0] = 0.5 * (bottom + top);
                smp.gy[0] = 0.5 * (left + right);
                if (!body(c, smp, fx, fy)) continue;
                const double ax = 0.5 * ihx * fx[0], ay = 0.5 * ihy * fy[0];
                ov[k00] += -ax - ay;
                ov[k10] += ax - ay;
                ov[k01] += -ax + ay;
                ov[k11] += ax + ay;
            }
        }
    }
    out.enforce_boundary();
}

int sample_count(GradientStencil stencil) { return stencil == GradientStencil::Corner ? 4 : 1; }

}  // namespace

std::string to_string(GradientStencil stencil) {
    return stencil == GradientStencil::Corner ? "corner" : "cell_centre";
}

GradientStencil parse_gradient_stencil(const std::string& name) {
    if (name == "corner") return GradientStencil::Corner;
    if (name == "cell_centre" || name == "cell_center") return GradientStencil::CellCentre;
    throw std::invalid_argument("unknown gradient stencil '" + name + "'");
}

LinearizedOperator::LinearizedOperator(const Grid2D& grid, GradientStencil stencil, std::vector<double> tensors)
    : grid_(grid), stencil_(stencil), tensors_(std::move(tensors)) {
    if (tensors_.size() != 3 * sample_count(stencil) * grid_.cell_count())
        throw std::invalid_argument("LinearizedOperator: size mismatch");
}

GridFunction LinearizedOperator::apply(const GridFunction& v) const {
    GridFunction out(grid_);
    apply_into(v, out);
    return out;
}

void LinearizedOperator::apply_into(const GridFunction& v, GridFunction& out) const {
    const int ns = sample_count(stencil_);
    scatter_cells(grid_, stencil_, v, out, [&](std::size_t c, const CellSamples& smp, double* fx, double* fy) {
        const double* t = &tensors_[3 * ns * c];
        for (int k = 0; k < ns; ++k, t += 3) {
            fx[k] = t[0] * smp.gx[k] + t[1] * smp.gy[k];
            fy[k] = t[1] * smp.gx[k] + t[2] * smp.gy[k];
        }
        return true;
    });
}

BatchOperator::BatchOperator(const Grid2D& grid, double p, double alpha, CellField weight, bool zero,
                             GradientStencil stencil)
    : grid_(grid), p_(p), alpha_(alpha), weight_(std::move(weight)), zero_(zero), stencil_(stencil) {
    if (!(p >= 2.0)) throw std::invalid_argument("operator: p must be >= 2");
    if (weight_.cell_count() != grid_.cell_count()) throw std::invalid_argument("operator: weight size mismatch");
}

double BatchOperator::weighted_seminorm_power(const GridFunction& u) const {
    if (zero_) return 0.0;
    const int ns = sample_count(stencil_);
    const double q = 1.0 / ns;
    double sum = 0.0;
    GridFunction scratch(grid_);
    scatter_cells(grid_, stencil_, u, scratch, [&](std::size_t c, const CellSamples& smp, double*, double*) {
        const double w = weight_(c);
        if (w == 0.0) return false;
        for (int k = 0; k < ns; ++k) {
            const double g2 = smp.gx[k] * smp.gx[k] + smp.gy[k] * smp.gy[k];
            sum += q * w * flux_factor(g2, p_) * g2;
        }
        return false;
    });
    return grid_.node_weight() * alpha_ * sum;
}

double BatchOperator::energy(const GridFunction& u) const { return weighted_seminorm_power(u) / p_; }

GridFunction BatchOperator::apply(const GridFunction& u) const {
    GridFunction out(grid_);
    apply_into(u, out);
    return out;
}

void BatchOperator::apply_into(const GridFunction& u, GridFunction& out) const {
    if (zero_) {
        std::span<double> ov = out.values();
        std::fill(ov.begin(), ov.end(), 0.0);
        return;
    }
    const int ns = sample_count(stencil_);
    scatter_cells(grid_, stencil_, u, out, [&](std::size_t c, const CellSamples& smp, double* fx, double* fy) {
        const double w = weight_(c);
        if (w == 0.0) return false;
        for (int k = 0; k < ns; ++k) {
            const double s = alpha_ * w * flux_factor(smp.gx[k] * smp.gx[k] + smp.gy[k] * smp.gy[k], p_);
            fx[k] = s * smp.gx[k];
            fy[k] = s * smp.gy[k];
        }
        return true;
    });
}

LinearizedOperator BatchOperator::linearize(const GridFunction& u) const {
    const int ns = sample_count(stencil_);
    std::vector<double> t(3 * ns * grid_.cell_count(), 0.0);
    if (!zero_) {
        GridFunction scratch(grid_);
        scatter_cells(grid_, stencil_, u, scratch, [&](std::size_t c, const CellSamples& smp, double*, double*) {
            const double w = alpha_ * weight_(c);
            if (w == 0.0) return false;
            double* tc = &t[3 * ns * c];
            for (int k = 0; k < ns; ++k, tc += 3) {
                const double gx = smp.gx[k], gy = smp.gy[k], g2 = gx * gx + gy * gy;
                const double iso = flux_factor(g2, p_);
                // (p-2)|g|^{p-4} g g^T, which vanishes at g = 0 for p > 2.
                double rank1 = 0.0;
                if (p_ != 2.0 && g2 > 0.0) rank1 = (p_ - 2.0) * (p_ == 4.0 ? 1.0 : std::pow(g2, 0.5 * (p_ - 4.0)));
                tc[0] = w * (iso + rank1 * gx * gx);
                tc[1] = w * (rank1 * gx * gy);
                tc[2] = w * (iso + rank1 * gy * gy);
            }
            return false;
        });
    }
    return LinearizedOperator(grid_, stencil_, std::move(t));
}

GridFunction BatchOperator::jacobian_apply(const GridFunction& u, const GridFunction& v) const {
    return linearize(u).apply(v);
}

BatchOperator full_operator(const Grid2D& grid, double p, double alpha, GradientStencil stencil) {
    return BatchOperator(grid, p, alpha, CellField(grid, 1, 1.0), false, stencil);
}

SplitOperator::SplitOperator(const Grid2D& grid, const Decomposition& dec, double p,
                             std::function<double(double)> alpha, GradientStencil stencil)
    : grid_(grid),
      p_(p),
      alpha_(std::move(alpha)),
      stencil_(stencil),
      cell_chi_(build_partition_of_unity(dec, grid)),
      node_chi_(node_partition_of_unity(dec, grid)) {}

BatchOperator SplitOperator::full(double t) const { return full_operator(grid_, p_, alpha_(t), stencil_); }

BatchOperator SplitOperator::component(int l, double t) const {
    return BatchOperator(grid_, p_, alpha_(t), cell_chi_.at(l), false, stencil_);
}

BatchOperator SplitOperator::batch(const BatchDraw& draw, double t) const {
    CellField w(grid_);
    for (std::size_t m = 0; m < draw.batch.size(); ++m) {
        const CellField& chi = cell_chi_.at(draw.batch[m]);
        const double scale = draw.inv_tau[m];
        for (std::size_t c = 0; c < grid_.cell_count(); ++c) w(c) += scale * chi(c);
    }
    return BatchOperator(grid_, p_, alpha_(t), std::move(w), draw.empty(), stencil_);
}

GridFunction SplitOperator::batch_rhs(const GridFunction& f_full, const BatchDraw& draw) const {
    return randsplit::batch_rhs(f_full, draw, node_chi_);
}

GridFunction batch_rhs(const GridFunction& f_full, const BatchDraw& draw,
                       const std::vector<std::vector<double>>& node_chi) {
    GridFunction out(f_full.grid(), f_full.dirichlet());
    for (std::size_t m = 0; m < draw.batch.size(); ++m) {
        const std::vector<double>& chi = node_chi.at(draw.batch[m]);
        const double scale = draw.inv_tau[m];
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * chi[k] * f_full[k];
    }
    return out;
}

}  // namespace randsplit
