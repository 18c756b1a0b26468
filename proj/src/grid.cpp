#include "randsplit/grid.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace randsplit {

Grid2D::Grid2D(int nx, int ny, Rect bounds) : nx_(nx), ny_(ny), bounds_(bounds) {
    if (nx < 3 || ny < 3)
        throw std::invalid_argument("grid needs at least 3 nodes per axis, got " + std::to_string(nx) + "x" +
                                    std::to_string(ny));
    if (!(bounds.bx > bounds.ax) || !(bounds.by > bounds.ay))
        throw std::invalid_argument("grid bounds are inverted or degenerate");
    hx_ = (bounds.bx - bounds.ax) / (nx - 1);
    hy_ = (bounds.by - bounds.ay) / (ny - 1);
}

bool Grid2D::operator==(const Grid2D& other) const {
    return nx_ == other.nx_ && ny_ == other.ny_ && bounds_.ax == other.bounds_.ax &&
           bounds_.bx == other.bounds_.bx && bounds_.ay == other.bounds_.ay && bounds_.by == other.bounds_.by;
}

Grid2D build_grid(int nx, int ny, Rect bounds) { return Grid2D(nx, ny, bounds); }

GridFunction::GridFunction(const Grid2D& grid, bool dirichlet)
    : grid_(grid), values_(grid.node_count(), 0.0), dirichlet_(dirichlet) {}

GridFunction::GridFunction(const Grid2D& grid, std::vector<double> values, bool dirichlet)
    : grid_(grid), values_(std::move(values)), dirichlet_(dirichlet) {
    if (values_.size() != grid_.node_count())
        throw std::invalid_argument("GridFunction: value count does not match the grid");
    enforce_boundary();
}

void GridFunction::enforce_boundary() {
    if (!dirichlet_) return;
    const int nx = grid_.nx(), ny = grid_.ny();
    for (int i = 0; i < nx; ++i) {
        values_[grid_.index(i, 0)] = 0.0;
        values_[grid_.index(i, ny - 1)] = 0.0;
    }
    for (int j = 0; j < ny; ++j) {
        values_[grid_.index(0, j)] = 0.0;
        values_[grid_.index(nx - 1, j)] = 0.0;
    }
}

bool GridFunction::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) { return axpy(1.0, other); }

GridFunction& GridFunction::operator-=(const GridFunction& other) { return axpy(-1.0, other); }

GridFunction& GridFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction& GridFunction::axpy(double c, const GridFunction& other) {
    if (other.values_.size() != values_.size()) throw std::invalid_argument("GridFunction: grid mismatch");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += c * other.values_[k];
    return *this;
}

CellField::CellField(const Grid2D& grid, int components, double fill)
    : grid_(grid), components_(components), values_(grid.cell_count() * components, fill) {}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2 || times_.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
    for (std::size_t n = 1; n < times_.size(); ++n)
        if (!(times_[n] > times_[n - 1])) throw std::invalid_argument("time grid must be strictly increasing");
}

TimeGrid TimeGrid::uniform(double T, int steps) {
    if (steps < 1 || !(T > 0)) throw std::invalid_argument("uniform time grid needs T > 0 and steps >= 1");
    std::vector<double> t(steps + 1);
    for (int n = 0; n <= steps; ++n) t[n] = T * n / steps;
    t.back() = T;
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::with_step(double T, double h) {
    if (!(h > 0)) throw std::invalid_argument("step size must be positive");
    const double ratio = T / h;
    const double steps = std::round(ratio);
    if (steps < 1 || std::abs(ratio - steps) > 1e-9 * ratio)
        throw std::invalid_argument("step size " + std::to_string(h) + " does not divide T");
    return uniform(T, static_cast<int>(steps));
}

double TimeGrid::max_step() const {
    double h = 0.0;
    for (int n = 1; n <= steps(); ++n) h = std::max(h, step(n));
    return h;
}

double h_inner(const GridFunction& u, const GridFunction& v) {
    const Grid2D& g = u.grid();
    if (u.size() != v.size()) throw std::invalid_argument("h_inner: grid mismatch");
    double sum = 0.0;
    for (int j = 1; j < g.ny() - 1; ++j) {
        const std::size_t row = g.index(0, j);
        for (int i = 1; i < g.nx() - 1; ++i) sum += u[row + i] * v[row + i];
    }
    return g.node_weight() * sum;
}

double h_norm(const GridFunction& u) { return std::sqrt(h_inner(u, u)); }

CellField cell_gradient(const GridFunction& u) {
    const Grid2D& g = u.grid();
    CellField grad(g, 2);
    const double sx = 0.5 / g.hx(), sy = 0.5 / g.hy();
    for (int j = 0; j < g.ny() - 1; ++j) {
        for (int i = 0; i < g.nx() - 1; ++i) {
            const double u00 = u(i, j), u10 = u(i + 1, j), u01 = u(i, j + 1), u11 = u(i + 1, j + 1);
            const std::size_t c = g.cell_index(i, j);
            grad(c, 0) = sx * ((u10 - u00) + (u11 - u01));
            grad(c, 1) = sy * ((u01 - u00) + (u11 - u10));
        }
    }
    return grad;
}

double v_seminorm_p(const GridFunction& u, const CellField& weight, double p) {
    if (!(p >= 2.0)) throw std::invalid_argument("v_seminorm_p requires p >= 2");
    const CellField grad = cell_gradient(u);
    const Grid2D& g = u.grid();
    double sum = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const double w = weight(c);
        if (w == 0.0) continue;
        const double gx = grad(c, 0), gy = grad(c, 1);
        sum += w * std::pow(gx * gx + gy * gy, 0.5 * p);
    }
    return std::pow(g.node_weight() * sum, 1.0 / p);
}

Grid2D coarsen(const Grid2D& grid, int factor) {
    if (factor < 1 || (grid.nx() - 1) % factor != 0 || (grid.ny() - 1) % factor != 0)
        throw std::invalid_argument("coarsening factor " + std::to_string(factor) + " does not divide the cell counts");
    return Grid2D((grid.nx() - 1) / factor + 1, (grid.ny() - 1) / factor + 1, grid.bounds());
}

GridFunction restrict_to_coarse(const GridFunction& u, int factor) {
    const Grid2D coarse = coarsen(u.grid(), factor);
    GridFunction out(coarse, u.dirichlet());
    for (int j = 0; j < coarse.ny(); ++j)
        for (int i = 0; i < coarse.nx(); ++i) out(i, j) = u(factor * i, factor * j);
    return out;
}

}  // namespace randsplit
