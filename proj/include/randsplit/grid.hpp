#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace randsplit {

struct Rect {
    double ax = -1.0;
    double bx = 1.0;
    double ay = -1.0;
    double by = 1.0;

    double width() const { return bx - ax; }
    double height() const { return by - ay; }
    bool contains(double x, double y) const { return x >= ax && x <= bx && y >= ay && y <= by; }
};

/// Uniform tensor grid on a rectangle. Nodes are stored row-major with x
/// running fastest: index(i, j) = j * nx + i.
class Grid2D {
public:
    Grid2D(int nx, int ny, Rect bounds);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    const Rect& bounds() const { return bounds_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }

    std::size_t node_count() const { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t cell_count() const { return static_cast<std::size_t>(nx_ - 1) * (ny_ - 1); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    std::size_t cell_index(int i, int j) const { return static_cast<std::size_t>(j) * (nx_ - 1) + i; }

    double x(int i) const { return i == nx_ - 1 ? bounds_.bx : bounds_.ax + i * hx_; }
    double y(int j) const { return j == ny_ - 1 ? bounds_.by : bounds_.ay + j * hy_; }
    double cell_x(int i) const { return bounds_.ax + (i + 0.5) * hx_; }
    double cell_y(int j) const { return bounds_.ay + (j + 0.5) * hy_; }

    bool is_boundary(int i, int j) const { return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1; }
    /// Quadrature weight attached to every interior node.
    double node_weight() const { return hx_ * hy_; }

    bool operator==(const Grid2D& other) const;

private:
    int nx_;
    int ny_;
    Rect bounds_;
    double hx_;
    double hy_;
};

/// Throws std::invalid_argument for nx or ny < 3 and for degenerate bounds.
Grid2D build_grid(int nx, int ny, Rect bounds);

/// Real nodal field. With the Dirichlet flag set, boundary nodes are kept at 0.
class GridFunction {
public:
    explicit GridFunction(const Grid2D& grid, bool dirichlet = true);
    GridFunction(const Grid2D& grid, std::vector<double> values, bool dirichlet = true);

    template <class F>
    static GridFunction sample(const Grid2D& grid, F&& f, bool dirichlet = true) {
        GridFunction u(grid, dirichlet);
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i)
                if (!dirichlet || !grid.is_boundary(i, j))
                    u.values_[grid.index(i, j)] = f(grid.x(i), grid.y(j));
        return u;
    }

    const Grid2D& grid() const { return grid_; }
    bool dirichlet() const { return dirichlet_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::size_t size() const { return values_.size(); }

    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }

    /// Zero the boundary nodes (no-op without the Dirichlet flag).
    void enforce_boundary();
    bool all_finite() const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double c);
    /// this += c * other
    GridFunction& axpy(double c, const GridFunction& other);

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double c, GridFunction a) { return a *= c; }

private:
    Grid2D grid_;
    std::vector<double> values_;
    bool dirichlet_;
};

/// Values on the (nx-1) x (ny-1) cell-center lattice, `components` per cell.
class CellField {
public:
    CellField(const Grid2D& grid, int components = 1, double fill = 0.0);

    const Grid2D& grid() const { return grid_; }
    int components() const { return components_; }
    std::size_t cell_count() const { return grid_.cell_count(); }

    double operator()(std::size_t cell, int comp = 0) const { return values_[cell * components_ + comp]; }
    double& operator()(std::size_t cell, int comp = 0) { return values_[cell * components_ + comp]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

private:
    Grid2D grid_;
    int components_;
    std::vector<double> values_;
};

/// 0 = t_0 < t_1 < ... < t_N = T.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);
    static TimeGrid uniform(double T, int steps);
    /// Constant step h; throws if h does not divide T.
    static TimeGrid with_step(double T, double h);

    int steps() const { return static_cast<int>(times_.size()) - 1; }
    double t(int n) const { return times_[n]; }
    double step(int n) const { return times_[n] - times_[n - 1]; }
    double max_step() const;
    double final_time() const { return times_.back(); }
    std::span<const double> times() const { return times_; }

private:
    std::vector<double> times_;
};

/// Discrete L2(D) inner product over interior nodes with weight hx*hy.
double h_inner(const GridFunction& u, const GridFunction& v);
double h_norm(const GridFunction& u);

/// Corner-averaged difference quotients at cell centres; exact for affine u.
CellField cell_gradient(const GridFunction& u);

/// (sum_c hx*hy*w_c*|G_c u|^p)^(1/p). Throws for p < 2.
double v_seminorm_p(const GridFunction& u, const CellField& weight, double p);

/// Injection onto the grid with (n-1)/factor + 1 nodes per axis.
GridFunction restrict_to_coarse(const GridFunction& u, int factor);
Grid2D coarsen(const Grid2D& grid, int factor);

}  // namespace randsplit
