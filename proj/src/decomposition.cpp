#include "randsplit/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace randsplit {

SplitMode parse_split_mode(const std::string& name) {
    if (name == "symmetric") return SplitMode::Symmetric;
    if (name == "paper_compat") return SplitMode::PaperCompat;
    throw std::invalid_argument("unknown split_mode '" + name + "'");
}

std::string to_string(SplitMode mode) { return mode == SplitMode::Symmetric ? "symmetric" : "paper_compat"; }

double AxisProfile::operator()(double x) const {
    if (x < lo || x > hi) return 0.0;
    if (x < core_lo) return (x - lo) / (core_lo - lo);
    if (x > core_hi) return (hi - x) / (hi - core_hi);
    return 1.0;
}

namespace {

// Per-axis profiles of the m base cells of [a, b].
std::vector<AxisProfile> axis_profiles(int m, double a, double b, double overlap, SplitMode mode) {
    const double width = (b - a) / m;
    std::vector<AxisProfile> out(m);
    for (int c = 0; c < m; ++c) {
        out[c].lo = out[c].core_lo = a + c * width;
        out[c].hi = out[c].core_hi = (c == m - 1) ? b : a + (c + 1) * width;
    }
    // Interface between cells c-1 (left) and c (right) at edge e: the band is
    // [e - to_right_cell, e + to_left_cell], where to_left_cell is how far the
    // left cell reaches past e.
    for (int c = 1; c < m; ++c) {
        const double e = a + c * width;
        double reach_left = 0.5 * overlap, reach_right = 0.5 * overlap;
        if (mode == SplitMode::PaperCompat) {
            const bool left_boundary = (c - 1 == 0);
            const bool right_boundary = (c == m - 1);
            if (left_boundary && !right_boundary) {
                reach_left = overlap / 3.0;
                reach_right = 2.0 * overlap / 3.0;
            } else if (right_boundary && !left_boundary) {
                reach_left = 2.0 * overlap / 3.0;
                reach_right = overlap / 3.0;
            }
        }
        const double band_lo = e - reach_right, band_hi = e + reach_left;
        out[c - 1].hi = band_hi;
        out[c - 1].core_hi = band_lo;
        out[c].lo = band_lo;
        out[c].core_lo = band_hi;
    }
    return out;
}

}  // namespace

Decomposition::Decomposition(int mx, int my, double overlap, SplitMode mode, Rect domain)
    : mx_(mx), my_(my), overlap_(overlap), mode_(mode), domain_(domain) {
    if (mx < 1 || my < 1) throw std::invalid_argument("decomposition needs Mx, My >= 1");
    if (!(overlap >= 0)) throw std::invalid_argument("overlap must be non-negative");
    if ((mx > 1 && overlap >= domain.width() / mx) || (my > 1 && overlap >= domain.height() / my))
        throw std::invalid_argument("overlap must be smaller than the base cell width");
    x_profiles_ = axis_profiles(mx, domain.ax, domain.bx, overlap, mode);
    y_profiles_ = axis_profiles(my, domain.ay, domain.by, overlap, mode);
    for (int jy = 0; jy < my; ++jy) {
        for (int ix = 0; ix < mx; ++ix) {
            const AxisProfile& px = x_profiles_[ix];
            const AxisProfile& py = y_profiles_[jy];
            subdomains_.push_back({jy * mx + ix, Rect{px.lo, px.hi, py.lo, py.hi}});
        }
    }
}

double Decomposition::raw_weight(int l, double x, double y) const {
    return x_profiles_[l % mx_](x) * y_profiles_[l / mx_](y);
}

double Decomposition::chi(int l, double x, double y) const {
    double total = 0.0;
    for (int k = 0; k < size(); ++k) total += raw_weight(k, x, y);
    if (!(total > 0.0)) throw std::logic_error("partition of unity: point not covered by any subdomain");
    return raw_weight(l, x, y) / total;
}

std::vector<Subdomain> build_subdomains(int mx, int my, double overlap, SplitMode mode, Rect domain) {
    return Decomposition(mx, my, overlap, mode, domain).subdomains();
}

std::vector<CellField> build_partition_of_unity(const Decomposition& dec, const Grid2D& grid) {
    const int s = dec.size();
    std::vector<CellField> chi(s, CellField(grid));
    std::vector<double> raw(s);
    for (int j = 0; j < grid.ny() - 1; ++j) {
        for (int i = 0; i < grid.nx() - 1; ++i) {
            const double x = grid.cell_x(i), y = grid.cell_y(j);
            double total = 0.0;
            for (int l = 0; l < s; ++l) total += raw[l] = dec.raw_weight(l, x, y);
            if (!(total > 0.0)) throw std::logic_error("partition of unity: cell centre not covered");
            const std::size_t c = grid.cell_index(i, j);
            for (int l = 0; l < s; ++l) chi[l](c) = raw[l] / total;
        }
    }
    return chi;
}

std::vector<std::vector<double>> node_partition_of_unity(const Decomposition& dec, const Grid2D& grid) {
    const int s = dec.size();
    std::vector<std::vector<double>> chi(s, std::vector<double>(grid.node_count(), 0.0));
    std::vector<double> raw(s);
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const double x = grid.x(i), y = grid.y(j);
            double total = 0.0;
            for (int l = 0; l < s; ++l) total += raw[l] = dec.raw_weight(l, x, y);
            if (!(total > 0.0)) throw std::logic_error("partition of unity: node not covered");
            for (int l = 0; l < s; ++l) chi[l][grid.index(i, j)] = raw[l] / total;
        }
    }
    return chi;
}

namespace {

BatchWeights checked(BatchWeights w) {
    for (double t : w.tau)
        if (!(t > 0.0)) throw std::invalid_argument("batch law leaves a subdomain with zero inclusion probability");
    return w;
}

}  // namespace

BatchWeights tau_uniform_single(int s) {
    if (s < 1) throw std::invalid_argument("s must be >= 1");
    return checked({std::vector<double>(s, 1.0 / s)});
}

BatchWeights tau_uniform_k(int s, int k) {
    if (s < 1 || k < 1) throw std::invalid_argument("uniform_k needs s >= 1 and k >= 1");
    const double miss = std::pow(1.0 - 1.0 / s, k);
    return checked({std::vector<double>(s, 1.0 - miss)});
}

BatchWeights tau_predictor(int s, const std::vector<int>& active, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
    BatchWeights w{std::vector<double>(s, rho)};
    for (int l : active) {
        if (l < 0 || l >= s) throw std::invalid_argument("active subdomain index out of range");
        w.tau[l] = 1.0 - rho;
    }
    return checked(std::move(w));
}

}  // namespace randsplit
