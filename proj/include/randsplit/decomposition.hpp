#pragma once

#include <string>
#include <vector>

#include "randsplit/grid.hpp"

namespace randsplit {

/// How the overlap band around an internal interface is shared by its two
/// neighbours. PaperCompat gives a cell touching the outer boundary a third of
/// the band and its interior neighbour two thirds; interfaces between two
/// boundary cells or two interior cells fall back to the symmetric split.
enum class SplitMode { Symmetric, PaperCompat };

SplitMode parse_split_mode(const std::string& name);
std::string to_string(SplitMode mode);

struct Subdomain {
    int index = 0;  // 0-based, x-fastest
    Rect rect;
};

/// One axis of a subdomain's weight profile: 1 on [core_lo, core_hi], linear
/// ramps down to 0 at lo and hi, 0 outside [lo, hi]. A side on the outer
/// boundary has no ramp.
struct AxisProfile {
    double lo = 0, core_lo = 0, core_hi = 0, hi = 0;
    double operator()(double x) const;
};

/// Overlapping Mx x My rectangular decomposition of a rectangle together with
/// its tensor-trapezoid partition of unity.
class Decomposition {
public:
    Decomposition(int mx, int my, double overlap, SplitMode mode, Rect domain = Rect{});

    int mx() const { return mx_; }
    int my() const { return my_; }
    int size() const { return mx_ * my_; }
    double overlap() const { return overlap_; }
    SplitMode split_mode() const { return mode_; }
    const Rect& domain() const { return domain_; }
    const std::vector<Subdomain>& subdomains() const { return subdomains_; }

    /// Unnormalised profile of subdomain l at (x, y).
    double raw_weight(int l, double x, double y) const;
    /// Normalised partition-of-unity weight chi_l(x, y).
    double chi(int l, double x, double y) const;

private:
    int mx_, my_;
    double overlap_;
    SplitMode mode_;
    Rect domain_;
    std::vector<Subdomain> subdomains_;
    std::vector<AxisProfile> x_profiles_;  // per column
    std::vector<AxisProfile> y_profiles_;  // per row
};

/// Subdomain rectangles of the Mx x My decomposition of `domain`.
std::vector<Subdomain> build_subdomains(int mx, int my, double overlap, SplitMode mode, Rect domain = Rect{});

/// chi_l sampled at the cell centres of `grid`, one CellField per subdomain.
std::vector<CellField> build_partition_of_unity(const Decomposition& dec, const Grid2D& grid);

/// chi_l sampled at the nodes of `grid`, one vector (node-indexed) per subdomain.
std::vector<std::vector<double>> node_partition_of_unity(const Decomposition& dec, const Grid2D& grid);

/// Per-subdomain inclusion probabilities tau_l = P(l in batch).
struct BatchWeights {
    std::vector<double> tau;
};

/// Closed-form tau for the batch laws of the sampler. All throw
/// std::invalid_argument if any tau_l would be 0.
BatchWeights tau_uniform_single(int s);
BatchWeights tau_uniform_k(int s, int k);
/// Active set selected with probability 1 - rho, its complement with rho.
BatchWeights tau_predictor(int s, const std::vector<int>& active, double rho);

}  // namespace randsplit
