#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "randsplit/harness.hpp"

namespace randsplit {

struct CheckItem {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckItem> items;

    bool passed() const;
    void print(std::ostream& out) const;
};

/// Invariant suite for one configuration: partition of unity sums and
/// support, exact unbiasedness of the batch law, splitting consistency,
/// monotonicity of the batch operators, and the pathwise energy inequality on
/// a short run (first few steps at the largest configured step size).
CheckReport run_checks(const ExperimentConfig& cfg);

}  // namespace randsplit
