#pragma once

#include <optional>
#include <vector>

#include "diqkd/certify.hpp"

namespace diqkd::certify {

// Published certified CHSH entropy bounds, shipped so keyrate and threshold
// runs do not need a (costly) certification pass. Slopes are per CHSH value,
// intercepts at nu = 2.
struct PaperBoundRecord {
    double p;
    double lambda;
    double intercept;
};

const std::vector<PaperBoundRecord>& paper_bounds();

// Bound for the given bias, if it is one of the published values (within 1e-9).
std::optional<AffineEntropyBound> paper_bound_for(double p);

}  // namespace diqkd::certify
