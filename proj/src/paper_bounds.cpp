#include "diqkd/paper_bounds.hpp"

#include <cmath>

namespace diqkd::certify {

const std::vector<PaperBoundRecord>& paper_bounds() {
    static const std::vector<PaperBoundRecord> table = {
        {0.00, 1.190, -0.00454},
        {0.20, 0.327, 0.72063},
        {0.30, 0.139, 0.88051},
        {0.40, 0.0341, 0.97055},
        {0.45, 0.00855, 0.992487},
    };
    return table;
}

std::optional<AffineEntropyBound> paper_bound_for(double p) {
    for (const auto& rec : paper_bounds())
        if (std::abs(rec.p - p) < 1e-9)
            return affine_bound(rec.lambda, rec.intercept, rec.p, /*certified=*/true);
    return std::nullopt;
}

}  // namespace diqkd::certify
