#pragma once

#include <cstdint>
#include <vector>

#include "dynlogit/panel.hpp"
#include "dynlogit/terms.hpp"

namespace dynlogit {

/// A panel simulated from known coefficients, with the generating model.
struct SyntheticPanel {
    NetworkPanel panel;
    ModelSpec spec;  // expanded
    std::vector<double> coefficients;
};

/// 95 vertices (54 regulars, 22 of them in group1 and 21 in group2), 31 daily
/// slots starting on a Thursday with slot 25 unobserved. The generating model
/// uses every term kind: attribute and group dummies, mixing, lags, lagged
/// triangles and cycles, log size and weekday effects.
SyntheticPanel beach_like_panel(std::uint64_t seed);

/// The generating model of beach_like_panel, before expansion.
ModelSpec beach_like_model();

}  // namespace dynlogit
