#pragma once

#include <span>
#include <vector>

namespace evmap {

/// Ranks starting at 1; ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> v);

/// Pearson correlation of average ranks. NaN when either input is constant
/// or the sizes differ or are below 2.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace evmap
