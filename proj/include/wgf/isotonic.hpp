#pragma once

#include <span>

namespace wgf {

/// In-place Euclidean projection onto nondecreasing sequences (pool adjacent
/// violators). With weights, minimizes Σ w_k (y_k − x_k)²; weights must be positive.
void project_monotone(std::span<double> x);
void project_monotone(std::span<double> x, std::span<const double> weights);

}  // namespace wgf
