#include "wgf/isotonic.hpp"

#include <vector>

#include "wgf/error.hpp"

namespace wgf {
namespace {

struct Block {
  double mean;
  double weight;
  std::size_t count;
};

template <class WeightAt>
void pav(std::span<double> x, WeightAt weight_at) {
  std::vector<Block> stack;
  stack.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    Block b{x[k], weight_at(k), 1};
    while (!stack.empty() && stack.back().mean > b.mean) {
      const Block& t = stack.back();
      const double w = t.weight + b.weight;
      b.mean = (t.weight * t.mean + b.weight * b.mean) / w;
      b.weight = w;
      b.count += t.count;
      stack.pop_back();
    }
    stack.push_back(b);
  }
  std::size_t k = 0;
  for (const Block& b : stack)
    for (std::size_t r = 0; r < b.count; ++r) x[k++] = b.mean;
}

}  // namespace

void project_monotone(std::span<double> x) {
  pav(x, [](std::size_t) { return 1.0; });
}

void project_monotone(std::span<double> x, std::span<const double> weights) {
  require(weights.size() == x.size(), ErrorKind::DimensionMismatch, "weights and values differ in length");
  pav(x, [&weights](std::size_t k) { return weights[k]; });
}

}  // namespace wgf
