#include "coldstart/bootstrap.hpp"

namespace coldstart {

ResamplePlan draw_resamples(std::size_t n, std::size_t n_boot, RngSeed seed,
                            const std::function<bool(std::span<const std::size_t>)>& defined) {
  // Guards against metrics that are undefined on almost every resample.
  const std::size_t max_redraws = 1000 * n_boot;
  Rng rng(seed);
  ResamplePlan plan;
  plan.indices.reserve(n_boot);
  std::vector<std::size_t> idx(n);
  while (plan.indices.size() < n_boot) {
    for (auto& i : idx) i = rng.uniform_index(n);
    if (defined(idx)) {
      plan.indices.push_back(idx);
    } else if (++plan.redraws > max_redraws) {
      throw Error(fmt::format("bootstrap: gave up after {} undefined resamples", plan.redraws - 1));
    }
  }
  return plan;
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  // Shifting by the first value makes constant inputs give exactly zero.
  const double shift = values[0];
  double mean = 0.0;
  for (double v : values) mean += v - shift;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - shift - mean) * (v - shift - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace coldstart
