#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "coldstart/error.hpp"
#include "coldstart/metrics.hpp"
#include "coldstart/rng.hpp"

namespace coldstart {

// One cell of a results table.
struct MetricReport {
  Metric metric = Metric::kAuprc;
  double estimate = 0.0;
  double se = 0.0;  // sample standard deviation over the bootstrap resamples
  std::size_t n_boot = 0;
  RngSeed seed;
  std::size_t redraws = 0;   // resamples discarded because the metric was undefined
  std::size_t excluded = 0;  // samples dropped from the full-set estimate (HD on empty masks)

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

inline constexpr std::size_t kDefaultBootstrapResamples = 100;

// Draws n_boot index lists of size n, with replacement. A list is redrawn
// while `defined` rejects it; the number of redraws is returned alongside.
struct ResamplePlan {
  std::vector<std::vector<std::size_t>> indices;
  std::size_t redraws = 0;
};

ResamplePlan draw_resamples(std::size_t n, std::size_t n_boot, RngSeed seed,
                            const std::function<bool(std::span<const std::size_t>)>& defined);

double sample_stddev(std::span<const double> values);

// Nonparametric bootstrap. `metric` maps a sample of inputs to a value, or
// nullopt when the metric is undefined on that sample.
template <typename T>
MetricReport bootstrap_se(std::span<const T> inputs,
                          const std::function<std::optional<double>(std::span<const T>)>& metric,
                          Metric kind, std::size_t n_boot, RngSeed seed) {
  if (inputs.size() < 2) throw InvalidArgument("bootstrap_se: need at least 2 samples");
  if (n_boot < 2) throw InvalidArgument("bootstrap_se: need at least 2 resamples");
  const auto full = metric(inputs);
  if (!full) throw InvalidArgument(fmt::format("bootstrap_se: {} is undefined on the full sample", to_string(kind)));

  std::vector<T> scratch;
  scratch.reserve(inputs.size());
  std::vector<double> values;
  values.reserve(n_boot);
  const auto evaluate = [&](std::span<const std::size_t> idx) {
    scratch.clear();
    for (auto i : idx) scratch.push_back(inputs[i]);
    return metric(std::span<const T>(scratch));
  };
  auto plan = draw_resamples(inputs.size(), n_boot, seed, [&](std::span<const std::size_t> idx) {
    auto v = evaluate(idx);
    if (v) values.push_back(*v);
    return v.has_value();
  });

  MetricReport report;
  report.metric = kind;
  report.estimate = *full;
  report.se = sample_stddev(values);
  report.n_boot = n_boot;
  report.seed = seed;
  report.redraws = plan.redraws;
  return report;
}

}  // namespace coldstart
