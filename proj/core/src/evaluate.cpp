#include "coldstart/evaluate.hpp"

#include <limits>

#include "coldstart/error.hpp"

namespace coldstart {

std::vector<MetricReport> evaluate_classification(std::span<const ScoredLabel> test, double threshold,
                                                  std::size_t n_boot, RngSeed seed) {
  const std::function<std::optional<double>(std::span<const ScoredLabel>)> ap =
      [](std::span<const ScoredLabel> sample) -> std::optional<double> {
    std::size_t pos = 0;
    for (const auto& s : sample) pos += static_cast<std::size_t>(s.label);
    if (pos == 0 || pos == sample.size()) return std::nullopt;
    return average_precision(sample);
  };
  const std::function<std::optional<double>(std::span<const ScoredLabel>)> f1 =
      [threshold](std::span<const ScoredLabel> sample) -> std::optional<double> {
    Confusion c;
    for (const auto& s : sample) {
      const bool p = s.score >= threshold;
      const bool t = s.label != 0;
      if (p && t) ++c.tp;
      else if (p) ++c.fp;
      else if (t) ++c.fn;
      else ++c.tn;
    }
    return f1_from_counts(c);
  };
  return {bootstrap_se(test, ap, Metric::kAuprc, n_boot, seed),
          bootstrap_se(test, f1, Metric::kF1, n_boot, seed)};
}

std::vector<MetricReport> evaluate_segmentation(std::span<const MaskPair> test, std::size_t n_boot,
                                                RngSeed seed) {
  const std::function<std::optional<double>(std::span<const MaskPair>)> mean_dsc =
      [](std::span<const MaskPair> sample) -> std::optional<double> {
    if (sample.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& p : sample) sum += dsc(p.predicted, p.truth);
    return sum / static_cast<double>(sample.size());
  };
  const std::function<std::optional<double>(std::span<const MaskPair>)> mean_hd =
      [](std::span<const MaskPair> sample) -> std::optional<double> {
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& p : sample) {
      if (const auto hd = hausdorff(p.predicted, p.truth)) {
        sum += *hd;
        ++defined;
      }
    }
    if (defined == 0) return std::nullopt;
    return sum / static_cast<double>(defined);
  };
  auto dsc_report = bootstrap_se(test, mean_dsc, Metric::kDsc, n_boot, seed);
  std::vector<MetricReport> out{dsc_report};
  std::size_t excluded = 0;
  for (const auto& p : test) excluded += hausdorff(p.predicted, p.truth) ? 0 : 1;
  if (excluded == test.size()) {
    // HD undefined on every image; report it as missing via a NaN estimate.
    MetricReport missing;
    missing.metric = Metric::kHd;
    missing.estimate = std::numeric_limits<double>::quiet_NaN();
    missing.se = std::numeric_limits<double>::quiet_NaN();
    missing.n_boot = n_boot;
    missing.seed = seed;
    missing.excluded = excluded;
    out.push_back(missing);
    return out;
  }
  auto hd_report = bootstrap_se(test, mean_hd, Metric::kHd, n_boot, seed);
  hd_report.excluded = excluded;
  out.push_back(hd_report);
  return out;
}

BinaryMask binarize(const ProbabilityMap& map, double threshold) {
  BinaryMask mask(map.height, map.width);
  for (std::size_t r = 0; r < map.height; ++r) {
    for (std::size_t c = 0; c < map.width; ++c) mask.set(r, c, map.at(r, c) >= threshold);
  }
  return mask;
}

}  // namespace coldstart
