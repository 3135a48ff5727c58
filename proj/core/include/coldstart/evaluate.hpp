#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coldstart/bootstrap.hpp"
#include "coldstart/metrics.hpp"
#include "coldstart/select.hpp"

namespace coldstart {

// AUPRC and F1 (probabilities binarised at `threshold`) with bootstrap SEs.
std::vector<MetricReport> evaluate_classification(std::span<const ScoredLabel> test, double threshold,
                                                  std::size_t n_boot, RngSeed seed);

struct MaskPair {
  BinaryMask predicted;
  BinaryMask truth;
};

// Mean DSC and mean HD over the test images with bootstrap SEs. Images whose
// HD is undefined (an empty mask) are left out of the HD mean; the count is
// reported in MetricReport::excluded.
std::vector<MetricReport> evaluate_segmentation(std::span<const MaskPair> test, std::size_t n_boot,
                                                RngSeed seed);

BinaryMask binarize(const ProbabilityMap& map, double threshold);

}  // namespace coldstart
