#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "coldstart/dataset.hpp"
#include "coldstart/kmeans.hpp"
#include "coldstart/rng.hpp"

namespace coldstart {

enum class SelectionMethod { kRandom, kClustering };

std::string_view to_string(SelectionMethod m);
SelectionMethod parse_selection_method(std::string_view text);

// An ordered, duplicate-free list of ids whose prefixes realise every budget:
// the ids chosen for budget b are exactly ordered_ids[0, b).
struct SelectionPlan {
  SelectionMethod method = SelectionMethod::kRandom;
  std::vector<SampleId> ordered_ids;
  // Cluster count that contributed each entry; nullopt for random entries.
  std::vector<std::optional<std::size_t>> k_source;
  RngSeed seed;
  std::optional<Provenance> provenance;

  std::span<const SampleId> prefix(std::size_t budget) const;

  friend bool operator==(const SelectionPlan&, const SelectionPlan&) = default;
};

SelectionPlan random_plan(std::span<const SampleId> pool, std::size_t max_budget, RngSeed seed);

// Runs k-means on the pool for k = 2, 3, ... and appends each k's medoids in
// cluster order, skipping ids already taken, until max_budget ids are chosen.
// k uses seed derive_seed(seed, k).
SelectionPlan clustering_plan(const EmbeddingDataset& ds, std::span<const SampleId> pool,
                              std::size_t max_budget, const KMeansConfig& cfg, RngSeed seed);

inline constexpr double kDefaultThreshold = 0.5;

// Lower score = more uncertain.
struct UncertaintyScore {
  SampleId id;
  double score = 0.0;
};

// |p - threshold|.
double classification_score(double probability, double threshold = kDefaultThreshold);

// Row-major h x w grid of per-pixel foreground probabilities.
struct ProbabilityMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * width + c]; }
  friend bool operator==(const ProbabilityMap&, const ProbabilityMap&) = default;
};

// Mean over pixels of 1 - |p - t| / max(t, 1 - t). 1 is maximally uncertain.
double segmentation_uncertainty(const ProbabilityMap& map, double threshold = kDefaultThreshold);

// 1 - segmentation_uncertainty, so that lower means more uncertain.
double segmentation_score(const ProbabilityMap& map, double threshold = kDefaultThreshold);

// The `batch` lowest-scoring ids, ascending by (score, id).
std::vector<SampleId> uncertainty_rank(std::span<const UncertaintyScore> scores, std::size_t batch);

}  // namespace coldstart
