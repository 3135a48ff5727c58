#include "coldstart/select.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "coldstart/error.hpp"

namespace coldstart {

std::string_view to_string(SelectionMethod m) {
  return m == SelectionMethod::kRandom ? "random" : "clustering";
}

SelectionMethod parse_selection_method(std::string_view text) {
  if (text == "random") return SelectionMethod::kRandom;
  if (text == "clustering") return SelectionMethod::kClustering;
  throw InvalidArgument(fmt::format("unknown selection method '{}'", text));
}

std::span<const SampleId> SelectionPlan::prefix(std::size_t budget) const {
  if (budget > ordered_ids.size()) {
    throw InvalidArgument(fmt::format("budget {} exceeds plan length {}", budget, ordered_ids.size()));
  }
  return std::span(ordered_ids).first(budget);
}

namespace {

void check_pool(std::span<const SampleId> pool, std::size_t max_budget) {
  if (max_budget > pool.size()) {
    throw InvalidArgument(
        fmt::format("budget {} exceeds the selectable pool of {} samples", max_budget, pool.size()));
  }
  std::set<SampleId> seen(pool.begin(), pool.end());
  if (seen.size() != pool.size()) throw InvalidArgument("selection pool contains duplicate ids");
}

}  // namespace

SelectionPlan random_plan(std::span<const SampleId> pool, std::size_t max_budget, RngSeed seed) {
  check_pool(pool, max_budget);
  std::vector<SampleId> order(pool.begin(), pool.end());
  Rng rng(seed);
  rng.shuffle(std::span(order));
  order.resize(max_budget);

  SelectionPlan plan;
  plan.method = SelectionMethod::kRandom;
  plan.ordered_ids = std::move(order);
  plan.k_source.assign(max_budget, std::nullopt);
  plan.seed = seed;
  return plan;
}

SelectionPlan clustering_plan(const EmbeddingDataset& ds, std::span<const SampleId> pool,
                              std::size_t max_budget, const KMeansConfig& cfg, RngSeed seed) {
  check_pool(pool, max_budget);
  const EmbeddingDataset restricted = subset(ds, pool);

  SelectionPlan plan;
  plan.method = SelectionMethod::kClustering;
  plan.seed = seed;
  plan.provenance = ds.provenance;

  std::set<SampleId> taken;
  // A single-sample pool cannot be split in two; start from one cluster then.
  std::size_t k = std::min<std::size_t>(2, pool.size());
  while (plan.ordered_ids.size() < max_budget) {
    if (k > pool.size()) {
      throw Error(fmt::format("clustering_plan: ran out of clusters at k={} with {} of {} ids chosen",
                              k, plan.ordered_ids.size(), max_budget));
    }
    const auto result = kmeans(restricted, k, cfg, derive_seed(seed, k));
    for (const auto& id : result.medoid_ids) {
      if (plan.ordered_ids.size() == max_budget) break;
      if (!taken.insert(id).second) continue;
      plan.ordered_ids.push_back(id);
      plan.k_source.emplace_back(k);
    }
    ++k;
  }
  return plan;
}

double classification_score(double probability, double threshold) {
  return std::abs(probability - threshold);
}

double segmentation_uncertainty(const ProbabilityMap& map, double threshold) {
  if (map.height == 0 || map.width == 0 || map.values.empty()) {
    throw InvalidArgument("segmentation_uncertainty: empty probability map");
  }
  if (map.values.size() != map.height * map.width) {
    throw InvalidArgument("segmentation_uncertainty: map size does not match h x w");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("segmentation_uncertainty: threshold must lie in (0, 1)");
  }
  const double scale = std::max(threshold, 1.0 - threshold);
  double sum = 0.0;
  for (double p : map.values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument(fmt::format("segmentation_uncertainty: probability {} outside [0,1]", p));
    }
    sum += 1.0 - std::abs(p - threshold) / scale;
  }
  return sum / static_cast<double>(map.values.size());
}

double segmentation_score(const ProbabilityMap& map, double threshold) {
  return 1.0 - segmentation_uncertainty(map, threshold);
}

std::vector<SampleId> uncertainty_rank(std::span<const UncertaintyScore> scores, std::size_t batch) {
  if (batch > scores.size()) {
    throw InvalidArgument(fmt::format("uncertainty_rank: batch {} exceeds {} scored samples", batch,
                                      scores.size()));
  }
  std::vector<const UncertaintyScore*> order;
  order.reserve(scores.size());
  std::set<SampleId> seen;
  for (const auto& s : scores) {
    if (!std::isfinite(s.score)) {
      throw InvalidArgument(fmt::format("uncertainty_rank: non-finite score for {}", s.id.str()));
    }
    if (!seen.insert(s.id).second) {
      throw InvalidArgument(fmt::format("uncertainty_rank: duplicate id {}", s.id.str()));
    }
    order.push_back(&s);
  }
  const auto less = [](const UncertaintyScore* a, const UncertaintyScore* b) {
    if (a->score != b->score) return a->score < b->score;
    return a->id < b->id;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(batch), order.end(), less);
  std::vector<SampleId> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) out.push_back(order[i]->id);
  return out;
}

}  // namespace coldstart
