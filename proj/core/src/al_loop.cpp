#include "coldstart/al_loop.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "coldstart/error.hpp"

namespace coldstart {

LabelOracle LabelOracle::from_labels(LabelMap labels) {
  return LabelOracle([labels = std::move(labels)](const SampleId& id) -> Annotation {
    const auto it = labels.find(id);
    if (it == labels.end()) throw InvalidArgument(fmt::format("oracle: no label for {}", id.str()));
    return it->second;
  });
}

LabelOracle LabelOracle::from_masks(std::map<SampleId, BinaryMask> masks) {
  return LabelOracle([masks = std::move(masks)](const SampleId& id) -> Annotation {
    const auto it = masks.find(id);
    if (it == masks.end()) throw InvalidArgument(fmt::format("oracle: no mask for {}", id.str()));
    return it->second;
  });
}

const Annotation& LabelOracle::reveal(const SampleId& id) {
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  return cache_.emplace(id, lookup_(id)).first->second;
}

EmbeddingClassifierModel::EmbeddingClassifierModel(const EmbeddingDataset& ds, RngSeed seed,
                                                   LogisticHyperparams params)
    : ds_(ds), index_(ds.ids), seed_(seed), params_(params) {}

void EmbeddingClassifierModel::fit(std::span<const LabeledExample> labeled) {
  Matrix x(labeled.size(), ds_.dim());
  std::vector<int> y(labeled.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const auto src = ds_.vectors.row(index_.at(labeled[i].id));
    std::copy(src.begin(), src.end(), x.row(i).begin());
    const auto* label = std::get_if<int>(&labeled[i].label);
    if (!label) throw InvalidArgument("classifier model needs class labels, got a mask");
    y[i] = *label;
  }
  classifier_ = fit_reference_classifier(x, y, seed_, params_);
  fitted_ = true;
}

std::vector<double> EmbeddingClassifierModel::probabilities(std::span<const SampleId> ids) const {
  if (!fitted_) throw Error("classifier model used before fit");
  std::vector<double> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(classifier_.predict(ds_.vectors.row(index_.at(id))));
  return out;
}

std::vector<Prediction> EmbeddingClassifierModel::predict_proba(std::span<const SampleId> ids) const {
  const auto probs = probabilities(ids);
  return {probs.begin(), probs.end()};
}

PixelSegmenterModel::PixelSegmenterModel(const std::map<SampleId, GrayImage>& images, RngSeed seed,
                                         LogisticHyperparams params)
    : images_(images), seed_(seed), params_(params) {}

void PixelSegmenterModel::fit(std::span<const LabeledExample> labeled) {
  std::vector<GrayImage> images;
  std::vector<BinaryMask> masks;
  images.reserve(labeled.size());
  masks.reserve(labeled.size());
  for (const auto& ex : labeled) {
    const auto it = images_.find(ex.id);
    if (it == images_.end()) throw InvalidArgument(fmt::format("segmenter model: no image for {}", ex.id.str()));
    const auto* mask = std::get_if<BinaryMask>(&ex.label);
    if (!mask) throw InvalidArgument("segmenter model needs masks, got a class label");
    images.push_back(it->second);
    masks.push_back(*mask);
  }
  segmenter_ = fit_reference_segmenter(images, masks, seed_, params_);
  fitted_ = true;
}

std::vector<ProbabilityMap> PixelSegmenterModel::maps(std::span<const SampleId> ids) const {
  if (!fitted_) throw Error("segmenter model used before fit");
  std::vector<ProbabilityMap> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = images_.find(id);
    if (it == images_.end()) throw InvalidArgument(fmt::format("segmenter model: no image for {}", id.str()));
    out.push_back(segmenter_.predict(it->second));
  }
  return out;
}

std::vector<Prediction> PixelSegmenterModel::predict_proba(std::span<const SampleId> ids) const {
  auto m = maps(ids);
  return {std::make_move_iterator(m.begin()), std::make_move_iterator(m.end())};
}

ALState init_from_plan(const SelectionPlan& plan, std::size_t budget, std::span<const SampleId> pool,
                       LabelOracle& oracle) {
  if (budget == 0) throw InvalidArgument("init_from_plan: budget must be positive");
  const auto chosen = plan.prefix(budget);
  const std::set<SampleId> pool_set(pool.begin(), pool.end());
  const std::set<SampleId> chosen_set(chosen.begin(), chosen.end());
  for (const auto& id : chosen) {
    if (!pool_set.contains(id)) throw InvalidArgument(fmt::format("init_from_plan: {} is not in the pool", id.str()));
  }
  ALState state;
  state.initial_budget = budget;
  state.labeled.assign(chosen.begin(), chosen.end());
  for (const auto& id : state.labeled) oracle.reveal(id);
  for (const auto& id : pool) {
    if (!chosen_set.contains(id)) state.unlabeled.push_back(id);
  }
  return state;
}

double prediction_score(const Prediction& p, double threshold) {
  if (const auto* prob = std::get_if<double>(&p)) {
    if (!(*prob >= 0.0 && *prob <= 1.0)) {
      throw InvalidArgument(fmt::format("model returned probability {} outside [0,1]", *prob));
    }
    return classification_score(*prob, threshold);
  }
  return segmentation_score(std::get<ProbabilityMap>(p), threshold);
}

std::vector<LabeledExample> labeled_examples(const ALState& state, LabelOracle& oracle) {
  std::vector<LabeledExample> out;
  out.reserve(state.labeled.size());
  for (const auto& id : state.labeled) out.push_back({id, oracle.reveal(id)});
  return out;
}

ALState run_iterations(ALState state, Model& model, LabelOracle& oracle, std::size_t per_iter,
                       std::size_t n_iters, double threshold, const Evaluator& evaluate) {
  if (n_iters == 0) return state;
  if (per_iter == 0) throw InvalidArgument("run_iterations: per-iteration budget must be positive");
  if (n_iters * per_iter > state.unlabeled.size()) {
    throw InvalidArgument(fmt::format("run_iterations: {} iterations of {} exceed the {} unlabelled samples",
                                      n_iters, per_iter, state.unlabeled.size()));
  }
  for (std::size_t step = 0; step < n_iters; ++step) {
    const std::size_t iteration = state.iteration + 1;
    try {
      model.fit(labeled_examples(state, oracle));
    } catch (const std::exception& e) {
      throw Error(fmt::format("iteration {}: model fit failed: {}", iteration, e.what()));
    }
    const auto predictions = model.predict_proba(state.unlabeled);
    if (predictions.size() != state.unlabeled.size()) {
      throw Error(fmt::format("iteration {}: model returned {} predictions for {} samples", iteration,
                              predictions.size(), state.unlabeled.size()));
    }
    std::vector<UncertaintyScore> scores;
    scores.reserve(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      scores.push_back({state.unlabeled[i], prediction_score(predictions[i], threshold)});
    }
    IterationRecord record;
    record.iteration = iteration;
    record.acquired = uncertainty_rank(scores, per_iter);
    if (evaluate) record.metric = evaluate(model);

    const std::set<SampleId> acquired(record.acquired.begin(), record.acquired.end());
    for (const auto& id : record.acquired) {
      oracle.reveal(id);
      state.labeled.push_back(id);
    }
    std::erase_if(state.unlabeled, [&](const SampleId& id) { return acquired.contains(id); });
    record.labeled_after = state.labeled.size();
    state.history.push_back(std::move(record));
    state.iteration = iteration;
  }
  return state;
}

}  // namespace coldstart
