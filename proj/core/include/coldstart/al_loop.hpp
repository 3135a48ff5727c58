#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <variant>
#include <vector>

#include "coldstart/dataset.hpp"
#include "coldstart/metrics.hpp"
#include "coldstart/models.hpp"
#include "coldstart/select.hpp"

namespace coldstart {

// A class label (0/1) or a segmentation mask.
using Annotation = std::variant<int, BinaryMask>;

// Simulated annotator. The first reveal of an id is charged; later reveals of
// the same id are free and return the cached answer.
class LabelOracle {
 public:
  using Lookup = std::function<Annotation(const SampleId&)>;

  explicit LabelOracle(Lookup lookup) : lookup_(std::move(lookup)) {}

  static LabelOracle from_labels(LabelMap labels);
  static LabelOracle from_masks(std::map<SampleId, BinaryMask> masks);

  const Annotation& reveal(const SampleId& id);
  std::size_t charged() const { return cache_.size(); }
  bool revealed(const SampleId& id) const { return cache_.contains(id); }

 private:
  Lookup lookup_;
  std::map<SampleId, Annotation> cache_;
};

struct LabeledExample {
  SampleId id;
  Annotation label;
};

// A probability (classification) or a probability map (segmentation).
using Prediction = std::variant<double, ProbabilityMap>;

class Model {
 public:
  virtual ~Model() = default;
  virtual void fit(std::span<const LabeledExample> labeled) = 0;
  virtual std::vector<Prediction> predict_proba(std::span<const SampleId> ids) const = 0;
};

// Reference classifier over embedding rows.
class EmbeddingClassifierModel final : public Model {
 public:
  EmbeddingClassifierModel(const EmbeddingDataset& ds, RngSeed seed, LogisticHyperparams params = {});

  void fit(std::span<const LabeledExample> labeled) override;
  std::vector<Prediction> predict_proba(std::span<const SampleId> ids) const override;
  std::vector<double> probabilities(std::span<const SampleId> ids) const;
  const ReferenceClassifier& classifier() const { return classifier_; }

 private:
  const EmbeddingDataset& ds_;
  IdIndex index_;
  RngSeed seed_;
  LogisticHyperparams params_;
  ReferenceClassifier classifier_;
  bool fitted_ = false;
};

// Reference per-pixel segmenter over an image store.
class PixelSegmenterModel final : public Model {
 public:
  PixelSegmenterModel(const std::map<SampleId, GrayImage>& images, RngSeed seed,
                      LogisticHyperparams params = default_segmenter_hyperparams());

  void fit(std::span<const LabeledExample> labeled) override;
  std::vector<Prediction> predict_proba(std::span<const SampleId> ids) const override;
  std::vector<ProbabilityMap> maps(std::span<const SampleId> ids) const;

 private:
  const std::map<SampleId, GrayImage>& images_;
  RngSeed seed_;
  LogisticHyperparams params_;
  ReferenceSegmenter segmenter_;
  bool fitted_ = false;
};

struct IterationRecord {
  std::size_t iteration = 0;        // 1-based
  std::size_t labeled_after = 0;    // cumulative labels spent after this iteration
  std::vector<SampleId> acquired;   // in acquisition order
  std::optional<double> metric;     // evaluator output for the model fitted this iteration

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct ALState {
  std::size_t iteration = 0;
  std::size_t initial_budget = 0;
  std::vector<SampleId> labeled;    // acquisition order
  std::vector<SampleId> unlabeled;  // pool order
  std::vector<IterationRecord> history;

  friend bool operator==(const ALState&, const ALState&) = default;
};

// Labels the first `budget` plan ids; the rest of the pool stays unlabelled.
ALState init_from_plan(const SelectionPlan& plan, std::size_t budget, std::span<const SampleId> pool,
                       LabelOracle& oracle);

using Evaluator = std::function<double(const Model&)>;

// Each iteration refits `model` from scratch on every labelled sample, scores
// the unlabelled pool, and acquires the per_iter most uncertain ids.
ALState run_iterations(ALState state, Model& model, LabelOracle& oracle, std::size_t per_iter,
                       std::size_t n_iters, double threshold = kDefaultThreshold,
                       const Evaluator& evaluate = {});

// Uncertainty score of one prediction (lower = more uncertain).
double prediction_score(const Prediction& p, double threshold);

std::vector<LabeledExample> labeled_examples(const ALState& state, LabelOracle& oracle);

}  // namespace coldstart
