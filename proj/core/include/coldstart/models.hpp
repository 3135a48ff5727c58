#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "coldstart/dataset.hpp"
#include "coldstart/metrics.hpp"
#include "coldstart/rng.hpp"
#include "coldstart/select.hpp"

namespace coldstart {

// Grey-level image with intensities in [0, 1], row-major.
struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * width + c]; }
};

struct LogisticHyperparams {
  double learning_rate = 0.1;
  std::size_t max_epochs = 500;
  // Stop once the largest gradient component falls below this.
  double grad_tol = 1e-6;
};

// Mean class-weighted binary cross-entropy of logistic(x w + b) and its gradient.
struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

LossGradient weighted_logistic_loss(const Matrix& x, std::span<const int> y,
                                    std::array<double, 2> class_weights,
                                    std::span<const double> w, double b);

// weight_c = n / (2 n_c); both classes must be present.
std::array<double, 2> balanced_class_weights(std::span<const int> y);

double logistic(double z);

struct ReferenceClassifier {
  std::vector<double> weights;
  double bias = 0.0;
  std::array<double, 2> class_weights{1.0, 1.0};
  double learning_rate = 0.1;  // final step size after any backtracking
  std::size_t epochs = 0;
  // Set when only one class was labelled: the model predicts this base rate.
  std::optional<double> base_rate;
  std::vector<double> loss_history;  // loss before the first step, then after each epoch

  double predict(std::span<const double> x) const;
};

// Full-batch gradient descent from zero weights. A step that would raise the
// loss is retried with half the learning rate.
ReferenceClassifier fit_reference_classifier(const Matrix& x, std::span<const int> y, RngSeed seed,
                                             const LogisticHyperparams& params = {});

inline constexpr std::size_t kMaxSegmenterSide = 32;
inline constexpr std::size_t kPixelFeatures = 3;

// Per-pixel features: intensity, normalised row, normalised column.
Matrix pixel_features(const GrayImage& image);

struct ReferenceSegmenter {
  std::size_t height = 0;
  std::size_t width = 0;
  ReferenceClassifier pixel_model;

  ProbabilityMap predict(const GrayImage& image) const;
};

LogisticHyperparams default_segmenter_hyperparams();

ReferenceSegmenter fit_reference_segmenter(std::span<const GrayImage> images,
                                           std::span<const BinaryMask> masks, RngSeed seed,
                                           const LogisticHyperparams& params = default_segmenter_hyperparams());

}  // namespace coldstart
