#include "coldstart/models.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "coldstart/error.hpp"

namespace coldstart {

namespace {
// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
}  // namespace

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::array<double, 2> balanced_class_weights(std::span<const int> y) {
  std::array<std::size_t, 2> counts{0, 0};
  for (int v : y) ++counts[v != 0 ? 1 : 0];
  if (counts[0] == 0 || counts[1] == 0) {
    throw InvalidArgument("balanced_class_weights: both classes must be present");
  }
  const auto n = static_cast<double>(y.size());
  return {n / (2.0 * static_cast<double>(counts[0])), n / (2.0 * static_cast<double>(counts[1]))};
}

LossGradient weighted_logistic_loss(const Matrix& x, std::span<const int> y,
                                    std::array<double, 2> class_weights,
                                    std::span<const double> w, double b) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  LossGradient out;
  out.grad_w.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    const double z = dot(row, w) + b;
    const int label = y[i] != 0 ? 1 : 0;
    const double cw = class_weights[static_cast<std::size_t>(label)];
    out.loss += cw * (label == 1 ? softplus(-z) : softplus(z));
    const double residual = cw * (logistic(z) - static_cast<double>(label));
    for (std::size_t j = 0; j < d; ++j) out.grad_w[j] += residual * row[j];
    out.grad_b += residual;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  out.loss *= inv_n;
  for (auto& g : out.grad_w) g *= inv_n;
  out.grad_b *= inv_n;
  return out;
}

double ReferenceClassifier::predict(std::span<const double> x) const {
  if (base_rate) return *base_rate;
  if (x.size() != weights.size()) {
    throw InvalidArgument(fmt::format("classifier expects {} features, got {}", weights.size(), x.size()));
  }
  return logistic(dot(x, weights) + bias);
}

ReferenceClassifier fit_reference_classifier(const Matrix& x, std::span<const int> y, RngSeed,
                                             const LogisticHyperparams& params) {
  if (x.rows() == 0) throw InvalidArgument("fit_reference_classifier: no labelled samples");
  if (x.rows() != y.size()) {
    throw InvalidArgument(fmt::format("fit_reference_classifier: {} rows but {} labels", x.rows(), y.size()));
  }
  if (!(params.learning_rate > 0.0)) throw InvalidArgument("fit_reference_classifier: learning rate must be positive");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("fit_reference_classifier: non-finite feature");
  }

  ReferenceClassifier model;
  model.weights.assign(x.cols(), 0.0);
  model.learning_rate = params.learning_rate;

  std::size_t positives = 0;
  for (int v : y) positives += v != 0 ? 1 : 0;
  if (positives == 0 || positives == y.size()) {
    model.base_rate = static_cast<double>(positives) / static_cast<double>(y.size());
    return model;
  }
  model.class_weights = balanced_class_weights(y);

  // Weights start at zero, so the seed does not influence the fit.
  auto current = weighted_logistic_loss(x, y, model.class_weights, model.weights, model.bias);
  model.loss_history.push_back(current.loss);
  std::vector<double> trial_w(x.cols());
  for (std::size_t epoch = 0; epoch < params.max_epochs; ++epoch) {
    double grad_max = std::abs(current.grad_b);
    for (double g : current.grad_w) grad_max = std::max(grad_max, std::abs(g));
    if (grad_max < params.grad_tol) break;

    bool accepted = false;
    for (int halvings = 0; halvings < 60 && !accepted; ++halvings) {
      for (std::size_t j = 0; j < trial_w.size(); ++j) {
        trial_w[j] = model.weights[j] - model.learning_rate * current.grad_w[j];
      }
      const double trial_b = model.bias - model.learning_rate * current.grad_b;
      auto next = weighted_logistic_loss(x, y, model.class_weights, trial_w, trial_b);
      if (next.loss <= current.loss) {
        model.weights = trial_w;
        model.bias = trial_b;
        current = std::move(next);
        accepted = true;
      } else {
        model.learning_rate *= 0.5;
      }
    }
    if (!accepted) break;
    model.epochs = epoch + 1;
    model.loss_history.push_back(current.loss);
  }
  return model;
}

Matrix pixel_features(const GrayImage& image) {
  Matrix features(image.height * image.width, kPixelFeatures);
  const double row_scale = image.height > 1 ? 1.0 / static_cast<double>(image.height - 1) : 0.0;
  const double col_scale = image.width > 1 ? 1.0 / static_cast<double>(image.width - 1) : 0.0;
  for (std::size_t r = 0; r < image.height; ++r) {
    for (std::size_t c = 0; c < image.width; ++c) {
      auto f = features.row(r * image.width + c);
      f[0] = image.at(r, c);
      f[1] = static_cast<double>(r) * row_scale;
      f[2] = static_cast<double>(c) * col_scale;
    }
  }
  return features;
}

ProbabilityMap ReferenceSegmenter::predict(const GrayImage& image) const {
  if (image.height != height || image.width != width) {
    throw InvalidArgument(fmt::format("segmenter trained on {}x{} images, got {}x{}", height, width,
                                      image.height, image.width));
  }
  const Matrix features = pixel_features(image);
  ProbabilityMap map{height, width, std::vector<double>(height * width)};
  for (std::size_t i = 0; i < features.rows(); ++i) map.values[i] = pixel_model.predict(features.row(i));
  return map;
}

LogisticHyperparams default_segmenter_hyperparams() {
  LogisticHyperparams params;
  params.learning_rate = 1.0;
  params.max_epochs = 2000;
  return params;
}

ReferenceSegmenter fit_reference_segmenter(std::span<const GrayImage> images,
                                           std::span<const BinaryMask> masks, RngSeed seed,
                                           const LogisticHyperparams& params) {
  if (images.empty()) throw InvalidArgument("fit_reference_segmenter: no training images");
  if (images.size() != masks.size()) {
    throw InvalidArgument(fmt::format("fit_reference_segmenter: {} images but {} masks", images.size(), masks.size()));
  }
  const std::size_t h = images.front().height;
  const std::size_t w = images.front().width;
  if (h == 0 || w == 0 || h > kMaxSegmenterSide || w > kMaxSegmenterSide) {
    throw InvalidArgument(fmt::format("fit_reference_segmenter: image size {}x{} outside 1..{}", h, w,
                                      kMaxSegmenterSide));
  }
  const std::size_t pixels = h * w;
  Matrix x(images.size() * pixels, kPixelFeatures);
  std::vector<int> y(images.size() * pixels);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& image = images[i];
    const auto& mask = masks[i];
    if (image.height != h || image.width != w || image.values.size() != pixels ||
        mask.height() != h || mask.width() != w) {
      throw InvalidArgument(fmt::format("fit_reference_segmenter: sample {} does not match {}x{}", i, h, w));
    }
    const Matrix f = pixel_features(image);
    for (std::size_t p = 0; p < pixels; ++p) {
      std::copy(f.row(p).begin(), f.row(p).end(), x.row(i * pixels + p).begin());
      y[i * pixels + p] = mask.cells()[p];
    }
  }
  ReferenceSegmenter seg;
  seg.height = h;
  seg.width = w;
  seg.pixel_model = fit_reference_classifier(x, y, seed, params);
  return seg;
}

}  // namespace coldstart
