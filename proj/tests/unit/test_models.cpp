#include <doctest.h>

#include <cmath>

#include "coldstart/error.hpp"
#include "coldstart/evaluate.hpp"
#include "coldstart/models.hpp"
#include "coldstart/synthetic.hpp"
#include "oracles.hpp"

using namespace coldstart;

namespace {
Matrix random_matrix(Rng& rng, std::size_t n, std::size_t d) {
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.normal();
  }
  return m;
}

double max_gradient_error(const Matrix& x, const std::vector<int>& y, Rng& rng) {
  const auto weights = balanced_class_weights(y);
  std::vector<double> params(x.cols() + 1);
  for (auto& p : params) p = 0.5 * rng.normal();
  const auto loss_at = [&](const std::vector<double>& p) {
    return weighted_logistic_loss(x, y, weights, std::span(p).first(x.cols()), p.back()).loss;
  };
  const auto numeric = oracle::central_differences(loss_at, params, 1e-5);
  const auto analytic = weighted_logistic_loss(x, y, weights, std::span(params).first(x.cols()), params.back());
  double worst = std::abs(numeric.back() - analytic.grad_b);
  for (std::size_t j = 0; j < x.cols(); ++j) worst = std::max(worst, std::abs(numeric[j] - analytic.grad_w[j]));
  return worst;
}
}  // namespace

TEST_CASE("separable 1-D data is fit perfectly") {
  const Matrix x(4, 1, {-1.0, -2.0, 1.0, 2.0});
  const std::vector<int> y{0, 0, 1, 1};
  const auto model = fit_reference_classifier(x, y, kDefaultSeed);
  CHECK_FALSE(model.base_rate.has_value());
  for (std::size_t i = 0; i < 4; ++i) CHECK((model.predict(x.row(i)) >= 0.5) == (y[i] == 1));
}

TEST_CASE("symmetric balanced data keeps the bias at zero") {
  const Matrix x(4, 2, {1.0, 2.0, -1.0, -2.0, 0.5, -3.0, -0.5, 3.0});
  const std::vector<int> y{1, 0, 1, 0};
  LogisticHyperparams params;
  for (std::size_t epochs : {1, 5, 50, 500}) {
    params.max_epochs = epochs;
    CHECK(std::abs(fit_reference_classifier(x, y, kDefaultSeed, params).bias) < 1e-12);
  }
}

TEST_CASE("class weights are n / (2 n_c)") {
  const std::vector<int> y{1, 0, 0, 0};
  const auto w = balanced_class_weights(y);
  CHECK(w[0] == doctest::Approx(4.0 / 6.0));
  CHECK(w[1] == doctest::Approx(2.0));
}

TEST_CASE("classifier gradient matches central differences") {
  Rng rng(RngSeed{41});
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_matrix(rng, 5, 3);
    const std::vector<int> y{1, 0, 1, 0, 0};
    CHECK(max_gradient_error(x, y, rng) < 1e-6);
  }
}

TEST_CASE("training loss never increases") {
  Rng rng(RngSeed{42});
  for (int trial = 0; trial < 10; ++trial) {
    auto x = random_matrix(rng, 40, 4);
    // Large-scale features would make a fixed step diverge.
    for (std::size_t i = 0; i < 40; ++i) x(i, 0) *= 50.0;
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i) y[i] = x(i, 1) + 0.3 * rng.normal() > 0 ? 1 : 0;
    y[0] = 0;
    y[1] = 1;
    const auto model = fit_reference_classifier(x, y, kDefaultSeed);
    REQUIRE(model.loss_history.size() >= 2);
    for (std::size_t i = 1; i < model.loss_history.size(); ++i) {
      CHECK(model.loss_history[i] <= model.loss_history[i - 1] + 1e-9);
    }
  }
}

TEST_CASE("single-class labels fall back to a base-rate predictor") {
  const Matrix x(3, 2, {1, 2, 3, 4, 5, 6});
  const auto neg = fit_reference_classifier(x, std::vector<int>{0, 0, 0}, kDefaultSeed);
  REQUIRE(neg.base_rate.has_value());
  CHECK(neg.predict(x.row(0)) == 0.0);
  const auto pos = fit_reference_classifier(x, std::vector<int>{1, 1, 1}, kDefaultSeed);
  CHECK(pos.predict(x.row(1)) == 1.0);
}

TEST_CASE("classifier fitting is deterministic") {
  Rng rng(RngSeed{43});
  const auto x = random_matrix(rng, 30, 3);
  std::vector<int> y(30);
  for (std::size_t i = 0; i < 30; ++i) y[i] = x(i, 0) > 0 ? 1 : 0;
  const auto a = fit_reference_classifier(x, y, RngSeed{1});
  const auto b = fit_reference_classifier(x, y, RngSeed{2});
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
}

TEST_CASE("segmenter learns thresholded intensity") {
  const auto toy = synthetic::make_segmentation_toy(30, 16, 16, RngSeed{5});
  std::vector<GrayImage> train_images, test_images;
  std::vector<BinaryMask> train_masks, test_masks;
  for (std::size_t i = 0; i < toy.ids.size(); ++i) {
    auto& images = i < 20 ? train_images : test_images;
    auto& masks = i < 20 ? train_masks : test_masks;
    images.push_back(toy.images.at(toy.ids[i]));
    masks.push_back(toy.masks.at(toy.ids[i]));
  }
  const auto seg = fit_reference_segmenter(train_images, train_masks, kDefaultSeed);
  double total = 0.0;
  for (std::size_t i = 0; i < test_images.size(); ++i) {
    total += dsc(binarize(seg.predict(test_images[i]), 0.5), test_masks[i]);
  }
  CHECK(total / static_cast<double>(test_images.size()) > 0.9);
}

TEST_CASE("segmenter with all-zero masks predicts background everywhere") {
  const auto toy = synthetic::make_segmentation_toy(4, 8, 8, RngSeed{6});
  std::vector<GrayImage> images;
  std::vector<BinaryMask> masks;
  for (const auto& id : toy.ids) {
    images.push_back(toy.images.at(id));
    masks.emplace_back(8, 8);
  }
  const auto seg = fit_reference_segmenter(images, masks, kDefaultSeed);
  for (const auto& image : images) {
    for (double p : seg.predict(image).values) CHECK(p < 0.5);
  }
}

TEST_CASE("segmenter gradient matches central differences") {
  Rng rng(RngSeed{44});
  const auto toy = synthetic::make_segmentation_toy(3, 5, 5, RngSeed{7});
  for (const auto& id : toy.ids) {
    const Matrix x = pixel_features(toy.images.at(id));
    std::vector<int> y(toy.masks.at(id).cells().begin(), toy.masks.at(id).cells().end());
    if (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0) continue;
    CHECK(max_gradient_error(x, y, rng) < 1e-6);
  }
}

TEST_CASE("segmenter dimension checks") {
  const auto toy = synthetic::make_segmentation_toy(2, 6, 6, RngSeed{8});
  std::vector<GrayImage> images{toy.images.at(toy.ids[0]), toy.images.at(toy.ids[1])};
  std::vector<BinaryMask> masks{toy.masks.at(toy.ids[0]), BinaryMask(5, 6)};
  CHECK_THROWS_AS(fit_reference_segmenter(images, masks, kDefaultSeed), InvalidArgument);
  GrayImage big{33, 4, std::vector<double>(132, 0.0)};
  std::vector<GrayImage> too_big{big};
  std::vector<BinaryMask> big_mask{BinaryMask(33, 4)};
  CHECK_THROWS_AS(fit_reference_segmenter(too_big, big_mask, kDefaultSeed), InvalidArgument);
}
