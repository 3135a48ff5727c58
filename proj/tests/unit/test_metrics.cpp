#include <doctest.h>

#include <cmath>

#include "coldstart/bootstrap.hpp"
#include "coldstart/error.hpp"
#include "coldstart/evaluate.hpp"
#include "coldstart/metrics.hpp"
#include "oracles.hpp"

using namespace coldstart;

namespace {
BinaryMask mask_of(std::size_t h, std::size_t w, std::initializer_list<std::pair<std::size_t, std::size_t>> on) {
  BinaryMask m(h, w);
  for (auto [r, c] : on) m.set(r, c, true);
  return m;
}

BinaryMask random_mask(Rng& rng, std::size_t h, std::size_t w, double density) {
  BinaryMask m(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) m.set(r, c, rng.uniform01() < density);
  }
  return m;
}
}  // namespace

TEST_CASE("auprc hand-computed cases") {
  const std::map<SampleId, double> scores{{SampleId("p1"), 0.9}, {SampleId("n1"), 0.8}, {SampleId("p2"), 0.7}};
  const LabelMap truth{{SampleId("p1"), 1}, {SampleId("n1"), 0}, {SampleId("p2"), 1}};
  CHECK(auprc(scores, truth) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-15));

  const std::vector<ScoredLabel> perfect{{0.9, 1}, {0.8, 1}, {0.3, 0}, {0.1, 0}};
  CHECK(average_precision(perfect) == 1.0);
  const std::vector<ScoredLabel> inverted{{0.9, 0}, {0.1, 1}};
  CHECK(average_precision(inverted) == 0.5);

  // A tied block is scored at its end.
  const std::vector<ScoredLabel> tied{{0.5, 1}, {0.5, 0}};
  CHECK(average_precision(tied) == 0.5);
}

TEST_CASE("auprc errors") {
  CHECK_THROWS_AS(average_precision(std::vector<ScoredLabel>{{0.1, 0}, {0.2, 0}}), InvalidArgument);
  CHECK_THROWS_AS(average_precision(std::vector<ScoredLabel>{{0.1, 1}, {0.2, 1}}), InvalidArgument);
  const std::map<SampleId, double> scores{{SampleId("a"), 0.9}, {SampleId("b"), 0.1}};
  const LabelMap other{{SampleId("a"), 1}, {SampleId("c"), 0}};
  CHECK_THROWS_AS(auprc(scores, other), InvalidArgument);
}

TEST_CASE("property: auprc is invariant under strictly monotone score transforms") {
  Rng rng(RngSeed{31});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScoredLabel> items(2 + rng.uniform_index(30));
    for (auto& it : items) it = {static_cast<double>(rng.uniform_index(10)) / 10.0, static_cast<int>(rng.uniform_index(2))};
    items[0].label = 0;
    items[1].label = 1;
    auto transformed = items;
    for (auto& it : transformed) it.score = std::exp(3.0 * it.score) - 7.0;
    CHECK(average_precision(transformed) == average_precision(items));
  }
}

TEST_CASE("auprc equals the PR-step oracle on small random inputs") {
  Rng rng(RngSeed{32});
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(7);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.uniform_index(4));
      labels[i] = static_cast<int>(rng.uniform_index(2));
    }
    labels[0] = 1;
    labels[1] = 0;
    std::vector<ScoredLabel> items(n);
    for (std::size_t i = 0; i < n; ++i) items[i] = {scores[i], labels[i]};
    CHECK(average_precision(items) == doctest::Approx(oracle::pr_step_area(scores, labels)).epsilon(1e-12));
  }
}

TEST_CASE("f1 hand-computed cases") {
  CHECK(f1_from_counts({2, 1, 1, 0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const LabelMap truth{{SampleId("a"), 1}, {SampleId("b"), 0}, {SampleId("c"), 1}};
  CHECK(f1(truth, truth) == 1.0);
  const LabelMap none{{SampleId("a"), 0}, {SampleId("b"), 0}, {SampleId("c"), 0}};
  CHECK(f1(none, truth) == 0.0);
  const LabelMap mismatched{{SampleId("a"), 0}};
  CHECK_THROWS_AS(f1(mismatched, truth), InvalidArgument);
}

TEST_CASE("dsc") {
  const auto a = mask_of(3, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const auto b = mask_of(3, 3, {{0, 0}, {0, 1}, {2, 0}, {2, 1}});
  const auto c = mask_of(3, 3, {{2, 2}});
  CHECK(dsc(a, a) == 1.0);
  CHECK(dsc(a, c) == 0.0);
  CHECK(dsc(a, b) == 0.5);
  CHECK(dsc(BinaryMask(2, 2), BinaryMask(2, 2)) == 1.0);
  CHECK(dsc(a, BinaryMask(3, 3)) == 0.0);
  CHECK_THROWS_AS(dsc(a, BinaryMask(2, 3)), InvalidArgument);
}

TEST_CASE("hausdorff") {
  const auto a = mask_of(11, 11, {{0, 0}});
  CHECK(hausdorff(a, a) == 0.0);
  CHECK(hausdorff(a, mask_of(11, 11, {{3, 4}})) == 5.0);
  CHECK(hausdorff(mask_of(11, 11, {{0, 0}, {0, 10}}), a) == 10.0);
  CHECK_FALSE(hausdorff(a, BinaryMask(11, 11)).has_value());
  CHECK_THROWS_AS(hausdorff(a, BinaryMask(3, 3)), InvalidArgument);
}

TEST_CASE("property: hausdorff matches the double loop and is symmetric") {
  Rng rng(RngSeed{33});
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = 1 + rng.uniform_index(20), w = 1 + rng.uniform_index(20);
    const auto a = random_mask(rng, h, w, 0.1 + 0.3 * rng.uniform01());
    const auto b = random_mask(rng, h, w, 0.05 * rng.uniform01());
    const auto c = random_mask(rng, h, w, 0.2);
    const auto ab = hausdorff(a, b);
    if (!ab) continue;
    CHECK(*ab == oracle::hausdorff_double_loop(a, b));
    CHECK(*ab == *hausdorff(b, a));
    CHECK(dsc(a, b) == dsc(b, a));
    if (auto ac = hausdorff(a, c), cb = hausdorff(c, b); ac && cb) CHECK(*ab <= *ac + *cb + 1e-12);
  }
}

TEST_CASE("bootstrap: constant metric has zero se, and reports are reproducible") {
  std::vector<MaskPair> pairs;
  const auto m = mask_of(4, 4, {{1, 1}, {2, 2}});
  for (int i = 0; i < 10; ++i) pairs.push_back({m, m});
  const auto reports = evaluate_segmentation(pairs, 100, kDefaultSeed);
  CHECK(reports[0].estimate == 1.0);
  CHECK(reports[0].se == 0.0);
  CHECK(reports[1].estimate == 0.0);
  CHECK(reports[1].se == 0.0);
  CHECK(evaluate_segmentation(pairs, 100, kDefaultSeed) == reports);
}

TEST_CASE("bootstrap se equals the hand standard deviation of the seeded resamples") {
  const std::vector<double> values{1.0, 2.0, 4.0};
  const std::function<std::optional<double>(std::span<const double>)> mean =
      [](std::span<const double> s) -> std::optional<double> {
    double sum = 0.0;
    for (double v : s) sum += v;
    return sum / static_cast<double>(s.size());
  };
  const auto report = bootstrap_se<double>(values, mean, Metric::kDsc, 4, RngSeed{7});

  // Replay the resample contract: n_boot lists of n uniform indices from Rng(seed).
  Rng rng(RngSeed{7});
  std::vector<double> means;
  for (int b = 0; b < 4; ++b) {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += values[rng.uniform_index(3)];
    means.push_back(sum / 3.0);
  }
  const double mu = (means[0] + means[1] + means[2] + means[3]) / 4.0;
  double ss = 0.0;
  for (double v : means) ss += (v - mu) * (v - mu);
  CHECK(report.estimate == doctest::Approx(7.0 / 3.0));
  CHECK(report.se == doctest::Approx(std::sqrt(ss / 3.0)).epsilon(1e-12));
  CHECK(report.n_boot == 4);
  CHECK(report.redraws == 0);
}

TEST_CASE("bootstrap redraws resamples where the metric is undefined") {
  std::vector<ScoredLabel> test{{0.9, 1}, {0.2, 0}, {0.4, 0}, {0.3, 0}};
  const auto reports = evaluate_classification(test, 0.5, 100, kDefaultSeed);
  CHECK(reports[0].metric == Metric::kAuprc);
  CHECK(reports[0].estimate == 1.0);
  CHECK(reports[0].redraws > 0);
  CHECK(reports[1].metric == Metric::kF1);
  CHECK(reports[1].estimate == 1.0);
  CHECK(reports[0].se >= 0.0);
}

TEST_CASE("bootstrap preconditions") {
  const std::function<std::optional<double>(std::span<const double>)> any =
      [](std::span<const double>) -> std::optional<double> { return 1.0; };
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(bootstrap_se<double>(one, any, Metric::kDsc, 10, kDefaultSeed), InvalidArgument);
  CHECK_THROWS_AS(bootstrap_se<double>(two, any, Metric::kDsc, 1, kDefaultSeed), InvalidArgument);
}
