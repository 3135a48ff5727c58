#include <doctest.h>

#include <algorithm>
#include <set>

#include "coldstart/dataset.hpp"
#include "coldstart/error.hpp"

using namespace coldstart;

namespace {
std::vector<SampleId> numbered(std::size_t n) {
  std::vector<SampleId> ids;
  for (std::size_t i = 0; i < n; ++i) ids.emplace_back("id" + std::to_string(i));
  return ids;
}

EmbeddingDataset three_by_two() {
  EmbeddingDataset ds;
  ds.ids = make_ids({"a", "b", "c"});
  ds.vectors = Matrix(3, 2, {0.0, 1.0, 1.0, 0.0, 0.5, 0.5});
  return ds;
}
}  // namespace

TEST_CASE("sample ids reject commas, whitespace and empty tokens") {
  CHECK_THROWS_AS(SampleId(""), InvalidArgument);
  CHECK_THROWS_AS(SampleId("a,b"), InvalidArgument);
  CHECK_THROWS_AS(SampleId("a b"), InvalidArgument);
  CHECK_THROWS_AS(SampleId("a\tb"), InvalidArgument);
  CHECK(SampleId("patient-001.png").str() == "patient-001.png");
}

TEST_CASE("make_split on 800 ids at 70:10:20 yields 560/80/160") {
  const auto split = make_split(numbered(800), {0.7, 0.1, 0.2}, kDefaultSeed);
  CHECK(split.train.size() == 560);
  CHECK(split.validation.size() == 80);
  CHECK(split.test.size() == 160);
}

TEST_CASE("make_split with a degenerate ratio puts everything in train") {
  const auto split = make_split(numbered(10), {1.0, 0.0, 0.0}, kDefaultSeed);
  CHECK(split.train.size() == 10);
  CHECK(split.validation.empty());
  CHECK(split.test.empty());
}

TEST_CASE("make_split is deterministic for a seed") {
  const auto ids = numbered(10);
  CHECK(make_split(ids, {0.7, 0.1, 0.2}, RngSeed{2024}) == make_split(ids, {0.7, 0.1, 0.2}, RngSeed{2024}));
  CHECK(make_split(numbered(200), {0.7, 0.1, 0.2}, RngSeed{1}) !=
        make_split(numbered(200), {0.7, 0.1, 0.2}, RngSeed{2}));
}

TEST_CASE("make_split errors") {
  CHECK_THROWS_AS(make_split({}, {0.7, 0.1, 0.2}, kDefaultSeed), InvalidArgument);
  CHECK_THROWS_AS(make_split(numbered(2), {0.7, 0.1, 0.2}, kDefaultSeed), InvalidArgument);
  CHECK_THROWS_AS(make_split(numbered(10), {0.7, 0.1, 0.1}, kDefaultSeed), InvalidArgument);
  CHECK_THROWS_AS(make_split(numbered(10), {1.2, -0.1, -0.1}, kDefaultSeed), InvalidArgument);
}

TEST_CASE("property: split is a disjoint cover obeying the size law") {
  Rng gen(RngSeed{99});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + gen.uniform_index(300);
    double a = gen.uniform01(), b = gen.uniform01() * (1.0 - a);
    const SplitRatios ratios{1.0 - a - b, a, b};
    const auto ids = numbered(n);
    const auto split = make_split(ids, ratios, RngSeed{gen.next()});

    CHECK(split.validation.size() == static_cast<std::size_t>(std::floor(n * ratios[1] + 1e-9)));
    CHECK(split.test.size() == static_cast<std::size_t>(std::floor(n * ratios[2] + 1e-9)));
    CHECK(split.train.size() + split.validation.size() + split.test.size() == n);

    std::set<SampleId> all;
    for (const auto* part : {&split.train, &split.validation, &split.test}) all.insert(part->begin(), part->end());
    CHECK(all.size() == n);
    CHECK(all == std::set<SampleId>(ids.begin(), ids.end()));
  }
}

TEST_CASE("filter_positive keeps label-1 ids in order") {
  EmbeddingDataset ds = three_by_two();
  ds.labels = LabelMap{{SampleId("a"), 1}, {SampleId("b"), 0}, {SampleId("c"), 1}};
  const DataSplit split{make_ids({"a", "b", "c"}), {}, {}};
  CHECK(filter_positive(ds, split).train == make_ids({"a", "c"}));

  ds.labels = LabelMap{{SampleId("a"), 1}, {SampleId("b"), 1}, {SampleId("c"), 1}};
  const DataSplit spread{make_ids({"c", "a"}), make_ids({"b"}), {}};
  CHECK(filter_positive(ds, spread) == spread);

  ds.labels = LabelMap{{SampleId("a"), 0}, {SampleId("b"), 0}, {SampleId("c"), 0}};
  const auto none = filter_positive(ds, spread);
  CHECK(none.train.empty());
  CHECK(none.validation.empty());
  CHECK(none.test.empty());

  ds.labels.reset();
  CHECK_THROWS_AS(filter_positive(ds, spread), InvalidArgument);
}

TEST_CASE("validate_dataset reports each violation") {
  auto ds = three_by_two();
  CHECK(validate_dataset(ds).empty());

  auto dup = ds;
  dup.ids[2] = SampleId("a");
  CHECK(validate_dataset(dup) == std::vector<std::string>{"duplicate id: a"});

  auto bad = ds;
  bad.vectors(1, 0) = std::numeric_limits<double>::quiet_NaN();
  const auto v = validate_dataset(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("(1,0)") != std::string::npos);

  auto ragged = ds;
  ragged.ids.pop_back();
  CHECK(!validate_dataset(ragged).empty());

  auto labelled = ds;
  labelled.labels = LabelMap{{SampleId("zzz"), 1}};
  CHECK(validate_dataset(labelled).size() == 1);
}

TEST_CASE("budget schedules are strictly increasing and bounded by the pool") {
  CHECK(default_budgets().budgets() == std::vector<std::size_t>{20, 40, 60, 80, 100});
  CHECK_THROWS_AS(BudgetSchedule({20, 20}), InvalidArgument);
  CHECK_THROWS_AS(BudgetSchedule({0, 5}), InvalidArgument);
  CHECK_THROWS_AS(BudgetSchedule(std::vector<std::size_t>{}), InvalidArgument);
  CHECK_NOTHROW(default_budgets().check_pool(560));
  CHECK_THROWS_AS(BudgetSchedule({1000}).check_pool(800), InvalidArgument);
}

TEST_CASE("rng draws are reproducible and in range") {
  Rng a(RngSeed{5}), b(RngSeed{5});
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.uniform_index(7);
    CHECK(x == b.uniform_index(7));
    CHECK(x < 7);
  }
  // mt19937_64's 10000th output for the default seed is fixed by the standard.
  Rng std_seed(RngSeed{5489});
  for (int i = 0; i < 9999; ++i) std_seed.next();
  CHECK(std_seed.next() == 9981545732273789042ULL);
}
