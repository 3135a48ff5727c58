#include <doctest.h>

#include <algorithm>
#include <map>

#include "coldstart/error.hpp"
#include "coldstart/kmeans.hpp"
#include "coldstart/synthetic.hpp"
#include "oracles.hpp"

using namespace coldstart;

namespace {
EmbeddingDataset points(std::vector<std::vector<double>> rows) {
  EmbeddingDataset ds;
  const std::size_t d = rows.front().size();
  std::vector<double> flat;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ds.ids.emplace_back("p" + std::to_string(i));
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  ds.vectors = Matrix(rows.size(), d, std::move(flat));
  return ds;
}

EmbeddingDataset random_dataset(std::size_t n, std::size_t d, Rng& rng) {
  EmbeddingDataset ds;
  std::vector<double> flat(n * d);
  for (auto& v : flat) v = rng.normal();
  for (std::size_t i = 0; i < n; ++i) ds.ids.emplace_back("r" + std::to_string(i));
  ds.vectors = Matrix(n, d, std::move(flat));
  return ds;
}
}  // namespace

TEST_CASE("k=1 centroid is the mean and inertia is the hand sum") {
  const auto ds = points({{0, 0}, {0, 2}, {2, 0}});
  const auto res = kmeans(ds, 1, {}, kDefaultSeed);
  CHECK(res.centroids(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(res.centroids(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  // 8/9 + 20/9 + 20/9
  CHECK(res.inertia == doctest::Approx(16.0 / 3.0).epsilon(1e-14));
  CHECK(res.medoid_ids == make_ids({"p0"}));
}

TEST_CASE("two separated pairs reach the exhaustive optimum") {
  const auto ds = points({{0, 0}, {0.1, 0}, {10, 10}, {10.1, 10}});
  const double optimum = oracle::best_partition_inertia(ds.vectors, 2);
  CHECK(optimum == doctest::Approx(0.01).epsilon(1e-12));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto res = kmeans(ds, 2, {}, RngSeed{seed});
    CHECK(res.assignments[0] == res.assignments[1]);
    CHECK(res.assignments[2] == res.assignments[3]);
    CHECK(res.assignments[0] != res.assignments[2]);
    const auto low = res.assignments[0];
    CHECK(res.centroids(low, 0) == doctest::Approx(0.05));
    CHECK(res.centroids(low, 1) == doctest::Approx(0.0));
    CHECK(res.centroids(1 - low, 0) == doctest::Approx(10.05));
    CHECK(res.centroids(1 - low, 1) == doctest::Approx(10.0));
    CHECK(res.inertia == doctest::Approx(optimum).epsilon(1e-12));
    const auto trace = inertia_trace(ds, 2, {}, RngSeed{seed});
    CHECK(trace.back() == res.inertia);
  }
}

TEST_CASE("k=n gives zero inertia and every point is a medoid") {
  Rng rng(RngSeed{3});
  const auto ds = random_dataset(12, 3, rng);
  const auto res = kmeans(ds, ds.size(), {}, kDefaultSeed);
  CHECK(res.inertia == 0.0);
  auto meds = res.medoid_ids;
  std::sort(meds.begin(), meds.end());
  auto ids = ds.ids;
  std::sort(ids.begin(), ids.end());
  CHECK(meds == ids);
  CHECK(inertia_trace(ds, ds.size(), {}, kDefaultSeed) == std::vector<double>{0.0});
}

TEST_CASE("kmeans argument errors") {
  const auto ds = points({{0, 0}, {1, 1}});
  CHECK_THROWS_AS(kmeans(ds, 0, {}, kDefaultSeed), InvalidArgument);
  CHECK_THROWS_AS(kmeans(ds, 3, {}, kDefaultSeed), InvalidArgument);
}

TEST_CASE("medoids follow the tie-break and validate their input") {
  const auto ds = points({{0, 0}, {0, 2}, {2, 0}});
  ClusteringResult res;
  res.k = 1;
  res.centroids = Matrix(1, 2, {2.0 / 3.0, 2.0 / 3.0});
  res.assignments = {0, 0, 0};
  CHECK(medoids(ds, res) == make_ids({"p0"}));

  // (0,2) and (2,0) are equidistant from (1,1): the lower row wins.
  const auto pair = points({{0, 2}, {2, 0}});
  ClusteringResult tie{1, Matrix(1, 2, {1.0, 1.0}), {0, 0}, 0.0, {}, 0};
  CHECK(medoids(pair, tie) == make_ids({"p0"}));

  ClusteringResult single{2, Matrix(2, 2, {0, 2, 2, 0}), {0, 1}, 0.0, {}, 0};
  CHECK(medoids(pair, single) == make_ids({"p0", "p1"}));

  ClusteringResult wrong{1, Matrix(1, 2, {1.0, 1.0}), {0}, 0.0, {}, 0};
  CHECK_THROWS_AS(medoids(pair, wrong), InvalidArgument);
}

TEST_CASE("property: Lloyd trace is non-increasing on random data") {
  Rng rng(RngSeed{11});
  for (int trial = 0; trial < 25; ++trial) {
    const auto ds = random_dataset(50, 4, rng);
    const auto trace = inertia_trace(ds, 3, {}, RngSeed{rng.next()});
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
  }
}

TEST_CASE("property: medoids match a brute-force scan") {
  Rng rng(RngSeed{12});
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(60);
    const auto ds = random_dataset(n, 1 + rng.uniform_index(6), rng);
    const std::size_t k = 1 + rng.uniform_index(std::min<std::size_t>(n, 8));
    const auto res = kmeans(ds, k, {}, RngSeed{rng.next()});
    const auto rows = oracle::medoid_rows(ds.vectors, res.centroids, res.assignments);
    for (std::size_t c = 0; c < k; ++c) CHECK(res.medoid_ids[c] == ds.ids[rows[c]]);
  }
}

TEST_CASE("every cluster index is used, even with duplicate points") {
  const auto ds = points({{1, 1}, {1, 1}, {1, 1}, {5, 5}, {5, 5}});
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto res = kmeans(ds, k, {}, kDefaultSeed);
    std::set<std::size_t> used(res.assignments.begin(), res.assignments.end());
    CHECK(used.size() == k);
  }
}

TEST_CASE("output is bit-identical regardless of thread count") {
  synthetic::BlobSpec spec;
  spec.n = 2000;
  spec.clusters = 6;
  spec.dim = 5;
  spec.separation = 3.0;
  const auto blobs = synthetic::make_blobs(spec, RngSeed{4});
  KMeansConfig one;
  KMeansConfig four;
  four.threads = 4;
  const auto a = kmeans(blobs.dataset, 6, one, kDefaultSeed);
  const auto b = kmeans(blobs.dataset, 6, four, kDefaultSeed);
  CHECK(a.centroids == b.centroids);
  CHECK(a.assignments == b.assignments);
  CHECK(a.inertia == b.inertia);
  CHECK(a.medoid_ids == b.medoid_ids);
}

TEST_CASE("well separated blobs are recovered") {
  synthetic::BlobSpec spec;
  spec.n = 250;
  spec.clusters = 5;
  spec.dim = 4;
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto blobs = synthetic::make_blobs(spec, RngSeed{seed});
    const auto res = kmeans(blobs.dataset, 5, {}, RngSeed{seed});
    std::map<std::size_t, std::size_t> relabel;
    bool ok = true;
    for (std::size_t i = 0; i < blobs.cluster.size() && ok; ++i) {
      const auto [it, inserted] = relabel.emplace(blobs.cluster[i], res.assignments[i]);
      ok = it->second == res.assignments[i];
    }
    std::set<std::size_t> images;
    for (const auto& [from, to] : relabel) images.insert(to);
    recovered += ok && images.size() == 5 ? 1 : 0;
  }
  CHECK(recovered >= 19);
}
