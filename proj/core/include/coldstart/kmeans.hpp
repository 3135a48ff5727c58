#pragma once

#include <cstddef>
#include <vector>

#include "coldstart/dataset.hpp"
#include "coldstart/rng.hpp"

namespace coldstart {

struct KMeansConfig {
  std::size_t max_iters = 300;
  // Stop once every centroid moves by at most rel_tol times the largest
  // per-coordinate range of the data.
  double rel_tol = 1e-6;
  // Independent k-means++ restarts; the lowest-inertia one wins.
  std::size_t n_init = 10;
  // Worker threads for the assignment/accumulation pass. Output does not
  // depend on this value.
  std::size_t threads = 1;
};

struct ClusteringResult {
  std::size_t k = 0;
  Matrix centroids;                     // k x d
  std::vector<std::size_t> assignments;  // one cluster index per row
  double inertia = 0.0;
  std::vector<SampleId> medoid_ids;     // one per cluster, by cluster index
  std::size_t iterations = 0;
};

// Seeded Lloyd k-means with k-means++ initialisation over the rows of ds.
// Empty clusters are repaired, so every index in [0, k) is used.
ClusteringResult kmeans(const EmbeddingDataset& ds, std::size_t k, const KMeansConfig& cfg,
                        RngSeed seed);

// Per cluster, the assigned row closest to the centroid (ties: lower row).
std::vector<SampleId> medoids(const EmbeddingDataset& ds, const ClusteringResult& result);

// Inertia after every Lloyd update of the restart kmeans() would return.
std::vector<double> inertia_trace(const EmbeddingDataset& ds, std::size_t k,
                                  const KMeansConfig& cfg, RngSeed seed);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace coldstart
