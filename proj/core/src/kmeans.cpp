#include "coldstart/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <fmt/format.h>

#include "coldstart/error.hpp"

namespace coldstart {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

namespace {

// Fixed chunking keeps floating-point reductions identical no matter how many
// threads process the chunks.
constexpr std::size_t kChunkRows = 256;

struct ChunkSums {
  Matrix sums;                      // k x d
  std::vector<std::size_t> counts;  // k
};

template <typename Fn>
void for_each_chunk(std::size_t n, std::size_t threads, Fn&& fn) {
  const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  if (threads <= 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c, c * kChunkRows, std::min(n, (c + 1) * kChunkRows));
    return;
  }
  const std::size_t workers = std::min(threads, chunks);
  std::vector<std::future<void>> jobs;
  jobs.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t c = w; c < chunks; c += workers) {
        fn(c, c * kChunkRows, std::min(n, (c + 1) * kChunkRows));
      }
    }));
  }
  for (auto& job : jobs) job.get();
}

class Lloyd {
 public:
  Lloyd(const Matrix& x, std::size_t k, const KMeansConfig& cfg)
      : x_(x), k_(k), cfg_(cfg), n_(x.rows()), d_(x.cols()) {
    double range = 0.0;
    for (std::size_t c = 0; c < d_; ++c) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t r = 0; r < n_; ++r) {
        lo = std::min(lo, x_(r, c));
        hi = std::max(hi, x_(r, c));
      }
      range = std::max(range, hi - lo);
    }
    shift_tol_ = cfg_.rel_tol * range;
  }

  struct Run {
    Matrix centroids;
    std::vector<std::size_t> assignments;
    std::vector<double> trace;
    std::size_t iterations = 0;
  };

  Run run(RngSeed seed) const {
    Run out;
    out.centroids = seed_plus_plus(seed);
    out.assignments.assign(n_, 0);
    std::vector<double> dist(n_);
    for (std::size_t iter = 0; iter < std::max<std::size_t>(cfg_.max_iters, 1); ++iter) {
      assign(out.centroids, out.assignments, dist);
      repair_empty(out.assignments, dist);
      Matrix next = update(out.assignments);
      out.trace.push_back(inertia(next, out.assignments));
      double max_shift = 0.0;
      for (std::size_t c = 0; c < k_; ++c) {
        max_shift = std::max(max_shift, std::sqrt(squared_distance(next.row(c), out.centroids.row(c))));
      }
      out.centroids = std::move(next);
      out.iterations = iter + 1;
      if (max_shift <= shift_tol_) break;
    }
    return out;
  }

 private:
  Matrix seed_plus_plus(RngSeed seed) const {
    Rng rng(seed);
    Matrix centroids(k_, d_);
    std::vector<bool> chosen(n_, false);
    std::vector<double> nearest(n_, std::numeric_limits<double>::infinity());

    std::size_t pick = rng.uniform_index(n_);
    for (std::size_t c = 0; c < k_; ++c) {
      if (c > 0) {
        double total = 0.0;
        for (std::size_t r = 0; r < n_; ++r) total += nearest[r];
        if (total > 0.0) {
          const double target = rng.uniform01() * total;
          double acc = 0.0;
          pick = n_;
          for (std::size_t r = 0; r < n_; ++r) {
            if (nearest[r] <= 0.0) continue;
            acc += nearest[r];
            if (target < acc) {
              pick = r;
              break;
            }
          }
          if (pick == n_) {
            // Rounding left target at the very top; take the last candidate.
            for (std::size_t r = n_; r-- > 0;) {
              if (nearest[r] > 0.0) {
                pick = r;
                break;
              }
            }
          }
        } else {
          // Every remaining point coincides with a centre: draw an unused row.
          std::vector<std::size_t> unused;
          for (std::size_t r = 0; r < n_; ++r) {
            if (!chosen[r]) unused.push_back(r);
          }
          pick = unused[rng.uniform_index(unused.size())];
        }
      }
      chosen[pick] = true;
      std::copy(x_.row(pick).begin(), x_.row(pick).end(), centroids.row(c).begin());
      for (std::size_t r = 0; r < n_; ++r) {
        nearest[r] = std::min(nearest[r], squared_distance(x_.row(r), centroids.row(c)));
      }
    }
    return centroids;
  }

  void assign(const Matrix& centroids, std::vector<std::size_t>& assignments,
              std::vector<double>& dist) const {
    for_each_chunk(n_, cfg_.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t r = begin; r < end; ++r) {
        std::size_t best = 0;
        double best_d = squared_distance(x_.row(r), centroids.row(0));
        for (std::size_t c = 1; c < k_; ++c) {
          const double dd = squared_distance(x_.row(r), centroids.row(c));
          if (dd < best_d) {
            best_d = dd;
            best = c;
          }
        }
        assignments[r] = best;
        dist[r] = best_d;
      }
    });
  }

  // Moves the point farthest from its centroid into each empty cluster,
  // taking donors only from clusters with more than one member.
  void repair_empty(std::vector<std::size_t>& assignments, std::vector<double>& dist) const {
    std::vector<std::size_t> counts(k_, 0);
    for (auto a : assignments) ++counts[a];
    for (std::size_t c = 0; c < k_; ++c) {
      if (counts[c] > 0) continue;
      std::size_t donor = n_;
      double worst = -1.0;
      for (std::size_t r = 0; r < n_; ++r) {
        if (counts[assignments[r]] > 1 && dist[r] > worst) {
          worst = dist[r];
          donor = r;
        }
      }
      --counts[assignments[donor]];
      assignments[donor] = c;
      dist[donor] = 0.0;
      ++counts[c];
    }
  }

  Matrix update(const std::vector<std::size_t>& assignments) const {
    const std::size_t chunks = (n_ + kChunkRows - 1) / kChunkRows;
    std::vector<ChunkSums> partial(chunks, ChunkSums{Matrix(k_, d_), std::vector<std::size_t>(k_, 0)});
    for_each_chunk(n_, cfg_.threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
      auto& part = partial[chunk];
      for (std::size_t r = begin; r < end; ++r) {
        const auto a = assignments[r];
        ++part.counts[a];
        auto row = part.sums.row(a);
        const auto src = x_.row(r);
        for (std::size_t j = 0; j < d_; ++j) row[j] += src[j];
      }
    });
    Matrix centroids(k_, d_);
    std::vector<std::size_t> counts(k_, 0);
    for (const auto& part : partial) {
      for (std::size_t c = 0; c < k_; ++c) {
        counts[c] += part.counts[c];
        for (std::size_t j = 0; j < d_; ++j) centroids(c, j) += part.sums(c, j);
      }
    }
    for (std::size_t c = 0; c < k_; ++c) {
      for (std::size_t j = 0; j < d_; ++j) centroids(c, j) /= static_cast<double>(counts[c]);
    }
    return centroids;
  }

  double inertia(const Matrix& centroids, const std::vector<std::size_t>& assignments) const {
    double total = 0.0;
    for (std::size_t r = 0; r < n_; ++r) total += squared_distance(x_.row(r), centroids.row(assignments[r]));
    return total;
  }

  const Matrix& x_;
  std::size_t k_;
  const KMeansConfig& cfg_;
  std::size_t n_;
  std::size_t d_;
  double shift_tol_ = 0.0;
};

void check_args(const EmbeddingDataset& ds, std::size_t k, const KMeansConfig& cfg) {
  if (k < 1) throw InvalidArgument("kmeans: k must be at least 1");
  if (k > ds.size()) {
    throw InvalidArgument(fmt::format("kmeans: k={} exceeds the {} available points", k, ds.size()));
  }
  if (cfg.max_iters < 1 || cfg.n_init < 1 || !(cfg.rel_tol >= 0.0)) {
    throw InvalidArgument("kmeans: invalid configuration");
  }
  require_valid(ds);
}

Lloyd::Run best_run(const EmbeddingDataset& ds, std::size_t k, const KMeansConfig& cfg,
                    RngSeed seed) {
  check_args(ds, k, cfg);
  const Lloyd lloyd(ds.vectors, k, cfg);
  Lloyd::Run best;
  for (std::size_t restart = 0; restart < cfg.n_init; ++restart) {
    auto run = lloyd.run(derive_seed(seed, restart));
    if (restart == 0 || run.trace.back() < best.trace.back()) best = std::move(run);
  }
  return best;
}

}  // namespace

ClusteringResult kmeans(const EmbeddingDataset& ds, std::size_t k, const KMeansConfig& cfg,
                        RngSeed seed) {
  auto run = best_run(ds, k, cfg, seed);
  ClusteringResult result;
  result.k = k;
  result.inertia = run.trace.back();
  result.iterations = run.iterations;
  result.centroids = std::move(run.centroids);
  result.assignments = std::move(run.assignments);
  result.medoid_ids = medoids(ds, result);
  return result;
}

std::vector<SampleId> medoids(const EmbeddingDataset& ds, const ClusteringResult& result) {
  if (result.assignments.size() != ds.size()) {
    throw InvalidArgument(fmt::format("medoids: {} assignments for {} points",
                                      result.assignments.size(), ds.size()));
  }
  if (result.centroids.rows() != result.k || result.centroids.cols() != ds.dim()) {
    throw InvalidArgument("medoids: centroid matrix does not match k x d");
  }
  std::vector<std::size_t> best(result.k, ds.size());
  std::vector<double> best_d(result.k, std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto c = result.assignments[r];
    if (c >= result.k) throw InvalidArgument(fmt::format("medoids: cluster index {} out of range", c));
    const double dd = squared_distance(ds.vectors.row(r), result.centroids.row(c));
    if (dd < best_d[c]) {
      best_d[c] = dd;
      best[c] = r;
    }
  }
  std::vector<SampleId> out;
  out.reserve(result.k);
  for (std::size_t c = 0; c < result.k; ++c) {
    if (best[c] == ds.size()) throw InvalidArgument(fmt::format("medoids: cluster {} is empty", c));
    out.push_back(ds.ids[best[c]]);
  }
  return out;
}

std::vector<double> inertia_trace(const EmbeddingDataset& ds, std::size_t k,
                                  const KMeansConfig& cfg, RngSeed seed) {
  return best_run(ds, k, cfg, seed).trace;
}

}  // namespace coldstart
