#include "coldstart/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "coldstart/error.hpp"

namespace coldstart {

BinaryMask::BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> cells)
    : height_(height), width_(width), cells_(std::move(cells)) {
  if (cells_.size() != height_ * width_) {
    throw InvalidArgument(fmt::format("mask has {} cells, expected {}x{}", cells_.size(), height_, width_));
  }
  for (auto& c : cells_) c = c ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kAuprc: return "auprc";
    case Metric::kF1: return "f1";
    case Metric::kDsc: return "dsc";
    case Metric::kHd: return "hd";
  }
  return "auprc";
}

std::string_view display_name(Metric m) {
  switch (m) {
    case Metric::kAuprc: return "AUPRC";
    case Metric::kF1: return "F1";
    case Metric::kDsc: return "DSC";
    case Metric::kHd: return "HD";
  }
  return "AUPRC";
}

Metric parse_metric(std::string_view text) {
  for (auto m : {Metric::kAuprc, Metric::kF1, Metric::kDsc, Metric::kHd}) {
    if (to_string(m) == text) return m;
  }
  throw InvalidArgument(fmt::format("unknown metric '{}'", text));
}

bool higher_is_better(Metric m) { return m != Metric::kHd; }

double average_precision(std::span<const ScoredLabel> items) {
  std::size_t positives = 0;
  for (const auto& it : items) {
    if (it.label != 0 && it.label != 1) throw InvalidArgument("auprc: labels must be 0 or 1");
    if (!std::isfinite(it.score)) throw InvalidArgument("auprc: non-finite score");
    positives += static_cast<std::size_t>(it.label);
  }
  if (positives == 0) throw InvalidArgument("auprc: no positive samples");
  if (positives == items.size()) throw InvalidArgument("auprc: no negative samples");

  std::vector<ScoredLabel> sorted(items.begin(), items.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });
  double sum = 0.0;
  std::size_t seen = 0;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    std::size_t block_pos = 0;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      block_pos += static_cast<std::size_t>(sorted[j].label);
      ++j;
    }
    seen += j - i;
    tp += block_pos;
    sum += static_cast<double>(block_pos) * static_cast<double>(tp) / static_cast<double>(seen);
    i = j;
  }
  return sum / static_cast<double>(positives);
}

double auprc(const std::map<SampleId, double>& scores, const LabelMap& truth) {
  if (scores.size() != truth.size()) throw InvalidArgument("auprc: score and truth keys differ");
  std::vector<ScoredLabel> items;
  items.reserve(scores.size());
  for (const auto& [id, score] : scores) {
    const auto it = truth.find(id);
    if (it == truth.end()) throw InvalidArgument(fmt::format("auprc: no truth label for {}", id.str()));
    items.push_back({score, it->second});
  }
  return average_precision(items);
}

double f1_from_counts(const Confusion& c) {
  if (c.tp == 0) return 0.0;
  const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return 2.0 * p * r / (p + r);
}

double f1(const LabelMap& predictions, const LabelMap& truth) {
  if (predictions.size() != truth.size()) throw InvalidArgument("f1: prediction and truth keys differ");
  Confusion c;
  for (const auto& [id, pred] : predictions) {
    const auto it = truth.find(id);
    if (it == truth.end()) throw InvalidArgument(fmt::format("f1: no truth label for {}", id.str()));
    const bool p = pred != 0;
    const bool t = it->second != 0;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return f1_from_counts(c);
}

namespace {
void check_same_shape(const BinaryMask& a, const BinaryMask& b, std::string_view op) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw InvalidArgument(fmt::format("{}: mask dimensions {}x{} and {}x{} differ", op, a.height(),
                                      a.width(), b.height(), b.width()));
  }
}

// 1-D squared distance transform of f (Felzenszwalb & Huttenlocher).
void dt1d(std::span<const double> f, std::span<double> out, std::vector<std::size_t>& v,
          std::vector<double>& z) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t n = f.size();
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  std::size_t k = 0;
  std::size_t first = n;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] < kInf) {
      first = q;
      break;
    }
  }
  if (first == n) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  v[0] = first;
  z[0] = -kInf;
  z[1] = kInf;
  for (std::size_t q = first + 1; q < n; ++q) {
    if (!(f[q] < kInf)) continue;
    const auto qd = static_cast<double>(q);
    double s;
    while (true) {
      const auto vk = static_cast<double>(v[k]);
      s = ((f[q] + qd * qd) - (f[v[k]] + vk * vk)) / (2.0 * qd - 2.0 * vk);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const double diff = static_cast<double>(q) - static_cast<double>(v[k]);
    out[q] = diff * diff + f[v[k]];
  }
}
}  // namespace

double dsc(const BinaryMask& a, const BinaryMask& b) {
  check_same_shape(a, b, "dsc");
  const auto ca = a.cells();
  const auto cb = b.cells();
  std::size_t inter = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) inter += static_cast<std::size_t>(ca[i] & cb[i]);
  const std::size_t total = a.count() + b.count();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

std::vector<double> squared_distance_transform(const BinaryMask& mask) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  std::vector<double> grid(h * w, kInf);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (mask.at(r, c)) grid[r * w + c] = 0.0;
    }
  }
  std::vector<std::size_t> v;
  std::vector<double> z;
  std::vector<double> column(h), column_out(h);
  for (std::size_t c = 0; c < w; ++c) {
    for (std::size_t r = 0; r < h; ++r) column[r] = grid[r * w + c];
    dt1d(column, column_out, v, z);
    for (std::size_t r = 0; r < h; ++r) grid[r * w + c] = column_out[r];
  }
  std::vector<double> row_out(w);
  for (std::size_t r = 0; r < h; ++r) {
    std::span<double> row(grid.data() + r * w, w);
    dt1d(row, row_out, v, z);
    std::copy(row_out.begin(), row_out.end(), row.begin());
  }
  return grid;
}

std::optional<double> hausdorff(const BinaryMask& a, const BinaryMask& b) {
  check_same_shape(a, b, "hausdorff");
  if (a.count() == 0 || b.count() == 0) return std::nullopt;
  const auto directed = [](const BinaryMask& from, const std::vector<double>& to_dt) {
    double worst = 0.0;
    const auto cells = from.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i]) worst = std::max(worst, to_dt[i]);
    }
    return worst;
  };
  const double sq = std::max(directed(a, squared_distance_transform(b)),
                             directed(b, squared_distance_transform(a)));
  return std::sqrt(sq);
}

}  // namespace coldstart
