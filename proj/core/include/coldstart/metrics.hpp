#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coldstart/dataset.hpp"

namespace coldstart {

// h x w grid of 0/1 cells, row-major.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::size_t height, std::size_t width)
      : height_(height), width_(width), cells_(height * width, 0) {}
  BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> cells);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  bool at(std::size_t r, std::size_t c) const { return cells_[r * width_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { cells_[r * width_ + c] = v ? 1 : 0; }
  std::size_t count() const;
  std::span<const std::uint8_t> cells() const { return cells_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint8_t> cells_;
};

enum class Metric { kAuprc, kF1, kDsc, kHd };

std::string_view to_string(Metric m);
std::string_view display_name(Metric m);  // "AUPRC", "F1", ...
Metric parse_metric(std::string_view text);
bool higher_is_better(Metric m);

struct ScoredLabel {
  double score = 0.0;
  int label = 0;
};

// Average precision. Tied scores form one block; every positive in the block
// gets the precision measured at the block end.
double average_precision(std::span<const ScoredLabel> items);
double auprc(const std::map<SampleId, double>& scores, const LabelMap& truth);

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};
double f1_from_counts(const Confusion& c);
double f1(const LabelMap& predictions, const LabelMap& truth);

// 2|A n B| / (|A| + |B|); 1 when both masks are empty.
double dsc(const BinaryMask& a, const BinaryMask& b);

// Symmetric Hausdorff distance between foreground pixel centres, in pixels.
// nullopt when either mask is empty.
std::optional<double> hausdorff(const BinaryMask& a, const BinaryMask& b);

// Exact squared Euclidean distance from every cell to the nearest foreground
// cell of `mask` (two-pass lower envelope). Empty mask yields +inf everywhere.
std::vector<double> squared_distance_transform(const BinaryMask& mask);

}  // namespace coldstart
