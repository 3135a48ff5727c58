#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coldstart/rng.hpp"

namespace coldstart {

// Opaque sample identifier: non-empty, no commas, no whitespace.
class SampleId {
 public:
  SampleId() = default;
  explicit SampleId(std::string value);

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  static bool is_valid(std::string_view token);

  friend auto operator<=>(const SampleId&, const SampleId&) = default;
  friend bool operator==(const SampleId&, const SampleId&) = default;

 private:
  std::string value_;
};

std::vector<SampleId> make_ids(std::initializer_list<std::string_view> tokens);

// Where the embedding vectors came from. raw-pixels is "naive clustering".
enum class Provenance { kRawPixels, kImageNet, kTxrv, kCxrf, kRemedis, kCustom };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using LabelMap = std::map<SampleId, int>;

struct EmbeddingDataset {
  std::vector<SampleId> ids;
  Matrix vectors;
  std::optional<LabelMap> labels;
  Provenance provenance = Provenance::kCustom;

  std::size_t size() const { return ids.size(); }
  std::size_t dim() const { return vectors.cols(); }
};

// Every violated EmbeddingDataset invariant, one message per offense.
// Empty means the dataset is well formed.
std::vector<std::string> validate_dataset(const EmbeddingDataset& ds);

// Throws InvalidArgument listing the first few violations.
void require_valid(const EmbeddingDataset& ds);

// Maps ids to row positions. Built once per dataset where lookups are hot.
class IdIndex {
 public:
  explicit IdIndex(std::span<const SampleId> ids);
  std::optional<std::size_t> find(const SampleId& id) const;
  std::size_t at(const SampleId& id) const;  // throws InvalidArgument

 private:
  std::unordered_map<std::string, std::size_t> rows_;
};

// Rows of ds restricted to `ids`, in the order given. Labels are carried over.
EmbeddingDataset subset(const EmbeddingDataset& ds, std::span<const SampleId> ids);

struct DataSplit {
  std::vector<SampleId> train;
  std::vector<SampleId> validation;
  std::vector<SampleId> test;

  friend bool operator==(const DataSplit&, const DataSplit&) = default;
};

using SplitRatios = std::array<double, 3>;
inline constexpr SplitRatios kDefaultSplitRatios{0.7, 0.1, 0.2};

// Seeded shuffle followed by contiguous slicing into train/validation/test.
// validation and test get floor(n * ratio) samples; train takes the rest.
DataSplit make_split(std::span<const SampleId> ids, SplitRatios ratios, RngSeed seed);

// Keeps only ids labelled 1 in each part of the split, preserving order.
DataSplit filter_positive(const EmbeddingDataset& ds, const DataSplit& split);

class BudgetSchedule {
 public:
  BudgetSchedule() = default;
  // Requires a non-empty, strictly increasing list of positive budgets.
  explicit BudgetSchedule(std::vector<std::size_t> budgets);

  const std::vector<std::size_t>& budgets() const { return budgets_; }
  std::size_t max_budget() const { return budgets_.empty() ? 0 : budgets_.back(); }

  // Throws InvalidArgument when the largest budget exceeds the pool.
  void check_pool(std::size_t pool_size) const;

 private:
  std::vector<std::size_t> budgets_;
};

inline const BudgetSchedule& default_budgets() {
  static const BudgetSchedule schedule({20, 40, 60, 80, 100});
  return schedule;
}

}  // namespace coldstart
