#include "coldstart/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "coldstart/error.hpp"

namespace coldstart {

SampleId::SampleId(std::string value) : value_(std::move(value)) {
  if (!is_valid(value_)) {
    throw InvalidArgument(fmt::format("invalid sample id '{}'", value_));
  }
}

bool SampleId::is_valid(std::string_view token) {
  if (token.empty()) return false;
  return std::none_of(token.begin(), token.end(), [](char c) {
    return c == ',' || std::isspace(static_cast<unsigned char>(c));
  });
}

std::vector<SampleId> make_ids(std::initializer_list<std::string_view> tokens) {
  std::vector<SampleId> out;
  out.reserve(tokens.size());
  for (auto t : tokens) out.emplace_back(std::string(t));
  return out;
}

namespace {
struct ProvenanceName {
  Provenance value;
  std::string_view name;
};
constexpr std::array<ProvenanceName, 6> kProvenanceNames{{
    {Provenance::kRawPixels, "raw-pixels"},
    {Provenance::kImageNet, "imagenet"},
    {Provenance::kTxrv, "txrv"},
    {Provenance::kCxrf, "cxrf"},
    {Provenance::kRemedis, "remedis"},
    {Provenance::kCustom, "custom"},
}};
}  // namespace

std::string_view to_string(Provenance p) {
  for (const auto& entry : kProvenanceNames) {
    if (entry.value == p) return entry.name;
  }
  return "custom";
}

Provenance parse_provenance(std::string_view text) {
  for (const auto& entry : kProvenanceNames) {
    if (entry.name == text) return entry.value;
  }
  throw InvalidArgument(fmt::format("unknown provenance '{}'", text));
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw InvalidArgument(
        fmt::format("matrix data has {} values, expected {}x{}", data_.size(), rows, cols));
  }
}

std::vector<std::string> validate_dataset(const EmbeddingDataset& ds) {
  std::vector<std::string> violations;
  if (ds.vectors.rows() != ds.ids.size()) {
    violations.push_back(fmt::format("row count {} does not match id count {}",
                                     ds.vectors.rows(), ds.ids.size()));
  }
  if (ds.vectors.cols() == 0) {
    violations.push_back("embedding dimension must be at least 1");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < ds.ids.size(); ++i) {
    const auto& id = ds.ids[i];
    if (!SampleId::is_valid(id.str())) {
      violations.push_back(fmt::format("invalid id at row {}", i));
    } else if (!seen.insert(id.str()).second) {
      violations.push_back(fmt::format("duplicate id: {}", id.str()));
    }
  }
  const std::size_t rows = std::min(ds.vectors.rows(), ds.ids.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < ds.vectors.cols(); ++c) {
      if (!std::isfinite(ds.vectors(r, c))) {
        violations.push_back(fmt::format("non-finite value at ({},{}) for id {}", r, c,
                                         ds.ids[r].str()));
      }
    }
  }
  if (ds.labels) {
    for (const auto& [id, label] : *ds.labels) {
      if (!seen.contains(id.str())) {
        violations.push_back(fmt::format("label for unknown id: {}", id.str()));
      }
      if (label != 0 && label != 1) {
        violations.push_back(fmt::format("label for {} is {}, expected 0 or 1", id.str(), label));
      }
    }
  }
  return violations;
}

void require_valid(const EmbeddingDataset& ds) {
  const auto violations = validate_dataset(ds);
  if (violations.empty()) return;
  std::string message = "invalid dataset:";
  const std::size_t shown = std::min<std::size_t>(violations.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) message += " " + violations[i] + ";";
  if (violations.size() > shown) {
    message += fmt::format(" ... ({} more)", violations.size() - shown);
  }
  throw InvalidArgument(message);
}

IdIndex::IdIndex(std::span<const SampleId> ids) {
  rows_.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) rows_.emplace(ids[i].str(), i);
}

std::optional<std::size_t> IdIndex::find(const SampleId& id) const {
  const auto it = rows_.find(id.str());
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

std::size_t IdIndex::at(const SampleId& id) const {
  const auto row = find(id);
  if (!row) throw InvalidArgument(fmt::format("unknown sample id: {}", id.str()));
  return *row;
}

EmbeddingDataset subset(const EmbeddingDataset& ds, std::span<const SampleId> ids) {
  const IdIndex index(ds.ids);
  EmbeddingDataset out;
  out.provenance = ds.provenance;
  out.ids.assign(ids.begin(), ids.end());
  out.vectors = Matrix(ids.size(), ds.dim());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto src = ds.vectors.row(index.at(ids[i]));
    std::copy(src.begin(), src.end(), out.vectors.row(i).begin());
  }
  if (ds.labels) {
    LabelMap labels;
    for (const auto& id : ids) {
      if (auto it = ds.labels->find(id); it != ds.labels->end()) labels.emplace(id, it->second);
    }
    out.labels = std::move(labels);
  }
  return out;
}

DataSplit make_split(std::span<const SampleId> ids, SplitRatios ratios, RngSeed seed) {
  if (ids.empty()) throw InvalidArgument("make_split: empty id list");
  if (ids.size() < 3) throw InvalidArgument("make_split: need at least 3 ids");
  for (double r : ratios) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw InvalidArgument("make_split: ratios must be finite and nonnegative");
    }
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    throw InvalidArgument(fmt::format("make_split: ratios sum to {}, expected 1",
                                      ratios[0] + ratios[1] + ratios[2]));
  }
  const std::size_t n = ids.size();
  // The small epsilon keeps products like 800 * 0.1 from flooring to 79.
  const auto part = [n](double r) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 1e-9));
  };
  const std::size_t n_val = part(ratios[1]);
  const std::size_t n_test = part(ratios[2]);
  const std::size_t n_train = n - n_val - n_test;

  std::vector<SampleId> order(ids.begin(), ids.end());
  Rng rng(seed);
  rng.shuffle(std::span(order));

  DataSplit split;
  auto it = order.begin();
  split.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
  it += static_cast<std::ptrdiff_t>(n_train);
  split.validation.assign(it, it + static_cast<std::ptrdiff_t>(n_val));
  it += static_cast<std::ptrdiff_t>(n_val);
  split.test.assign(it, order.end());
  return split;
}

DataSplit filter_positive(const EmbeddingDataset& ds, const DataSplit& split) {
  if (!ds.labels) throw InvalidArgument("filter_positive: dataset has no labels");
  const auto keep = [&](const std::vector<SampleId>& part) {
    std::vector<SampleId> out;
    for (const auto& id : part) {
      const auto it = ds.labels->find(id);
      if (it != ds.labels->end() && it->second == 1) out.push_back(id);
    }
    return out;
  };
  return DataSplit{keep(split.train), keep(split.validation), keep(split.test)};
}

BudgetSchedule::BudgetSchedule(std::vector<std::size_t> budgets) : budgets_(std::move(budgets)) {
  if (budgets_.empty()) throw InvalidArgument("budget schedule is empty");
  for (std::size_t i = 0; i < budgets_.size(); ++i) {
    if (budgets_[i] == 0) throw InvalidArgument("budgets must be positive");
    if (i > 0 && budgets_[i] <= budgets_[i - 1]) {
      throw InvalidArgument("budgets must be strictly increasing");
    }
  }
}

void BudgetSchedule::check_pool(std::size_t pool_size) const {
  if (max_budget() > pool_size) {
    throw InvalidArgument(fmt::format("budget {} exceeds the selectable pool of {} samples",
                                      max_budget(), pool_size));
  }
}

}  // namespace coldstart
