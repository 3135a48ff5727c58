#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "coldstart/dataset.hpp"
#include "coldstart/kmeans.hpp"
#include "coldstart/select.hpp"

namespace coldstart {

enum class Task { kClassification, kSegmentation };

std::string_view to_string(Task t);
Task parse_task(std::string_view text);

// One experiment, loaded from a JSON document. Relative paths resolve
// against the directory holding the config file. Unknown keys are rejected.
struct ExperimentConfig {
  std::filesystem::path embeddings;
  std::filesystem::path labels;
  std::optional<std::filesystem::path> images_dir;  // segmentation: <id>.pgm intensities
  std::optional<std::filesystem::path> masks_dir;   // segmentation: <id>.pgm masks
  Task task = Task::kClassification;
  SelectionMethod method = SelectionMethod::kClustering;
  Provenance provenance = Provenance::kCustom;
  BudgetSchedule budgets = default_budgets();
  std::size_t per_iter_budget = 20;
  std::size_t iterations = 0;
  RngSeed seed = kDefaultSeed;
  double threshold = kDefaultThreshold;
  SplitRatios split_ratios = kDefaultSplitRatios;
  std::size_t n_boot = 100;
  KMeansConfig kmeans;
  std::filesystem::path output_dir = "out";

  // Checks value ranges and that every referenced input path exists.
  void validate() const;
};

// `base_dir` anchors relative paths.
ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON form with absolute-free paths as given; echoed next to outputs.
std::string config_to_json(const ExperimentConfig& config, const std::filesystem::path& base_dir = {});

}  // namespace coldstart
