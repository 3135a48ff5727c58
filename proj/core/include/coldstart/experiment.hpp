#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "coldstart/al_loop.hpp"
#include "coldstart/config.hpp"
#include "coldstart/report.hpp"

namespace coldstart {

// Raised when one pipeline stage fails; the stage name leads the message.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error(fmt::format("stage '{}' failed: {}", stage, message)), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ExperimentOutcome {
  DataSplit split;
  SelectionPlan plan;
  std::vector<TableRow> initialization;
  std::vector<TableRow> subsequent;
  ALState final_state;
};

inline constexpr std::string_view kIncompleteMarker = "INCOMPLETE";

// Loaded inputs for one experiment, shared by the CLI verbs.
struct ExperimentInputs {
  EmbeddingDataset embeddings;
  LabelMap labels;
  std::map<SampleId, GrayImage> images;
  std::map<SampleId, BinaryMask> masks;
};

ExperimentInputs load_inputs(const ExperimentConfig& config);

// split -> positive filtering (segmentation) -> selection pool.
DataSplit experiment_split(const ExperimentConfig& config, const ExperimentInputs& inputs);

SelectionPlan experiment_plan(const ExperimentConfig& config, const ExperimentInputs& inputs,
                              const DataSplit& split);

// Runs the whole protocol and writes every artifact under config.output_dir:
//   config.json, split.csv, plan.csv,
//   initialization_table.txt, initialization_records.jsonl,
//   subsequent_table.txt, subsequent_records.jsonl, al_history.jsonl (when iterations > 0).
// While running, output_dir holds an INCOMPLETE marker; it is removed on
// success and left, with the error, on failure.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const std::function<void(std::string_view)>& log = {});

}  // namespace coldstart
