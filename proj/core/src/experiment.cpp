#include "coldstart/experiment.hpp"

#include <json.hpp>

#include "coldstart/evaluate.hpp"
#include "coldstart/io.hpp"

namespace coldstart {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
auto stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(std::string(name), e.what());
  }
}

std::unique_ptr<Model> make_model(const ExperimentConfig& config, const ExperimentInputs& inputs) {
  if (config.task == Task::kClassification) {
    return std::make_unique<EmbeddingClassifierModel>(inputs.embeddings, config.seed);
  }
  return std::make_unique<PixelSegmenterModel>(inputs.images, config.seed);
}

LabelOracle make_oracle(const ExperimentConfig& config, const ExperimentInputs& inputs) {
  if (config.task == Task::kClassification) return LabelOracle::from_labels(inputs.labels);
  return LabelOracle::from_masks(inputs.masks);
}

std::vector<MetricReport> evaluate_model(const ExperimentConfig& config, const ExperimentInputs& inputs,
                                         const Model& model, std::span<const SampleId> test) {
  const auto predictions = model.predict_proba(test);
  if (config.task == Task::kClassification) {
    std::vector<ScoredLabel> scored;
    scored.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      scored.push_back({std::get<double>(predictions[i]), inputs.labels.at(test[i])});
    }
    return evaluate_classification(scored, config.threshold, config.n_boot, config.seed);
  }
  std::vector<MaskPair> pairs;
  pairs.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    pairs.push_back({binarize(std::get<ProbabilityMap>(predictions[i]), config.threshold), inputs.masks.at(test[i])});
  }
  return evaluate_segmentation(pairs, config.n_boot, config.seed);
}

std::vector<MetricReport> fit_and_evaluate(const ExperimentConfig& config, const ExperimentInputs& inputs,
                                           LabelOracle& oracle, std::span<const SampleId> labeled,
                                           std::span<const SampleId> test) {
  auto model = make_model(config, inputs);
  std::vector<LabeledExample> examples;
  examples.reserve(labeled.size());
  for (const auto& id : labeled) examples.push_back({id, oracle.reveal(id)});
  model->fit(examples);
  return evaluate_model(config, inputs, *model, test);
}

std::string history_records(const ALState& state) {
  std::string out;
  for (const auto& rec : state.history) {
    nlohmann::ordered_json j;
    j["iteration"] = rec.iteration;
    j["labeled_after"] = rec.labeled_after;
    auto& acquired = j["acquired"] = nlohmann::ordered_json::array();
    for (const auto& id : rec.acquired) acquired.push_back(id.str());
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace

ExperimentInputs load_inputs(const ExperimentConfig& config) {
  ExperimentInputs inputs;
  inputs.embeddings = io::load_embeddings(config.embeddings, config.provenance);
  inputs.labels = io::load_labels(config.labels);
  for (const auto& id : inputs.embeddings.ids) {
    if (!inputs.labels.contains(id)) throw InvalidArgument(fmt::format("no label for sample {}", id.str()));
  }
  inputs.embeddings.labels = inputs.labels;
  require_valid(inputs.embeddings);
  if (config.task == Task::kSegmentation) {
    for (const auto& id : inputs.embeddings.ids) {
      if (inputs.labels.at(id) != 1) continue;
      inputs.images.emplace(id, io::load_image(*config.images_dir / (id.str() + ".pgm")));
      inputs.masks.emplace(id, io::load_mask(*config.masks_dir / (id.str() + ".pgm")));
    }
  }
  return inputs;
}

DataSplit experiment_split(const ExperimentConfig& config, const ExperimentInputs& inputs) {
  auto split = make_split(inputs.embeddings.ids, config.split_ratios, config.seed);
  if (config.task == Task::kSegmentation) split = filter_positive(inputs.embeddings, split);
  return split;
}

SelectionPlan experiment_plan(const ExperimentConfig& config, const ExperimentInputs& inputs,
                              const DataSplit& split) {
  const std::size_t max_budget = config.budgets.max_budget();
  if (config.method == SelectionMethod::kRandom) return random_plan(split.train, max_budget, config.seed);
  return clustering_plan(inputs.embeddings, split.train, max_budget, config.kmeans, config.seed);
}

ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const std::function<void(std::string_view)>& log) {
  const auto note = [&](const std::string& message) {
    if (log) log(message);
  };

  // Everything that can be checked up front is checked before touching disk.
  ExperimentOutcome outcome;
  const ExperimentInputs inputs = stage("load", [&] {
    config.validate();
    return load_inputs(config);
  });
  outcome.split = stage("split", [&] { return experiment_split(config, inputs); });
  stage("validate", [&] {
    const std::size_t pool = outcome.split.train.size();
    config.budgets.check_pool(pool);
    if (config.iterations > 0 &&
        config.budgets.budgets().front() + config.iterations * config.per_iter_budget > pool) {
      throw InvalidArgument(fmt::format("{} iterations of {} after an initial {} exceed the pool of {}",
                                        config.iterations, config.per_iter_budget,
                                        config.budgets.budgets().front(), pool));
    }
    if (outcome.split.test.size() < 2) throw InvalidArgument("test split needs at least 2 samples");
  });

  const fs::path& out = config.output_dir;
  fs::create_directories(out);
  const fs::path marker = out / kIncompleteMarker;
  io::write_file(marker, "running\n");
  try {
    io::write_file(out / "config.json", config_to_json(config, out));
    io::write_file(out / "split.csv", io::format_split(outcome.split));

    note(fmt::format("selecting {} samples ({})", config.budgets.max_budget(), to_string(config.method)));
    outcome.plan = stage("select", [&] { return experiment_plan(config, inputs, outcome.split); });
    io::save_plan(outcome.plan, out / "plan.csv");

    const std::string label = method_label(config.method, config.provenance);
    LabelOracle oracle = make_oracle(config, inputs);
    stage("initialization", [&] {
      for (const auto budget : config.budgets.budgets()) {
        note(fmt::format("initialization budget {}", budget));
        outcome.initialization.push_back(
            {budget, label, fit_and_evaluate(config, inputs, oracle, outcome.plan.prefix(budget), outcome.split.test)});
      }
    });
    io::write_file(out / "initialization_table.txt", emit_table(outcome.initialization));
    io::write_file(out / "initialization_records.jsonl", emit_records(outcome.initialization));

    if (config.iterations > 0) {
      stage("subsequent", [&] {
        auto model = make_model(config, inputs);
        ALState state = init_from_plan(outcome.plan, config.budgets.budgets().front(), outcome.split.train, oracle);
        for (std::size_t it = 1; it <= config.iterations; ++it) {
          note(fmt::format("subsequent iteration {}", it));
          state = run_iterations(std::move(state), *model, oracle, config.per_iter_budget, 1, config.threshold);
          outcome.subsequent.push_back({it * config.per_iter_budget, label,
                                        fit_and_evaluate(config, inputs, oracle, state.labeled, outcome.split.test)});
        }
        outcome.final_state = std::move(state);
      });
      io::write_file(out / "subsequent_table.txt", emit_table(outcome.subsequent));
      io::write_file(out / "subsequent_records.jsonl", emit_records(outcome.subsequent));
      io::write_file(out / "al_history.jsonl", history_records(outcome.final_state));
    }
  } catch (const std::exception& e) {
    io::write_file(marker, fmt::format("failed: {}\n", e.what()));
    throw;
  }
  fs::remove(marker);
  return outcome;
}

}  // namespace coldstart
