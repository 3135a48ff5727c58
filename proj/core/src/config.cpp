#include "coldstart/config.hpp"

#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "coldstart/error.hpp"
#include "coldstart/io.hpp"

namespace coldstart {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Task t) { return t == Task::kClassification ? "classification" : "segmentation"; }

Task parse_task(std::string_view text) {
  if (text == "classification") return Task::kClassification;
  if (text == "segmentation") return Task::kSegmentation;
  throw InvalidArgument(fmt::format("unknown task '{}'", text));
}

namespace {

const std::set<std::string> kTopLevelKeys{
    "embeddings", "labels", "images_dir", "masks_dir", "task", "method", "provenance", "budgets",
    "per_iter_budget", "iterations", "seed", "threshold", "split_ratios", "n_boot", "kmeans", "output_dir"};
const std::set<std::string> kKMeansKeys{"max_iters", "rel_tol", "n_init", "threads"};

void reject_unknown(const json& j, const std::set<std::string>& allowed, std::string_view where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw InvalidArgument(fmt::format("config: unknown key '{}{}'", where, key));
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : (base / path).lexically_normal();
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (base.empty()) return p.generic_string();
  return p.lexically_relative(base).generic_string();
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto require_file = [](const fs::path& p, std::string_view what) {
    if (p.empty()) throw InvalidArgument(fmt::format("config: '{}' is required", what));
    if (!fs::exists(p)) throw InvalidArgument(fmt::format("config: {} '{}' does not exist", what, p.string()));
  };
  require_file(embeddings, "embeddings");
  require_file(labels, "labels");
  if (task == Task::kSegmentation) {
    if (!images_dir || !masks_dir) throw InvalidArgument("config: segmentation needs images_dir and masks_dir");
    require_file(*images_dir, "images_dir");
    require_file(*masks_dir, "masks_dir");
  }
  if (budgets.budgets().empty()) throw InvalidArgument("config: budgets must not be empty");
  if (iterations > 0 && per_iter_budget == 0) throw InvalidArgument("config: per_iter_budget must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("config: threshold must lie in (0, 1)");
  if (n_boot < 2) throw InvalidArgument("config: n_boot must be at least 2");
  if (kmeans.max_iters == 0 || kmeans.n_init == 0 || !(kmeans.rel_tol >= 0.0)) {
    throw InvalidArgument("config: invalid kmeans settings");
  }
}

ExperimentConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("config: {}", e.what()));
  }
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  reject_unknown(j, kTopLevelKeys, "");

  ExperimentConfig cfg;
  try {
    cfg.embeddings = resolve(base_dir, j.at("embeddings").get<std::string>());
    cfg.labels = resolve(base_dir, j.at("labels").get<std::string>());
    if (j.contains("images_dir")) cfg.images_dir = resolve(base_dir, j["images_dir"].get<std::string>());
    if (j.contains("masks_dir")) cfg.masks_dir = resolve(base_dir, j["masks_dir"].get<std::string>());
    if (j.contains("task")) cfg.task = parse_task(j["task"].get<std::string>());
    if (j.contains("method")) cfg.method = parse_selection_method(j["method"].get<std::string>());
    if (j.contains("provenance")) cfg.provenance = parse_provenance(j["provenance"].get<std::string>());
    if (j.contains("budgets")) cfg.budgets = BudgetSchedule(j["budgets"].get<std::vector<std::size_t>>());
    if (j.contains("per_iter_budget")) cfg.per_iter_budget = j["per_iter_budget"].get<std::size_t>();
    if (j.contains("iterations")) cfg.iterations = j["iterations"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = RngSeed{j["seed"].get<std::uint64_t>()};
    if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();
    if (j.contains("split_ratios")) {
      const auto r = j["split_ratios"].get<std::vector<double>>();
      if (r.size() != 3) throw InvalidArgument("config: split_ratios needs three values");
      cfg.split_ratios = {r[0], r[1], r[2]};
    }
    if (j.contains("n_boot")) cfg.n_boot = j["n_boot"].get<std::size_t>();
    if (j.contains("kmeans")) {
      const auto& k = j["kmeans"];
      if (!k.is_object()) throw InvalidArgument("config: kmeans must be an object");
      reject_unknown(k, kKMeansKeys, "kmeans.");
      if (k.contains("max_iters")) cfg.kmeans.max_iters = k["max_iters"].get<std::size_t>();
      if (k.contains("rel_tol")) cfg.kmeans.rel_tol = k["rel_tol"].get<double>();
      if (k.contains("n_init")) cfg.kmeans.n_init = k["n_init"].get<std::size_t>();
      if (k.contains("threads")) cfg.kmeans.threads = k["threads"].get<std::size_t>();
    }
    if (j.contains("output_dir")) cfg.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    else cfg.output_dir = resolve(base_dir, "out");
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("config: {}", e.what()));
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(fmt::format("config file '{}' does not exist", path.string()));
  return parse_config(io::read_file(path), path.parent_path());
}

std::string config_to_json(const ExperimentConfig& cfg, const fs::path& base_dir) {
  nlohmann::ordered_json j;
  j["embeddings"] = relative_to(cfg.embeddings, base_dir);
  j["labels"] = relative_to(cfg.labels, base_dir);
  if (cfg.images_dir) j["images_dir"] = relative_to(*cfg.images_dir, base_dir);
  if (cfg.masks_dir) j["masks_dir"] = relative_to(*cfg.masks_dir, base_dir);
  j["task"] = to_string(cfg.task);
  j["method"] = to_string(cfg.method);
  j["provenance"] = to_string(cfg.provenance);
  j["budgets"] = cfg.budgets.budgets();
  j["per_iter_budget"] = cfg.per_iter_budget;
  j["iterations"] = cfg.iterations;
  j["seed"] = cfg.seed.value;
  j["threshold"] = cfg.threshold;
  j["split_ratios"] = {cfg.split_ratios[0], cfg.split_ratios[1], cfg.split_ratios[2]};
  j["n_boot"] = cfg.n_boot;
  j["kmeans"] = {{"max_iters", cfg.kmeans.max_iters},
                 {"rel_tol", cfg.kmeans.rel_tol},
                 {"n_init", cfg.kmeans.n_init},
                 {"threads", cfg.kmeans.threads}};
  j["output_dir"] = relative_to(cfg.output_dir, base_dir);
  return j.dump(2) + "\n";
}

}  // namespace coldstart
