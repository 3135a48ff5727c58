#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "coldstart/config.hpp"
#include "coldstart/error.hpp"
#include "coldstart/evaluate.hpp"
#include "coldstart/experiment.hpp"
#include "coldstart/io.hpp"
#include "coldstart/remote.hpp"
#include "coldstart/report.hpp"
#include "coldstart/synthetic.hpp"

namespace fs = std::filesystem;
using namespace coldstart;

namespace {

void log_line(std::string_view message) { std::cerr << "coldstart: " << message << '\n'; }

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "experiment config (JSON)");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "override the config seed");
}

ExperimentConfig load(const Common& c) {
  auto cfg = load_config(c.config);
  if (c.seed) cfg.seed = RngSeed{*c.seed};
  return cfg;
}

// Either write to `path` or print to stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_file(path, text);
    log_line(fmt::format("wrote {}", path));
  }
}

int cmd_split(const Common& c, const std::string& out) {
  const auto cfg = load(c);
  const auto inputs = load_inputs(cfg);
  const auto split = experiment_split(cfg, inputs);
  emit(out, io::format_split(split));
  log_line(fmt::format("train {} / validation {} / test {}", split.train.size(), split.validation.size(),
                       split.test.size()));
  return 0;
}

int cmd_select(const Common& c, const std::string& out) {
  const auto cfg = load(c);
  const auto inputs = load_inputs(cfg);
  const auto split = experiment_split(cfg, inputs);
  cfg.budgets.check_pool(split.train.size());
  auto plan = experiment_plan(cfg, inputs, split);
  emit(out, io::format_plan(plan));
  return 0;
}

int cmd_al_run(const Common& c, const std::string& out_dir) {
  auto cfg = load(c);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const auto outcome = run_experiment(cfg, log_line);
  std::cout << emit_table(outcome.initialization);
  if (!outcome.subsequent.empty()) std::cout << '\n' << emit_table(outcome.subsequent);
  log_line(fmt::format("artifacts in {}", cfg.output_dir.string()));
  return 0;
}

struct EvalArgs {
  std::string task = "classification";
  std::string scores;
  std::string labels;
  std::string predictions;
  std::string masks;
  std::vector<std::string> ids;
  double threshold = kDefaultThreshold;
  std::size_t n_boot = 100;
  std::size_t budget = 0;
  std::string method = "Custom";
  std::string out;
};

int cmd_eval(const Common& c, EvalArgs a) {
  RngSeed seed = kDefaultSeed;
  if (!c.config.empty()) {
    const auto cfg = load(c);
    seed = cfg.seed;
    a.threshold = cfg.threshold;
    a.n_boot = cfg.n_boot;
  } else if (c.seed) {
    seed = RngSeed{*c.seed};
  }
  std::vector<MetricReport> reports;
  if (parse_task(a.task) == Task::kClassification) {
    if (a.scores.empty() || a.labels.empty()) throw InvalidArgument("classification eval needs --scores and --labels");
    const auto scores = io::parse_scores(io::read_file(a.scores));
    const auto labels = io::load_labels(a.labels);
    std::vector<ScoredLabel> test;
    for (const auto& [id, p] : scores) {
      const auto it = labels.find(id);
      if (it == labels.end()) throw InvalidArgument(fmt::format("no label for scored id {}", id.str()));
      test.push_back({p, it->second});
    }
    reports = evaluate_classification(test, a.threshold, a.n_boot, seed);
  } else {
    if (a.predictions.empty() || a.masks.empty()) throw InvalidArgument("segmentation eval needs --predictions and --masks");
    std::vector<MaskPair> pairs;
    for (const auto& entry : fs::directory_iterator(a.predictions)) {
      if (entry.path().extension() != ".txt") continue;
      const auto id = entry.path().stem().string();
      pairs.push_back({binarize(io::load_probability_map(entry.path()), a.threshold),
                       io::load_mask(fs::path(a.masks) / (id + ".pgm"))});
      a.ids.push_back(id);
    }
    if (pairs.empty()) throw InvalidArgument(fmt::format("no <id>.txt probability maps in {}", a.predictions));
    reports = evaluate_segmentation(pairs, a.n_boot, seed);
  }
  const std::vector<TableRow> rows{{a.budget, a.method, reports}};
  std::cout << emit_table(rows);
  if (!a.out.empty()) emit(a.out, emit_records(rows));
  return 0;
}

int cmd_report(const std::vector<std::string>& records, const std::string& out) {
  std::vector<TableRow> rows;
  for (const auto& path : records) {
    auto more = parse_records(io::read_file(path));
    rows.insert(rows.end(), more.begin(), more.end());
  }
  emit(out, emit_table(rows));
  return 0;
}

struct FetchArgs {
  RemoteEmbeddingEndpoint endpoint;
  std::string images;
  std::string provenance = "custom";
  std::string out;
};

int cmd_embed_fetch(FetchArgs a) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(a.images)) {
    if (entry.is_regular_file()) paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw InvalidArgument(fmt::format("no images in {}", a.images));
  FetchStats stats;
  const auto ds = fetch_embeddings(a.endpoint, paths, parse_provenance(a.provenance), &stats, log_line);
  emit(a.out, io::format_embeddings(ds));
  log_line(fmt::format("{} embeddings of dimension {} ({} requests, {} retries)", ds.size(), ds.dim(),
                       stats.requests, stats.retries));
  return 0;
}

struct SynthArgs {
  std::string kind = "blobs";
  std::string out;
  std::size_t n = 800;
  std::size_t clusters = 5;
  std::size_t dim = 8;
  double separation = 4.0;
  std::vector<int> cluster_labels{0, 0, 0, 0, 1};
  std::size_t side = 16;
};

int cmd_synth(const Common& c, const SynthArgs& a) {
  const RngSeed seed = c.seed ? RngSeed{*c.seed} : kDefaultSeed;
  const fs::path out(a.out);
  fs::create_directories(out);
  if (a.kind == "blobs") {
    synthetic::BlobSpec spec;
    spec.n = a.n;
    spec.clusters = a.clusters;
    spec.dim = a.dim;
    spec.separation = a.separation;
    spec.cluster_labels = a.cluster_labels;
    const auto blobs = synthetic::make_blobs(spec, seed);
    io::save_embeddings(blobs.dataset, out / "embeddings.csv");
    io::write_file(out / "labels.csv", io::format_labels(*blobs.dataset.labels));
  } else if (a.kind == "segmentation") {
    const auto toy = synthetic::make_segmentation_toy(a.n, a.side, a.side, seed);
    fs::create_directories(out / "images");
    fs::create_directories(out / "masks");
    for (const auto& id : toy.ids) {
      io::write_file(out / "images" / (id.str() + ".pgm"), io::format_image(toy.images.at(id)));
      io::write_file(out / "masks" / (id.str() + ".pgm"), io::format_mask(toy.masks.at(id)));
    }
    io::save_embeddings(toy.pixels, out / "embeddings.csv");
    io::write_file(out / "labels.csv", io::format_labels(*toy.pixels.labels));
  } else {
    throw InvalidArgument(fmt::format("unknown synthetic kind '{}' (blobs or segmentation)", a.kind));
  }
  log_line(fmt::format("wrote {} dataset to {}", a.kind, out.string()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cold-start active learning: clustering-based initial selection, uncertainty acquisition, evaluation"};
  app.require_subcommand(1);

  Common split_c, select_c, run_c, eval_c, synth_c;
  std::string split_out, select_out, run_out, report_out;

  auto* split = app.add_subcommand("split", "write the train/validation/test split of a config");
  add_common(split, split_c, true);
  split->add_option("--out", split_out, "output file (default stdout)");

  auto* select = app.add_subcommand("select-init", "write the nested initial selection plan");
  add_common(select, select_c, true);
  select->add_option("--out", select_out, "output file (default stdout)");

  auto* al_run = app.add_subcommand("al-run", "run initialization and subsequent learning, writing all artifacts");
  add_common(al_run, run_c, true);
  al_run->add_option("--output-dir", run_out, "override the config output_dir");

  EvalArgs eval_a;
  auto* eval = app.add_subcommand("eval", "score predictions with bootstrap standard errors");
  add_common(eval, eval_c, false);
  eval->add_option("--task", eval_a.task, "classification or segmentation")->capture_default_str();
  eval->add_option("--scores", eval_a.scores, "id,probability file");
  eval->add_option("--labels", eval_a.labels, "id,label file");
  eval->add_option("--predictions", eval_a.predictions, "directory of <id>.txt probability maps");
  eval->add_option("--masks", eval_a.masks, "directory of <id>.pgm ground-truth masks");
  eval->add_option("--threshold", eval_a.threshold)->capture_default_str();
  eval->add_option("--n-boot", eval_a.n_boot)->capture_default_str();
  eval->add_option("--budget", eval_a.budget, "budget column of the output row");
  eval->add_option("--method", eval_a.method, "method column of the output row")->capture_default_str();
  eval->add_option("--records", eval_a.out, "also write JSON-lines records here");

  std::vector<std::string> report_in;
  Common report_c;
  auto* report = app.add_subcommand("report", "merge metric record files into one table");
  add_common(report, report_c, false);
  report->add_option("records", report_in, "JSON-lines record files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "output file (default stdout)");

  FetchArgs fetch_a;
  Common fetch_c;
  auto* fetch = app.add_subcommand("embed-fetch", "fetch embeddings for a directory of images from an HTTP endpoint");
  add_common(fetch, fetch_c, false);
  fetch->add_option("--url", fetch_a.endpoint.url, "http://host:port/path")->required();
  fetch->add_option("--images", fetch_a.images, "image directory")->required()->check(CLI::ExistingDirectory);
  fetch->add_option("--out", fetch_a.out, "embeddings file (default stdout)");
  fetch->add_option("--provenance", fetch_a.provenance)->capture_default_str();
  fetch->add_option("--timeout", fetch_a.endpoint.timeout_seconds, "seconds")->capture_default_str();
  fetch->add_option("--retries", fetch_a.endpoint.max_retries)->capture_default_str();
  fetch->add_option("--backoff", fetch_a.endpoint.backoff_seconds, "initial backoff, seconds")->capture_default_str();
  fetch->add_option("--concurrency", fetch_a.endpoint.max_concurrency)->capture_default_str();
  fetch->add_option("--content-type", fetch_a.endpoint.content_type)->capture_default_str();

  SynthArgs synth_a;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  add_common(synth, synth_c, false);
  synth->add_option("--kind", synth_a.kind, "blobs or segmentation")->capture_default_str();
  synth->add_option("--out", synth_a.out, "output directory")->required();
  synth->add_option("--n", synth_a.n, "samples (blobs) or images (segmentation)")->capture_default_str();
  synth->add_option("--clusters", synth_a.clusters)->capture_default_str();
  synth->add_option("--dim", synth_a.dim)->capture_default_str();
  synth->add_option("--separation", synth_a.separation, "minimum centre distance in stddevs")->capture_default_str();
  synth->add_option("--cluster-labels", synth_a.cluster_labels, "class of each cluster");
  synth->add_option("--side", synth_a.side, "image side (segmentation)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*split) return cmd_split(split_c, split_out);
    if (*select) return cmd_select(select_c, select_out);
    if (*al_run) return cmd_al_run(run_c, run_out);
    if (*eval) return cmd_eval(eval_c, eval_a);
    if (*report) return cmd_report(report_in, report_out);
    if (*fetch) {
      if (!fetch_c.config.empty()) log_line("embed-fetch ignores --config");
      return cmd_embed_fetch(fetch_a);
    }
    if (*synth) return cmd_synth(synth_c, synth_a);
  } catch (const std::exception& e) {
    std::cerr << "coldstart: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
