#include "coldstart/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "coldstart/error.hpp"

namespace coldstart::io {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    if (end == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return fields;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end && !token.empty();
}

template <typename Int>
bool parse_int(std::string_view token, Int& out) {
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end && !token.empty();
}

[[noreturn]] void fail(std::string_view what, std::size_t line, std::string_view message) {
  throw ParseError(fmt::format("{} line {}: {}", what, line, message));
}

SampleId parse_id(std::string_view token, std::string_view what, std::size_t line) {
  if (!SampleId::is_valid(token)) fail(what, line, fmt::format("invalid id '{}'", token));
  return SampleId(std::string(token));
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(fmt::format("write to '{}' failed", tmp.string()));
  }
  fs::rename(tmp, path);
}

EmbeddingDataset parse_embeddings(std::string_view text, Provenance provenance) {
  constexpr std::string_view kWhat = "embeddings";
  const auto lines = split_lines(text);
  if (lines.empty()) fail(kWhat, 1, "missing header");
  const auto header = split_fields(lines[0]);
  if (header.size() < 2 || header[0] != "id") fail(kWhat, 1, "header must be id,f0,...");
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != fmt::format("f{}", j - 1)) {
      fail(kWhat, 1, fmt::format("expected column f{}, found '{}'", j - 1, header[j]));
    }
  }
  const std::size_t d = header.size() - 1;
  EmbeddingDataset ds;
  ds.provenance = provenance;
  std::vector<double> values;
  std::set<std::string_view> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::size_t line_no = li + 1;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != d + 1) {
      fail(kWhat, line_no, fmt::format("expected {} fields, found {}", d + 1, fields.size()));
    }
    if (!seen.insert(fields[0]).second) fail(kWhat, line_no, fmt::format("duplicate id: {}", fields[0]));
    ds.ids.push_back(parse_id(fields[0], kWhat, line_no));
    for (std::size_t j = 1; j <= d; ++j) {
      double v = 0.0;
      if (!parse_double(fields[j], v)) fail(kWhat, line_no, fmt::format("bad number '{}'", fields[j]));
      if (!std::isfinite(v)) {
        fail(kWhat, line_no, fmt::format("non-finite value at ({},{})", ds.ids.size() - 1, j - 1));
      }
      values.push_back(v);
    }
  }
  ds.vectors = Matrix(ds.ids.size(), d, std::move(values));
  require_valid(ds);
  return ds;
}

std::string format_embeddings(const EmbeddingDataset& ds) {
  std::string out = "id";
  for (std::size_t j = 0; j < ds.dim(); ++j) out += fmt::format(",f{}", j);
  out += '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out += ds.ids[i].str();
    for (double v : ds.vectors.row(i)) out += fmt::format(",{}", v);
    out += '\n';
  }
  return out;
}

EmbeddingDataset load_embeddings(const fs::path& path, Provenance provenance) {
  if (!fs::exists(path)) throw Error(fmt::format("embeddings file '{}' does not exist", path.string()));
  try {
    return parse_embeddings(read_file(path), provenance);
  } catch (const Error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void save_embeddings(const EmbeddingDataset& ds, const fs::path& path) {
  require_valid(ds);
  write_file(path, format_embeddings(ds));
}

LabelMap parse_labels(std::string_view text) {
  constexpr std::string_view kWhat = "labels";
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "id,label") fail(kWhat, 1, "header must be id,label");
  LabelMap labels;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != 2) fail(kWhat, li + 1, "expected 2 fields");
    auto id = parse_id(fields[0], kWhat, li + 1);
    if (fields[1] != "0" && fields[1] != "1") fail(kWhat, li + 1, fmt::format("label '{}' is not 0 or 1", fields[1]));
    if (!labels.emplace(std::move(id), fields[1] == "1" ? 1 : 0).second) {
      fail(kWhat, li + 1, fmt::format("duplicate id: {}", fields[0]));
    }
  }
  return labels;
}

std::string format_labels(const LabelMap& labels) {
  std::string out = "id,label\n";
  for (const auto& [id, label] : labels) out += fmt::format("{},{}\n", id.str(), label);
  return out;
}

LabelMap load_labels(const fs::path& path) { return parse_labels(read_file(path)); }

std::map<SampleId, double> parse_scores(std::string_view text) {
  constexpr std::string_view kWhat = "scores";
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "id,probability") fail(kWhat, 1, "header must be id,probability");
  std::map<SampleId, double> scores;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != 2) fail(kWhat, li + 1, "expected 2 fields");
    double p = 0.0;
    if (!parse_double(fields[1], p) || !(p >= 0.0 && p <= 1.0)) {
      fail(kWhat, li + 1, fmt::format("probability '{}' outside [0,1]", fields[1]));
    }
    if (!scores.emplace(parse_id(fields[0], kWhat, li + 1), p).second) {
      fail(kWhat, li + 1, fmt::format("duplicate id: {}", fields[0]));
    }
  }
  return scores;
}

std::string format_scores(const std::map<SampleId, double>& scores) {
  std::string out = "id,probability\n";
  for (const auto& [id, p] : scores) out += fmt::format("{},{}\n", id.str(), p);
  return out;
}

std::string format_split(const DataSplit& split) {
  std::string out = "id,part\n";
  for (const auto& id : split.train) out += id.str() + ",train\n";
  for (const auto& id : split.validation) out += id.str() + ",validation\n";
  for (const auto& id : split.test) out += id.str() + ",test\n";
  return out;
}

DataSplit parse_split(std::string_view text) {
  constexpr std::string_view kWhat = "split";
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "id,part") fail(kWhat, 1, "header must be id,part");
  DataSplit split;
  std::set<std::string_view> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != 2) fail(kWhat, li + 1, "expected 2 fields");
    if (!seen.insert(fields[0]).second) fail(kWhat, li + 1, fmt::format("duplicate id: {}", fields[0]));
    auto id = parse_id(fields[0], kWhat, li + 1);
    if (fields[1] == "train") split.train.push_back(std::move(id));
    else if (fields[1] == "validation") split.validation.push_back(std::move(id));
    else if (fields[1] == "test") split.test.push_back(std::move(id));
    else fail(kWhat, li + 1, fmt::format("unknown part '{}'", fields[1]));
  }
  return split;
}

std::string format_plan(const SelectionPlan& plan) {
  std::string out = "#coldstart-plan v1\n";
  out += fmt::format("method,{}\n", to_string(plan.method));
  out += fmt::format("seed,{}\n", plan.seed.value);
  out += fmt::format("provenance,{}\n", plan.provenance ? to_string(*plan.provenance) : "none");
  out += "rank,id,k_source\n";
  for (std::size_t i = 0; i < plan.ordered_ids.size(); ++i) {
    const auto& k = i < plan.k_source.size() ? plan.k_source[i] : std::nullopt;
    out += fmt::format("{},{},{}\n", i + 1, plan.ordered_ids[i].str(), k ? std::to_string(*k) : "random");
  }
  return out;
}

SelectionPlan parse_plan(std::string_view text) {
  constexpr std::string_view kWhat = "plan";
  const auto lines = split_lines(text);
  if (lines.size() < 5) fail(kWhat, lines.size() + 1, "truncated header");
  if (lines[0] != "#coldstart-plan v1") fail(kWhat, 1, "missing '#coldstart-plan v1' marker");

  const auto keyed = [&](std::size_t li, std::string_view key) {
    const auto fields = split_fields(lines[li]);
    if (fields.size() != 2 || fields[0] != key) fail(kWhat, li + 1, fmt::format("expected '{},<value>'", key));
    return fields[1];
  };
  SelectionPlan plan;
  try {
    plan.method = parse_selection_method(keyed(1, "method"));
  } catch (const InvalidArgument& e) {
    fail(kWhat, 2, e.what());
  }
  if (!parse_int(keyed(2, "seed"), plan.seed.value)) fail(kWhat, 3, "bad seed");
  const auto prov = keyed(3, "provenance");
  if (prov != "none") {
    try {
      plan.provenance = parse_provenance(prov);
    } catch (const InvalidArgument& e) {
      fail(kWhat, 4, e.what());
    }
  }
  if (lines[4] != "rank,id,k_source") fail(kWhat, 5, "expected 'rank,id,k_source'");

  std::set<std::string_view> seen;
  for (std::size_t li = 5; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::size_t line_no = li + 1;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != 3) fail(kWhat, line_no, "expected 3 fields");
    std::size_t rank = 0;
    if (!parse_int(fields[0], rank) || rank != plan.ordered_ids.size() + 1) {
      fail(kWhat, line_no, fmt::format("rank '{}' out of order, expected {}", fields[0], plan.ordered_ids.size() + 1));
    }
    if (!seen.insert(fields[1]).second) fail(kWhat, line_no, fmt::format("duplicate id: {}", fields[1]));
    plan.ordered_ids.push_back(parse_id(fields[1], kWhat, line_no));
    if (fields[2] == "random") {
      if (plan.method != SelectionMethod::kRandom) fail(kWhat, line_no, "k_source 'random' in a clustering plan");
      plan.k_source.emplace_back(std::nullopt);
    } else {
      std::size_t k = 0;
      if (!parse_int(fields[2], k) || k == 0) fail(kWhat, line_no, fmt::format("bad k_source '{}'", fields[2]));
      if (plan.method != SelectionMethod::kClustering) fail(kWhat, line_no, "cluster k_source in a random plan");
      plan.k_source.emplace_back(k);
    }
  }
  return plan;
}

void save_plan(const SelectionPlan& plan, const fs::path& path) { write_file(path, format_plan(plan)); }

SelectionPlan load_plan(const fs::path& path) {
  try {
    return parse_plan(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string format_probability_map(const ProbabilityMap& map) {
  std::string out = fmt::format("{} {}\n", map.height, map.width);
  for (std::size_t r = 0; r < map.height; ++r) {
    for (std::size_t c = 0; c < map.width; ++c) {
      out += (c == 0 ? "" : " ") + fmt::format("{}", map.at(r, c));
    }
    out += '\n';
  }
  return out;
}

ProbabilityMap parse_probability_map(std::string_view text) {
  constexpr std::string_view kWhat = "probability map";
  const auto lines = split_lines(text);
  if (lines.empty()) fail(kWhat, 1, "missing 'h w' line");
  const auto dims = split_whitespace(lines[0]);
  ProbabilityMap map;
  if (dims.size() != 2 || !parse_int(dims[0], map.height) || !parse_int(dims[1], map.width) ||
      map.height == 0 || map.width == 0) {
    fail(kWhat, 1, "expected positive 'h w'");
  }
  std::size_t rows = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto tokens = split_whitespace(lines[li]);
    if (tokens.empty()) continue;
    if (tokens.size() != map.width) fail(kWhat, li + 1, fmt::format("expected {} values", map.width));
    for (auto t : tokens) {
      double p = 0.0;
      if (!parse_double(t, p) || !(p >= 0.0 && p <= 1.0)) fail(kWhat, li + 1, fmt::format("bad probability '{}'", t));
      map.values.push_back(p);
    }
    ++rows;
  }
  if (rows != map.height) fail(kWhat, lines.size(), fmt::format("expected {} rows, found {}", map.height, rows));
  return map;
}

ProbabilityMap load_probability_map(const fs::path& path) { return parse_probability_map(read_file(path)); }

namespace {
struct Pgm {
  std::size_t height = 0;
  std::size_t width = 0;
  unsigned maxval = 0;
  std::vector<unsigned> values;
};

Pgm parse_pgm(std::string_view text) {
  constexpr std::string_view kWhat = "pgm";
  // Tokenise, dropping '#' comments.
  std::vector<std::pair<std::string_view, std::size_t>> tokens;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    auto line = lines[li];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    for (auto t : split_whitespace(line)) tokens.emplace_back(t, li + 1);
  }
  if (tokens.empty() || tokens[0].first != "P2") fail(kWhat, 1, "not an ASCII PGM (expected magic P2)");
  if (tokens.size() < 4) fail(kWhat, tokens.back().second, "truncated header");
  Pgm pgm;
  if (!parse_int(tokens[1].first, pgm.width) || !parse_int(tokens[2].first, pgm.height) || pgm.width == 0 ||
      pgm.height == 0) {
    fail(kWhat, tokens[1].second, "bad dimensions");
  }
  if (!parse_int(tokens[3].first, pgm.maxval) || pgm.maxval == 0 || pgm.maxval > 65535) {
    fail(kWhat, tokens[3].second, "bad maxval");
  }
  const std::size_t expected = pgm.width * pgm.height;
  if (tokens.size() - 4 != expected) {
    fail(kWhat, tokens.back().second,
         fmt::format("dimension mismatch: {}x{} needs {} values, found {}", pgm.width, pgm.height, expected,
                     tokens.size() - 4));
  }
  pgm.values.reserve(expected);
  for (std::size_t i = 4; i < tokens.size(); ++i) {
    unsigned v = 0;
    if (!parse_int(tokens[i].first, v)) fail(kWhat, tokens[i].second, fmt::format("bad value '{}'", tokens[i].first));
    if (v > pgm.maxval) fail(kWhat, tokens[i].second, fmt::format("value {} exceeds maxval {}", v, pgm.maxval));
    pgm.values.push_back(v);
  }
  return pgm;
}
}  // namespace

BinaryMask parse_mask(std::string_view text) {
  const Pgm pgm = parse_pgm(text);
  std::vector<std::uint8_t> cells(pgm.values.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    // value >= maxval / 2, in integers.
    cells[i] = 2u * pgm.values[i] >= pgm.maxval ? 1 : 0;
  }
  return BinaryMask(pgm.height, pgm.width, std::move(cells));
}

GrayImage parse_image(std::string_view text) {
  const Pgm pgm = parse_pgm(text);
  GrayImage image{pgm.height, pgm.width, std::vector<double>(pgm.values.size())};
  for (std::size_t i = 0; i < pgm.values.size(); ++i) {
    image.values[i] = static_cast<double>(pgm.values[i]) / static_cast<double>(pgm.maxval);
  }
  return image;
}

std::string format_mask(const BinaryMask& mask) {
  std::string out = fmt::format("P2\n{} {}\n255\n", mask.width(), mask.height());
  for (std::size_t r = 0; r < mask.height(); ++r) {
    for (std::size_t c = 0; c < mask.width(); ++c) out += (c == 0 ? "" : " ") + fmt::format("{}", mask.at(r, c) ? 255 : 0);
    out += '\n';
  }
  return out;
}

std::string format_image(const GrayImage& image) {
  std::string out = fmt::format("P2\n{} {}\n255\n", image.width, image.height);
  for (std::size_t r = 0; r < image.height; ++r) {
    for (std::size_t c = 0; c < image.width; ++c) {
      const auto v = static_cast<int>(std::lround(std::clamp(image.at(r, c), 0.0, 1.0) * 255.0));
      out += (c == 0 ? "" : " ") + fmt::format("{}", v);
    }
    out += '\n';
  }
  return out;
}

BinaryMask load_mask(const fs::path& path) {
  if (!fs::exists(path)) throw Error(fmt::format("mask file '{}' does not exist", path.string()));
  try {
    return parse_mask(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

GrayImage load_image(const fs::path& path) {
  if (!fs::exists(path)) throw Error(fmt::format("image file '{}' does not exist", path.string()));
  try {
    return parse_image(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace coldstart::io
