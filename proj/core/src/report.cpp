#include "coldstart/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "coldstart/error.hpp"

namespace coldstart {

namespace {
constexpr std::array<std::string_view, 7> kMethodOrder{
    "Random Sampling", "Naive", "ImageNet", "TXRV", "REMEDIS", "CXRF", "Custom"};

std::size_t method_rank(std::string_view label) {
  const auto it = std::find(kMethodOrder.begin(), kMethodOrder.end(), label);
  return static_cast<std::size_t>(it - kMethodOrder.begin());
}
}  // namespace

std::string method_label(SelectionMethod method, std::optional<Provenance> provenance) {
  if (method == SelectionMethod::kRandom) return "Random Sampling";
  switch (provenance.value_or(Provenance::kCustom)) {
    case Provenance::kRawPixels: return "Naive";
    case Provenance::kImageNet: return "ImageNet";
    case Provenance::kTxrv: return "TXRV";
    case Provenance::kRemedis: return "REMEDIS";
    case Provenance::kCxrf: return "CXRF";
    case Provenance::kCustom: return "Custom";
  }
  return "Custom";
}

std::string format_cell(const MetricReport& report) {
  if (!std::isfinite(report.estimate)) return "n/a";
  return fmt::format("{:.3f} ({:.3f})", report.estimate, report.se);
}

std::string emit_table(std::vector<TableRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
    if (a.budget != b.budget) return a.budget < b.budget;
    const auto ra = method_rank(a.method);
    const auto rb = method_rank(b.method);
    if (ra != rb) return ra < rb;
    return a.method < b.method;
  });

  std::vector<Metric> columns;
  for (auto m : {Metric::kAuprc, Metric::kF1, Metric::kDsc, Metric::kHd}) {
    const bool used = std::any_of(rows.begin(), rows.end(), [m](const TableRow& r) {
      return std::any_of(r.reports.begin(), r.reports.end(),
                         [m](const MetricReport& rep) { return rep.metric == m; });
    });
    if (used) columns.push_back(m);
  }

  const auto find = [](const TableRow& row, Metric m) -> const MetricReport* {
    for (const auto& rep : row.reports) {
      if (rep.metric == m) return &rep;
    }
    return nullptr;
  };

  // Best estimate per (budget, metric), compared on the printed precision.
  std::map<std::pair<std::size_t, Metric>, double> best;
  std::map<std::size_t, std::size_t> group_size;
  for (const auto& row : rows) {
    ++group_size[row.budget];
    for (auto m : columns) {
      const auto* rep = find(row, m);
      if (!rep || !std::isfinite(rep->estimate)) continue;
      const auto key = std::make_pair(row.budget, m);
      const auto it = best.find(key);
      if (it == best.end()) {
        best.emplace(key, rep->estimate);
      } else if (higher_is_better(m) ? rep->estimate > it->second : rep->estimate < it->second) {
        it->second = rep->estimate;
      }
    }
  }
  const auto rounded = [](double v) { return fmt::format("{:.3f}", v); };

  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Budget", "Method"};
  for (auto m : columns) header.emplace_back(display_name(m));
  cells.push_back(header);
  std::size_t previous_budget = 0;
  bool first = true;
  for (const auto& row : rows) {
    std::vector<std::string> line;
    line.push_back(first || row.budget != previous_budget ? std::to_string(row.budget) : "");
    line.push_back(row.method);
    for (auto m : columns) {
      const auto* rep = find(row, m);
      if (!rep) {
        line.emplace_back("-");
        continue;
      }
      std::string cell = format_cell(*rep);
      if (group_size[row.budget] > 1 && std::isfinite(rep->estimate) &&
          rounded(rep->estimate) == rounded(best.at({row.budget, m}))) {
        cell += "*";
      }
      line.push_back(std::move(cell));
    }
    cells.push_back(std::move(line));
    previous_budget = row.budget;
    first = false;
  }

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], line[i].size());
  }
  std::string out;
  for (std::size_t li = 0; li < cells.size(); ++li) {
    std::string text;
    for (std::size_t i = 0; i < cells[li].size(); ++i) {
      if (i > 0) text += "  ";
      text += fmt::format("{:<{}}", cells[li][i], widths[i]);
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out += text + "\n";
    if (li == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w;
      out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
    }
  }
  return out;
}

std::string emit_records(const std::vector<TableRow>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (const auto& rep : row.reports) {
      nlohmann::ordered_json j;
      j["budget"] = row.budget;
      j["method"] = row.method;
      j["metric"] = to_string(rep.metric);
      j["estimate"] = rep.estimate;
      j["se"] = rep.se;
      j["n_boot"] = rep.n_boot;
      j["seed"] = rep.seed.value;
      j["redraws"] = rep.redraws;
      j["excluded"] = rep.excluded;
      out += j.dump() + "\n";
    }
  }
  return out;
}

std::vector<TableRow> parse_records(std::string_view text) {
  std::vector<TableRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      MetricReport rep;
      rep.metric = parse_metric(j.at("metric").get<std::string>());
      const auto number = [&](const char* key) {
        const auto& v = j.at(key);
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
      };
      rep.estimate = number("estimate");
      rep.se = number("se");
      rep.n_boot = j.value("n_boot", std::size_t{0});
      rep.seed = RngSeed{j.value("seed", kDefaultSeed.value)};
      rep.redraws = j.value("redraws", std::size_t{0});
      rep.excluded = j.value("excluded", std::size_t{0});
      const auto budget = j.at("budget").get<std::size_t>();
      const auto method = j.at("method").get<std::string>();
      auto it = std::find_if(rows.begin(), rows.end(), [&](const TableRow& r) {
        return r.budget == budget && r.method == method;
      });
      if (it == rows.end()) {
        rows.push_back(TableRow{budget, method, {}});
        it = rows.end() - 1;
      }
      it->reports.push_back(rep);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(fmt::format("metric records line {}: {}", line_no, e.what()));
    } catch (const InvalidArgument& e) {
      throw ParseError(fmt::format("metric records line {}: {}", line_no, e.what()));
    }
  }
  return rows;
}

}  // namespace coldstart
