#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coldstart/bootstrap.hpp"
#include "coldstart/dataset.hpp"
#include "coldstart/select.hpp"

namespace coldstart {

// Row label used in result tables: "Random Sampling", "Naive", "ImageNet",
// "TXRV", "REMEDIS", "CXRF" or "Custom".
std::string method_label(SelectionMethod method, std::optional<Provenance> provenance);

struct TableRow {
  std::size_t budget = 0;
  std::string method;
  std::vector<MetricReport> reports;
};

// "0.389 (0.094)"
std::string format_cell(const MetricReport& report);

// Aligned plain-text table grouped by budget. Within a budget, methods follow
// the canonical order and the best value of each metric is marked with '*'
// when more than one method is present.
std::string emit_table(std::vector<TableRow> rows);

// One JSON object per line and per cell.
std::string emit_records(const std::vector<TableRow>& rows);
std::vector<TableRow> parse_records(std::string_view text);

}  // namespace coldstart
