#include <doctest.h>

#include "coldstart/report.hpp"

using namespace coldstart;

namespace {
MetricReport rep(Metric m, double est, double se) {
  MetricReport r;
  r.metric = m;
  r.estimate = est;
  r.se = se;
  r.n_boot = 100;
  return r;
}
}  // namespace

TEST_CASE("cells render estimate and se to three decimals") {
  CHECK(format_cell(rep(Metric::kAuprc, 0.389, 0.094)) == "0.389 (0.094)");
  const auto table = emit_table({{20, "Random Sampling", {rep(Metric::kAuprc, 0.389, 0.094)}}});
  CHECK(table.find("0.389 (0.094)") != std::string::npos);
  CHECK(table.find('*') == std::string::npos);
}

TEST_CASE("empty input gives a header-only table") {
  const auto table = emit_table({});
  CHECK(table.rfind("Budget  Method\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 2);
}

TEST_CASE("the best method per budget and metric is flagged") {
  const auto table = emit_table({
      {20, "TXRV", {rep(Metric::kAuprc, 0.557, 0.082)}},
      {20, "Naive", {rep(Metric::kAuprc, 0.313, 0.056)}},
  });
  CHECK(table.find("0.557 (0.082)*") != std::string::npos);
  CHECK(table.find("0.313 (0.056)*") == std::string::npos);
  // Canonical order: Naive before TXRV.
  CHECK(table.find("Naive") < table.find("TXRV"));
}

TEST_CASE("lower HD is better") {
  const auto table = emit_table({
      {20, "Random Sampling", {rep(Metric::kDsc, 0.4, 0.01), rep(Metric::kHd, 30.0, 2.0)}},
      {20, "CXRF", {rep(Metric::kDsc, 0.5, 0.01), rep(Metric::kHd, 20.0, 2.0)}},
  });
  CHECK(table.find("20.000 (2.000)*") != std::string::npos);
  CHECK(table.find("30.000 (2.000)*") == std::string::npos);
  CHECK(table.find("0.500 (0.010)*") != std::string::npos);
}

TEST_CASE("rows are grouped by budget with aligned columns") {
  const std::vector<TableRow> rows{
      {40, "Random Sampling", {rep(Metric::kAuprc, 0.517, 0.113), rep(Metric::kF1, 0.508, 0.071)}},
      {20, "CXRF", {rep(Metric::kAuprc, 0.506, 0.083), rep(Metric::kF1, 0.554, 0.059)}},
      {20, "Random Sampling", {rep(Metric::kAuprc, 0.389, 0.094), rep(Metric::kF1, 0.447, 0.100)}},
  };
  const std::string expected =
      "Budget  Method           AUPRC           F1\n"
      "-------------------------------------------------------\n"
      "20      Random Sampling  0.389 (0.094)   0.447 (0.100)\n"
      "        CXRF             0.506 (0.083)*  0.554 (0.059)*\n"
      "40      Random Sampling  0.517 (0.113)   0.508 (0.071)\n";
  CHECK(emit_table(rows) == expected);
}

TEST_CASE("records round-trip through the line-delimited stream") {
  const std::vector<TableRow> rows{
      {20, "TXRV", {rep(Metric::kAuprc, 0.557, 0.082), rep(Metric::kF1, 0.524, 0.071)}},
      {40, "TXRV", {rep(Metric::kAuprc, 0.617, 0.091)}},
  };
  const auto text = emit_records(rows);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.rfind(R"({"budget":20,"method":"TXRV","metric":"auprc","estimate":0.557,"se":0.082)", 0) == 0);
  const auto parsed = parse_records(text);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].reports == rows[0].reports);
  CHECK(parsed[1].budget == 40);
  CHECK_THROWS(parse_records("{not json}\n"));
}
