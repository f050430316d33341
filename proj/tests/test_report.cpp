#include <cmath>
#include <sstream>

#include "doctest.h"
#include "temp_dir.hpp"
#include "thematic/csv.hpp"
#include "thematic/error.hpp"
#include "thematic/report.hpp"

using namespace thematic;

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  csv::Reader reader(in, true);
  std::vector<std::vector<std::string>> rows;
  while (auto r = reader.next()) rows.push_back(r->fields);
  return rows;
}

DivergenceRecord rec(std::string id, Label label, int l, int n, double ch) {
  DivergenceRecord r;
  r.doc_id = std::move(id);
  r.label = label;
  r.l = l;
  r.n_topics = n;
  r.d_ch = ch;
  r.d_se = ch * ch * 1.5;
  r.d_e = std::sqrt(r.d_se);
  return r;
}

// Two N values at l=5; N=20 has a single real article.
ExperimentReport sample_report() {
  std::vector<DivergenceRecord> recs;
  const double fake[] = {0.41, 0.52, 0.38, 0.61, 0.47};
  const double real[] = {0.22, 0.31, 0.27, 0.19};
  for (int i = 0; i < 5; ++i) recs.push_back(rec("f" + std::to_string(i), Label::fake, 5, 10, fake[i]));
  for (int i = 0; i < 4; ++i) recs.push_back(rec("r" + std::to_string(i), Label::real, 5, 10, real[i]));
  for (int i = 0; i < 5; ++i) recs.push_back(rec("f" + std::to_string(i), Label::fake, 5, 20, fake[i] - 0.05));
  recs.push_back(rec("r0", Label::real, 5, 20, 0.2));
  return assemble_report(recs, {kAllMetrics.begin(), kAllMetrics.end()}, {5}, {10, 20});
}

}  // namespace

TEST_CASE("sig4 formatting") {
  CHECK(format_sig4(0.33724) == "0.3372");
  CHECK(format_sig4(0.00319) == "0.00319");
  CHECK(format_sig4(12345.0) == "1.234e+04");
}

TEST_CASE("assemble report cells") {
  const auto report = sample_report();
  CHECK(report.cells.size() == 3 * 1 * 2);
  const auto* ok = report.find_cell(Metric::ch, 5, 10);
  REQUIRE(ok);
  CHECK(ok->test);
  CHECK(ok->fake->count == 5);
  const auto* skipped = report.find_cell(Metric::ch, 5, 20);
  REQUIRE(skipped);
  CHECK_FALSE(skipped->test);
  CHECK(skipped->skip_reason == "too few articles (fake=5, real=1)");
  CHECK_FALSE(report.find_cell(Metric::ch, 4, 10));
}

TEST_CASE("write_report files re-parse") {
  const auto report = sample_report();
  TempDir dir("report");
  write_report(report, dir.path());
  const auto records = read_records_csv(dir / "records.csv");
  CHECK(records.size() == report.records.size());

  const auto aggs = read_csv(dir / "aggregates.csv");
  REQUIRE(aggs.size() == 1 + 3 * 2 * 2);
  CHECK(aggs[0] == std::vector<std::string>{"label", "metric", "l", "N", "count", "mean", "median", "ci_half_width"});
  for (std::size_t i = 1; i < aggs.size(); ++i) {
    CHECK(aggs[i].size() == 8);
    CHECK(std::isfinite(std::stod(aggs[i][5])));
  }

  const auto tests = read_csv(dir / "tests.csv");
  REQUIRE(tests.size() == 1 + 6);
  CHECK(tests[0].back() == "status");
  int skipped = 0;
  for (std::size_t i = 1; i < tests.size(); ++i) {
    CHECK(tests[i].size() == tests[0].size());
    if (tests[i].back().rfind("skipped", 0) == 0) ++skipped;
    else CHECK(tests[i].back() == "ok");
  }
  CHECK(skipped == 3);
}

TEST_CASE("tables") {
  const auto report = sample_report();
  TempDir dir("tables");
  TableSpec spec;
  spec.dataset = "demo";
  spec.n_topics = 20;
  emit_tables(report, dir.path(), spec);
  const auto t2 = read_csv(dir / "table2.csv");
  REQUIRE(t2.size() == 2);
  CHECK(t2[0] == std::vector<std::string>{"dataset", "p_D_Ch", "p_D_E", "p_D_SE"});
  CHECK(t2[1][0] == "demo");
  CHECK(t2[1][1] == "NA(too few articles (fake=5, real=1))");
  CHECK(slurp(dir / "table2.csv").rfind("# ", 0) == 0);

  spec.n_topics = 10;
  emit_tables(report, dir.path(), spec);
  const auto t2b = read_csv(dir / "table2.csv");
  const auto* cell = report.find_cell(Metric::ch, 5, 10);
  CHECK(t2b[1][1] == format_sig4(cell->test->p));
  const auto t3 = read_csv(dir / "table3.csv");
  REQUIRE(t3.size() == 4);
  CHECK(t3[0] == std::vector<std::string>{"dataset", "metric", "mean_fake", "mean_real", "median_fake", "median_real",
                                          "fake_greater"});
  CHECK(t3[1][1] == "D_Ch");
  CHECK(t3[1][2] == format_sig4(cell->fake->mean));
  CHECK(t3[1][6] == "yes");

  // Pooled over N: both N values' records feed one test.
  spec.n_topics.reset();
  emit_tables(report, dir.path(), spec);
  const auto header = slurp(dir / "table2.csv");
  CHECK(header.find("pooled") != std::string::npos);
  const auto first = slurp(dir / "table2.csv");
  emit_tables(report, dir.path(), spec);
  CHECK(slurp(dir / "table2.csv") == first);

  spec.l = 3;
  CHECK_THROWS_AS(emit_tables(report, dir.path(), spec), ValidationError);
  auto empty = report;
  empty.metrics.clear();
  spec.l = 5;
  CHECK_THROWS_AS(emit_tables(empty, dir.path(), spec), ValidationError);
}

TEST_CASE("fake_greater uses full precision") {
  std::vector<DivergenceRecord> recs;
  // Means 0.300004 vs 0.300001 both render as 0.3.
  for (double v : {0.300003, 0.300005}) recs.push_back(rec("f" + std::to_string(v), Label::fake, 5, 10, v));
  for (double v : {0.300000, 0.300002}) recs.push_back(rec("r" + std::to_string(v), Label::real, 5, 10, v));
  const auto report = assemble_report(recs, {Metric::ch}, {5}, {10});
  TempDir dir("precision");
  emit_tables(report, dir.path(), TableSpec{"x", 5, 10});
  const auto t3 = read_csv(dir / "table3.csv");
  CHECK(t3[1][2] == t3[1][3]);
  CHECK(t3[1][6] == "yes");
}

TEST_CASE("plot data") {
  const auto report = sample_report();
  TempDir dir("plot");
  emit_plot_data(report, Metric::ch, 5, dir / "p.csv");
  const auto rows = read_csv(dir / "p.csv");
  REQUIRE(rows.size() == 1 + 2 * 2);
  CHECK(rows[0] == std::vector<std::string>{"N", "label", "mean", "median", "ci_lo", "ci_hi"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double mean = std::stod(rows[i][2]), lo = std::stod(rows[i][4]), hi = std::stod(rows[i][5]);
    CHECK(lo <= mean);
    CHECK(mean <= hi);
    if (rows[i][0] == "20" && rows[i][1] == "real") {
      CHECK(lo == mean);
      CHECK(hi == mean);
    }
  }
  try {
    emit_plot_data(report, Metric::ch, 2, dir / "q.csv");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("available l: 5") != std::string::npos);
  }
}
