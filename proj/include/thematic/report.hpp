#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "thematic/pipeline.hpp"

namespace thematic {

// Four significant digits, used for the summary tables.
std::string format_sig4(double value);

// Writes records.csv, aggregates.csv, tests.csv and filtered.csv into
// `dir`, creating it if needed. Output is a pure function of the report.
//
//   aggregates.csv  label,metric,l,N,count,mean,median,ci_half_width
//   tests.csv       metric,l,N,n_f,n_r,t,df,p,alternative,variance,status
//   filtered.csv    l,analyzed_fake,analyzed_real,filtered_fake,filtered_real
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

// How the summary tables collapse the (l, N) grid: a single opening
// length, and either one N or every N pooled together.
struct TableSpec {
  std::string dataset = "corpus";
  int l = 5;
  std::optional<int> n_topics;  // nullopt = pooled over the report's N grid
};

// Writes table2.csv (one-tailed p-value per metric) and table3.csv (mean
// and median per metric and class). A '#' header line records the
// aggregation. Cells that cannot be computed render as "NA(reason)".
// Throws ValidationError if spec.l or spec.n_topics is not in the report.
void emit_tables(const ExperimentReport& report, const std::filesystem::path& dir, const TableSpec& spec);

// Long-form plot data for one (metric, l): N,label,mean,median,ci_lo,ci_hi.
// Throws ValidationError listing the available cells when absent.
void emit_plot_data(const ExperimentReport& report, Metric metric, int l, const std::filesystem::path& file);

}  // namespace thematic
