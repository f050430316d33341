#include "thematic/report.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "thematic/csv.hpp"
#include "thematic/error.hpp"
#include "thematic/stats.hpp"

namespace thematic {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::string full(double v) { return fmt::format("{}", v); }

std::string na(std::string_view reason) { return fmt::format("NA({})", reason); }

std::string aggregation_label(const TableSpec& spec, const ExperimentReport& report) {
  const std::string n = spec.n_topics ? fmt::format("N={}", *spec.n_topics)
                                      : fmt::format("N=pooled over {{{}}}", fmt::join(report.n_values, ","));
  return fmt::format("l={}; {}; test={} {}", spec.l, n, to_string(report.variance),
                     report.alternative == stats::Alternative::fake_greater ? "one-tailed (fake > real)"
                                                                            : "two-sided");
}

// Per-class metric values for the table aggregation.
std::pair<std::vector<double>, std::vector<double>> table_samples(const ExperimentReport& report,
                                                                  const TableSpec& spec, Metric m) {
  std::pair<std::vector<double>, std::vector<double>> out;
  for (const auto& r : report.records) {
    if (r.l != spec.l) continue;
    if (spec.n_topics && r.n_topics != *spec.n_topics) continue;
    if (!spec.n_topics && std::find(report.n_values.begin(), report.n_values.end(), r.n_topics) == report.n_values.end())
      continue;
    (r.label == Label::fake ? out.first : out.second).push_back(r.value(m));
  }
  return out;
}

std::string metric_column(Metric m) {
  switch (m) {
    case Metric::ch: return "D_Ch";
    case Metric::e: return "D_E";
    case Metric::se: return "D_SE";
  }
  return "?";
}

}  // namespace

std::string format_sig4(double value) { return fmt::format("{:.4g}", value); }

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_records_csv(dir / "records.csv", report.records);

  {
    auto out = open_output(dir / "aggregates.csv");
    csv::write_row(out, {"label", "metric", "l", "N", "count", "mean", "median", "ci_half_width"});
    for (const auto& cell : report.cells) {
      for (const auto* agg : {&cell.fake, &cell.real}) {
        if (!*agg) continue;
        const auto& a = **agg;
        csv::write_row(out, {std::string(to_string(a.label)), std::string(to_string(a.metric)), std::to_string(a.l),
                             std::to_string(a.n_topics), std::to_string(a.count), full(a.mean), full(a.median),
                             full(a.ci_half_width)});
      }
    }
  }
  {
    auto out = open_output(dir / "tests.csv");
    csv::write_row(out, {"metric", "l", "N", "n_f", "n_r", "t", "df", "p", "alternative", "variance", "status"});
    for (const auto& cell : report.cells) {
      const std::string nf = cell.fake ? std::to_string(cell.fake->count) : "0";
      const std::string nr = cell.real ? std::to_string(cell.real->count) : "0";
      if (cell.test) {
        const auto& t = *cell.test;
        csv::write_row(out, {std::string(to_string(cell.metric)), std::to_string(cell.l), std::to_string(cell.n_topics),
                             nf, nr, full(t.t), full(t.df), full(t.p), std::string(to_string(t.alternative)),
                             std::string(to_string(t.variance)), "ok"});
      } else {
        csv::write_row(out, {std::string(to_string(cell.metric)), std::to_string(cell.l), std::to_string(cell.n_topics),
                             nf, nr, "", "", "", std::string(to_string(report.alternative)),
                             std::string(to_string(report.variance)), "skipped: " + cell.skip_reason});
      }
    }
  }
  {
    auto out = open_output(dir / "filtered.csv");
    csv::write_row(out, {"l", "analyzed_fake", "analyzed_real", "filtered_fake", "filtered_real"});
    for (const auto& f : report.filtered)
      csv::write_row(out, {std::to_string(f.l), std::to_string(f.analyzed_fake), std::to_string(f.analyzed_real),
                           std::to_string(f.filtered_fake), std::to_string(f.filtered_real)});
  }
}

void emit_tables(const ExperimentReport& report, const std::filesystem::path& dir, const TableSpec& spec) {
  if (report.metrics.empty()) throw ValidationError("report has no metrics to tabulate");
  if (std::find(report.l_values.begin(), report.l_values.end(), spec.l) == report.l_values.end())
    throw ValidationError(fmt::format("table l={} is not in the report (available: {})", spec.l,
                                      fmt::join(report.l_values, ",")));
  if (spec.n_topics &&
      std::find(report.n_values.begin(), report.n_values.end(), *spec.n_topics) == report.n_values.end())
    throw ValidationError(fmt::format("table N={} is not in the report (available: {})", *spec.n_topics,
                                      fmt::join(report.n_values, ",")));
  std::filesystem::create_directories(dir);
  const std::string aggregation = aggregation_label(spec, report);

  {
    auto out = open_output(dir / "table2.csv");
    out << "# p-values; aggregation: " << aggregation << '\n';
    std::vector<std::string> header{"dataset"};
    for (Metric m : report.metrics) header.push_back("p_" + metric_column(m));
    csv::write_row(out, header);

    std::vector<std::string> row{spec.dataset};
    for (Metric m : report.metrics) {
      const auto [fake, real] = table_samples(report, spec, m);
      if (fake.size() < 2 || real.size() < 2) {
        row.push_back(na(fmt::format("too few articles (fake={}, real={})", fake.size(), real.size())));
      } else if (stats::sample_variance(fake) == 0 && stats::sample_variance(real) == 0) {
        row.push_back(na("zero variance in both classes"));
      } else {
        row.push_back(format_sig4(stats::welch_t_test(fake, real, report.alternative, report.variance).p));
      }
    }
    csv::write_row(out, row);
  }
  {
    auto out = open_output(dir / "table3.csv");
    out << "# mean and median deviations; aggregation: " << aggregation << '\n';
    csv::write_row(out, {"dataset", "metric", "mean_fake", "mean_real", "median_fake", "median_real", "fake_greater"});
    for (Metric m : report.metrics) {
      const auto [fake, real] = table_samples(report, spec, m);
      std::vector<std::string> row{spec.dataset, metric_column(m)};
      auto cell = [&](const std::vector<double>& v, double (*f)(std::span<const double>)) {
        return v.empty() ? na("no articles") : format_sig4(f(v));
      };
      row.push_back(cell(fake, stats::mean));
      row.push_back(cell(real, stats::mean));
      row.push_back(cell(fake, stats::median));
      row.push_back(cell(real, stats::median));
      // Direction on full precision, never on the rounded strings.
      row.push_back(fake.empty() || real.empty() ? na("no articles")
                                                 : (stats::mean(fake) > stats::mean(real) ? "yes" : "no"));
      csv::write_row(out, row);
    }
  }
}

void emit_plot_data(const ExperimentReport& report, Metric metric, int l, const std::filesystem::path& file) {
  const bool has_metric = std::find(report.metrics.begin(), report.metrics.end(), metric) != report.metrics.end();
  const bool has_l = std::find(report.l_values.begin(), report.l_values.end(), l) != report.l_values.end();
  if (!has_metric || !has_l) {
    std::vector<std::string> metrics;
    for (Metric m : report.metrics) metrics.emplace_back(to_string(m));
    throw ValidationError(fmt::format("no cells for metric={} l={}; available metrics: {}; available l: {}",
                                      to_string(metric), l, fmt::join(metrics, ","), fmt::join(report.l_values, ",")));
  }

  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  auto out = open_output(file);
  csv::write_row(out, {"N", "label", "mean", "median", "ci_lo", "ci_hi"});
  for (int n : report.n_values) {
    const CellResult* cell = report.find_cell(metric, l, n);
    if (!cell) continue;
    for (const auto* agg : {&cell->fake, &cell->real}) {
      if (!*agg) continue;
      const auto& a = **agg;
      csv::write_row(out, {std::to_string(n), std::string(to_string(a.label)), full(a.mean), full(a.median),
                           full(a.mean - a.ci_half_width), full(a.mean + a.ci_half_width)});
    }
  }
}

}  // namespace thematic
