#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thematic/corpus.hpp"

namespace thematic {

// Maximum coordinate-wise absolute difference. Throws ValidationError when
// the lengths differ.
double chebyshev(std::span<const double> p, std::span<const double> q);

// sqrt of squared_euclidean.
double euclidean(std::span<const double> p, std::span<const double> q);

// Sum of squared coordinate differences.
double squared_euclidean(std::span<const double> p, std::span<const double> q);

enum class Metric { ch, e, se };

inline constexpr std::array<Metric, 3> kAllMetrics{Metric::ch, Metric::e, Metric::se};

std::string_view to_string(Metric m) noexcept;
std::optional<Metric> parse_metric(std::string_view text);

// Per-article divergences between opening and remainder distributions for
// one (l, N) cell.
struct DivergenceRecord {
  std::string doc_id;
  Label label = Label::real;
  int l = 0;
  int n_topics = 0;
  double d_ch = 0;
  double d_e = 0;
  double d_se = 0;

  double value(Metric m) const noexcept;
};

DivergenceRecord make_record(std::string doc_id, Label label, int l, int n_topics, std::span<const double> opening,
                             std::span<const double> remainder);

struct ClassAggregate {
  Label label = Label::real;
  Metric metric = Metric::ch;
  int l = 0;
  int n_topics = 0;
  double mean = 0;
  double median = 0;
  std::size_t count = 0;
  // Half-width of the 95% confidence interval for the mean.
  double ci_half_width = 0;
};

// Aggregate of one sample of metric values.
ClassAggregate summarize(std::span<const double> values, Label label, Metric metric, int l, int n_topics);

// Groups records by (metric, l, N, label), ordered by metric, l, N, then
// fake before real. Only the requested metrics are emitted.
std::vector<ClassAggregate> aggregate(std::span<const DivergenceRecord> records,
                                      std::span<const Metric> metrics = kAllMetrics);

// records.csv: doc_id,label,l,N,d_ch,d_e,d_se with shortest round-trip
// floats.
void write_records_csv(const std::filesystem::path& path, std::span<const DivergenceRecord> records);
std::vector<DivergenceRecord> read_records_csv(const std::filesystem::path& path);

}  // namespace thematic
