#include "thematic/divergence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "thematic/csv.hpp"
#include "thematic/error.hpp"
#include "thematic/stats.hpp"

namespace thematic {
namespace {

void check_lengths(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw ValidationError(fmt::format("distribution lengths differ ({} vs {})", p.size(), q.size()));
}

const std::vector<std::string> kRecordHeader{"doc_id", "label", "l", "N", "d_ch", "d_e", "d_se"};

template <class T>
T parse_number(const std::string& text, std::size_t line, const char* what) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  if constexpr (std::is_floating_point_v<T>) {
    // libstdc++ 11 lacks floating from_chars; strtod is locale-bound but the
    // CLI never changes LC_NUMERIC.
    char* end = nullptr;
    value = std::strtod(first, &end);
    if (text.empty() || end != last) throw ParseError(fmt::format("bad {} '{}'", what, text), line);
  } else {
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ParseError(fmt::format("bad {} '{}'", what, text), line);
  }
  return value;
}

}  // namespace

double chebyshev(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q);
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) d = std::max(d, std::fabs(p[i] - q[i]));
  return d;
}

double squared_euclidean(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q);
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = p[i] - q[i];
    d += diff * diff;
  }
  return d;
}

double euclidean(std::span<const double> p, std::span<const double> q) { return std::sqrt(squared_euclidean(p, q)); }

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::ch: return "ch";
    case Metric::e: return "e";
    case Metric::se: return "se";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view text) {
  if (text == "ch") return Metric::ch;
  if (text == "e") return Metric::e;
  if (text == "se") return Metric::se;
  return std::nullopt;
}

double DivergenceRecord::value(Metric m) const noexcept {
  switch (m) {
    case Metric::ch: return d_ch;
    case Metric::e: return d_e;
    case Metric::se: return d_se;
  }
  return 0;
}

DivergenceRecord make_record(std::string doc_id, Label label, int l, int n_topics, std::span<const double> opening,
                             std::span<const double> remainder) {
  DivergenceRecord r;
  r.doc_id = std::move(doc_id);
  r.label = label;
  r.l = l;
  r.n_topics = n_topics;
  r.d_ch = chebyshev(opening, remainder);
  r.d_se = squared_euclidean(opening, remainder);
  r.d_e = std::sqrt(r.d_se);
  return r;
}

ClassAggregate summarize(std::span<const double> values, Label label, Metric metric, int l, int n_topics) {
  ClassAggregate agg;
  agg.label = label;
  agg.metric = metric;
  agg.l = l;
  agg.n_topics = n_topics;
  agg.count = values.size();
  agg.mean = stats::mean(values);
  agg.median = stats::median(values);
  agg.ci_half_width = stats::mean_ci_half_width(values, 0.95);
  return agg;
}

std::vector<ClassAggregate> aggregate(std::span<const DivergenceRecord> records, std::span<const Metric> metrics) {
  // (l, N, label) -> indices; std::map keeps the output order fixed.
  std::map<std::tuple<int, int, int>, std::vector<const DivergenceRecord*>> groups;
  for (const auto& r : records) groups[{r.l, r.n_topics, r.label == Label::fake ? 0 : 1}].push_back(&r);

  std::vector<Metric> order(metrics.begin(), metrics.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  std::vector<ClassAggregate> out;
  std::vector<double> values;
  for (Metric m : order) {
    for (const auto& [key, members] : groups) {
      values.clear();
      for (const auto* r : members) values.push_back(r->value(m));
      const auto [l, n, label] = key;
      out.push_back(summarize(values, label == 0 ? Label::fake : Label::real, m, l, n));
    }
  }
  return out;
}

void write_records_csv(const std::filesystem::path& path, std::span<const DivergenceRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  csv::write_row(out, kRecordHeader);
  for (const auto& r : records) {
    csv::write_row(out, {r.doc_id, std::string(to_string(r.label)), std::to_string(r.l), std::to_string(r.n_topics),
                         fmt::format("{}", r.d_ch), fmt::format("{}", r.d_e), fmt::format("{}", r.d_se)});
  }
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

std::vector<DivergenceRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open records file '{}'", path.string()));
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->fields != kRecordHeader)
    throw ParseError(fmt::format("'{}' does not have the records.csv header", path.string()), 1);

  std::vector<DivergenceRecord> records;
  while (auto rec = reader.next()) {
    const auto& f = rec->fields;
    if (f.size() != kRecordHeader.size())
      throw ParseError(fmt::format("expected {} fields, got {}", kRecordHeader.size(), f.size()), rec->line);
    DivergenceRecord r;
    r.doc_id = f[0];
    auto label = parse_label(f[1]);
    if (!label) throw ParseError(fmt::format("bad label '{}'", f[1]), rec->line);
    r.label = *label;
    r.l = parse_number<int>(f[2], rec->line, "l");
    r.n_topics = parse_number<int>(f[3], rec->line, "N");
    r.d_ch = parse_number<double>(f[4], rec->line, "d_ch");
    r.d_e = parse_number<double>(f[5], rec->line, "d_e");
    r.d_se = parse_number<double>(f[6], rec->line, "d_se");
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace thematic
