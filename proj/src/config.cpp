#include "thematic/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "thematic/error.hpp"

namespace thematic {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.emplace_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
bool parse_integral(std::string_view s, T& out) {
  s = trim(s);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
  const std::string text(trim(s));
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

const KeySpec* find_spec(std::string_view key) {
  for (const auto& spec : config_schema())
    if (spec.key == key) return &spec;
  return nullptr;
}

void check_value(const KeySpec& spec, std::string_view value, std::string_view source) {
  auto fail = [&](std::string_view expected) {
    throw ConfigError(fmt::format("{}: '{}' for {} is not {}", source, value, spec.key, expected));
  };
  auto check_choice = [&](std::string_view v) {
    if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
      std::string allowed;
      for (auto c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + std::string(c);
      fail(fmt::format("one of {{{}}}", allowed));
    }
  };
  switch (spec.type) {
    case KeyType::string: break;
    case KeyType::integer: {
      std::int64_t v;
      if (!parse_integral(value, v)) fail("an integer");
      break;
    }
    case KeyType::uint64: {
      std::uint64_t v;
      if (!parse_integral(value, v)) fail("an unsigned 64-bit integer");
      break;
    }
    case KeyType::real: {
      double v;
      if (!parse_real(value, v)) fail("a number");
      break;
    }
    case KeyType::real_or_auto: {
      double v;
      if (trim(value) != "auto" && !parse_real(value, v)) fail("a number or 'auto'");
      break;
    }
    case KeyType::int_list: {
      for (const auto& item : split_list(value)) {
        int v;
        if (!parse_integral(item, v)) fail("a comma-separated integer list");
      }
      break;
    }
    case KeyType::choice: check_choice(trim(value)); break;
    case KeyType::choice_list:
      for (const auto& item : split_list(value)) check_choice(item);
      break;
  }
}

}  // namespace

const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema{
      {"corpus.format", KeyType::choice, "jsonl", {"jsonl", "csv", "isot"}, "input layout"},
      {"corpus.id_column", KeyType::string, "id", {}, "CSV column holding the article id (empty: row number)"},
      {"corpus.label_column", KeyType::string, "label", {}, "CSV column holding fake/real"},
      {"corpus.text_column", KeyType::string, "text", {}, "CSV column holding the article body"},

      {"textprep.normalizer", KeyType::choice, "stem", {"none", "stem"}, "token normalizer"},
      {"textprep.phrase_min_count", KeyType::integer, "5", {}, "minimum pair count for a bigram"},
      {"textprep.phrase_threshold", KeyType::real, "10", {}, "bigram score threshold"},
      {"textprep.no_below", KeyType::integer, "0", {}, "drop tokens in fewer documents (0 = off)"},
      {"textprep.no_above", KeyType::real, "1", {}, "drop tokens in a larger document fraction (1 = off)"},
      {"textprep.stopwords_file", KeyType::string, "", {}, "stopword override list"},
      {"textprep.abbreviations_file", KeyType::string, "", {}, "abbreviation override list"},

      {"topicmodel.alpha", KeyType::real_or_auto, "auto", {}, "document-topic prior (auto = 1/N)"},
      {"topicmodel.beta", KeyType::real, "0.01", {}, "topic-word prior"},
      {"topicmodel.train_iters", KeyType::integer, "400", {}, "training sweeps"},
      {"topicmodel.infer_iters", KeyType::integer, "100", {}, "inference sweeps"},
      {"topicmodel.burn_in", KeyType::integer, "50", {}, "inference sweeps excluded from averaging"},

      {"pipeline.l_values", KeyType::int_list, "1,2,3,4,5", {}, "opening lengths in sentences"},
      {"pipeline.n_values", KeyType::int_list, "10,20,30,40,50,100,150,200", {}, "topic counts"},
      {"pipeline.metrics", KeyType::choice_list, "ch,e,se", {"ch", "e", "se"}, "divergence metrics"},
      {"pipeline.seed", KeyType::uint64, "42", {}, "master seed"},
      {"pipeline.jobs", KeyType::integer, "1", {}, "worker threads"},
      {"pipeline.alternative", KeyType::choice, "fake_greater", {"fake_greater", "two_sided"}, "t-test alternative"},
      {"pipeline.variance", KeyType::choice, "welch", {"welch", "pooled"}, "t-test variance model"},

      {"report.dataset", KeyType::string, "", {}, "dataset name in tables (empty: corpus file name)"},
      {"report.table_l", KeyType::integer, "5", {}, "opening length used by the summary tables"},
      {"report.table_n", KeyType::string, "pooled", {}, "topic count used by the summary tables, or 'pooled'"},

      {"rank.k", KeyType::integer, "5", {}, "articles per class and direction"},
      {"rank.metric", KeyType::choice, "ch", {"ch", "e", "se"}, "ranking metric"},
  };
  return schema;
}

std::string env_var_name(std::string_view key) {
  std::string out = "THEMATIC_";
  for (char c : key) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

Config::Config() {
  for (const auto& spec : config_schema()) values_.emplace(std::string(spec.key), std::string(spec.default_value));
}

void Config::set(std::string_view key, std::string_view value, std::string_view source) {
  const KeySpec* spec = find_spec(key);
  if (!spec) throw ConfigError(fmt::format("{}: unknown config key '{}'", source, key));
  check_value(*spec, value, source);
  values_[std::string(key)] = std::string(trim(value));
}

void Config::load_text(std::string_view text, std::string_view source) {
  std::string section;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const std::string where = fmt::format("{}:{}", source, lineno);
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(fmt::format("{}: malformed section header", where));
      section = std::string(trim(s.substr(1, s.size() - 2)));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("{}: expected 'name = value'", where));
    const auto name = trim(s.substr(0, eq));
    if (section.empty()) throw ConfigError(fmt::format("{}: key '{}' outside any [section]", where, name));
    set(section + "." + std::string(name), s.substr(eq + 1), where);
  }
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path.string());
}

void Config::apply_env(const std::function<const char*(const char*)>& lookup) {
  for (const auto& spec : config_schema()) {
    const std::string var = env_var_name(spec.key);
    const char* value = lookup ? lookup(var.c_str()) : std::getenv(var.c_str());
    if (value) set(spec.key, value, var);
  }
}

const std::string& Config::raw(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
  return it->second;
}

std::int64_t Config::get_int(std::string_view key) const {
  std::int64_t v = 0;
  parse_integral(raw(key), v);
  return v;
}

std::uint64_t Config::get_uint64(std::string_view key) const {
  std::uint64_t v = 0;
  parse_integral(raw(key), v);
  return v;
}

double Config::get_real(std::string_view key) const {
  double v = 0;
  parse_real(raw(key), v);
  return v;
}

std::vector<int> Config::get_int_list(std::string_view key) const {
  std::vector<int> out;
  for (const auto& item : split_list(raw(key))) {
    int v = 0;
    parse_integral(item, v);
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> Config::get_list(std::string_view key) const { return split_list(raw(key)); }

std::string Config::dump() const {
  std::string out;
  std::string section;
  for (const auto& [key, value] : values_) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      out += fmt::format("{}[{}]\n", out.empty() ? "" : "\n", sec);
      section = sec;
    }
    out += fmt::format("{} = {}\n", key.substr(dot + 1), value);
  }
  return out;
}

ExperimentConfig Config::experiment() const {
  ExperimentConfig cfg;
  cfg.l_values = get_int_list("pipeline.l_values");
  cfg.n_values = get_int_list("pipeline.n_values");
  cfg.metrics.clear();
  for (const auto& m : get_list("pipeline.metrics")) cfg.metrics.push_back(*parse_metric(m));
  cfg.seed = get_uint64("pipeline.seed");
  const auto jobs = get_int("pipeline.jobs");
  if (jobs < 1) throw ConfigError(fmt::format("pipeline.jobs must be >= 1 (got {})", jobs));
  cfg.jobs = static_cast<unsigned>(jobs);
  cfg.alternative = *stats::parse_alternative(raw("pipeline.alternative"));
  cfg.variance = *stats::parse_variance_mode(raw("pipeline.variance"));

  if (raw("topicmodel.alpha") != "auto") cfg.lda.alpha = get_real("topicmodel.alpha");
  cfg.lda.beta = get_real("topicmodel.beta");
  cfg.lda.train_iters = static_cast<int>(get_int("topicmodel.train_iters"));
  cfg.lda.infer_iters = static_cast<int>(get_int("topicmodel.infer_iters"));
  cfg.lda.burn_in = static_cast<int>(get_int("topicmodel.burn_in"));

  cfg.textprep.normalizer = *parse_normalizer(raw("textprep.normalizer"));
  const auto min_count = get_int("textprep.phrase_min_count");
  if (min_count < 1) throw ConfigError("textprep.phrase_min_count must be >= 1");
  cfg.textprep.phrase_min_count = static_cast<std::size_t>(min_count);
  cfg.textprep.phrase_threshold = get_real("textprep.phrase_threshold");
  if (!(cfg.textprep.phrase_threshold > 0)) throw ConfigError("textprep.phrase_threshold must be > 0");
  const auto no_below = get_int("textprep.no_below");
  if (no_below < 0) throw ConfigError("textprep.no_below must be >= 0");
  cfg.textprep.dictionary.no_below = static_cast<std::size_t>(no_below);
  cfg.textprep.dictionary.no_above = get_real("textprep.no_above");
  if (!(cfg.textprep.dictionary.no_above > 0 && cfg.textprep.dictionary.no_above <= 1))
    throw ConfigError("textprep.no_above must be in (0, 1]");

  cfg.validate();
  return cfg;
}

CsvAdapter Config::csv_adapter() const {
  CsvAdapter a;
  a.id_column = raw("corpus.id_column");
  a.label_column = raw("corpus.label_column");
  a.text_column = raw("corpus.text_column");
  a.id_prefix = "row-";
  return a;
}

CorpusFormat Config::corpus_format() const { return *parse_corpus_format(raw("corpus.format")); }

TextResources Config::text_resources() const {
  TextResources res;
  if (const auto& f = raw("textprep.stopwords_file"); !f.empty()) res.stopwords = load_word_list(f);
  if (const auto& f = raw("textprep.abbreviations_file"); !f.empty()) res.abbreviations = load_word_list(f);
  return res;
}

}  // namespace thematic
