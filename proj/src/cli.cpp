#include "thematic/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "thematic/config.hpp"
#include "thematic/corpus.hpp"
#include "thematic/csv.hpp"
#include "thematic/error.hpp"
#include "thematic/parallel.hpp"
#include "thematic/pipeline.hpp"
#include "thematic/report.hpp"
#include "thematic/topicmodel.hpp"

namespace thematic::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

// Flag -> config key overrides collected from the command line.
struct Overrides {
  std::vector<std::pair<std::string, CLI::Option*>> bindings;
  std::map<std::string, std::string> values;

  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto& slot = values[key];
    bindings.emplace_back(key, app->add_option(flag, slot, help));
  }

  void apply(Config& config) const {
    for (const auto& [key, opt] : bindings)
      if (opt->count() > 0) config.set(key, values.at(key), opt->get_name());
  }
};

struct Invocation {
  std::string command;
  std::string config_path;
  Overrides overrides;

  // Defaults, then the config file, then THEMATIC_* variables, then flags.
  Config resolve() const {
    Config config;
    if (!config_path.empty()) config.load_file(config_path);
    config.apply_env();
    overrides.apply(config);
    return config;
  }
};

// Wall-clock timing and the current stage name for error messages.
class Stages {
 public:
  void begin(std::string name) {
    current_ = std::move(name);
    start_ = std::chrono::steady_clock::now();
  }
  void end() {
    timings_[current_] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  void record(std::string name, double seconds) { timings_[std::move(name)] += seconds; }
  const std::string& current() const noexcept { return current_; }
  json to_json() const { return json(timings_); }

 private:
  std::string current_ = "startup";
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, double> timings_;
};

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json digest_inputs(const std::vector<fs::path>& paths) {
  json out = json::array();
  for (const auto& p : paths) {
    if (p.empty()) continue;
    std::vector<fs::path> files;
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file()) files.push_back(entry.path());
      std::sort(files.begin(), files.end());
    } else {
      files.push_back(p);
    }
    for (const auto& f : files)
      out.push_back({{"path", f.string()}, {"bytes", fs::file_size(f)}, {"sha256", sha256_file(f)}});
  }
  return out;
}

json manifest_base(const Invocation& inv, const Config& config, const std::vector<fs::path>& inputs,
                   const std::string& started) {
  json config_snapshot = json::object();
  for (const auto& [k, v] : config.values()) config_snapshot[k] = v;
  return {{"tool", "thematic"},
          {"version", std::string(kVersion)},
          {"command", inv.command},
          {"config", config_snapshot},
          {"inputs", digest_inputs(inputs)},
          {"started_at", started}};
}

void write_manifest(const fs::path& dir, json manifest, const Stages& stages) {
  manifest["finished_at"] = utc_now();
  manifest["timings_seconds"] = stages.to_json();
  fs::create_directories(dir);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError(fmt::format("cannot write '{}'", (dir / "manifest.json").string()));
  out << manifest.dump(2) << '\n';
}

json filtered_json(const std::vector<FilterCounts>& filtered) {
  json out = json::array();
  for (const auto& f : filtered)
    out.push_back({{"l", f.l},
                   {"analyzed_fake", f.analyzed_fake},
                   {"analyzed_real", f.analyzed_real},
                   {"filtered_fake", f.filtered_fake},
                   {"filtered_real", f.filtered_real}});
  return out;
}

LoadResult load_input(const Config& config, const fs::path& corpus, std::ostream& err) {
  LoadResult loaded = load_corpus(corpus, config.corpus_format(), config.csv_adapter());
  for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
  if (loaded.documents.empty()) throw ValidationError(fmt::format("corpus '{}' holds no documents", corpus.string()));
  return loaded;
}

TableSpec table_spec(const Config& config, const std::vector<int>& l_values, const std::vector<int>& n_values,
                     const fs::path& corpus) {
  TableSpec spec;
  spec.dataset = config.raw("report.dataset");
  if (spec.dataset.empty()) spec.dataset = corpus.empty() ? "corpus" : corpus.stem().string();
  spec.l = static_cast<int>(config.get_int("report.table_l"));
  check_opening_length(spec.l);
  if (std::find(l_values.begin(), l_values.end(), spec.l) == l_values.end())
    throw ConfigError(fmt::format("report.table_l={} is not among the configured l values ({})", spec.l,
                                  fmt::join(l_values, ",")));
  const auto& table_n = config.raw("report.table_n");
  if (table_n != "pooled") {
    int n = 0;
    try {
      n = std::stoi(table_n);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("report.table_n must be 'pooled' or a topic count (got '{}')", table_n));
    }
    if (std::find(n_values.begin(), n_values.end(), n) == n_values.end())
      throw ConfigError(fmt::format("report.table_n={} is not among the configured N values ({})", n,
                                    fmt::join(n_values, ",")));
    spec.n_topics = n;
  }
  return spec;
}

// records.csv, aggregates.csv, tests.csv, filtered.csv, the two tables and
// one plot file per metric at the table's opening length.
void emit_all(const ExperimentReport& report, const fs::path& out_dir, const TableSpec& spec) {
  write_report(report, out_dir);
  emit_tables(report, out_dir, spec);
  for (Metric m : report.metrics)
    emit_plot_data(report, m, spec.l, out_dir / fmt::format("plot_{}_l{}.csv", to_string(m), spec.l));
}

PreparedCorpus load_prep_dir(const fs::path& dir) {
  PreparedCorpus prep;
  prep.dictionary = Dictionary::load(dir / "dictionary.txt");
  prep.phrases = PhraseTable::load(dir / "phrases.tsv");
  return prep;
}

int cmd_run(const Invocation& inv, const fs::path& corpus, const fs::path& out_dir, std::ostream& out,
            std::ostream& err, Stages& stages) {
  const std::string started = utc_now();
  stages.begin("config");
  const Config config = inv.resolve();
  const ExperimentConfig exp = config.experiment();
  const TableSpec spec = table_spec(config, exp.l_values, exp.n_values, corpus);
  const TextResources res = config.text_resources();
  stages.end();

  stages.begin("load");
  const LoadResult loaded = load_input(config, corpus, err);
  stages.end();

  stages.begin("experiment");
  const ExperimentReport report =
      run_experiment(loaded.documents, exp, res, [&](std::string_view s, double secs) { stages.record(std::string(s), secs); });
  stages.end();

  stages.begin("emit");
  emit_all(report, out_dir, spec);
  stages.end();

  json manifest = manifest_base(inv, config, {corpus, inv.config_path}, started);
  const auto& prov = report.provenance;
  json seeds = {{"master", prov.master_seed}, {"training", json::object()}};
  for (const auto& [n, s] : prov.training_seeds) seeds["training"][std::to_string(n)] = s;
  manifest["seeds"] = seeds;
  manifest["corpus_hash"] = hex64(prov.corpus_hash);
  manifest["dictionary_hash"] = hex64(prov.dictionary_hash);
  manifest["vocab_size"] = prov.vocab_size;
  manifest["documents"] = prov.documents;
  manifest["load_warnings"] = loaded.warnings;
  manifest["warnings"] = prov.warnings;
  manifest["filtered"] = filtered_json(report.filtered);
  write_manifest(out_dir, std::move(manifest), stages);

  for (const auto& w : prov.warnings) err << "warning: " << w << '\n';
  out << fmt::format("analyzed {} documents ({} records) -> {}\n", prov.documents, report.records.size(),
                     out_dir.string());
  return kOk;
}

int cmd_prep(const Invocation& inv, const fs::path& corpus, const fs::path& out_dir, std::ostream& out,
             std::ostream& err, Stages& stages) {
  const std::string started = utc_now();
  stages.begin("config");
  const Config config = inv.resolve();
  const ExperimentConfig exp = config.experiment();
  const TextResources res = config.text_resources();
  stages.end();

  stages.begin("load");
  const LoadResult loaded = load_input(config, corpus, err);
  stages.end();

  stages.begin("prepare");
  const PreparedCorpus prep = prepare_corpus(loaded.documents, res, exp.textprep, exp.jobs);
  stages.end();

  stages.begin("emit");
  fs::create_directories(out_dir);
  prep.dictionary.save(out_dir / "dictionary.txt");
  prep.phrases.save(out_dir / "phrases.tsv");
  write_bow_file(out_dir / "bow.tsv", prep.docs, prep.bows);
  stages.end();

  json manifest = manifest_base(inv, config, {corpus, inv.config_path}, started);
  manifest["corpus_hash"] = hex64(corpus_hash(loaded.documents));
  manifest["dictionary_hash"] = hex64(prep.dictionary.hash());
  manifest["vocab_size"] = prep.dictionary.size();
  manifest["documents"] = loaded.documents.size();
  manifest["phrases"] = prep.phrases.phrases().size();
  manifest["load_warnings"] = loaded.warnings;
  write_manifest(out_dir, std::move(manifest), stages);
  out << fmt::format("prepared {} documents, vocabulary {} -> {}\n", loaded.documents.size(), prep.dictionary.size(),
                     out_dir.string());
  return kOk;
}

int cmd_train(const Invocation& inv, const fs::path& prep_dir, const fs::path& out_dir, std::ostream& out,
              Stages& stages) {
  const std::string started = utc_now();
  stages.begin("config");
  const Config config = inv.resolve();
  const ExperimentConfig exp = config.experiment();
  stages.end();

  stages.begin("load");
  const Dictionary dict = Dictionary::load(prep_dir / "dictionary.txt");
  const std::vector<BowDoc> bows = read_bow_file(prep_dir / "bow.tsv");
  stages.end();

  fs::create_directories(out_dir);
  json seeds = json::object();
  for (int n : exp.n_values) seeds[std::to_string(n)] = training_seed(exp.seed, n);
  stages.begin("train");
  parallel_for(exp.n_values.size(), std::max(1u, exp.jobs), [&](std::size_t i) {
    LdaConfig lda = exp.lda;
    lda.num_topics = exp.n_values[i];
    lda.seed = training_seed(exp.seed, lda.num_topics);
    train_lda(bows, dict, lda).save(out_dir / fmt::format("model_N{}.lda", lda.num_topics));
  });
  stages.end();

  json manifest = manifest_base(inv, config, {prep_dir / "dictionary.txt", prep_dir / "bow.tsv", inv.config_path}, started);
  manifest["seeds"] = {{"master", exp.seed}, {"training", seeds}};
  manifest["dictionary_hash"] = hex64(dict.hash());
  write_manifest(out_dir, std::move(manifest), stages);
  out << fmt::format("trained {} models -> {}\n", exp.n_values.size(), out_dir.string());
  return kOk;
}

int cmd_analyze(const Invocation& inv, const fs::path& corpus, const fs::path& prep_dir, const fs::path& models_dir,
                const fs::path& out_dir, std::ostream& out, std::ostream& err, Stages& stages) {
  const std::string started = utc_now();
  stages.begin("config");
  const Config config = inv.resolve();
  const ExperimentConfig exp = config.experiment();
  const TextResources res = config.text_resources();
  stages.end();

  stages.begin("load");
  const LoadResult loaded = load_input(config, corpus, err);
  PreparedCorpus prep = load_prep_dir(prep_dir);
  stages.end();

  stages.begin("prepare");
  prep.docs.resize(loaded.documents.size());
  for (std::size_t i = 0; i < loaded.documents.size(); ++i) prep.docs[i] = prepare_document(loaded.documents[i], res);
  std::vector<SegmentedCorpus> segmented;
  std::vector<FilterCounts> filtered;
  for (int l : exp.l_values) {
    segmented.push_back(segment_corpus(prep, l, res, exp.textprep.normalizer, exp.jobs));
    filtered.push_back(segmented.back().counts);
  }
  stages.end();

  std::vector<DivergenceRecord> records;
  std::map<std::pair<int, int>, std::vector<DivergenceRecord>> by_cell;
  for (int n : exp.n_values) {
    stages.begin(fmt::format("infer N={}", n));
    const LdaModel model = LdaModel::load(models_dir / fmt::format("model_N{}.lda", n), prep.dictionary);
    for (const auto& seg : segmented) by_cell[{seg.l, n}] = analyze_cell(prep, seg, model, exp.seed, exp.jobs);
    stages.end();
  }
  for (int l : exp.l_values)
    for (int n : exp.n_values) {
      auto& cell = by_cell[{l, n}];
      records.insert(records.end(), cell.begin(), cell.end());
    }

  stages.begin("emit");
  ExperimentReport report = assemble_report(std::move(records), exp.metrics, exp.l_values, exp.n_values,
                                            exp.alternative, exp.variance);
  report.filtered = filtered;
  write_report(report, out_dir);
  stages.end();

  json manifest = manifest_base(inv, config, {corpus, prep_dir / "dictionary.txt", prep_dir / "phrases.tsv",
                                              models_dir, inv.config_path},
                                started);
  manifest["corpus_hash"] = hex64(corpus_hash(loaded.documents));
  manifest["dictionary_hash"] = hex64(prep.dictionary.hash());
  manifest["filtered"] = filtered_json(filtered);
  write_manifest(out_dir, std::move(manifest), stages);
  out << fmt::format("analyzed {} documents ({} records) -> {}\n", loaded.documents.size(), report.records.size(),
                     out_dir.string());
  return kOk;
}

std::vector<FilterCounts> read_filtered(const fs::path& path) {
  std::vector<FilterCounts> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    FilterCounts f;
    char comma;
    std::istringstream row(line);
    if (row >> f.l >> comma >> f.analyzed_fake >> comma >> f.analyzed_real >> comma >> f.filtered_fake >> comma >>
        f.filtered_real)
      out.push_back(f);
  }
  return out;
}

int cmd_report(const Invocation& inv, const fs::path& records_path, const fs::path& out_dir, std::ostream& out,
               Stages& stages) {
  const std::string started = utc_now();
  stages.begin("config");
  const Config config = inv.resolve();
  std::vector<Metric> metrics;
  for (const auto& m : config.get_list("pipeline.metrics")) metrics.push_back(*parse_metric(m));
  if (metrics.empty()) throw ConfigError("pipeline.metrics must not be empty");
  const auto alternative = *stats::parse_alternative(config.raw("pipeline.alternative"));
  const auto variance = *stats::parse_variance_mode(config.raw("pipeline.variance"));
  stages.end();

  stages.begin("load");
  std::vector<DivergenceRecord> records = read_records_csv(records_path);
  if (records.empty()) throw ValidationError(fmt::format("'{}' holds no records", records_path.string()));
  std::set<int> ls, ns;
  for (const auto& r : records) {
    ls.insert(r.l);
    ns.insert(r.n_topics);
  }
  const std::vector<int> l_values(ls.begin(), ls.end());
  const std::vector<int> n_values(ns.begin(), ns.end());
  const TableSpec spec = table_spec(config, l_values, n_values, {});
  stages.end();

  stages.begin("emit");
  ExperimentReport report = assemble_report(std::move(records), metrics, l_values, n_values, alternative, variance);
  report.filtered = read_filtered(records_path.parent_path() / "filtered.csv");
  emit_all(report, out_dir, spec);
  stages.end();

  write_manifest(out_dir, manifest_base(inv, config, {records_path, inv.config_path}, started), stages);
  out << fmt::format("reported {} cells -> {}\n", report.cells.size(), out_dir.string());
  return kOk;
}

int cmd_rank(const Invocation& inv, const fs::path& records_path, const std::string& out_file, std::ostream& out) {
  const Config config = inv.resolve();
  const Metric metric = *parse_metric(config.raw("rank.metric"));
  const auto k = config.get_int("rank.k");
  if (k < 1) throw ConfigError(fmt::format("rank.k must be >= 1 (got {})", k));
  const std::vector<int> l_values = config.get_int_list("pipeline.l_values");
  const std::vector<int> n_values = config.get_int_list("pipeline.n_values");

  const auto records = read_records_csv(records_path);
  std::map<std::pair<int, int>, std::vector<DivergenceRecord>> cells;
  for (const auto& r : records) {
    if (std::find(l_values.begin(), l_values.end(), r.l) == l_values.end()) continue;
    if (std::find(n_values.begin(), n_values.end(), r.n_topics) == n_values.end()) continue;
    cells[{r.l, r.n_topics}].push_back(r);
  }
  if (cells.empty()) throw ValidationError("no records match the requested l and N values");

  std::ofstream file;
  std::ostream* sink = &out;
  if (!out_file.empty()) {
    file.open(out_file, std::ios::binary);
    if (!file) throw IoError(fmt::format("cannot write '{}'", out_file));
    sink = &file;
  }
  csv::write_row(*sink, {"l", "N", "metric", "label", "direction", "rank", "doc_id", "score"});
  for (const auto& [cell, members] : cells) {
    for (const auto& ranking : rank_articles(members, metric, static_cast<std::size_t>(k))) {
      for (const auto* list : {&ranking.most, &ranking.least}) {
        const char* direction = list == &ranking.most ? "most" : "least";
        for (std::size_t i = 0; i < list->size(); ++i)
          csv::write_row(*sink, {std::to_string(cell.first), std::to_string(cell.second),
                                 std::string(to_string(metric)), std::string(to_string(ranking.label)), direction,
                                 std::to_string(i + 1), (*list)[i].doc_id, fmt::format("{}", (*list)[i].score)});
      }
    }
  }
  return kOk;
}

int cmd_synth(const fs::path& out_path, std::size_t n_per_class, std::size_t sentences, std::uint64_t seed,
              std::ostream& out) {
  const auto [a, b] = default_synthetic_vocabulary();
  const auto docs = make_synthetic(n_per_class, sentences, a, b, seed);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw IoError(fmt::format("cannot write '{}'", out_path.string()));
  for (const auto& d : docs)
    file << json{{"id", d.id}, {"label", std::string(to_string(d.label))}, {"text", d.text}}.dump() << '\n';
  out << fmt::format("wrote {} synthetic documents -> {}\n", docs.size(), out_path.string());
  return kOk;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void write_bow_file(const std::filesystem::path& path, std::span<const PreparedDoc> docs, std::span<const BowDoc> bows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  for (std::size_t i = 0; i < bows.size(); ++i) {
    const auto& id = bows[i].doc_id;
    if (id.find_first_of("\t\r\n") != std::string::npos)
      throw ValidationError(fmt::format("document id '{}' contains a tab or line break", id));
    out << id << '\t' << to_string(docs[i].label) << '\t';
    for (std::size_t j = 0; j < bows[i].counts.size(); ++j)
      out << (j ? " " : "") << bows[i].counts[j].id << ':' << bows[i].counts[j].count;
    out << '\n';
  }
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

std::vector<BowDoc> read_bow_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<BowDoc> out;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError("expected doc_id<TAB>label<TAB>entries", lineno);
    BowDoc bow;
    bow.doc_id = line.substr(0, t1);
    std::istringstream entries(line.substr(t2 + 1));
    for (std::string e; entries >> e;) {
      const auto colon = e.find(':');
      try {
        if (colon == std::string::npos) throw std::invalid_argument(e);
        bow.counts.push_back({static_cast<std::uint32_t>(std::stoul(e.substr(0, colon))),
                              static_cast<std::uint32_t>(std::stoul(e.substr(colon + 1)))});
      } catch (const std::logic_error&) {
        throw ParseError(fmt::format("bad entry '{}'", e), lineno);
      }
    }
    out.push_back(std::move(bow));
  }
  return out;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thematic deviation between article openings and remainders, fake vs real.", "thematic"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Invocation inv;
  fs::path corpus, out_dir, prep_dir, models_dir, records_path;
  std::string rank_out;
  std::size_t synth_n = 200, synth_sentences = 10;
  std::uint64_t synth_seed = 42;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", inv.config_path, "config file (flat [section] key = value)");
  };
  auto corpus_opts = [&](CLI::App* sub) {
    sub->add_option("--corpus", corpus, "labeled corpus (file, or directory for --format isot)")->required();
    inv.overrides.bind(sub, "--format", "corpus.format", "jsonl, csv or isot");
  };

  auto* run_cmd = app.add_subcommand("run", "load, preprocess, train, analyze and report in one go");
  common(run_cmd);
  corpus_opts(run_cmd);
  run_cmd->add_option("--out", out_dir, "output directory")->required();
  inv.overrides.bind(run_cmd, "--seed", "pipeline.seed", "master seed");
  inv.overrides.bind(run_cmd, "--jobs", "pipeline.jobs", "worker threads");
  inv.overrides.bind(run_cmd, "--metric", "pipeline.metrics", "comma list of ch,e,se");
  inv.overrides.bind(run_cmd, "--l", "pipeline.l_values", "comma list of opening lengths (1-5)");
  inv.overrides.bind(run_cmd, "--topics", "pipeline.n_values", "comma list of topic counts");
  inv.overrides.bind(run_cmd, "--dataset", "report.dataset", "dataset name for the tables");

  auto* prep_cmd = app.add_subcommand("prep", "corpus -> dictionary, phrases and bag-of-words files");
  common(prep_cmd);
  corpus_opts(prep_cmd);
  prep_cmd->add_option("--out", out_dir, "output directory")->required();
  inv.overrides.bind(prep_cmd, "--jobs", "pipeline.jobs", "worker threads");

  auto* train_cmd = app.add_subcommand("train", "bag-of-words -> one model file per topic count");
  common(train_cmd);
  train_cmd->add_option("--prep", prep_dir, "directory written by 'prep'")->required();
  train_cmd->add_option("--out", out_dir, "output directory for model_N<k>.lda")->required();
  inv.overrides.bind(train_cmd, "--seed", "pipeline.seed", "master seed");
  inv.overrides.bind(train_cmd, "--topics", "pipeline.n_values", "comma list of topic counts");
  inv.overrides.bind(train_cmd, "--jobs", "pipeline.jobs", "models trained in parallel");

  auto* analyze_cmd = app.add_subcommand("analyze", "models + corpus -> records.csv");
  common(analyze_cmd);
  corpus_opts(analyze_cmd);
  analyze_cmd->add_option("--prep", prep_dir, "directory written by 'prep'")->required();
  analyze_cmd->add_option("--models", models_dir, "directory written by 'train'")->required();
  analyze_cmd->add_option("--out", out_dir, "output directory")->required();
  inv.overrides.bind(analyze_cmd, "--seed", "pipeline.seed", "master seed");
  inv.overrides.bind(analyze_cmd, "--jobs", "pipeline.jobs", "worker threads");
  inv.overrides.bind(analyze_cmd, "--l", "pipeline.l_values", "comma list of opening lengths (1-5)");
  inv.overrides.bind(analyze_cmd, "--topics", "pipeline.n_values", "comma list of topic counts");
  inv.overrides.bind(analyze_cmd, "--metric", "pipeline.metrics", "comma list of ch,e,se");

  auto* report_cmd = app.add_subcommand("report", "records.csv -> aggregates, tests, tables and plot data");
  common(report_cmd);
  report_cmd->add_option("--records", records_path, "records.csv")->required();
  report_cmd->add_option("--out", out_dir, "output directory")->required();
  inv.overrides.bind(report_cmd, "--metric", "pipeline.metrics", "comma list of ch,e,se");
  inv.overrides.bind(report_cmd, "--dataset", "report.dataset", "dataset name for the tables");

  auto* rank_cmd = app.add_subcommand("rank", "most and least diverging articles per class");
  common(rank_cmd);
  rank_cmd->add_option("--records", records_path, "records.csv")->required();
  rank_cmd->add_option("--out", rank_out, "output CSV (default: stdout)");
  inv.overrides.bind(rank_cmd, "--metric", "rank.metric", "ch, e or se");
  inv.overrides.bind(rank_cmd, "--k", "rank.k", "articles per class and direction");
  inv.overrides.bind(rank_cmd, "--l", "pipeline.l_values", "opening lengths to rank");
  inv.overrides.bind(rank_cmd, "--topics", "pipeline.n_values", "topic counts to rank");

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic corpus with a known thematic shift (JSONL)");
  synth_cmd->add_option("--out", out_dir, "output JSONL file")->required();
  synth_cmd->add_option("--n-per-class", synth_n, "articles per class")->capture_default_str();
  synth_cmd->add_option("--sentences", synth_sentences, "sentences per article (>= 7)")->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed, "generator seed")->capture_default_str();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Stages stages;
  try {
    if (run_cmd->parsed()) {
      inv.command = "run";
      return cmd_run(inv, corpus, out_dir, out, err, stages);
    }
    if (prep_cmd->parsed()) {
      inv.command = "prep";
      return cmd_prep(inv, corpus, out_dir, out, err, stages);
    }
    if (train_cmd->parsed()) {
      inv.command = "train";
      return cmd_train(inv, prep_dir, out_dir, out, stages);
    }
    if (analyze_cmd->parsed()) {
      inv.command = "analyze";
      return cmd_analyze(inv, corpus, prep_dir, models_dir, out_dir, out, err, stages);
    }
    if (report_cmd->parsed()) {
      inv.command = "report";
      return cmd_report(inv, records_path, out_dir, out, stages);
    }
    if (rank_cmd->parsed()) {
      inv.command = "rank";
      return cmd_rank(inv, records_path, rank_out, out);
    }
    if (synth_cmd->parsed()) return cmd_synth(out_dir, synth_n, synth_sentences, synth_seed, out);
  } catch (const ConfigError& e) {
    err << fmt::format("error [{}]: {}\n", stages.current(), e.what());
    return kUsage;
  } catch (const IoError& e) {
    err << fmt::format("error [{}]: {}\n", stages.current(), e.what());
    return kInputData;
  } catch (const ParseError& e) {
    err << fmt::format("error [{}]: {}\n", stages.current(), e.what());
    return kInputData;
  } catch (const ValidationError& e) {
    err << fmt::format("error [{}]: {}\n", stages.current(), e.what());
    return kInputData;
  } catch (const std::exception& e) {
    err << fmt::format("internal error [{}]: {}\n", stages.current(), e.what());
    return kInternal;
  }
  return kUsage;
}

}  // namespace thematic::cli
