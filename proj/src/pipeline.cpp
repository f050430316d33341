#include "thematic/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <tuple>
#include <unordered_set>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "thematic/error.hpp"
#include "thematic/parallel.hpp"
#include "thematic/rng.hpp"

namespace thematic {
namespace {

// Domain tags keep training and inference seed streams apart.
constexpr std::uint64_t kTrainTag = 0x7472616E;  // "tran"
constexpr std::uint64_t kInferTag = 0x696E6672;  // "infr"

std::string utc_now() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())));
}

std::vector<double> values_for(std::span<const DivergenceRecord* const> members, Metric m) {
  std::vector<double> v;
  v.reserve(members.size());
  for (const auto* r : members) v.push_back(r->value(m));
  return v;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (l_values.empty()) throw ConfigError("l_values must not be empty");
  if (n_values.empty()) throw ConfigError("n_values must not be empty");
  if (metrics.empty()) throw ConfigError("metrics must not be empty");
  for (int l : l_values) check_opening_length(l);
  for (int n : n_values)
    if (n < 2) throw ConfigError(fmt::format("number of topics must be >= 2 (got {})", n));
  LdaConfig probe = lda;
  probe.num_topics = n_values.front();
  probe.validate();
}

std::uint64_t training_seed(std::uint64_t master, int n_topics) {
  return derive_seed(master, {kTrainTag, static_cast<std::uint64_t>(n_topics)});
}

std::uint64_t inference_seed(std::uint64_t master, int l, int n_topics, std::string_view doc_id, int segment) {
  return derive_seed(master, {kInferTag, static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(n_topics),
                              fnv1a64(doc_id), static_cast<std::uint64_t>(segment)});
}

SegmentedCorpus segment_corpus(const PreparedCorpus& prepared, int l, const TextResources& res, Normalizer normalizer,
                               unsigned jobs) {
  check_opening_length(l);
  SegmentedCorpus seg;
  seg.l = l;
  seg.counts.l = l;
  for (std::size_t i = 0; i < prepared.docs.size(); ++i) {
    const auto& doc = prepared.docs[i];
    const bool fake = doc.label == Label::fake;
    if (survives_split(doc.sentences.size(), l)) {
      seg.doc_index.push_back(i);
      ++(fake ? seg.counts.analyzed_fake : seg.counts.analyzed_real);
    } else {
      ++(fake ? seg.counts.filtered_fake : seg.counts.filtered_real);
    }
  }

  seg.openings.resize(seg.doc_index.size());
  seg.remainders.resize(seg.doc_index.size());
  const auto split = static_cast<std::size_t>(l);
  parallel_for(seg.doc_index.size(), jobs, [&](std::size_t j) {
    const auto& doc = prepared.docs[seg.doc_index[j]];
    seg.openings[j] =
        to_bow(doc.id, segment_tokens(doc, 0, split, prepared.phrases, res, normalizer), prepared.dictionary);
    seg.remainders[j] = to_bow(doc.id, segment_tokens(doc, split, doc.sentences.size(), prepared.phrases, res, normalizer),
                               prepared.dictionary);
  });
  return seg;
}

std::vector<DivergenceRecord> analyze_cell(const PreparedCorpus& prepared, const SegmentedCorpus& segments,
                                           const LdaModel& model, std::uint64_t master_seed, unsigned jobs) {
  const int n = model.num_topics();
  std::vector<DivergenceRecord> records(segments.doc_index.size());
  parallel_for(records.size(), jobs, [&](std::size_t j) {
    const auto& doc = prepared.docs[segments.doc_index[j]];
    const auto opening = infer_topics(model, segments.openings[j], inference_seed(master_seed, segments.l, n, doc.id, 0));
    const auto remainder =
        infer_topics(model, segments.remainders[j], inference_seed(master_seed, segments.l, n, doc.id, 1));
    records[j] = make_record(doc.id, doc.label, segments.l, n, opening.p, remainder.p);
  });
  return records;
}

const CellResult* ExperimentReport::find_cell(Metric metric, int l, int n_topics) const {
  for (const auto& c : cells)
    if (c.metric == metric && c.l == l && c.n_topics == n_topics) return &c;
  return nullptr;
}

ExperimentReport assemble_report(std::vector<DivergenceRecord> records, std::vector<Metric> metrics,
                                 std::vector<int> l_values, std::vector<int> n_values, stats::Alternative alternative,
                                 stats::VarianceMode variance) {
  if (metrics.empty()) throw ConfigError("metrics must not be empty");
  ExperimentReport report;
  report.metrics = std::move(metrics);
  report.l_values = std::move(l_values);
  report.n_values = std::move(n_values);
  report.alternative = alternative;
  report.variance = variance;
  report.records = std::move(records);

  std::map<std::tuple<int, int>, std::pair<std::vector<const DivergenceRecord*>, std::vector<const DivergenceRecord*>>>
      groups;
  for (const auto& r : report.records) {
    auto& g = groups[{r.l, r.n_topics}];
    (r.label == Label::fake ? g.first : g.second).push_back(&r);
  }

  for (Metric m : report.metrics) {
    for (int l : report.l_values) {
      for (int n : report.n_values) {
        CellResult cell;
        cell.metric = m;
        cell.l = l;
        cell.n_topics = n;
        auto it = groups.find({l, n});
        const std::vector<const DivergenceRecord*> none;
        const auto& fake = it == groups.end() ? none : it->second.first;
        const auto& real = it == groups.end() ? none : it->second.second;
        const auto fv = values_for(fake, m);
        const auto rv = values_for(real, m);
        if (!fv.empty()) cell.fake = summarize(fv, Label::fake, m, l, n);
        if (!rv.empty()) cell.real = summarize(rv, Label::real, m, l, n);

        if (fv.size() < 2 || rv.size() < 2) {
          cell.skip_reason = fmt::format("too few articles (fake={}, real={})", fv.size(), rv.size());
        } else if (stats::sample_variance(fv) == 0 && stats::sample_variance(rv) == 0) {
          cell.skip_reason = "zero variance in both classes";
        } else {
          cell.test = stats::welch_t_test(fv, rv, alternative, variance);
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

std::uint64_t corpus_hash(std::span<const Document> corpus) {
  std::uint64_t h = fnv1a64("");
  for (const auto& d : corpus) {
    h = fnv1a64(d.id, h);
    h = fnv1a64(std::string_view("\x1f"), h);
    h = fnv1a64(to_string(d.label), h);
    h = fnv1a64(std::string_view("\x1f"), h);
    h = fnv1a64(d.text, h);
    h = fnv1a64(std::string_view("\x1e"), h);
  }
  return h;
}

ExperimentReport run_experiment(std::span<const Document> corpus, const ExperimentConfig& config,
                                const TextResources& res, const StageCallback& on_stage) {
  config.validate();
  const std::string started = utc_now();
  const unsigned jobs = std::max(1u, config.jobs);

  auto clock = std::chrono::steady_clock::now();
  auto lap = [&](std::string_view stage) {
    const auto now = std::chrono::steady_clock::now();
    if (on_stage) on_stage(stage, std::chrono::duration<double>(now - clock).count());
    clock = now;
  };

  PreparedCorpus prepared = prepare_corpus(corpus, res, config.textprep, jobs);

  std::vector<std::string> warnings;
  std::vector<SegmentedCorpus> segmented;
  std::vector<FilterCounts> filtered;
  for (int l : config.l_values) {
    segmented.push_back(segment_corpus(prepared, l, res, config.textprep.normalizer, jobs));
    const auto& c = segmented.back().counts;
    filtered.push_back(c);
    if (c.analyzed_fake < 2 || c.analyzed_real < 2)
      warnings.push_back(fmt::format("l={}: only {} fake and {} real articles have at least {} sentences", l,
                                     c.analyzed_fake, c.analyzed_real, l + 1));
  }
  lap("prepare");

  Provenance prov;
  prov.master_seed = config.seed;
  prov.corpus_hash = corpus_hash(corpus);
  prov.dictionary_hash = prepared.dictionary.hash();
  prov.vocab_size = prepared.dictionary.size();
  prov.documents = corpus.size();
  prov.started_at = started;

  // Models are independent single-threaded jobs; each lands in its own slot.
  std::vector<LdaConfig> lda_configs;
  for (int n : config.n_values) {
    LdaConfig lda = config.lda;
    lda.num_topics = n;
    lda.seed = training_seed(config.seed, n);
    prov.training_seeds[n] = lda.seed;
    if (prepared.dictionary.size() < static_cast<std::size_t>(n))
      warnings.push_back(fmt::format("N={} exceeds the vocabulary size {}", n, prepared.dictionary.size()));
    lda_configs.push_back(lda);
  }
  std::vector<std::optional<LdaModel>> models(lda_configs.size());
  parallel_for(lda_configs.size(), jobs,
               [&](std::size_t i) { models[i] = train_lda(prepared.bows, prepared.dictionary, lda_configs[i]); });
  lap("train");

  // Records ordered by (l, N) regardless of the order N is processed in.
  std::map<std::pair<int, int>, std::vector<DivergenceRecord>> by_cell;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const int n = config.n_values[i];
    for (const auto& seg : segmented) by_cell[{seg.l, n}] = analyze_cell(prepared, seg, *models[i], config.seed, jobs);
    models[i].reset();
    lap(fmt::format("infer N={}", n));
  }

  std::vector<DivergenceRecord> records;
  for (int l : config.l_values)
    for (int n : config.n_values) {
      auto& cell = by_cell[{l, n}];
      records.insert(records.end(), std::make_move_iterator(cell.begin()), std::make_move_iterator(cell.end()));
    }

  ExperimentReport report = assemble_report(std::move(records), config.metrics, config.l_values, config.n_values,
                                            config.alternative, config.variance);
  report.filtered = std::move(filtered);
  prov.warnings = std::move(warnings);
  prov.finished_at = utc_now();
  lap("aggregate");
  report.provenance = std::move(prov);
  return report;
}

std::vector<ClassRanking> rank_articles(std::span<const DivergenceRecord> records, Metric metric, std::size_t k) {
  std::vector<ClassRanking> out;
  for (Label label : {Label::fake, Label::real}) {
    std::vector<RankedArticle> members;
    for (const auto& r : records)
      if (r.label == label) members.push_back({r.doc_id, r.value(metric)});
    std::sort(members.begin(), members.end(),
              [](const RankedArticle& a, const RankedArticle& b) { return a.doc_id < b.doc_id; });

    ClassRanking ranking;
    ranking.label = label;
    const std::size_t take = std::min(k, members.size());

    auto desc = members;
    std::stable_sort(desc.begin(), desc.end(),
                     [](const RankedArticle& a, const RankedArticle& b) { return a.score > b.score; });
    ranking.most.assign(desc.begin(), desc.begin() + static_cast<std::ptrdiff_t>(take));

    auto asc = std::move(members);
    std::stable_sort(asc.begin(), asc.end(),
                     [](const RankedArticle& a, const RankedArticle& b) { return a.score < b.score; });
    ranking.least.assign(asc.begin(), asc.begin() + static_cast<std::ptrdiff_t>(take));
    out.push_back(std::move(ranking));
  }
  return out;
}

std::pair<std::vector<std::string>, std::vector<std::string>> default_synthetic_vocabulary() {
  return {
      {"football", "stadium", "referee", "goalkeeper", "tournament", "striker", "midfield", "penalty", "league",
       "trophy", "coach", "season", "championship", "athlete", "defender", "playoff", "scoreboard", "halftime",
       "kickoff", "wicket", "marathon", "sprinter", "racket", "umpire", "dugout"},
      {"inflation", "mortgage", "banker", "treasury", "dividend", "portfolio", "currency", "investor", "bond",
       "equity", "budget", "revenue", "deficit", "tariff", "pension", "auditor", "ledger", "broker", "recession",
       "subsidy", "commodity", "bailout", "invoice", "creditor", "payroll"},
  };
}

std::vector<Document> make_synthetic(std::size_t n_per_class, std::size_t sentences_per_doc,
                                     std::span<const std::string> vocab_a, std::span<const std::string> vocab_b,
                                     std::uint64_t seed) {
  if (vocab_a.size() < 20 || vocab_b.size() < 20)
    throw ValidationError(
        fmt::format("synthetic vocabularies need at least 20 words each (got {} and {})", vocab_a.size(), vocab_b.size()));
  if (sentences_per_doc < 7)
    throw ValidationError(fmt::format("synthetic articles need at least 7 sentences (got {})", sentences_per_doc));
  {
    std::unordered_set<std::string_view> a(vocab_a.begin(), vocab_a.end());
    for (const auto& w : vocab_b)
      if (a.contains(w)) throw ValidationError(fmt::format("synthetic vocabularies overlap on '{}'", w));
  }

  constexpr std::size_t kShiftAfter = 5;
  constexpr std::uint32_t kMinWords = 8;
  constexpr std::uint32_t kWordSpread = 5;  // 8..12 words per sentence

  Xoshiro256 rng(seed);
  auto sentence = [&](std::span<const std::string> vocab) {
    const std::uint32_t len = kMinWords + rng.uniform_below(kWordSpread);
    std::string s;
    for (std::uint32_t i = 0; i < len; ++i) {
      std::string word = vocab[rng.uniform_below(static_cast<std::uint32_t>(vocab.size()))];
      if (i == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
      else s.push_back(' ');
      s += word;
    }
    s.push_back('.');
    return s;
  };

  std::vector<Document> docs;
  docs.reserve(2 * n_per_class);
  const int width = static_cast<int>(std::to_string(n_per_class).size());
  for (std::size_t i = 0; i < n_per_class; ++i) {
    for (Label label : {Label::fake, Label::real}) {
      const bool first_is_a = rng.uniform_below(2) == 0;
      const auto primary = first_is_a ? vocab_a : vocab_b;
      const auto other = first_is_a ? vocab_b : vocab_a;
      Document doc;
      doc.id = fmt::format("synth-{}-{:0{}}", to_string(label), i, width);
      doc.label = label;
      for (std::size_t s = 0; s < sentences_per_doc; ++s) {
        const bool shifted = label == Label::fake && s >= kShiftAfter;
        if (s) doc.text.push_back(' ');
        doc.text += sentence(shifted ? other : primary);
      }
      docs.push_back(std::move(doc));
    }
  }
  return docs;
}

}  // namespace thematic
