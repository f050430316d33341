#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thematic/corpus.hpp"
#include "thematic/divergence.hpp"
#include "thematic/stats.hpp"
#include "thematic/textprep.hpp"
#include "thematic/topicmodel.hpp"

namespace thematic {

struct ExperimentConfig {
  std::vector<int> l_values{1, 2, 3, 4, 5};
  std::vector<int> n_values{10, 20, 30, 40, 50, 100, 150, 200};
  // Template for every model; num_topics and seed are set per N.
  LdaConfig lda;
  std::vector<Metric> metrics{kAllMetrics.begin(), kAllMetrics.end()};
  std::uint64_t seed = 42;
  TextPrepConfig textprep;
  stats::Alternative alternative = stats::Alternative::fake_greater;
  stats::VarianceMode variance = stats::VarianceMode::welch;
  unsigned jobs = 1;

  // Throws ConfigError for l outside 1..5, N < 2, or empty lists.
  void validate() const;
};

// Sub-seed of the model trained with N topics.
std::uint64_t training_seed(std::uint64_t master, int n_topics);

// Sub-seed for inferring one segment (0 = opening, 1 = remainder).
std::uint64_t inference_seed(std::uint64_t master, int l, int n_topics, std::string_view doc_id, int segment);

struct FilterCounts {
  int l = 0;
  std::size_t analyzed_fake = 0;
  std::size_t analyzed_real = 0;
  std::size_t filtered_fake = 0;
  std::size_t filtered_real = 0;
};

// Opening/remainder bags of words of every document surviving the split
// at opening length l, in corpus order.
struct SegmentedCorpus {
  int l = 0;
  FilterCounts counts;
  std::vector<std::size_t> doc_index;  // into PreparedCorpus::docs
  std::vector<BowDoc> openings;
  std::vector<BowDoc> remainders;
};

SegmentedCorpus segment_corpus(const PreparedCorpus& prepared, int l, const TextResources& res,
                               Normalizer normalizer, unsigned jobs = 1);

// Infers both segments of every article against `model` and computes the
// three divergences. Records come back in corpus order.
std::vector<DivergenceRecord> analyze_cell(const PreparedCorpus& prepared, const SegmentedCorpus& segments,
                                           const LdaModel& model, std::uint64_t master_seed, unsigned jobs = 1);

// One (metric, l, N) cell of the grid.
struct CellResult {
  Metric metric = Metric::ch;
  int l = 0;
  int n_topics = 0;
  std::optional<ClassAggregate> fake;
  std::optional<ClassAggregate> real;
  std::optional<stats::TTestResult> test;
  // Non-empty iff `test` is absent.
  std::string skip_reason;
};

struct Provenance {
  std::uint64_t master_seed = 0;
  std::uint64_t corpus_hash = 0;
  std::uint64_t dictionary_hash = 0;
  std::size_t vocab_size = 0;
  std::size_t documents = 0;
  std::map<int, std::uint64_t> training_seeds;
  std::vector<std::string> warnings;
  std::string started_at;
  std::string finished_at;
};

struct ExperimentReport {
  std::vector<Metric> metrics;
  std::vector<int> l_values;
  std::vector<int> n_values;
  stats::Alternative alternative = stats::Alternative::fake_greater;
  stats::VarianceMode variance = stats::VarianceMode::welch;
  // Ordered by metric, l, N.
  std::vector<CellResult> cells;
  // Ordered by l, N, then corpus order.
  std::vector<DivergenceRecord> records;
  std::vector<FilterCounts> filtered;
  Provenance provenance;

  const CellResult* find_cell(Metric metric, int l, int n_topics) const;
};

// Builds every (metric, l, N) cell from per-article records: class
// aggregates plus the t-test, or a skip reason when a class has fewer than
// two articles or both classes have zero variance.
ExperimentReport assemble_report(std::vector<DivergenceRecord> records, std::vector<Metric> metrics,
                                 std::vector<int> l_values, std::vector<int> n_values,
                                 stats::Alternative alternative = stats::Alternative::fake_greater,
                                 stats::VarianceMode variance = stats::VarianceMode::welch);

// Hash of (id, label, text) over the corpus, in order.
std::uint64_t corpus_hash(std::span<const Document> corpus);

// Called after each stage of run_experiment with its wall-clock seconds.
using StageCallback = std::function<void(std::string_view stage, double seconds)>;

// Runs the full grid: one model per N on the whole corpus, shared across
// every opening length.
ExperimentReport run_experiment(std::span<const Document> corpus, const ExperimentConfig& config,
                                const TextResources& res = {}, const StageCallback& on_stage = {});

struct RankedArticle {
  std::string doc_id;
  double score = 0;
};

struct ClassRanking {
  Label label = Label::fake;
  std::vector<RankedArticle> most;   // highest scores first
  std::vector<RankedArticle> least;  // lowest scores first
};

// Top-k and bottom-k articles per class by `metric`; ties go to the lower
// doc_id. k is capped at the class size. Classes come fake first.
std::vector<ClassRanking> rank_articles(std::span<const DivergenceRecord> records, Metric metric, std::size_t k);

// Two disjoint 25-word topical vocabularies for synthetic corpora.
std::pair<std::vector<std::string>, std::vector<std::string>> default_synthetic_vocabulary();

// Generates a labeled corpus with a known thematic shift. Real-like
// articles draw every sentence from one list (chosen per article);
// fake-like articles draw their first five sentences from one list and the
// rest from the other. Articles alternate fake, real.
//
// Throws ValidationError for overlapping lists, lists under 20 words, or
// fewer than 7 sentences per article.
std::vector<Document> make_synthetic(std::size_t n_per_class, std::size_t sentences_per_doc,
                                     std::span<const std::string> vocab_a, std::span<const std::string> vocab_b,
                                     std::uint64_t seed);

}  // namespace thematic
