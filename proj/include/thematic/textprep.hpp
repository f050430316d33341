#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "thematic/corpus.hpp"

namespace thematic {

using WordSet = std::unordered_set<std::string>;
using TokenList = std::vector<std::string>;

// Built-in English stopword list (179 entries).
const WordSet& default_stopwords();

// Built-in abbreviations after which a period does not end a sentence,
// stored lowercase without the final period ("mr", "u.s", "jan").
const WordSet& default_abbreviations();

// Reads a one-entry-per-line list. Blank lines and '#' comments are
// ignored; entries are trimmed and lowercased. Throws IoError.
WordSet load_word_list(const std::filesystem::path& path);

// Rule-based sentence segmenter.
//
// A sentence ends at a run of '.', '!' or '?' (plus any closing quotes or
// brackets) that is followed by whitespace and then an uppercase letter,
// an opening quote, or a digit. A period does not end a sentence after an
// entry of `abbreviations` or a single-letter initial. A blank line always
// ends a sentence. Segments are trimmed; empty segments are dropped.
std::vector<std::string> segment_sentences(std::string_view text,
                                           const WordSet& abbreviations = default_abbreviations());

enum class Normalizer { none, stem };

std::string_view to_string(Normalizer n) noexcept;
std::optional<Normalizer> parse_normalizer(std::string_view text);

// Lowercased alphabetic tokens with stopwords and tokens shorter than three
// characters removed, optionally Porter-stemmed. The filter runs again on
// stems so the output never holds a stopword or a short token.
TokenList normalize_tokens(std::span<const std::string> sentences, const WordSet& stopwords,
                           Normalizer normalizer = Normalizer::stem);

// Adjacent-pair collocation statistics used to merge bigrams.
//
// A pair (a, b) is a phrase iff count(a, b) >= min_count and
//   (count(a, b) - min_count) * V_u / (count(a) * count(b)) >= threshold
// where V_u is the number of distinct unigrams seen while building.
class PhraseTable {
 public:
  PhraseTable() = default;
  PhraseTable(std::size_t min_count, double threshold);

  // Counts unigrams and adjacent pairs of one document.
  void add_document(std::span<const std::string> tokens);

  std::int64_t pair_count(std::string_view a, std::string_view b) const;
  std::int64_t unigram_count(std::string_view token) const;
  std::int64_t total_tokens() const noexcept { return total_tokens_; }
  std::size_t vocab_size() const noexcept { return vocab_size_ ? *vocab_size_ : unigrams_.size(); }
  std::size_t min_count() const noexcept { return min_count_; }
  double threshold() const noexcept { return threshold_; }

  double score(std::string_view a, std::string_view b) const;
  bool is_phrase(std::string_view a, std::string_view b) const;

  // All qualifying pairs, sorted.
  std::vector<std::pair<std::string, std::string>> phrases() const;

  // Drops every statistic not needed to recognise the current phrases.
  // V_u is pinned first so the retained scores do not change.
  void prune_to_phrases();

  // Tab-separated text form: a header line with parameters, then
  // "u<TAB>token<TAB>count" and "p<TAB>a<TAB>b<TAB>count" lines.
  void save(const std::filesystem::path& path) const;
  static PhraseTable load(const std::filesystem::path& path);

  static std::string key(std::string_view a, std::string_view b);

 private:
  std::unordered_map<std::string, std::int64_t> pairs_;
  std::unordered_map<std::string, std::int64_t> unigrams_;
  std::int64_t total_tokens_ = 0;
  std::size_t min_count_ = 5;
  double threshold_ = 10.0;
  std::optional<std::size_t> vocab_size_;
};

// Builds a PhraseTable over every document. Throws ConfigError for
// min_count < 1 or threshold <= 0.
PhraseTable build_phrase_table(std::span<const TokenList> corpus_tokens, std::size_t min_count,
                               double threshold);

// One greedy left-to-right pass: qualifying pairs merge into "a_b" and the
// scan resumes after the merged token.
TokenList apply_phrases(std::span<const std::string> tokens, const PhraseTable& table);

struct DictionaryOptions {
  // Drop tokens appearing in fewer than `no_below` documents (0 = off).
  std::size_t no_below = 0;
  // Drop tokens appearing in more than this fraction of documents (1 = off).
  double no_above = 1.0;
};

// Dense token <-> id mapping, ids in first-occurrence order.
class Dictionary {
 public:
  std::optional<std::uint32_t> id(std::string_view token) const;
  const std::string& token(std::uint32_t id) const { return id_to_token_.at(id); }
  std::size_t size() const noexcept { return id_to_token_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return id_to_token_; }

  // FNV-1a over the id-ordered tokens; identifies a dictionary in model files.
  std::uint64_t hash() const noexcept;

  // One token per line in id order.
  void save(const std::filesystem::path& path) const;
  static Dictionary load(const std::filesystem::path& path);

  static Dictionary from_tokens(std::vector<std::string> id_to_token);

 private:
  std::unordered_map<std::string, std::uint32_t> token_to_id_;
  std::vector<std::string> id_to_token_;
};

// Throws ValidationError when the corpus holds no tokens at all.
Dictionary build_dictionary(std::span<const TokenList> corpus_tokens, const DictionaryOptions& options = {});

struct BowEntry {
  std::uint32_t id;
  std::uint32_t count;
  friend bool operator==(const BowEntry&, const BowEntry&) = default;
};

// Sparse bag of words, entries sorted by id.
struct BowDoc {
  std::string doc_id;
  std::vector<BowEntry> counts;

  std::size_t total() const noexcept;
  bool empty() const noexcept { return counts.empty(); }
};

// Out-of-dictionary tokens are skipped.
BowDoc to_bow(std::string doc_id, std::span<const std::string> tokens, const Dictionary& dict);

// Everything the segment-level pipeline needs besides the dictionary.
struct TextPrepConfig {
  Normalizer normalizer = Normalizer::stem;
  std::size_t phrase_min_count = 5;
  double phrase_threshold = 10.0;
  DictionaryOptions dictionary;
};

struct TextResources {
  WordSet stopwords = default_stopwords();
  WordSet abbreviations = default_abbreviations();
};

// A segmented document with per-sentence tokens that are normalized but
// not yet phrase-merged or stemmed.
struct PreparedDoc {
  std::string id;
  Label label = Label::real;
  std::vector<std::string> sentences;
  std::vector<TokenList> sentence_tokens;
};

PreparedDoc prepare_document(const Document& doc, const TextResources& res);

// Final tokens for sentences [first, last) of a prepared document: phrase
// merge over the concatenated sentence tokens, then stem unmerged tokens.
TokenList segment_tokens(const PreparedDoc& doc, std::size_t first, std::size_t last, const PhraseTable& phrases,
                         const TextResources& res, Normalizer normalizer);

struct PreparedCorpus {
  std::vector<PreparedDoc> docs;
  PhraseTable phrases;
  Dictionary dictionary;
  // Whole-document bags of words, parallel to `docs`.
  std::vector<BowDoc> bows;
};

// Segments, normalizes, learns phrases and the dictionary over the whole
// corpus. `jobs` caps the worker threads used for per-document work.
PreparedCorpus prepare_corpus(std::span<const Document> corpus, const TextResources& res,
                              const TextPrepConfig& config, unsigned jobs = 1);

}  // namespace thematic
