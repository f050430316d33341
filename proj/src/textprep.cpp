#include "thematic/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "thematic/error.hpp"
#include "thematic/parallel.hpp"
#include "thematic/rng.hpp"
#include "thematic/stemmer.hpp"

namespace thematic {
namespace {

constexpr std::string_view kStopwords[] = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've", "you'll", "you'd",
    "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself", "she", "she's", "her", "hers",
    "herself", "it", "it's", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
    "who", "whom", "this", "that", "that'll", "these", "those", "am", "is", "are", "was", "were", "be", "been",
    "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but",
    "if", "or", "because", "as", "until", "while", "of", "at", "by", "for", "with", "about", "against",
    "between", "into", "through", "during", "before", "after", "above", "below", "to", "from", "up", "down",
    "in", "out", "on", "off", "over", "under", "again", "further", "then", "once", "here", "there", "when",
    "where", "why", "how", "all", "any", "both", "each", "few", "more", "most", "other", "some", "such", "no",
    "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will", "just", "don",
    "don't", "should", "should've", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't",
    "couldn", "couldn't", "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven",
    "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan",
    "shan't", "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn",
    "wouldn't",
};

constexpr std::string_view kAbbreviations[] = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "ave", "blvd", "gen", "gov", "sen", "rep", "rev",
    "col", "lt", "sgt", "capt", "cmdr", "adm", "maj", "corp", "inc", "ltd", "co", "vs", "etc", "no", "fig",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "u.s", "u.k", "u.n",
    "e.g", "i.e", "a.m", "p.m", "d.c", "ph.d",
};

constexpr char kKeySeparator = '\x1f';

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool starts_with_at(std::string_view text, std::size_t i, std::string_view s) {
  return text.substr(i, s.size()) == s;
}

constexpr std::string_view kLeftDoubleQuote = "\xE2\x80\x9C";
constexpr std::string_view kRightDoubleQuote = "\xE2\x80\x9D";
constexpr std::string_view kLeftSingleQuote = "\xE2\x80\x98";
constexpr std::string_view kRightSingleQuote = "\xE2\x80\x99";

// Length of a closing quote/bracket at i, or 0.
std::size_t closer_at(std::string_view text, std::size_t i) {
  if (i >= text.size()) return 0;
  const char c = text[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  if (starts_with_at(text, i, kRightDoubleQuote) || starts_with_at(text, i, kRightSingleQuote)) return 3;
  return 0;
}

bool opens_sentence(std::string_view text, std::size_t i) {
  if (i >= text.size()) return false;
  const char c = text[i];
  if ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '"' || c == '\'') return true;
  return starts_with_at(text, i, kLeftDoubleQuote) || starts_with_at(text, i, kLeftSingleQuote);
}

// Whether the period at `dot` closes an abbreviation or an initial.
bool period_is_abbreviation(std::string_view text, std::size_t start, std::size_t dot, const WordSet& abbreviations) {
  std::size_t b = dot;
  while (b > start && !is_space(text[b - 1])) --b;
  std::string_view word = text.substr(b, dot - b);
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'')) word.remove_prefix(1);
  if (word.empty()) return false;
  if (word.size() == 1 && is_alpha(word[0])) return true;
  return abbreviations.contains(lowercase(word));
}

// Blank line starting at the '\n' at i: returns the index just past it, or 0.
std::size_t paragraph_break_end(std::string_view text, std::size_t i) {
  std::size_t j = i + 1;
  while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r')) ++j;
  if (j < text.size() && text[j] == '\n') return j + 1;
  return 0;
}

void append_tokens(std::string_view sentence, TokenList& out) {
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const char c = sentence[i];
    if (is_alpha(c)) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      continue;
    }
    // Word-internal apostrophe, straight or typographic.
    std::size_t apos = 0;
    if (c == '\'') apos = 1;
    else if (starts_with_at(sentence, i, kRightSingleQuote)) apos = 3;
    if (apos && !current.empty() && i + apos < sentence.size() && is_alpha(sentence[i + apos])) {
      current.push_back('\'');
      i += apos - 1;
      continue;
    }
    flush();
  }
  flush();
}

bool keep_token(const std::string& token, const WordSet& stopwords) {
  return token.size() >= 3 && !stopwords.contains(token);
}

// Stems one unigram; nullopt when the stem itself must be filtered.
std::optional<std::string> stem_token(const std::string& token, const WordSet& stopwords) {
  std::string stem = porter_stem(token);
  if (!keep_token(stem, stopwords)) return std::nullopt;
  return stem;
}

}  // namespace

const WordSet& default_stopwords() {
  static const WordSet words = [] {
    WordSet w;
    for (auto s : kStopwords) w.emplace(s);
    return w;
  }();
  return words;
}

const WordSet& default_abbreviations() {
  static const WordSet words = [] {
    WordSet w;
    for (auto s : kAbbreviations) w.emplace(s);
    return w;
  }();
  return words;
}

WordSet load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open word list '{}'", path.string()));
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view entry = line;
    if (auto hash = entry.find('#'); hash != std::string_view::npos) entry = entry.substr(0, hash);
    entry = trim(entry);
    if (!entry.empty()) words.insert(lowercase(entry));
  }
  return words;
}

std::vector<std::string> segment_sentences(std::string_view text, const WordSet& abbreviations) {
  std::vector<std::string> out;
  auto emit = [&](std::size_t b, std::size_t e) {
    auto s = trim(text.substr(b, e - b));
    if (!s.empty()) out.emplace_back(s);
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      if (std::size_t after = paragraph_break_end(text, i)) {
        emit(start, i);
        start = i = after;
        continue;
      }
      ++i;
      continue;
    }
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }

    std::size_t end = i;
    while (end < text.size() && (text[end] == '.' || text[end] == '!' || text[end] == '?')) ++end;
    while (std::size_t n = closer_at(text, end)) end += n;

    const bool followed_by_space = end < text.size() && is_space(text[end]);
    std::size_t look = end;
    while (look < text.size() && is_space(text[look])) ++look;

    const bool boundary = followed_by_space && opens_sentence(text, look) &&
                          !(c == '.' && end == i + 1 && period_is_abbreviation(text, start, i, abbreviations));
    if (boundary) {
      emit(start, end);
      start = end;
    }
    i = end;
  }
  emit(start, text.size());
  return out;
}

std::string_view to_string(Normalizer n) noexcept { return n == Normalizer::stem ? "stem" : "none"; }

std::optional<Normalizer> parse_normalizer(std::string_view text) {
  if (text == "stem") return Normalizer::stem;
  if (text == "none") return Normalizer::none;
  return std::nullopt;
}

TokenList normalize_tokens(std::span<const std::string> sentences, const WordSet& stopwords,
                           Normalizer normalizer) {
  TokenList raw;
  for (const auto& s : sentences) append_tokens(s, raw);

  TokenList out;
  out.reserve(raw.size());
  for (auto& tok : raw) {
    if (!keep_token(tok, stopwords)) continue;
    if (normalizer == Normalizer::none) {
      out.push_back(std::move(tok));
    } else if (auto stem = stem_token(tok, stopwords)) {
      out.push_back(std::move(*stem));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PhraseTable

PhraseTable::PhraseTable(std::size_t min_count, double threshold) : min_count_(min_count), threshold_(threshold) {
  if (min_count < 1) throw ConfigError("phrase min_count must be >= 1");
  if (!(threshold > 0)) throw ConfigError("phrase threshold must be > 0");
}

std::string PhraseTable::key(std::string_view a, std::string_view b) {
  std::string k;
  k.reserve(a.size() + b.size() + 1);
  k.append(a);
  k.push_back(kKeySeparator);
  k.append(b);
  return k;
}

void PhraseTable::add_document(std::span<const std::string> tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    ++unigrams_[tokens[i]];
    if (i + 1 < tokens.size()) ++pairs_[key(tokens[i], tokens[i + 1])];
  }
  total_tokens_ += static_cast<std::int64_t>(tokens.size());
}

std::int64_t PhraseTable::pair_count(std::string_view a, std::string_view b) const {
  auto it = pairs_.find(key(a, b));
  return it == pairs_.end() ? 0 : it->second;
}

std::int64_t PhraseTable::unigram_count(std::string_view token) const {
  auto it = unigrams_.find(std::string(token));
  return it == unigrams_.end() ? 0 : it->second;
}

double PhraseTable::score(std::string_view a, std::string_view b) const {
  const auto ab = pair_count(a, b);
  const auto ca = unigram_count(a);
  const auto cb = unigram_count(b);
  if (ca == 0 || cb == 0) return 0.0;
  return (static_cast<double>(ab) - static_cast<double>(min_count_)) * static_cast<double>(vocab_size()) /
         (static_cast<double>(ca) * static_cast<double>(cb));
}

bool PhraseTable::is_phrase(std::string_view a, std::string_view b) const {
  const auto ab = pair_count(a, b);
  if (ab < static_cast<std::int64_t>(min_count_)) return false;
  return score(a, b) >= threshold_;
}

std::vector<std::pair<std::string, std::string>> PhraseTable::phrases() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, count] : pairs_) {
    if (count < static_cast<std::int64_t>(min_count_)) continue;
    const auto sep = k.find(kKeySeparator);
    std::string a = k.substr(0, sep);
    std::string b = k.substr(sep + 1);
    if (is_phrase(a, b)) out.emplace_back(std::move(a), std::move(b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void PhraseTable::prune_to_phrases() {
  const auto kept = phrases();
  vocab_size_ = vocab_size();
  std::unordered_map<std::string, std::int64_t> pairs;
  std::unordered_map<std::string, std::int64_t> unigrams;
  for (const auto& [a, b] : kept) {
    auto k = key(a, b);
    pairs[k] = pairs_.at(k);
    unigrams[a] = unigrams_.at(a);
    unigrams[b] = unigrams_.at(b);
  }
  pairs_ = std::move(pairs);
  unigrams_ = std::move(unigrams);
}

void PhraseTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write phrase table '{}'", path.string()));
  out << fmt::format("phrases\tv1\tmin_count={}\tthreshold={}\tvocab_size={}\ttotal_tokens={}\n", min_count_,
                     threshold_, vocab_size(), total_tokens_);
  std::vector<std::pair<std::string, std::int64_t>> unigrams(unigrams_.begin(), unigrams_.end());
  std::sort(unigrams.begin(), unigrams.end());
  for (const auto& [tok, count] : unigrams) out << "u\t" << tok << '\t' << count << '\n';
  std::vector<std::pair<std::string, std::int64_t>> pairs(pairs_.begin(), pairs_.end());
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [k, count] : pairs) {
    const auto sep = k.find(kKeySeparator);
    out << "p\t" << std::string_view(k).substr(0, sep) << '\t' << std::string_view(k).substr(sep + 1) << '\t'
        << count << '\n';
  }
  if (!out) throw IoError(fmt::format("error writing phrase table '{}'", path.string()));
}

PhraseTable PhraseTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open phrase table '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("phrases\tv1\t"))
    throw ParseError(fmt::format("'{}' is not a v1 phrase table", path.string()), 1);

  std::size_t min_count = 0, vocab = 0;
  double threshold = 0;
  std::int64_t total = 0;
  {
    std::istringstream header(line.substr(std::string_view("phrases\tv1\t").size()));
    std::string field;
    while (std::getline(header, field, '\t')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw ParseError("malformed phrase table header", 1);
      const std::string name = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (name == "min_count") min_count = std::stoul(value);
      else if (name == "threshold") threshold = std::stod(value);
      else if (name == "vocab_size") vocab = std::stoul(value);
      else if (name == "total_tokens") total = std::stoll(value);
    }
  }
  PhraseTable table(min_count, threshold);
  table.vocab_size_ = vocab;
  table.total_tokens_ = total;

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> parts;
    std::istringstream row(line);
    for (std::string p; std::getline(row, p, '\t');) parts.push_back(std::move(p));
    try {
      if (parts.size() == 3 && parts[0] == "u") {
        table.unigrams_[parts[1]] = std::stoll(parts[2]);
      } else if (parts.size() == 4 && parts[0] == "p") {
        table.pairs_[key(parts[1], parts[2])] = std::stoll(parts[3]);
      } else {
        throw ParseError("unrecognised phrase table row", lineno);
      }
    } catch (const std::logic_error&) {
      throw ParseError("bad count in phrase table", lineno);
    }
  }
  return table;
}

PhraseTable build_phrase_table(std::span<const TokenList> corpus_tokens, std::size_t min_count, double threshold) {
  PhraseTable table(min_count, threshold);
  for (const auto& doc : corpus_tokens) table.add_document(doc);
  return table;
}

TokenList apply_phrases(std::span<const std::string> tokens, const PhraseTable& table) {
  TokenList out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (i + 1 < tokens.size() && table.is_phrase(tokens[i], tokens[i + 1])) {
      out.push_back(tokens[i] + "_" + tokens[i + 1]);
      i += 2;
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dictionary

std::optional<std::uint32_t> Dictionary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Dictionary::hash() const noexcept {
  std::uint64_t h = fnv1a64("");
  for (const auto& tok : id_to_token_) {
    h = fnv1a64(tok, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

Dictionary Dictionary::from_tokens(std::vector<std::string> id_to_token) {
  Dictionary d;
  d.token_to_id_.reserve(id_to_token.size());
  for (std::size_t i = 0; i < id_to_token.size(); ++i) {
    if (!d.token_to_id_.emplace(id_to_token[i], static_cast<std::uint32_t>(i)).second)
      throw ValidationError(fmt::format("duplicate dictionary token '{}'", id_to_token[i]));
  }
  d.id_to_token_ = std::move(id_to_token);
  return d;
}

void Dictionary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write dictionary '{}'", path.string()));
  for (const auto& tok : id_to_token_) out << tok << '\n';
  if (!out) throw IoError(fmt::format("error writing dictionary '{}'", path.string()));
}

Dictionary Dictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open dictionary '{}'", path.string()));
  std::vector<std::string> tokens;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) throw ParseError("empty dictionary token", tokens.size() + 1);
    tokens.push_back(std::move(line));
  }
  return from_tokens(std::move(tokens));
}

Dictionary build_dictionary(std::span<const TokenList> corpus_tokens, const DictionaryOptions& options) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> doc_freq;
  for (const auto& doc : corpus_tokens) {
    std::unordered_set<std::string_view> seen;
    for (const auto& tok : doc) {
      if (!seen.insert(tok).second) continue;
      auto [it, fresh] = doc_freq.try_emplace(tok, 0);
      if (fresh) order.push_back(tok);
      ++it->second;
    }
  }
  if (order.empty()) throw ValidationError("cannot build a dictionary from an empty corpus");

  const double max_docs = options.no_above * static_cast<double>(corpus_tokens.size());
  std::vector<std::string> kept;
  kept.reserve(order.size());
  for (auto& tok : order) {
    const auto df = doc_freq.at(tok);
    if (df < options.no_below) continue;
    if (static_cast<double>(df) > max_docs) continue;
    kept.push_back(std::move(tok));
  }
  if (kept.empty()) throw ValidationError("dictionary filters removed every token");
  return Dictionary::from_tokens(std::move(kept));
}

std::size_t BowDoc::total() const noexcept {
  std::size_t n = 0;
  for (const auto& e : counts) n += e.count;
  return n;
}

BowDoc to_bow(std::string doc_id, std::span<const std::string> tokens, const Dictionary& dict) {
  std::unordered_map<std::uint32_t, std::uint32_t> counts;
  for (const auto& tok : tokens)
    if (auto id = dict.id(tok)) ++counts[*id];
  BowDoc bow{std::move(doc_id), {}};
  bow.counts.reserve(counts.size());
  for (auto [id, c] : counts) bow.counts.push_back({id, c});
  std::sort(bow.counts.begin(), bow.counts.end(), [](const BowEntry& a, const BowEntry& b) { return a.id < b.id; });
  return bow;
}

// ---------------------------------------------------------------------------
// Document-level pipeline

PreparedDoc prepare_document(const Document& doc, const TextResources& res) {
  PreparedDoc out;
  out.id = doc.id;
  out.label = doc.label;
  out.sentences = doc.sentences.empty() ? segment_sentences(doc.text, res.abbreviations) : doc.sentences;
  out.sentence_tokens.reserve(out.sentences.size());
  for (const auto& s : out.sentences)
    out.sentence_tokens.push_back(normalize_tokens(std::span(&s, 1), res.stopwords, Normalizer::none));
  return out;
}

TokenList segment_tokens(const PreparedDoc& doc, std::size_t first, std::size_t last, const PhraseTable& phrases,
                         const TextResources& res, Normalizer normalizer) {
  TokenList joined;
  for (std::size_t s = first; s < last && s < doc.sentence_tokens.size(); ++s)
    joined.insert(joined.end(), doc.sentence_tokens[s].begin(), doc.sentence_tokens[s].end());
  TokenList merged = apply_phrases(joined, phrases);
  if (normalizer == Normalizer::none) return merged;

  TokenList out;
  out.reserve(merged.size());
  for (auto& tok : merged) {
    if (tok.find('_') != std::string::npos) {
      out.push_back(std::move(tok));
    } else if (auto stem = stem_token(tok, res.stopwords)) {
      out.push_back(std::move(*stem));
    }
  }
  return out;
}

PreparedCorpus prepare_corpus(std::span<const Document> corpus, const TextResources& res,
                              const TextPrepConfig& config, unsigned jobs) {
  PreparedCorpus out;
  out.docs.resize(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t i) { out.docs[i] = prepare_document(corpus[i], res); });

  out.phrases = PhraseTable(config.phrase_min_count, config.phrase_threshold);
  for (const auto& doc : out.docs) {
    TokenList joined;
    for (const auto& s : doc.sentence_tokens) joined.insert(joined.end(), s.begin(), s.end());
    out.phrases.add_document(joined);
  }
  out.phrases.prune_to_phrases();

  std::vector<TokenList> final_tokens(out.docs.size());
  parallel_for(out.docs.size(), jobs, [&](std::size_t i) {
    final_tokens[i] = segment_tokens(out.docs[i], 0, out.docs[i].sentences.size(), out.phrases, res, config.normalizer);
  });
  out.dictionary = build_dictionary(final_tokens, config.dictionary);

  out.bows.resize(out.docs.size());
  parallel_for(out.docs.size(), jobs,
               [&](std::size_t i) { out.bows[i] = to_bow(out.docs[i].id, final_tokens[i], out.dictionary); });
  return out;
}

}  // namespace thematic
