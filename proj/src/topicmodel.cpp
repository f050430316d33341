#include "thematic/topicmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "thematic/error.hpp"
#include "thematic/rng.hpp"

namespace thematic {
namespace {

constexpr std::string_view kModelMagic = "thematic-lda v1";

struct TokenStream {
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> words;
};

// Expands each bag of words into a token sequence in ascending id order.
void append_tokens(const BowDoc& doc, std::size_t vocab_size, std::vector<std::uint32_t>& words) {
  for (const auto& e : doc.counts) {
    if (e.id >= vocab_size)
      throw ValidationError(fmt::format("document '{}' has word id {} outside the dictionary (V={})", doc.doc_id,
                                        e.id, vocab_size));
    words.insert(words.end(), e.count, e.id);
  }
}

// Draws a topic from unnormalized cumulative weights.
int sample_cumulative(std::span<const double> cumulative, Xoshiro256& rng) {
  const double u = rng.uniform01() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(), std::ssize(cumulative) - 1));
}

}  // namespace

void LdaConfig::validate() const {
  if (num_topics < 2) throw ConfigError(fmt::format("number of topics must be >= 2 (got {})", num_topics));
  if (alpha && !(*alpha > 0)) throw ConfigError(fmt::format("alpha must be > 0 (got {})", *alpha));
  if (!(beta > 0)) throw ConfigError(fmt::format("beta must be > 0 (got {})", beta));
  if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
  if (train_iters < burn_in)
    throw ConfigError(fmt::format("train_iters ({}) must be >= burn_in ({})", train_iters, burn_in));
  if (infer_iters <= burn_in)
    throw ConfigError(fmt::format("infer_iters ({}) must exceed burn_in ({})", infer_iters, burn_in));
}

double GibbsSnapshot::log_likelihood() const {
  const double n = num_topics;
  const double v = static_cast<double>(vocab_size);
  double ll = 0;

  // log p(w | z)
  ll += n * (std::lgamma(v * beta) - v * std::lgamma(beta));
  for (std::size_t w = 0; w < vocab_size; ++w)
    for (int k = 0; k < num_topics; ++k) ll += std::lgamma(word_topic[w * num_topics + k] + beta);
  for (int k = 0; k < num_topics; ++k) ll -= std::lgamma(static_cast<double>(topic_totals[k]) + v * beta);

  // log p(z)
  const std::size_t docs = num_docs();
  ll += static_cast<double>(docs) * (std::lgamma(n * alpha) - n * std::lgamma(alpha));
  for (std::size_t d = 0; d < docs; ++d) {
    for (int k = 0; k < num_topics; ++k) ll += std::lgamma(doc_topic[d * num_topics + k] + alpha);
    ll -= std::lgamma(static_cast<double>(doc_offsets[d + 1] - doc_offsets[d]) + n * alpha);
  }
  return ll;
}

std::vector<std::uint32_t> LdaModel::top_words(int topic, std::size_t n) const {
  if (topic < 0 || topic >= num_topics()) throw ValidationError(fmt::format("no topic {}", topic));
  std::vector<std::uint32_t> ids(vocab_size_);
  std::iota(ids.begin(), ids.end(), 0u);
  n = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      const auto ca = topic_word(topic, a);
                      const auto cb = topic_word(topic, b);
                      return ca != cb ? ca > cb : a < b;
                    });
  ids.resize(n);
  return ids;
}

LdaModel train_lda(std::span<const BowDoc> corpus, const Dictionary& dict, const LdaConfig& config,
                   const SweepObserver& observer) {
  config.validate();
  if (corpus.empty()) throw ValidationError("cannot train LDA on an empty corpus");

  const int n_topics = config.num_topics;
  const std::size_t n = static_cast<std::size_t>(n_topics);
  const std::size_t vocab = dict.size();
  const double alpha = config.resolved_alpha();
  const double beta = config.beta;
  const double vbeta = static_cast<double>(vocab) * beta;

  TokenStream tokens;
  for (const auto& doc : corpus) {
    append_tokens(doc, vocab, tokens.words);
    tokens.offsets.push_back(static_cast<std::uint32_t>(tokens.words.size()));
  }
  if (tokens.words.empty()) throw ValidationError("cannot train LDA: every document is empty");

  const std::size_t docs = corpus.size();
  std::vector<std::uint32_t> z(tokens.words.size());
  std::vector<std::int32_t> doc_topic(docs * n, 0);
  std::vector<std::int32_t> word_topic(vocab * n, 0);
  std::vector<std::int64_t> totals(n, 0);

  Xoshiro256 rng(config.seed);
  for (std::size_t d = 0; d < docs; ++d) {
    for (std::uint32_t i = tokens.offsets[d]; i < tokens.offsets[d + 1]; ++i) {
      const std::uint32_t k = rng.uniform_below(static_cast<std::uint32_t>(n_topics));
      z[i] = k;
      ++doc_topic[d * n + k];
      ++word_topic[tokens.words[i] * n + k];
      ++totals[k];
    }
  }

  auto snapshot = [&](int sweep) {
    return GibbsSnapshot{sweep,       n_topics,  vocab,      alpha,      beta,  tokens.offsets,
                         tokens.words, z,        doc_topic, word_topic, totals};
  };

  std::vector<double> cumulative(n);
  for (int sweep = 1; sweep <= config.train_iters; ++sweep) {
    for (std::size_t d = 0; d < docs; ++d) {
      std::int32_t* dt = &doc_topic[d * n];
      for (std::uint32_t i = tokens.offsets[d]; i < tokens.offsets[d + 1]; ++i) {
        const std::uint32_t w = tokens.words[i];
        std::int32_t* wt = &word_topic[w * n];
        const std::uint32_t old = z[i];
        --dt[old];
        --wt[old];
        --totals[old];

        double acc = 0;
        for (std::size_t k = 0; k < n; ++k) {
          acc += (dt[k] + alpha) * (wt[k] + beta) / (static_cast<double>(totals[k]) + vbeta);
          cumulative[k] = acc;
        }
        const auto k = static_cast<std::uint32_t>(sample_cumulative(cumulative, rng));

        z[i] = k;
        ++dt[k];
        ++wt[k];
        ++totals[k];
      }
    }
    if (observer) observer(snapshot(sweep));
  }

  LdaModel model;
  model.config_ = config;
  model.vocab_size_ = vocab;
  model.dictionary_hash_ = dict.hash();
  model.word_topic_ = std::move(word_topic);
  model.topic_totals_ = std::move(totals);
  return model;
}

TopicDistribution infer_topics(const LdaModel& model, const BowDoc& doc, std::uint64_t seed) {
  const auto& cfg = model.config_;
  const std::size_t n = static_cast<std::size_t>(cfg.num_topics);
  TopicDistribution out;

  std::vector<std::uint32_t> words;
  append_tokens(doc, model.vocab_size_, words);
  if (words.empty()) {
    out.p.assign(n, 1.0 / static_cast<double>(n));
    return out;
  }

  const double alpha = cfg.resolved_alpha();
  const double beta = cfg.beta;
  const double vbeta = static_cast<double>(model.vocab_size_) * beta;

  // phi[j * N + k] = p(word_j | topic k) under the frozen counts.
  std::vector<double> phi(words.size() * n);
  for (std::size_t j = 0; j < words.size(); ++j) {
    if (j > 0 && words[j] == words[j - 1]) {
      std::copy_n(&phi[(j - 1) * n], n, &phi[j * n]);
      continue;
    }
    for (std::size_t k = 0; k < n; ++k)
      phi[j * n + k] = (model.topic_word(static_cast<int>(k), words[j]) + beta) /
                       (static_cast<double>(model.topic_totals_[k]) + vbeta);
  }

  Xoshiro256 rng(seed);
  std::vector<std::uint32_t> z(words.size());
  std::vector<std::int32_t> counts(n, 0);
  for (auto& k : z) {
    k = rng.uniform_below(static_cast<std::uint32_t>(cfg.num_topics));
    ++counts[k];
  }

  const double len = static_cast<double>(words.size());
  const double denom = len + static_cast<double>(n) * alpha;
  std::vector<double> sum(n, 0.0);
  std::vector<double> cumulative(n);
  for (int sweep = 1; sweep <= cfg.infer_iters; ++sweep) {
    for (std::size_t j = 0; j < words.size(); ++j) {
      --counts[z[j]];
      const double* ph = &phi[j * n];
      double acc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        acc += (counts[k] + alpha) * ph[k];
        cumulative[k] = acc;
      }
      z[j] = static_cast<std::uint32_t>(sample_cumulative(cumulative, rng));
      ++counts[z[j]];
    }
    if (sweep > cfg.burn_in)
      for (std::size_t k = 0; k < n; ++k) sum[k] += (counts[k] + alpha) / denom;
  }

  const double total = std::accumulate(sum.begin(), sum.end(), 0.0);
  out.p.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.p[k] = sum[k] / total;
  return out;
}

void LdaModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write model '{}'", path.string()));
  out << kModelMagic << '\n';
  out << "num_topics " << config_.num_topics << '\n';
  out << "vocab_size " << vocab_size_ << '\n';
  out << "alpha " << (config_.alpha ? fmt::format("{}", *config_.alpha) : std::string("auto")) << '\n';
  out << "beta " << fmt::format("{}", config_.beta) << '\n';
  out << "train_iters " << config_.train_iters << '\n';
  out << "infer_iters " << config_.infer_iters << '\n';
  out << "burn_in " << config_.burn_in << '\n';
  out << "seed " << config_.seed << '\n';
  out << "dictionary_hash " << fmt::format("{:016x}", dictionary_hash_) << '\n';
  out << "totals";
  for (auto t : topic_totals_) out << ' ' << t;
  out << '\n';
  const std::size_t n = static_cast<std::size_t>(config_.num_topics);
  for (std::size_t k = 0; k < n; ++k) {
    out << "topic " << k;
    for (std::size_t w = 0; w < vocab_size_; ++w)
      if (auto c = word_topic_[w * n + k]) out << ' ' << w << ':' << c;
    out << '\n';
  }
  out << "end\n";
  if (!out) throw IoError(fmt::format("error writing model '{}'", path.string()));
}

LdaModel LdaModel::load(const std::filesystem::path& path, const Dictionary& dict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open model '{}'", path.string()));

  std::size_t lineno = 0;
  std::string line;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError("unexpected end of model file", lineno + 1);
    ++lineno;
    return std::istringstream(line);
  };
  auto expect = [&](std::string_view key) -> std::istringstream {
    auto ss = next_line();
    std::string got;
    ss >> got;
    if (got != key) throw ParseError(fmt::format("expected '{}' in model file, found '{}'", key, got), lineno);
    return ss;
  };
  auto read_value = [&]<class T>(std::string_view key, T& value) {
    auto ss = expect(key);
    if (!(ss >> value)) throw ParseError(fmt::format("bad value for '{}'", key), lineno);
  };

  if (next_line().str() != kModelMagic) throw ParseError(fmt::format("'{}' is not a v1 model", path.string()), 1);

  LdaModel m;
  read_value("num_topics", m.config_.num_topics);
  read_value("vocab_size", m.vocab_size_);
  std::string alpha;
  read_value("alpha", alpha);
  if (alpha != "auto") m.config_.alpha = std::stod(alpha);
  read_value("beta", m.config_.beta);
  read_value("train_iters", m.config_.train_iters);
  read_value("infer_iters", m.config_.infer_iters);
  read_value("burn_in", m.config_.burn_in);
  read_value("seed", m.config_.seed);
  std::string hash;
  read_value("dictionary_hash", hash);
  m.dictionary_hash_ = std::stoull(hash, nullptr, 16);
  try {
    m.config_.validate();
  } catch (const ConfigError& e) {
    throw ParseError(fmt::format("model file holds an invalid config: {}", e.what()), 0);
  }

  if (m.dictionary_hash_ != dict.hash() || m.vocab_size_ != dict.size())
    throw ValidationError(fmt::format("model '{}' was trained on a different dictionary (hash {:016x}, V={}; "
                                      "dictionary has {:016x}, V={})",
                                      path.string(), m.dictionary_hash_, m.vocab_size_, dict.hash(), dict.size()));

  const std::size_t n = static_cast<std::size_t>(m.config_.num_topics);
  m.topic_totals_.resize(n);
  {
    auto ss = expect("totals");
    for (auto& t : m.topic_totals_)
      if (!(ss >> t)) throw ParseError("bad topic totals", lineno);
  }
  m.word_topic_.assign(m.vocab_size_ * n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    auto ss = expect("topic");
    std::size_t idx = 0;
    ss >> idx;
    if (idx != k) throw ParseError(fmt::format("expected topic {}", k), lineno);
    std::int64_t sum = 0;
    for (std::string entry; ss >> entry;) {
      const auto colon = entry.find(':');
      if (colon == std::string::npos) throw ParseError(fmt::format("bad entry '{}'", entry), lineno);
      const auto w = std::stoul(entry.substr(0, colon));
      const auto c = std::stol(entry.substr(colon + 1));
      if (w >= m.vocab_size_ || c <= 0) throw ParseError(fmt::format("bad entry '{}'", entry), lineno);
      m.word_topic_[w * n + k] = static_cast<std::int32_t>(c);
      sum += c;
    }
    if (sum != m.topic_totals_[k])
      throw ParseError(fmt::format("topic {} counts sum to {} but total says {}", k, sum, m.topic_totals_[k]), lineno);
  }
  expect("end");
  return m;
}

}  // namespace thematic
