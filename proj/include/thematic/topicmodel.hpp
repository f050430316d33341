#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "thematic/textprep.hpp"

namespace thematic {

struct LdaConfig {
  int num_topics = 10;
  // Symmetric document-topic prior; unset means 1 / num_topics.
  std::optional<double> alpha;
  // Symmetric topic-word prior.
  double beta = 0.01;
  int train_iters = 400;
  int infer_iters = 100;
  // Leading inference sweeps excluded from posterior averaging.
  int burn_in = 50;
  std::uint64_t seed = 0;

  double resolved_alpha() const noexcept { return alpha ? *alpha : 1.0 / num_topics; }

  // Throws ConfigError unless N >= 2, alpha, beta > 0,
  // train_iters >= burn_in >= 0 and infer_iters > burn_in.
  void validate() const;
};

struct TopicDistribution {
  std::vector<double> p;
};

// Read-only view of the sampler passed to a training observer after every
// sweep. Count arrays are row-major: doc_topic is D x N, word_topic V x N.
struct GibbsSnapshot {
  int sweep = 0;
  int num_topics = 0;
  std::size_t vocab_size = 0;
  double alpha = 0;
  double beta = 0;
  std::span<const std::uint32_t> doc_offsets;  // D + 1 token offsets
  std::span<const std::uint32_t> words;
  std::span<const std::uint32_t> topics;
  std::span<const std::int32_t> doc_topic;
  std::span<const std::int32_t> word_topic;
  std::span<const std::int64_t> topic_totals;

  std::size_t num_docs() const noexcept { return doc_offsets.empty() ? 0 : doc_offsets.size() - 1; }

  // Collapsed joint log-likelihood log p(w, z | alpha, beta).
  double log_likelihood() const;
};

using SweepObserver = std::function<void(const GibbsSnapshot&)>;

class LdaModel {
 public:
  const LdaConfig& config() const noexcept { return config_; }
  int num_topics() const noexcept { return config_.num_topics; }
  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::uint64_t dictionary_hash() const noexcept { return dictionary_hash_; }

  // n_{k,w}: tokens of word w assigned to topic k.
  std::int32_t topic_word(int topic, std::uint32_t word) const {
    return word_topic_[static_cast<std::size_t>(word) * config_.num_topics + topic];
  }
  std::span<const std::int64_t> topic_totals() const noexcept { return topic_totals_; }

  // Word ids of topic k by descending count, ties by ascending id.
  std::vector<std::uint32_t> top_words(int topic, std::size_t n) const;

  // Versioned text format. `load` refuses a file whose dictionary hash or
  // vocabulary size differs from `dict` (ValidationError).
  void save(const std::filesystem::path& path) const;
  static LdaModel load(const std::filesystem::path& path, const Dictionary& dict);

 private:
  friend LdaModel train_lda(std::span<const BowDoc>, const Dictionary&, const LdaConfig&, const SweepObserver&);
  friend TopicDistribution infer_topics(const LdaModel&, const BowDoc&, std::uint64_t);

  LdaConfig config_;
  std::size_t vocab_size_ = 0;
  std::uint64_t dictionary_hash_ = 0;
  std::vector<std::int32_t> word_topic_;  // V x N
  std::vector<std::int64_t> topic_totals_;
};

// Collapsed Gibbs sampling over the whole corpus. Deterministic given
// (corpus order, config, seed). Throws ValidationError when the corpus is
// empty, has no tokens, or references ids outside the dictionary.
LdaModel train_lda(std::span<const BowDoc> corpus, const Dictionary& dict, const LdaConfig& config,
                   const SweepObserver& observer = {});

// Fold-in Gibbs inference against the frozen model, averaging
// (n_dk + alpha) / (len + N alpha) over the post-burn-in sweeps. An empty
// document returns the uniform prior.
TopicDistribution infer_topics(const LdaModel& model, const BowDoc& doc, std::uint64_t seed);

}  // namespace thematic
