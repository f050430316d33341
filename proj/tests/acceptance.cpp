// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails.
//
// Criterion 7 needs a real corpus in ISOT layout (a directory holding
// Fake.csv and True.csv); point THEMATIC_ISOT_DIR at it to enable it.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "separable.hpp"
#include "temp_dir.hpp"
#include "thematic/cli.hpp"
#include "thematic/divergence.hpp"
#include "thematic/pipeline.hpp"
#include "thematic/rng.hpp"
#include "thematic/stats.hpp"
#include "thematic/topicmodel.hpp"

using namespace thematic;

namespace {

struct Outcome {
  enum Kind { pass, fail, skip } kind = pass;
  std::string detail;
};

// Collects failed checks for one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ += !ok;
  }
  Outcome outcome(std::string summary) const {
    if (failed_ == 0) return {Outcome::pass, std::move(summary)};
    std::string detail = fmt::format("{} of {} checks failed", failed_, checks_);
    for (const auto& f : failures_) detail += "; " + f;
    return {Outcome::fail, detail};
  }

 private:
  std::size_t checks_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> random_distribution(Xoshiro256& rng, std::size_t n) {
  std::vector<double> p(n);
  double sum = 0;
  for (auto& x : p) sum += x = -std::log(1.0 - rng.uniform01());
  for (auto& x : p) x /= sum;
  return p;
}

double normal(Xoshiro256& rng) {
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Outcome metric_identities() {
  const auto start = std::chrono::steady_clock::now();
  Checker c;
  Xoshiro256 rng(20240611);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 2 + rng.uniform_below(199);
    const auto p = random_distribution(rng, n), q = random_distribution(rng, n);
    const double ch = chebyshev(p, q), e = euclidean(p, q), se = squared_euclidean(p, q);
    c.expect(std::abs(se - e * e) <= 1e-12, fmt::format("pair {}: d_se != d_e^2", i));
    c.expect(ch <= e, fmt::format("pair {}: d_ch > d_e", i));
    c.expect(ch <= 1.0 && e <= std::sqrt(2.0), fmt::format("pair {}: bound", i));
    c.expect(ch == chebyshev(q, p) && e == euclidean(q, p) && se == squared_euclidean(q, p),
             fmt::format("pair {}: asymmetric", i));
    c.expect(ch > 0 && e > 0 && se > 0, fmt::format("pair {}: distinct vectors at distance 0", i));
    c.expect(chebyshev(p, p) == 0 && euclidean(p, p) == 0 && squared_euclidean(p, p) == 0,
             fmt::format("pair {}: nonzero self distance", i));
  }
  const double secs = seconds_since(start);
  c.expect(secs < 5.0, fmt::format("took {:.2f}s", secs));
  return c.outcome(fmt::format("10000 random pairs, {:.2f}s", secs));
}

Outcome worked_metric_case() {
  Checker c;
  const std::vector<double> p{0.5, 0.3, 0.2}, q{0.2, 0.5, 0.3};
  c.expect(std::abs(chebyshev(p, q) - 0.3) <= 1e-12, fmt::format("d_ch = {}", chebyshev(p, q)));
  c.expect(std::abs(squared_euclidean(p, q) - 0.14) <= 1e-12, fmt::format("d_se = {}", squared_euclidean(p, q)));
  c.expect(std::abs(euclidean(p, q) - std::sqrt(0.14)) <= 1e-12, fmt::format("d_e = {}", euclidean(p, q)));
  return c.outcome(fmt::format("d_ch={} d_e={} d_se={}", chebyshev(p, q), euclidean(p, q), squared_euclidean(p, q)));
}

Outcome t_cdf_kernel() {
  Checker c;
  for (double df : {1.0, 2.0, 5.0, 30.0, 1e6}) c.expect(stats::t_cdf(0, df) == 0.5, fmt::format("t=0 df={}", df));
  const double cauchy = stats::t_cdf(1, 1);
  c.expect(std::abs(cauchy - 0.75) <= 1e-10, fmt::format("t_cdf(1,1) = {}", cauchy));
  const double normal_limit = stats::t_cdf(1.959964, 1e6);
  c.expect(std::abs(normal_limit - 0.975) <= 1e-4, fmt::format("t_cdf(1.959964,1e6) = {}", normal_limit));
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double t = -50.0 + 100.0 * i / 999.0;
    for (double df : {0.5, 1.0, 3.0, 17.0, 250.0, 1e6}) worst = std::max(worst, std::abs(stats::t_cdf(t, df) + stats::t_cdf(-t, df) - 1.0));
  }
  c.expect(worst <= 1e-10, fmt::format("symmetry error {}", worst));
  return c.outcome(fmt::format("t_cdf(1,1)={} t_cdf(1.959964,1e6)={:.7f} max symmetry error {:.1e}", cauchy,
                               normal_limit, worst));
}

struct TTestCase {
  std::vector<double> f;
  std::vector<double> r;
  bool pooled;
  double t, df, p;
};
struct CdfCase {
  double x, df, expected;
};
struct BetaCase {
  double x, a, b, expected;
};
#include "test_stats_reference.inc"

Outcome t_test_oracle() {
  const auto start = std::chrono::steady_clock::now();
  Checker c;
  double worst = 0;
  for (std::size_t i = 0; i < kTTestCases.size(); ++i) {
    const auto& k = kTTestCases[i];
    const auto r = stats::welch_t_test(k.f, k.r, stats::Alternative::fake_greater,
                                       k.pooled ? stats::VarianceMode::pooled : stats::VarianceMode::welch);
    const double err = std::max({std::abs(r.t - k.t) / std::max(1.0, std::abs(k.t)),
                                 std::abs(r.df - k.df) / std::max(1.0, k.df), std::abs(r.p - k.p)});
    worst = std::max(worst, err);
    c.expect(err <= 1e-9, fmt::format("case {} off by {}", i, err));
  }
  c.expect(kTTestCases.size() >= 20, "reference suite too small");

  Xoshiro256 rng(99);
  int rejected = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> f(20), r(25);
    for (auto& x : f) x = 0.3 + 0.1 * normal(rng);
    for (auto& x : r) x = 0.3 + 0.1 * normal(rng);
    rejected += stats::welch_t_test(f, r).p < 0.05;
  }
  const double rate = rejected / 2000.0;
  c.expect(rate >= 0.03 && rate <= 0.07, fmt::format("null rejection rate {}", rate));
  const double secs = seconds_since(start);
  c.expect(secs < 30.0, fmt::format("took {:.2f}s", secs));
  return c.outcome(fmt::format("{} reference cases, max error {:.1e}; null rejection rate {:.4f}; {:.2f}s",
                               kTTestCases.size(), worst, rate, secs));
}

Outcome lda_invariants() {
  const auto start = std::chrono::steady_clock::now();
  Checker c;
  const SeparableCorpus corpus(50, 20, 7);  // 100 documents
  LdaConfig cfg;
  cfg.num_topics = 2;
  cfg.train_iters = 200;
  cfg.seed = 31;

  std::int64_t corpus_tokens = 0;
  for (const auto& d : corpus.docs) corpus_tokens += static_cast<std::int64_t>(d.total());
  int sweeps = 0;
  bool conserved = true;
  const auto observer = [&](const GibbsSnapshot& s) {
    ++sweeps;
    const auto n = static_cast<std::size_t>(s.num_topics);
    for (std::size_t d = 0; d < s.num_docs(); ++d) {
      std::int64_t sum = 0;
      for (std::size_t k = 0; k < n; ++k) sum += s.doc_topic[d * n + k];
      conserved &= sum == s.doc_offsets[d + 1] - s.doc_offsets[d];
    }
    std::int64_t all = 0;
    for (std::size_t k = 0; k < n; ++k) {
      std::int64_t sum = 0;
      for (std::size_t w = 0; w < s.vocab_size; ++w) sum += s.word_topic[w * n + k];
      conserved &= sum == s.topic_totals[k];
      all += s.topic_totals[k];
    }
    conserved &= all == corpus_tokens;
  };
  const auto model = train_lda(corpus.docs, corpus.dict, cfg, observer);
  c.expect(sweeps == cfg.train_iters, "observer not called every sweep");
  c.expect(conserved, "count conservation violated");

  const auto again = train_lda(corpus.docs, corpus.dict, cfg);
  bool same = true;
  for (int k = 0; k < 2; ++k)
    for (std::uint32_t w = 0; w < corpus.dict.size(); ++w) same &= model.topic_word(k, w) == again.topic_word(k, w);
  c.expect(same, "training not reproducible");
  c.expect(infer_topics(model, corpus.docs[0], 5).p == infer_topics(again, corpus.docs[0], 5).p,
           "inference not reproducible");

  const auto empty = infer_topics(model, BowDoc{"empty", {}}, 1);
  c.expect(empty.p == std::vector<double>(2, 0.5), "empty document is not the uniform prior");

  double purity = 0;
  for (int k = 0; k < 2; ++k) {
    const auto top = model.top_words(k, 5);
    int low = 0;
    for (auto w : top) low += w < 5;
    purity += std::max(low, 5 - low) / 5.0;
  }
  purity /= 2;
  c.expect(purity >= 0.9, fmt::format("purity {}", purity));
  const double secs = seconds_since(start);
  c.expect(secs < 60.0, fmt::format("took {:.2f}s", secs));
  return c.outcome(fmt::format("{} sweeps conserved counts, purity {:.2f}, {:.2f}s", sweeps, purity, secs));
}

unsigned worker_count() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

Outcome synthetic_direction() {
  const auto start = std::chrono::steady_clock::now();
  Checker c;
  const auto [va, vb] = default_synthetic_vocabulary();
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto docs = make_synthetic(200, 10, va, vb, seed);
    ExperimentConfig cfg;
    cfg.l_values = {5};
    cfg.n_values = {10};
    cfg.seed = seed;
    cfg.jobs = worker_count();
    const auto report = run_experiment(docs, cfg);
    double worst_p = 0;
    for (Metric m : kAllMetrics) {
      const auto* cell = report.find_cell(m, 5, 10);
      if (!cell || !cell->test) {
        c.expect(false, fmt::format("seed {} {}: no test", seed, to_string(m)));
        continue;
      }
      c.expect(cell->fake->mean > cell->real->mean, fmt::format("seed {} {}: fake mean {} <= real mean {}", seed,
                                                                to_string(m), cell->fake->mean, cell->real->mean));
      c.expect(cell->test->p < 0.01, fmt::format("seed {} {}: p = {}", seed, to_string(m), cell->test->p));
      worst_p = std::max(worst_p, cell->test->p);
    }
    detail += fmt::format(" seed {}: max p {:.2e};", seed, worst_p);
  }
  const double secs = seconds_since(start);
  c.expect(secs < 120.0, fmt::format("took {:.1f}s", secs));
  return c.outcome(fmt::format("5 seeds x 3 metrics;{} {:.1f}s", detail, secs));
}

Outcome isot_direction() {
  const char* dir = std::getenv("THEMATIC_ISOT_DIR");
  if (!dir || !*dir) return {Outcome::skip, "set THEMATIC_ISOT_DIR to a directory with Fake.csv and True.csv"};
  if (!std::filesystem::exists(std::filesystem::path(dir) / "Fake.csv") ||
      !std::filesystem::exists(std::filesystem::path(dir) / "True.csv"))
    return {Outcome::skip, fmt::format("{} lacks Fake.csv/True.csv", dir)};

  const auto start = std::chrono::steady_clock::now();
  Checker c;
  const auto loaded = load_corpus(dir, CorpusFormat::isot);
  ExperimentConfig cfg;
  cfg.l_values = {5};
  cfg.metrics = {Metric::ch};
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto report = run_experiment(loaded.documents, cfg);
  std::vector<double> fake, real;
  std::string detail;
  for (int n : cfg.n_values) {
    const auto* cell = report.find_cell(Metric::ch, 5, n);
    if (!cell || !cell->fake || !cell->real) {
      c.expect(false, fmt::format("N={}: missing aggregates", n));
      continue;
    }
    c.expect(cell->fake->mean > cell->real->mean,
             fmt::format("N={}: mean fake {} <= mean real {}", n, cell->fake->mean, cell->real->mean));
    detail += fmt::format(" N={}: {:.4f}/{:.4f};", n, cell->fake->mean, cell->real->mean);
  }
  for (const auto& r : report.records) (r.label == Label::fake ? fake : real).push_back(r.d_ch);
  const auto pooled = stats::welch_t_test(fake, real);
  c.expect(pooled.p < 0.05, fmt::format("pooled p = {}", pooled.p));
  return c.outcome(fmt::format("{} documents; mean D_Ch fake/real{} pooled p {:.3g}; {:.0f}s", loaded.documents.size(),
                               detail, pooled.p, seconds_since(start)));
}

Outcome cli_determinism() {
  Checker c;
  TempDir dir("acceptance");
  const auto corpus = (dir / "synthetic.jsonl").string();
  const auto cfg = dir.write("grid.ini",
                             "[pipeline]\nl_values = 1, 3, 5\nn_values = 10, 20\njobs = 4\nseed = 2024\n")
                       .string();
  std::ostringstream sink;
  const auto cli = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "thematic");
    return cli::run(args, sink, sink);
  };
  c.expect(cli({"synth", "--out", corpus, "--n-per-class", "100", "--seed", "11"}) == 0, "synth failed");
  for (const char* out : {"a", "b"})
    c.expect(cli({"run", "--config", cfg, "--corpus", corpus, "--out", (dir / out).string()}) == 0,
             fmt::format("run {} failed: {}", out, sink.str()));
  for (const char* f : {"records.csv", "aggregates.csv", "tests.csv"}) {
    const auto a = slurp(dir / "a" / f), b = slurp(dir / "b" / f);
    c.expect(!a.empty() && a == b, fmt::format("{} differs", f));
  }
  return c.outcome("records.csv, aggregates.csv and tests.csv byte-identical across two runs");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"metric identities on random distributions", metric_identities},
      {"worked metric example", worked_metric_case},
      {"Student-t CDF kernel", t_cdf_kernel},
      {"t-test reference suite and null calibration", t_test_oracle},
      {"LDA invariants", lda_invariants},
      {"synthetic corpus: fake-like deviates more", synthetic_direction},
      {"real corpus (ISOT layout): fake deviates more", isot_direction},
      {"run determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Outcome::fail, fmt::format("exception: {}", e.what())};
    }
    const char* tag = o.kind == Outcome::pass ? "PASS" : o.kind == Outcome::fail ? "FAIL" : "SKIP";
    failed += o.kind == Outcome::fail;
    std::cout << fmt::format("[{}] criterion {}: {} ({})", tag, i + 1, criteria[i].first, o.detail) << std::endl;
  }
  std::cout << (failed ? fmt::format("{} criteria failed", failed) : std::string("all criteria passed or skipped"))
            << std::endl;
  return failed ? 1 : 0;
}
