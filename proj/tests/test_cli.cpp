#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "temp_dir.hpp"
#include "thematic/cli.hpp"
#include "thematic/csv.hpp"

using namespace thematic;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "thematic");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

constexpr const char* kFastConfig =
    "[topicmodel]\ntrain_iters = 60\ninfer_iters = 40\nburn_in = 10\n"
    "[pipeline]\nl_values = 3, 5\nn_values = 4, 6\njobs = 2\n";

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
  CHECK(run_cli({"run", "--out", "x"}).code == cli::kUsage);
  const auto v = run_cli({"--version"});
  CHECK(v.code == cli::kOk);
  CHECK(v.out.find(std::string(cli::kVersion)) != std::string::npos);
}

TEST_CASE("missing corpus names the path") {
  TempDir dir("cli");
  const auto missing = (dir / "absent.jsonl").string();
  const auto r = run_cli({"run", "--corpus", missing, "--out", (dir / "out").string()});
  CHECK(r.code == cli::kInputData);
  CHECK(r.err.find(missing) != std::string::npos);
}

TEST_CASE("opening length outside 1-5") {
  TempDir dir("cli");
  const auto corpus = dir / "s.jsonl";
  REQUIRE(run_cli({"synth", "--out", corpus.string(), "--n-per-class", "3"}).code == 0);
  const auto cfg = dir.write("bad.ini", "[pipeline]\nl_values = 7\n");
  auto r = run_cli({"run", "--config", cfg.string(), "--corpus", corpus.string(), "--out", (dir / "o").string()});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("1-5") != std::string::npos);
  r = run_cli({"run", "--corpus", corpus.string(), "--out", (dir / "o").string(), "--l", "7"});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("1-5") != std::string::npos);
}

TEST_CASE("bad input data exits 2") {
  TempDir dir("cli");
  const auto corpus = dir.write("bad.jsonl", "{\"id\": \"a\", \"label\": \"opinion\", \"text\": \"x\"}\n");
  const auto r = run_cli({"run", "--corpus", corpus.string(), "--out", (dir / "o").string()});
  CHECK(r.code == cli::kInputData);
  CHECK(r.err.find("line 1") != std::string::npos);
}

TEST_CASE("run writes the report directory") {
  TempDir dir("cli");
  const auto corpus = dir / "s.jsonl";
  REQUIRE(run_cli({"synth", "--out", corpus.string(), "--n-per-class", "12", "--seed", "3"}).code == 0);
  const auto cfg = dir.write("fast.ini", kFastConfig);
  const auto out = dir / "out";
  const auto r = run_cli({"run", "--config", cfg.string(), "--corpus", corpus.string(), "--out", out.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const char* f : {"records.csv", "aggregates.csv", "tests.csv", "filtered.csv", "table2.csv", "table3.csv",
                        "plot_ch_l5.csv", "plot_e_l5.csv", "plot_se_l5.csv", "manifest.json"})
    CHECK_MESSAGE(std::filesystem::exists(out / f), f);

  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["version"] == std::string(cli::kVersion));
  CHECK(manifest["config"]["pipeline.n_values"] == "4, 6");
  CHECK(manifest["seeds"]["master"] == 42);
  CHECK(manifest["seeds"]["training"].size() == 2);
  CHECK(manifest["inputs"][0]["sha256"] == cli::sha256_file(corpus));
  CHECK(manifest["timings_seconds"].contains("experiment"));
}

TEST_CASE("staged commands reproduce run") {
  TempDir dir("cli");
  const auto corpus = (dir / "s.jsonl").string();
  REQUIRE(run_cli({"synth", "--out", corpus, "--n-per-class", "10", "--seed", "8"}).code == 0);
  const auto cfg = dir.write("fast.ini", kFastConfig).string();
  const auto run_dir = dir / "run", prep = dir / "prep", models = dir / "models", analyzed = dir / "an",
             reported = dir / "rep";
  REQUIRE(run_cli({"run", "--config", cfg, "--corpus", corpus, "--out", run_dir.string(), "--dataset", "d"}).code == 0);
  REQUIRE(run_cli({"prep", "--config", cfg, "--corpus", corpus, "--out", prep.string()}).code == 0);
  REQUIRE(run_cli({"train", "--config", cfg, "--prep", prep.string(), "--out", models.string()}).code == 0);
  CHECK(std::filesystem::exists(models / "model_N4.lda"));
  CHECK(std::filesystem::exists(models / "model_N6.lda"));
  REQUIRE(run_cli({"analyze", "--config", cfg, "--corpus", corpus, "--prep", prep.string(), "--models",
                   models.string(), "--out", analyzed.string()})
              .code == 0);
  REQUIRE(run_cli({"report", "--config", cfg, "--records", (analyzed / "records.csv").string(), "--out",
                   reported.string(), "--dataset", "d"})
              .code == 0);
  CHECK(slurp(analyzed / "records.csv") == slurp(run_dir / "records.csv"));
  for (const char* f : {"aggregates.csv", "tests.csv", "filtered.csv", "table2.csv", "table3.csv", "plot_ch_l5.csv"})
    CHECK_MESSAGE(slurp(reported / f) == slurp(run_dir / f), f);

  // A model trained on another dictionary is refused.
  const auto other = (dir / "o.jsonl").string();
  REQUIRE(run_cli({"synth", "--out", other, "--n-per-class", "4", "--seed", "9"}).code == 0);
  const auto prep2 = dir / "prep2";
  std::filesystem::create_directories(prep2);
  REQUIRE(run_cli({"prep", "--config", cfg, "--corpus", other, "--out", prep2.string()}).code == 0);
  std::ofstream(prep2 / "dictionary.txt", std::ios::app) << "extra_token\n";
  const auto bad = run_cli({"analyze", "--config", cfg, "--corpus", corpus, "--prep", prep2.string(), "--models",
                            models.string(), "--out", (dir / "x").string()});
  CHECK(bad.code == cli::kInputData);
}

TEST_CASE("rank command") {
  TempDir dir("cli");
  const auto corpus = (dir / "s.jsonl").string();
  REQUIRE(run_cli({"synth", "--out", corpus, "--n-per-class", "8"}).code == 0);
  const auto cfg = dir.write("fast.ini", kFastConfig).string();
  REQUIRE(run_cli({"run", "--config", cfg, "--corpus", corpus, "--out", (dir / "o").string()}).code == 0);
  const auto r = run_cli({"rank", "--config", cfg, "--records", (dir / "o" / "records.csv").string(), "--k", "3",
                          "--l", "5", "--topics", "4"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  std::istringstream in(r.out);
  csv::Reader reader(in);
  std::vector<csv::Record> rows;
  while (auto row = reader.next()) rows.push_back(*row);
  REQUIRE(rows.size() == 1 + 2 * 2 * 3);
  CHECK(rows[1].fields[3] == "fake");
  CHECK(rows[1].fields[4] == "most");
  CHECK(rows.back().fields[3] == "real");
  CHECK(rows.back().fields[4] == "least");
}

TEST_CASE("bow file round trip") {
  TempDir dir("cli");
  std::vector<PreparedDoc> docs(2);
  docs[0].label = Label::fake;
  std::vector<BowDoc> bows{{"a", {{0, 2}, {5, 1}}}, {"b", {}}};
  cli::write_bow_file(dir / "b.tsv", docs, bows);
  const auto back = cli::read_bow_file(dir / "b.tsv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].doc_id == "a");
  CHECK(back[0].counts == bows[0].counts);
  CHECK(back[1].empty());
  dir.write("bad.tsv", "a\tfake\t1:x\n");
  CHECK_THROWS(cli::read_bow_file(dir / "bad.tsv"));
}

TEST_CASE("sha256") {
  TempDir dir("cli");
  CHECK(cli::sha256_file(dir.write("abc", "abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
