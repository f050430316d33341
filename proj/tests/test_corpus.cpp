#include <sstream>
#include <variant>

#include "doctest.h"
#include "temp_dir.hpp"
#include "thematic/corpus.hpp"
#include "thematic/csv.hpp"
#include "thematic/error.hpp"

using namespace thematic;

namespace {

Document with_sentences(std::size_t n) {
  Document d{"d", Label::fake, "", {}};
  for (std::size_t i = 0; i < n; ++i) d.sentences.push_back("S" + std::to_string(i) + ".");
  return d;
}

}  // namespace

TEST_CASE("csv reader") {
  std::istringstream in("a,b,c\r\n\"x, y\",\"he said \"\"hi\"\"\",\"multi\nline\"\n\n# not a comment\nlast,,\n");
  csv::Reader reader(in);
  auto r = reader.next();
  REQUIRE(r);
  CHECK(r->fields == std::vector<std::string>{"a", "b", "c"});
  CHECK(r->line == 1);
  r = reader.next();
  REQUIRE(r);
  CHECK(r->fields == std::vector<std::string>{"x, y", "he said \"hi\"", "multi\nline"});
  CHECK(r->line == 2);
  r = reader.next();
  REQUIRE(r);
  CHECK(r->fields == std::vector<std::string>{"# not a comment"});
  CHECK(r->line == 5);
  r = reader.next();
  REQUIRE(r);
  CHECK(r->fields == std::vector<std::string>{"last", "", ""});
  CHECK_FALSE(reader.next());

  std::istringstream bad("a,\"open\n");
  csv::Reader bad_reader(bad);
  CHECK_THROWS_AS(bad_reader.next(), ParseError);
}

TEST_CASE("csv escape round trip") {
  const std::vector<std::string> row{"plain", "with,comma", "with \"quote\"", "line\nbreak", ""};
  std::ostringstream out;
  csv::write_row(out, row);
  std::istringstream in(out.str());
  csv::Reader reader(in);
  auto r = reader.next();
  REQUIRE(r);
  CHECK(r->fields == row);
}

TEST_CASE("labels") {
  CHECK(parse_label("FAKE") == Label::fake);
  CHECK(parse_label("Real") == Label::real);
  CHECK(parse_label("real") == Label::real);
  CHECK_FALSE(parse_label("satire"));
}

TEST_CASE("load jsonl") {
  TempDir dir("corpus");
  const auto path = dir.write("c.jsonl",
                              "{\"id\": \"a\", \"label\": \"fake\", \"text\": \"One. Two.\"}\n"
                              "\n"
                              "{\"id\": \"b\", \"label\": \"REAL\", \"text\": \"Three.\"}\n");
  const auto res = load_corpus(path, CorpusFormat::jsonl);
  REQUIRE(res.documents.size() == 2);
  CHECK(res.documents[0].id == "a");
  CHECK(res.documents[0].label == Label::fake);
  CHECK(res.documents[1].label == Label::real);
  CHECK(res.documents[1].text == "Three.");
  CHECK(res.warnings.empty());
}

TEST_CASE("load jsonl errors") {
  TempDir dir("corpus");
  const auto satire = dir.write("s.jsonl",
                                "{\"id\": \"a\", \"label\": \"fake\", \"text\": \"x\"}\n"
                                "{\"id\": \"b\", \"label\": \"satire\", \"text\": \"y\"}\n");
  try {
    load_corpus(satire, CorpusFormat::jsonl);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  const auto missing = dir.write("m.jsonl", "{\"id\": \"a\", \"text\": \"x\"}\n");
  CHECK_THROWS_AS(load_corpus(missing, CorpusFormat::jsonl), ParseError);

  const auto broken = dir.write("b.jsonl", "{\"id\": \"a\", \n");
  CHECK_THROWS_AS(load_corpus(broken, CorpusFormat::jsonl), ParseError);

  const auto dup = dir.write("d.jsonl",
                             "{\"id\": \"a\", \"label\": \"fake\", \"text\": \"x\"}\n"
                             "{\"id\": \"a\", \"label\": \"real\", \"text\": \"y\"}\n");
  CHECK_THROWS_AS(load_corpus(dup, CorpusFormat::jsonl), ValidationError);

  try {
    load_corpus(dir / "nope.jsonl", CorpusFormat::jsonl);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("nope.jsonl") != std::string::npos);
  }
}

TEST_CASE("blank text is a warning") {
  TempDir dir("corpus");
  const auto path = dir.write("c.jsonl",
                              "{\"id\": \"a\", \"label\": \"fake\", \"text\": \"   \"}\n"
                              "{\"id\": \"b\", \"label\": \"real\", \"text\": \"Kept.\"}\n");
  const auto res = load_corpus(path, CorpusFormat::jsonl);
  CHECK(res.documents.size() == 1);
  CHECK(res.warnings.size() == 1);
}

TEST_CASE("load csv with adapter") {
  TempDir dir("corpus");
  const auto path = dir.write("c.csv",
                              "\xEF\xBB\xBFkey,body,class\n"
                              "1,\"Hello, world. Bye.\",Fake\n"
                              "2,Plain,real\n");
  CsvAdapter adapter;
  adapter.id_column = "key";
  adapter.text_column = "body";
  adapter.label_column = "class";
  const auto res = load_corpus(path, CorpusFormat::csv, adapter);
  REQUIRE(res.documents.size() == 2);
  CHECK(res.documents[0].id == "1");
  CHECK(res.documents[0].text == "Hello, world. Bye.");
  CHECK(res.documents[0].label == Label::fake);

  CHECK_THROWS_AS(load_corpus(path, CorpusFormat::csv), ParseError);
}

TEST_CASE("load isot directory") {
  TempDir dir("isot");
  dir.write("Fake.csv", "title,text,subject,date\nT,Fake body.,news,2017\nU,Another.,news,2017\n");
  dir.write("True.csv", "title,text,subject,date\nV,True body.,politics,2017\n");
  const auto res = load_corpus(dir.path(), CorpusFormat::isot);
  REQUIRE(res.documents.size() == 3);
  CHECK(res.documents[0].label == Label::fake);
  CHECK(res.documents[2].label == Label::real);
  CHECK(res.documents[2].text == "True body.");
  CHECK(res.documents[0].id != res.documents[1].id);
}

TEST_CASE("split examples") {
  auto six = std::get<SplitDoc>(split_document(with_sentences(6), 5));
  CHECK(six.opening.size() == 5);
  CHECK(six.remainder.size() == 1);
  CHECK(std::holds_alternative<Filtered>(split_document(with_sentences(5), 5)));
  auto three = std::get<SplitDoc>(split_document(with_sentences(3), 1));
  CHECK(three.opening.size() == 1);
  CHECK(three.remainder.size() == 2);
}

TEST_CASE("split preserves sentences and matches the filter rule") {
  for (std::size_t n = 0; n < 12; ++n) {
    const auto doc = with_sentences(n);
    std::size_t previous_filtered = 0;
    for (int l = 1; l <= 5; ++l) {
      const auto out = split_document(doc, l);
      CHECK(std::holds_alternative<SplitDoc>(out) == (n >= static_cast<std::size_t>(l) + 1));
      CHECK(survives_split(n, l) == std::holds_alternative<SplitDoc>(out));
      const std::size_t filtered = std::holds_alternative<Filtered>(out);
      CHECK(filtered >= previous_filtered);
      previous_filtered = filtered;
      if (auto* s = std::get_if<SplitDoc>(&out)) {
        auto joined = s->opening;
        joined.insert(joined.end(), s->remainder.begin(), s->remainder.end());
        CHECK(joined == doc.sentences);
        CHECK(s->opening.size() == static_cast<std::size_t>(l));
      }
    }
  }
}

TEST_CASE("opening length range") {
  for (int l : {0, 6, 7, -1}) CHECK_THROWS_AS(split_document(with_sentences(10), l), ConfigError);
  try {
    check_opening_length(7);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("1-5") != std::string::npos);
  }
}
