#include "thematic/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include "json.hpp"

#include "thematic/csv.hpp"
#include "thematic/error.hpp"

namespace thematic {
namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open corpus file '{}'", path.string()));
  return in;
}

class CorpusBuilder {
 public:
  explicit CorpusBuilder(LoadResult& out) : out_(out) {}

  void add(std::string id, Label label, std::string text, std::size_t line) {
    if (id.empty()) throw ParseError("empty id", line);
    if (!seen_.insert(id).second)
      throw ValidationError(fmt::format("line {}: duplicate document id '{}'", line, id));
    if (is_blank(text)) {
      out_.warnings.push_back(fmt::format("line {}: document '{}' has empty text; skipped", line, id));
      return;
    }
    out_.documents.push_back(Document{std::move(id), label, std::move(text), {}});
  }

 private:
  LoadResult& out_;
  std::unordered_set<std::string> seen_;
};

Label require_label(std::string_view raw, std::size_t line) {
  auto label = parse_label(raw);
  if (!label) throw ParseError(fmt::format("label '{}' is not one of fake, real", raw), line);
  return *label;
}

void load_jsonl(std::istream& in, CorpusBuilder& builder) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (is_blank(text)) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(fmt::format("invalid JSON: {}", e.what()), line);
    }
    if (!obj.is_object()) throw ParseError("record is not a JSON object", line);

    auto field = [&](const char* name) -> std::string {
      auto it = obj.find(name);
      if (it == obj.end()) throw ParseError(fmt::format("missing field '{}'", name), line);
      if (it->is_string()) return it->get<std::string>();
      // Numeric ids are common in exported datasets.
      if (std::string_view(name) == "id" && it->is_number_integer()) return it->dump();
      throw ParseError(fmt::format("field '{}' is not a string", name), line);
    };
    std::string id = field("id");
    Label label = require_label(field("label"), line);
    builder.add(std::move(id), label, field("text"), line);
  }
}

void load_csv(std::istream& in, const CsvAdapter& adapter, CorpusBuilder& builder) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw ParseError("missing CSV header row", 1);

  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    if (name.empty()) return std::nullopt;
    auto& cols = header->fields;
    // Tolerate a UTF-8 BOM on the first header cell.
    for (std::size_t i = 0; i < cols.size(); ++i) {
      std::string_view col = cols[i];
      if (i == 0 && col.starts_with("\xEF\xBB\xBF")) col.remove_prefix(3);
      if (col == name) return i;
    }
    throw ParseError(fmt::format("CSV header has no column '{}'", name), header->line);
  };

  const auto id_col = column(adapter.id_column);
  const auto label_col = adapter.fixed_label ? std::nullopt : column(adapter.label_column);
  const auto text_col = column(adapter.text_column);
  if (!text_col) throw ConfigError("CSV adapter needs a text column");
  if (!adapter.fixed_label && !label_col) throw ConfigError("CSV adapter needs a label column or a fixed label");

  std::size_t row = 0;
  while (auto rec = reader.next()) {
    ++row;
    auto get = [&](std::size_t col, const char* what) -> std::string& {
      if (col >= rec->fields.size())
        throw ParseError(fmt::format("record has no {} field (only {} columns)", what, rec->fields.size()),
                         rec->line);
      return rec->fields[col];
    };
    std::string id = id_col ? get(*id_col, "id") : adapter.id_prefix + std::to_string(row);
    Label label = adapter.fixed_label ? *adapter.fixed_label : require_label(get(*label_col, "label"), rec->line);
    builder.add(std::move(id), label, std::move(get(*text_col, "text")), rec->line);
  }
}

}  // namespace

std::string_view to_string(Label label) noexcept {
  return label == Label::fake ? "fake" : "real";
}

std::optional<Label> parse_label(std::string_view text) {
  const std::string lower = lowercase(text);
  if (lower == "fake") return Label::fake;
  if (lower == "real") return Label::real;
  return std::nullopt;
}

std::string_view to_string(CorpusFormat format) noexcept {
  switch (format) {
    case CorpusFormat::jsonl: return "jsonl";
    case CorpusFormat::csv: return "csv";
    case CorpusFormat::isot: return "isot";
  }
  return "?";
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view text) {
  const std::string lower = lowercase(text);
  if (lower == "jsonl") return CorpusFormat::jsonl;
  if (lower == "csv") return CorpusFormat::csv;
  if (lower == "isot") return CorpusFormat::isot;
  return std::nullopt;
}

LoadResult load_corpus(const std::filesystem::path& path, CorpusFormat format, const CsvAdapter& adapter) {
  LoadResult result;
  CorpusBuilder builder(result);
  switch (format) {
    case CorpusFormat::jsonl: {
      auto in = open_input(path);
      load_jsonl(in, builder);
      break;
    }
    case CorpusFormat::csv: {
      auto in = open_input(path);
      load_csv(in, adapter, builder);
      break;
    }
    case CorpusFormat::isot: {
      if (!std::filesystem::is_directory(path))
        throw IoError(fmt::format("ISOT corpus '{}' is not a directory", path.string()));
      for (auto [file, label, prefix] : {std::tuple{"Fake.csv", Label::fake, "fake-"},
                                         std::tuple{"True.csv", Label::real, "real-"}}) {
        auto in = open_input(path / file);
        CsvAdapter isot{.id_column = "", .label_column = "", .text_column = "text",
                        .id_prefix = prefix, .fixed_label = label};
        try {
          load_csv(in, isot, builder);
        } catch (const ParseError& e) {
          throw ParseError(fmt::format("{}: {}", file, e.what()), 0);
        }
      }
      break;
    }
  }
  return result;
}

void check_opening_length(int l) {
  if (l < kMinOpening || l > kMaxOpening)
    throw ConfigError(fmt::format("opening length l={} is outside the valid range {}-{}", l, kMinOpening,
                                  kMaxOpening));
}

std::variant<SplitDoc, Filtered> split_document(const Document& doc, int l) {
  check_opening_length(l);
  const auto n = doc.sentences.size();
  if (!survives_split(n, l)) return Filtered{doc.id, n};

  SplitDoc split;
  split.doc_id = doc.id;
  split.l = l;
  split.opening.assign(doc.sentences.begin(), doc.sentences.begin() + l);
  split.remainder.assign(doc.sentences.begin() + l, doc.sentences.end());
  return split;
}

}  // namespace thematic
