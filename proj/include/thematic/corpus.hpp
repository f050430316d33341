#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace thematic {

enum class Label { fake, real };

std::string_view to_string(Label label) noexcept;

// Case-insensitive; returns nullopt for anything outside {fake, real}.
std::optional<Label> parse_label(std::string_view text);

// One labeled news article. `sentences` is empty until segmented.
struct Document {
  std::string id;
  Label label = Label::real;
  std::string text;
  std::vector<std::string> sentences;

  friend bool operator==(const Document&, const Document&) = default;
};

// An article cut into its first `l` sentences and the rest.
struct SplitDoc {
  std::string doc_id;
  std::vector<std::string> opening;
  std::vector<std::string> remainder;
  int l = 0;
};

// Marker for a document too short for the requested opening length.
struct Filtered {
  std::string doc_id;
  std::size_t sentence_count = 0;
};

inline constexpr int kMinOpening = 1;
inline constexpr int kMaxOpening = 5;

enum class CorpusFormat { jsonl, csv, isot };

std::string_view to_string(CorpusFormat format) noexcept;
std::optional<CorpusFormat> parse_corpus_format(std::string_view text);

// Maps a dataset's own column names onto (id, label, text). An empty
// `id_column` makes the loader synthesize ids as "<id_prefix><row>";
// `fixed_label` stands in for a missing label column.
struct CsvAdapter {
  std::string id_column = "id";
  std::string label_column = "label";
  std::string text_column = "text";
  std::string id_prefix;
  std::optional<Label> fixed_label;
};

struct LoadResult {
  std::vector<Document> documents;
  // One entry per record rejected without aborting the load (blank text).
  std::vector<std::string> warnings;
};

// Loads a labeled corpus. For `isot` the path is a directory holding
// Fake.csv and True.csv (title,text,subject,date); ids become
// "fake-<row>"/"real-<row>".
//
// Throws IoError if the file cannot be read, ParseError (with line number)
// for malformed records or labels outside {fake, real}, ValidationError for
// duplicate ids.
LoadResult load_corpus(const std::filesystem::path& path, CorpusFormat format,
                       const CsvAdapter& adapter = {});

// Splits a segmented document at sentence `l`. Documents with fewer than
// l + 1 sentences are returned as Filtered. Throws ConfigError unless
// 1 <= l <= 5.
std::variant<SplitDoc, Filtered> split_document(const Document& doc, int l);

void check_opening_length(int l);

// True iff a document of `sentence_count` sentences has an opening of `l`
// sentences and a non-empty remainder.
constexpr bool survives_split(std::size_t sentence_count, int l) noexcept {
  return l >= 0 && sentence_count >= static_cast<std::size_t>(l) + 1;
}

}  // namespace thematic
