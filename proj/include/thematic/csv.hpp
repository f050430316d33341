#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace thematic::csv {

// One parsed record plus the 1-based line on which it started (quoted
// fields may span several physical lines).
struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// Streaming RFC-4180 reader: comma separator, '"' quoting with "" escapes,
// CRLF or LF record terminators. Lines beginning with '#' outside a quoted
// field are skipped when `skip_comments` is set.
class Reader {
 public:
  explicit Reader(std::istream& in, bool skip_comments = false)
      : in_(in), skip_comments_(skip_comments) {}

  // Returns the next record, or nullopt at end of input. Throws ParseError
  // on an unterminated quote.
  std::optional<Record> next();

 private:
  std::istream& in_;
  bool skip_comments_;
  std::size_t line_ = 1;
};

// Quotes `field` if it contains a separator, quote, or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace thematic::csv
