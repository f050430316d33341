#include "thematic/csv.hpp"

#include "thematic/error.hpp"

namespace thematic::csv {

std::optional<Record> Reader::next() {
  for (;;) {
    if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;

    Record rec;
    rec.line = line_;
    std::string field;
    bool in_quotes = false;
    bool at_field_start = true;

    if (skip_comments_ && in_.peek() == '#') {
      std::string discard;
      std::getline(in_, discard);
      ++line_;
      continue;
    }

    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
      const char c = static_cast<char>(ch);
      if (in_quotes) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"' && at_field_start) {
        in_quotes = true;
        at_field_start = false;
      } else if (c == ',') {
        rec.fields.push_back(std::move(field));
        field.clear();
        at_field_start = true;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && in_.peek() == '\n') in_.get();
        ++line_;
        break;
      } else {
        field.push_back(c);
        at_field_start = false;
      }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", rec.line);
    rec.fields.push_back(std::move(field));

    // A bare empty line is not a record.
    if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
    return rec;
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace thematic::csv
