#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thematic/textprep.hpp"

namespace thematic::cli {

inline constexpr std::string_view kVersion = "0.3.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,      // bad flags or configuration
  kInputData = 2,  // unreadable or invalid input
  kInternal = 3,
};

// Entry point shared by the `thematic` binary and in-process tests.
// args[0] is the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

// Hex SHA-256 of a file's bytes. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);

// bow.tsv: one "doc_id<TAB>label<TAB>id:count ..." line per document.
void write_bow_file(const std::filesystem::path& path, std::span<const PreparedDoc> docs,
                    std::span<const BowDoc> bows);
std::vector<BowDoc> read_bow_file(const std::filesystem::path& path);

}  // namespace thematic::cli
