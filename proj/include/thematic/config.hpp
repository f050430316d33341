#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "thematic/pipeline.hpp"

namespace thematic {

enum class KeyType { string, integer, uint64, real, real_or_auto, int_list, choice, choice_list };

struct KeySpec {
  std::string_view key;  // "section.name"
  KeyType type;
  std::string_view default_value;
  std::vector<std::string_view> choices;  // for choice / choice_list
  std::string_view help;
};

// Every recognised key with its type and default.
const std::vector<KeySpec>& config_schema();

// Environment variable overriding `key`: THEMATIC_<SECTION>_<NAME>.
std::string env_var_name(std::string_view key);

// Flat typed key-value configuration.
//
// File syntax: "[section]" headers, "name = value" lines, '#' comments.
// Every key has a default, so the empty file is a complete config. Values
// are type-checked when set; unknown keys are rejected. Lists are
// comma-separated.
class Config {
 public:
  Config();

  void load_file(const std::filesystem::path& path);
  void load_text(std::string_view text, std::string_view source = "<text>");

  // Applies THEMATIC_* overrides. `lookup` defaults to std::getenv.
  void apply_env(const std::function<const char*(const char*)>& lookup = {});

  // Throws ConfigError for an unknown key or a value of the wrong type.
  void set(std::string_view key, std::string_view value, std::string_view source = "<flag>");

  const std::string& raw(std::string_view key) const;
  std::string get_string(std::string_view key) const { return raw(key); }
  std::int64_t get_int(std::string_view key) const;
  std::uint64_t get_uint64(std::string_view key) const;
  double get_real(std::string_view key) const;
  std::vector<int> get_int_list(std::string_view key) const;
  std::vector<std::string> get_list(std::string_view key) const;

  // Resolved values, sorted by key.
  const std::map<std::string, std::string, std::less<>>& values() const noexcept { return values_; }

  // The same key set rendered back in file syntax.
  std::string dump() const;

  ExperimentConfig experiment() const;
  CsvAdapter csv_adapter() const;
  CorpusFormat corpus_format() const;
  TextResources text_resources() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace thematic
