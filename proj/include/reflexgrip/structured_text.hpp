#pragma once

// Reader for the small INI/TOML-like text format shared by calibration and
// scenario files:
//
//   # comment
//   key = 1.5              (number, true/false, "string" or [1, 2, 3])
//   [section]
//   [[repeated_section]]
//   10, 0.52               (bare numeric data row)

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace reflexgrip::text {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

struct Entry {
  std::string key;
  Value value;
  int line = 0;
};

struct Row {
  std::vector<double> values;
  int line = 0;
};

class Table {
 public:
  std::string name;  // empty for keys preceding the first header
  bool repeated = false;
  int line = 0;
  std::string origin;
  std::vector<Entry> entries;
  std::vector<Row> rows;

  [[nodiscard]] bool has(std::string_view key) const;
  [[nodiscard]] const Entry* find(std::string_view key) const;

  // Typed getters; a present key of the wrong type is a ConfigError.
  [[nodiscard]] double number(std::string_view key) const;
  [[nodiscard]] double number_or(std::string_view key, double fallback) const;
  [[nodiscard]] bool boolean_or(std::string_view key, bool fallback) const;
  [[nodiscard]] std::string string_or(std::string_view key, std::string fallback) const;
  [[nodiscard]] std::optional<std::vector<double>> list(std::string_view key) const;

  // Throws ConfigError naming the first key not in `allowed`.
  void require_known_keys(std::initializer_list<std::string_view> allowed) const;

  [[nodiscard]] std::string where(int at_line) const;
};

class Document {
 public:
  std::vector<Table> tables;

  [[nodiscard]] const Table* find(std::string_view name) const;
  [[nodiscard]] std::vector<const Table*> all(std::string_view name) const;

  // ConfigError naming the first header not in `allowed`. Root content is
  // not checked.
  void require_known_sections(std::initializer_list<std::string_view> allowed) const;
};

// Throws ParseError with "origin:line: message".
Document parse(std::string_view text, std::string_view origin = "<text>");
// Both throw IoError if the file cannot be read.
std::string read_file(const std::filesystem::path& path);
Document load(const std::filesystem::path& path);

}  // namespace reflexgrip::text
