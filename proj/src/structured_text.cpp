#include "reflexgrip/structured_text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "reflexgrip/errors.hpp"

namespace reflexgrip::text {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Drops a trailing '#' comment that is not inside a string literal.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

std::optional<double> to_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return out;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

[[noreturn]] void fail(std::string_view origin, int line, const std::string& msg) {
  std::ostringstream os;
  os << origin << ':' << line << ": " << msg;
  throw ParseError(os.str());
}

Value parse_value(std::string_view raw, std::string_view origin, int line) {
  raw = trim(raw);
  if (raw.empty()) fail(origin, line, "missing value");
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') fail(origin, line, "unterminated string");
    return std::string(raw.substr(1, raw.size() - 2));
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') fail(origin, line, "unterminated list");
    std::vector<double> values;
    auto inner = trim(raw.substr(1, raw.size() - 2));
    if (inner.empty()) return values;
    for (auto part : split_commas(inner)) {
      if (part.empty()) continue;  // trailing comma
      auto v = to_number(part);
      if (!v) fail(origin, line, "list element is not a number: '" + std::string(part) + "'");
      values.push_back(*v);
    }
    return values;
  }
  if (auto v = to_number(raw)) return *v;
  fail(origin, line, "unrecognized value '" + std::string(raw) + "'");
}

const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "number";
    case 1: return "boolean";
    case 2: return "string";
    default: return "list";
  }
}

}  // namespace

bool Table::has(std::string_view key) const { return find(key) != nullptr; }

const Entry* Table::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

std::string Table::where(int at_line) const {
  std::ostringstream os;
  os << origin << ':' << at_line << " [" << name << ']';
  return os.str();
}

double Table::number(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(where(line) + ": missing required key '" + std::string(key) + "'");
  if (const auto* d = std::get_if<double>(&e->value)) return *d;
  throw ConfigError(where(e->line) + ": key '" + e->key + "' must be a number, got " +
                    type_name(e->value));
}

double Table::number_or(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

bool Table::boolean_or(std::string_view key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (const auto* b = std::get_if<bool>(&e->value)) return *b;
  throw ConfigError(where(e->line) + ": key '" + e->key + "' must be true or false");
}

std::string Table::string_or(std::string_view key, std::string fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (const auto* s = std::get_if<std::string>(&e->value)) return *s;
  throw ConfigError(where(e->line) + ": key '" + e->key + "' must be a quoted string");
}

std::optional<std::vector<double>> Table::list(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) return std::nullopt;
  if (const auto* l = std::get_if<std::vector<double>>(&e->value)) return *l;
  throw ConfigError(where(e->line) + ": key '" + e->key + "' must be a list of numbers");
}

void Table::require_known_keys(std::initializer_list<std::string_view> allowed) const {
  for (const auto& e : entries) {
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
      throw ConfigError(where(e.line) + ": unknown key '" + e.key + "'");
    }
  }
}

const Table* Document::find(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::vector<const Table*> Document::all(std::string_view name) const {
  std::vector<const Table*> out;
  for (const auto& t : tables) {
    if (t.name == name) out.push_back(&t);
  }
  return out;
}

void Document::require_known_sections(std::initializer_list<std::string_view> allowed) const {
  for (const auto& t : tables) {
    if (t.name.empty()) continue;
    if (std::find(allowed.begin(), allowed.end(), t.name) == allowed.end()) {
      throw ConfigError(t.where(t.line) + ": unknown section");
    }
  }
}

Document parse(std::string_view text, std::string_view origin) {
  Document doc;
  doc.tables.push_back(Table{});
  doc.tables.back().origin = std::string(origin);

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    auto line = trim(strip_comment(text.substr(pos, eol - pos)));
    ++line_no;
    pos = eol + 1;
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    if (line.front() == '[') {
      const bool repeated = line.size() >= 2 && line[1] == '[';
      const std::size_t open = repeated ? 2 : 1;
      if (line.size() < 2 * open + 1 || line.substr(line.size() - open) != (repeated ? "]]" : "]")) {
        fail(origin, line_no, "malformed section header");
      }
      auto name = trim(line.substr(open, line.size() - 2 * open));
      if (!valid_key(name)) fail(origin, line_no, "invalid section name");
      if (!repeated) {
        for (const auto& t : doc.tables) {
          if (t.name == name) fail(origin, line_no, "duplicate section [" + std::string(name) + "]");
        }
      }
      Table t;
      t.name = std::string(name);
      t.repeated = repeated;
      t.line = line_no;
      t.origin = std::string(origin);
      doc.tables.push_back(std::move(t));
    } else if (auto eq = line.find('='); eq != std::string_view::npos) {
      auto key = trim(line.substr(0, eq));
      if (!valid_key(key)) fail(origin, line_no, "invalid key '" + std::string(key) + "'");
      auto& table = doc.tables.back();
      if (table.has(key)) fail(origin, line_no, "duplicate key '" + std::string(key) + "'");
      table.entries.push_back({std::string(key), parse_value(line.substr(eq + 1), origin, line_no), line_no});
    } else {
      Row row;
      row.line = line_no;
      for (auto part : split_commas(line)) {
        auto v = to_number(part);
        if (!v) fail(origin, line_no, "expected 'key = value' or a numeric data row");
        row.values.push_back(*v);
      }
      doc.tables.back().rows.push_back(std::move(row));
    }
    if (eol == text.size()) break;
  }
  return doc;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Document load(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

}  // namespace reflexgrip::text
