#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "confmot/domain.hpp"

// Flat `key = value` documents: one assignment per line, `#` starts a
// comment, values are bare words, numbers, "quoted strings" or one-line
// arrays `[a, b, "c"]`.

namespace confmot::kv {

struct Entry {
  std::vector<std::string> values;
  bool is_array = false;
  int line = 0;
};

/// Formats a double so that parsing it back yields the same value.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Document {
 public:
  Document() = default;
  explicit Document(std::string source) : source_(std::move(source)) {}

  static Document parse(std::string_view text, std::string source = "<memory>") {
    Document doc(std::move(source));
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      const std::string line = trim(strip_comment(raw));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) doc.fail(line_no, "expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) doc.fail(line_no, "empty key");
      if (value.empty()) doc.fail(line_no, "empty value for '" + key + "'");
      if (doc.entries_.contains(key)) doc.fail(line_no, "duplicate key '" + key + "'");
      Entry e;
      e.line = line_no;
      if (value.front() == '[') {
        if (value.back() != ']') doc.fail(line_no, "unterminated array for '" + key + "'");
        e.is_array = true;
        const std::string body = trim(value.substr(1, value.size() - 2));
        if (!body.empty()) {
          std::string item;
          std::istringstream items(body);
          while (std::getline(items, item, ',')) e.values.push_back(doc.unquote(trim(item), line_no));
        }
      } else {
        e.values.push_back(doc.unquote(value, line_no));
      }
      doc.entries_[key] = std::move(e);
      doc.order_.push_back(key);
    }
    return doc;
  }

  static Document load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  const std::string& source() const { return source_; }
  bool has(const std::string& key) const { return entries_.contains(key); }
  const std::vector<std::string>& keys() const { return order_; }

  /// Throws for keys outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const {
    for (const auto& k : order_)
      if (!allowed.contains(k)) fail(entries_.at(k).line, "unknown key '" + k + "'");
  }

  const Entry& entry(const std::string& key) const { return entries_.at(key); }

  std::string get_string(const std::string& key) const { return scalar(key); }

  double get_double(const std::string& key) const { return to_double(scalar(key), entries_.at(key).line, key); }

  std::int64_t get_int(const std::string& key) const { return to_int(scalar(key), entries_.at(key).line, key); }

  bool get_bool(const std::string& key) const {
    const std::string v = scalar(key);
    if (v == "true") return true;
    if (v == "false") return false;
    fail(entries_.at(key).line, "'" + key + "' must be true or false");
  }

  /// Values of an array entry; a scalar reads as a one-element list.
  std::vector<std::string> get_list(const std::string& key) const { return entries_.at(key).values; }

  std::vector<double> get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& v : get_list(key)) out.push_back(to_double(v, entries_.at(key).line, key));
    return out;
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw Error(ErrorKind::ConfigError, source_ + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const { fail(entries_.at(key).line, msg); }

  double to_double(const std::string& v, int line, const std::string& key) const {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
      fail(line, "'" + key + "' expects a number, got '" + v + "'");
    }
    return out;
  }

  std::int64_t to_int(const std::string& v, int line, const std::string& key) const {
    std::int64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
      fail(line, "'" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
  }

 private:
  std::string scalar(const std::string& key) const {
    const Entry& e = entries_.at(key);
    if (e.is_array || e.values.size() != 1) fail(e.line, "'" + key + "' expects a single value");
    return e.values.front();
  }

  static std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::string unquote(const std::string& v, int line) const {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (!v.empty() && (v.front() == '"' || v.back() == '"')) fail(line, "unbalanced quotes in '" + v + "'");
    if (v.empty()) fail(line, "empty array element");
    return v;
  }

  std::string source_ = "<memory>";
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
};

}  // namespace confmot::kv
