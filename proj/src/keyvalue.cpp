#include "torqueid/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "torqueid/errors.hpp"

namespace torqueid {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source) {
  KeyValueFile out;
  out.source_ = std::move(source);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError(out.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw ValidationError(out.source_ + ":" + std::to_string(line_no) + ": empty key or value");
    }
    if (out.entries_.count(key)) {
      throw ValidationError(out.source_ + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    out.entries_.emplace(std::move(key), Entry{std::move(value), line_no});
  }
  return out;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return buf.str();
}

std::optional<double> KeyValueFile::optional_number(const std::string& key) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  consumed_.insert(key);
  const std::string& text = it->second.value;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ValidationError(source_ + ":" + std::to_string(it->second.line) + ": '" + key +
                          "' is not a finite number: '" + text + "'");
  }
  return value;
}

double KeyValueFile::number(const std::string& key) {
  if (auto v = optional_number(key)) return *v;
  throw ValidationError(source_ + ": missing key '" + key + "'");
}

void KeyValueFile::reject_unknown() const {
  for (const auto& [key, entry] : entries_) {
    if (!consumed_.count(key)) {
      throw ValidationError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");
    }
  }
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace torqueid
