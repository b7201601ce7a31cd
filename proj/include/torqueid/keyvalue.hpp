#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace torqueid {

/// Plain-text `key = value` document. Blank lines and `#` comments are
/// ignored; duplicate keys are an error. Every key must be consumed by the
/// reader before `reject_unknown()` is called, otherwise it is reported as
/// unknown.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text, std::string source = "<string>");
  static KeyValueFile load(const std::filesystem::path& path);

  double number(const std::string& key);
  std::optional<double> optional_number(const std::string& key);
  bool contains(const std::string& key) const { return entries_.count(key) != 0; }

  void reject_unknown() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  std::map<std::string, Entry> entries_;
  std::set<std::string> consumed_;
  std::string source_;
};

/// Whole file as bytes; throws IoError if unreadable.
std::string read_text_file(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace torqueid
