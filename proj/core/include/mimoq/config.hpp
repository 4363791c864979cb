#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimoq {

/// Config file syntax violation or unknown/invalid key. Carries the line
/// number (0 when not tied to a line) and the offending section.key.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line_ = 0, std::string key_ = {})
      : std::runtime_error(msg), line(line_), key(std::move(key_)) {}
  int line;
  std::string key;
};

/// INI-style experiment configuration:
///   [section]
///   key = value        # trailing comments allowed
/// Values are strings; typed getters parse on demand. Lists are
/// comma-separated. Duplicate keys within a section are an error.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& name = "<string>");

  bool has(const std::string& section, const std::string& key) const;

  std::string get_str(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  double get_num(const std::string& section, const std::string& key) const;
  double get_num(const std::string& section, const std::string& key,
                 double fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<double> get_list(const std::string& section,
                               const std::string& key) const;

  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;
  int line_of(const std::string& section, const std::string& key) const;
  const std::string& source() const { return source_; }

 private:
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, std::map<std::string, Entry>> data_;
  std::string source_;

  const Entry& entry(const std::string& section, const std::string& key) const;
};

}  // namespace mimoq
