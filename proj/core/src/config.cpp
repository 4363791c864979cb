#include "mimoq/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace mimoq {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& s) {
  const size_t pos = s.find('#');
  return pos == std::string::npos ? s : s.substr(0, pos);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.source_ = name;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": unterminated section header",
                          lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": empty section name",
                          lineno);
      cfg.data_[section];  // record even if empty
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(lineno) +
                            ": expected key = value",
                        lineno);
    if (section.empty())
      throw ConfigError(name + ":" + std::to_string(lineno) +
                            ": key outside any [section]",
                        lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key",
                        lineno, section + "." + key);
    auto [it, inserted] = cfg.data_[section].insert({key, {value, lineno}});
    if (!inserted)
      throw ConfigError(name + ":" + std::to_string(lineno) +
                            ": duplicate key '" + section + "." + key +
                            "' (first at line " + std::to_string(it->second.line) +
                            ")",
                        lineno, section + "." + key);
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

const Config::Entry& Config::entry(const std::string& section,
                                   const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end() || !s->second.count(key))
    throw ConfigError(source_ + ": missing required key '" + section + "." +
                          key + "'",
                      0, section + "." + key);
  return s->second.at(key);
}

std::string Config::get_str(const std::string& section,
                            const std::string& key) const {
  return entry(section, key).value;
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  return has(section, key) ? entry(section, key).value : fallback;
}

double Config::get_num(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != e.value.size())
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": '" + section +
                          "." + key + "' is not a number: " + e.value,
                      e.line, section + "." + key);
  return v;
}

double Config::get_num(const std::string& section, const std::string& key,
                       double fallback) const {
  return has(section, key) ? get_num(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key,
                    int fallback) const {
  if (!has(section, key)) return fallback;
  const double v = get_num(section, key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    const Entry& e = entry(section, key);
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": '" + section +
                          "." + key + "' must be an integer",
                      e.line, section + "." + key);
  }
  return i;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  if (!has(section, key)) return fallback;
  const Entry& e = entry(section, key);
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError(source_ + ":" + std::to_string(e.line) + ": '" + section +
                        "." + key + "' must be a boolean",
                    e.line, section + "." + key);
}

std::vector<double> Config::get_list(const std::string& section,
                                     const std::string& key) const {
  const Entry& e = entry(section, key);
  std::vector<double> out;
  std::istringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (item.empty() || pos != item.size())
      throw ConfigError(source_ + ":" + std::to_string(e.line) + ": '" +
                            section + "." + key + "' has a non-numeric item: " +
                            item,
                        e.line, section + "." + key);
    out.push_back(v);
  }
  if (out.empty())
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": '" + section +
                          "." + key + "' is an empty list",
                      e.line, section + "." + key);
  return out;
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : data_) out.push_back(name);
  return out;
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  const auto s = data_.find(section);
  if (s != data_.end())
    for (const auto& [key, _] : s->second) out.push_back(key);
  return out;
}

int Config::line_of(const std::string& section, const std::string& key) const {
  return entry(section, key).line;
}

}  // namespace mimoq
