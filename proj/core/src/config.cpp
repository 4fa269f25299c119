#include "gcql/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gcql {

namespace {
std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}
}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin.empty() ? "<string>" : origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(cfg.origin_ + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(cfg.origin_ + ":" + std::to_string(lineno) + ": empty key");
    if (!cfg.entries_.count(key)) cfg.order_.push_back(key);
    cfg.entries_[key] = Entry{value, lineno};
  }
  return cfg;
}

void KeyValueConfig::fail(const std::string& key, const std::string& why) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigError(origin_ + ": missing required field '" + key + "'");
  throw ConfigError(origin_ + ":" + std::to_string(it->second.line) + ": field '" + key +
                    "': " + why);
}

const KeyValueConfig::Entry& KeyValueConfig::entry(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) fail(key, "missing");
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const { return entry(key).value; }

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  return has(key) ? entry(key).value : fallback;
}

int64_t KeyValueConfig::get_int(const std::string& key) const {
  const std::string& v = entry(key).value;
  int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    fail(key, "'" + v + "' is not an integer");
  return out;
}

int64_t KeyValueConfig::get_int(const std::string& key, int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string& v = entry(key).value;
  try {
    size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) fail(key, "'" + v + "' is not a number");
    return out;
  } catch (const std::invalid_argument&) {
    fail(key, "'" + v + "' is not a number");
  } catch (const std::out_of_range&) {
    fail(key, "'" + v + "' is out of range");
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const std::string& v = entry(key).value;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(key, "'" + v + "' is not a boolean");
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
  const std::string& v = entry(key).value;
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) fail(key, "empty list");
  return out;
}

std::vector<int64_t> KeyValueConfig::get_int_list(const std::string& key) const {
  std::vector<int64_t> out;
  for (const auto& item : get_list(key)) {
    int64_t x = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (ec != std::errc{} || p != item.data() + item.size())
      fail(key, "list item '" + item + "' is not an integer");
    out.push_back(x);
  }
  return out;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_list(key)) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) fail(key, "list item '" + item + "' is not a number");
    } catch (const std::exception&) {
      fail(key, "list item '" + item + "' is not a number");
    }
  }
  return out;
}

std::string KeyValueConfig::serialize() const {
  std::ostringstream out;
  for (const auto& key : order_) out << key << " = " << entries_.at(key).value << '\n';
  return out.str();
}

}  // namespace gcql
