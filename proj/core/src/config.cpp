#include "ljp/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ljp/error.hpp"

namespace ljp {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(number, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(number, "empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  try {
    return parse(in);
  } catch (const ParseError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::optional<std::string> KeyValueConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return raw(key).value_or(fallback);
}

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

}  // namespace

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  auto v = raw(key);
  return v ? parse_number<std::int64_t>(key, *v) : fallback;
}

std::size_t KeyValueConfig::get_size(const std::string& key, std::size_t fallback) const {
  auto v = raw(key);
  return v ? parse_number<std::size_t>(key, *v) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto v = raw(key);
  return v ? parse_number<std::uint64_t>(key, *v) : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto v = raw(key);
  return v ? parse_number<double>(key, *v) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "on" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "off" || *v == "no") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + *v + "'");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key,
                                                  const std::vector<std::string>& fallback) const {
  auto v = raw(key);
  return v ? split(*v, ',') : fallback;
}

std::vector<std::size_t> KeyValueConfig::get_size_list(
    const std::string& key, const std::vector<std::size_t>& fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  std::vector<std::size_t> out;
  for (const auto& item : split(*v, ',')) out.push_back(parse_number<std::size_t>(key, item));
  return out;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split(*v, ',')) out.push_back(parse_number<double>(key, item));
  return out;
}

void KeyValueConfig::require_known(const std::set<std::string>& known) const {
  for (const auto& [key, _] : values_) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

std::string KeyValueConfig::to_string() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

}  // namespace ljp
