#include "tftlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tftlab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

double parse_double(std::string_view token, const std::string& key) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ConfigError("config key '" + key + "': '" + std::string(token) + "' is not a decimal number");
  }
  return v;
}

std::vector<double> parse_vector(std::string_view text, const std::string& key) {
  std::vector<double> out;
  std::size_t pos = 0;
  auto is_sep = [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == ','; };
  while (pos < text.size()) {
    while (pos < text.size() && is_sep(text[pos])) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !is_sep(text[end])) ++end;
    if (end > pos) out.push_back(parse_double(text.substr(pos, end - pos), key));
    pos = end;
  }
  return out;
}

Eigen::MatrixXd parse_matrix(std::string_view text, const std::string& key) {
  const auto row_text = split(text, ';');
  std::vector<std::vector<double>> rows;
  for (auto r : row_text) rows.push_back(parse_vector(r, key));
  if (rows.empty() || rows.front().empty()) throw ConfigError("config key '" + key + "': empty matrix");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ConfigError("config key '" + key + "': ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected `key = value`");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (cfg.entries_.count(key)) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    cfg.entries_.emplace(key, Entry{value, line_no});
    if (nl == text.size()) break;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool ExperimentConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

void ExperimentConfig::set(const std::string& key, std::string value) {
  entries_[key] = Entry{std::move(value), 0};
}

const ExperimentConfig::Entry& ExperimentConfig::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("config: missing required key '" + key + "'");
  it->second.used = true;
  return it->second;
}

std::string ExperimentConfig::text(const std::string& key) const { return entry(key).value; }

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double ExperimentConfig::number(const std::string& key) const {
  return parse_double(entry(key).value, key);
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::uint64_t ExperimentConfig::integer(const std::string& key) const {
  const std::string& v = entry(key).value;
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a nonnegative integer");
  }
  return out;
}

std::uint64_t ExperimentConfig::integer(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entry(key).value;
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false");
}

std::vector<double> ExperimentConfig::numbers(const std::string& key) const {
  auto v = parse_vector(entry(key).value, key);
  if (v.empty()) throw ConfigError("config key '" + key + "': empty list");
  return v;
}

std::vector<double> ExperimentConfig::numbers(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? numbers(key) : fallback;
}

Eigen::MatrixXd ExperimentConfig::matrix(const std::string& key) const {
  return parse_matrix(entry(key).value, key);
}

std::vector<Eigen::MatrixXd> ExperimentConfig::matrices(const std::string& key) const {
  std::vector<Eigen::MatrixXd> out;
  for (auto part : split(entry(key).value, '|')) out.push_back(parse_matrix(part, key));
  return out;
}

std::vector<Eigen::VectorXd> ExperimentConfig::rows(const std::string& key) const {
  std::vector<Eigen::VectorXd> out;
  for (auto part : split(entry(key).value, ';')) {
    const auto v = parse_vector(part, key);
    if (v.empty()) throw ConfigError("config key '" + key + "': empty row");
    out.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return out;
}

void ExperimentConfig::reject_unused() const {
  std::string unknown;
  for (const auto& [key, e] : entries_) {
    if (!e.used) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty()) throw ConfigError("config: unknown or unused keys: " + unknown);
}

std::map<std::string, std::string> ExperimentConfig::entries() const {
  std::map<std::string, std::string> out;
  for (const auto& [key, e] : entries_) out.emplace(key, e.value);
  return out;
}

}  // namespace tftlab
