// Experiment configuration: one `key = value` per line, `#` starts a comment.
// Vectors are whitespace- or comma-separated decimals, matrix rows are
// separated by `;`, and a list of matrices by `|`. Unknown keys are errors.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace tftlab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExperimentConfig {
 public:
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, std::string value);

  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::uint64_t integer(const std::string& key) const;
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
  Eigen::MatrixXd matrix(const std::string& key) const;
  std::vector<Eigen::MatrixXd> matrices(const std::string& key) const;
  // Rows of a `;`-separated list as vectors (rows may differ in length).
  std::vector<Eigen::VectorXd> rows(const std::string& key) const;

  // Throws ConfigError naming every key that no accessor has read.
  void reject_unused() const;
  // Sorted key -> raw value, for echoing into reports.
  std::map<std::string, std::string> entries() const;

 private:
  struct Entry {
    std::string value;
    int line;
    mutable bool used = false;
  };
  const Entry& entry(const std::string& key) const;

  std::map<std::string, Entry> entries_;
};

}  // namespace tftlab
