#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "tftlab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tftlab: run a transient fluctuation theorem experiment from a config file"};
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string out_dir = ".";
  tftlab::OutputFormat format = tftlab::OutputFormat::Both;
  const std::map<std::string, tftlab::OutputFormat> formats{
      {"json", tftlab::OutputFormat::Json}, {"csv", tftlab::OutputFormat::Csv}, {"both", tftlab::OutputFormat::Both}};

  app.add_option("-c,--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("-s,--seed", seed, "override the config's seed");
  app.add_option("-w,--workers", workers, "worker threads; results do not depend on it")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("-f,--format", format, "json, csv or both")->transform(CLI::CheckedTransformer(formats));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tftlab::kInvalidConfig;
  }

  tftlab::RunOptions options;
  options.out_dir = out_dir;
  options.format = format;
  options.workers = workers;
  if (seed_opt->count() > 0) options.seed = seed;

  tftlab::RunResult result;
  try {
    result = tftlab::run_experiment(tftlab::ExperimentConfig::load(config_path), options);
  } catch (const tftlab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tftlab::kInvalidConfig;
  }
  if (!result.error.empty()) {
    std::cerr << "error: " << result.error << '\n';
    return result.exit_code;
  }
  for (const auto& c : result.summary["checks"]) {
    std::cout << c["status"].get<std::string>() << "  " << c["name"].get<std::string>();
    if (c.contains("detail")) std::cout << "  (" << c["detail"].get<std::string>() << ")";
    std::cout << '\n';
  }
  for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
  return result.exit_code;
}
