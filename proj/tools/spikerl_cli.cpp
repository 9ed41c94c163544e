// Command-line harness: train experiments, compare learning curves, and run
// the built-in verification suite.
//
// Exit codes: 0 success, 1 verification or runtime failure, 2 config error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "spikerl/spikerl.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw spikerl::ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_train(const std::string& config_path, const std::string& out_override, bool svg,
              const std::vector<std::string>& sets) {
  spikerl::ExperimentConfig cfg = spikerl::parse_config(read_file(config_path), sets);
  if (!out_override.empty()) cfg.output = out_override;
  if (svg) cfg.svg = true;
  const auto arms = spikerl::run_experiment(cfg);
  for (const auto& arm : arms) {
    const auto s = spikerl::summarize_curve(arm.curve, 0.0);
    std::cout << cfg.experiment << (arm.name.empty() ? "" : " [" + arm.name + "]") << ": "
              << arm.curve.rows.size() << " rows";
    if (!arm.output_path.empty()) std::cout << " -> " << arm.output_path;
    std::cout << " (final-100 mean " << spikerl::format_double(s.final_mean) << ")\n";
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& files, double threshold) {
  std::vector<std::pair<std::string, spikerl::CurveFile>> curves;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read curve file: " + path);
    curves.emplace_back(path, spikerl::CurveFile::from_csv(in));
  }
  std::cout << spikerl::compare_table(curves, threshold);
  return 0;
}

int cmd_verify() {
  const auto results = spikerl::run_verify();
  return spikerl::print_verify(results, std::cout) ? 0 : 1;
}

int cmd_list() {
  for (const auto& id : spikerl::experiment_ids()) std::cout << id << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiking coagent reinforcement-learning harness"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  bool svg = false;
  std::vector<std::string> sets;
  auto* train = app.add_subcommand("train", "run an experiment from a config file");
  train->add_option("--config", config_path, "config document path")->required();
  train->add_option("--out", out_path, "output CSV path (overrides config)");
  train->add_flag("--svg", svg, "also emit an SVG chart next to each CSV");
  train->add_option("--set", sets, "override config keys, key=value (repeatable)");

  std::vector<std::string> compare_files;
  double threshold = 100.0;
  auto* compare = app.add_subcommand("compare", "summarize two or more curve files");
  compare->add_option("files", compare_files, "curve CSV files")->expected(-2);
  compare->add_option("--threshold", threshold, "moving-average threshold for episodes-to-threshold");

  auto* verify = app.add_subcommand("verify", "run the oracle verification suite");
  auto* list = app.add_subcommand("list-experiments", "print known experiment ids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, out_path, svg, sets);
    if (compare->parsed()) return cmd_compare(compare_files, threshold);
    if (verify->parsed()) return cmd_verify();
    if (list->parsed()) return cmd_list();
  } catch (const spikerl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
