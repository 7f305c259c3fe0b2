#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "predsaddle/acceptance.hpp"
#include "predsaddle/experiments.hpp"
#include "predsaddle/svg.hpp"

namespace {

// Exit codes: 0 clean, 2 config/input error, 3 acceptance failure,
// 4 run completed with collapses.
constexpr int kExitClean = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitAcceptanceFailure = 3;
constexpr int kExitCollapse = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prediction-step saddle-point experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_dir_override;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config_path, "experiment config file")->required();
  auto* seed_opt = run_cmd->add_option("--seed-override", "run only this seed");
  auto* dir_opt = run_cmd->add_option("--out-dir", "override the output directory");

  std::string csv_path, out_svg, kind = "line", title;
  bool logx = false, logy = false;
  auto* plot_cmd = app.add_subcommand("plot", "render a CSV file as an SVG plot");
  plot_cmd->add_option("csv", csv_path, "input CSV")->required();
  plot_cmd->add_option("--kind", kind, "line or scatter")
      ->check(CLI::IsMember({"line", "scatter"}));
  plot_cmd->add_option("--out", out_svg, "output SVG path")->required();
  plot_cmd->add_flag("--logx", logx, "log-scale x axis");
  plot_cmd->add_flag("--logy", logy, "log-scale y axis");
  plot_cmd->add_option("--title", title, "plot title");

  std::vector<std::string> only;
  std::string scratch = "accept_out";
  auto* accept_cmd = app.add_subcommand("accept", "run the acceptance suite");
  accept_cmd->add_option("--only", only, "run only the named criteria");
  accept_cmd->add_option("--out-dir", scratch, "scratch directory for rerun outputs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      if (seed_opt->count()) seed_override = seed_opt->as<std::uint64_t>();
      if (dir_opt->count()) out_dir_override = dir_opt->as<std::string>();
      predsaddle::ExperimentConfig cfg;
      try {
        cfg = predsaddle::load_config(config_path);
      } catch (const predsaddle::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
      }
      predsaddle::RunOverrides overrides;
      overrides.seed = seed_override;
      overrides.output_dir = out_dir_override;
      const auto manifest = predsaddle::run_experiment(cfg, overrides);
      std::cout << "experiment " << manifest.experiment << " hash " << manifest.config_hash
                << ": " << manifest.seed_runs.size() << " seed run(s), "
                << manifest.aggregate_files.size() << " aggregate file(s)\n";
      if (manifest.any_collapse) {
        std::cout << "completed with collapses\n";
        return kExitCollapse;
      }
      return kExitClean;
    }

    if (*plot_cmd) {
      predsaddle::PlotOptions opts;
      opts.kind = kind == "line" ? predsaddle::PlotKind::line : predsaddle::PlotKind::scatter;
      opts.log_x = logx;
      opts.log_y = logy;
      opts.title = title;
      try {
        predsaddle::emit_plot(csv_path, opts, out_svg);
      } catch (const predsaddle::CsvError& e) {
        std::cerr << "plot error: " << e.what() << "\n";
        return kExitConfigError;
      }
      return kExitClean;
    }

    if (*accept_cmd) {
      const auto results = predsaddle::run_acceptance(only, scratch, std::cout);
      bool all_pass = true;
      for (const auto& r : results) all_pass = all_pass && r.pass;
      std::cout << (all_pass ? "acceptance: all criteria passed\n"
                             : "acceptance: FAILURES present\n");
      return all_pass ? kExitClean : kExitAcceptanceFailure;
    }
  } catch (const predsaddle::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitClean;
}
