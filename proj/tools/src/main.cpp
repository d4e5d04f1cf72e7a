#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mltrust_cli/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = mltrust::cli;
  CLI::App app{"Multilayer trust and social score pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {"build", "Parse and clean the inputs, write the network bundle"},
      {"trust", "Derive trust matrices, the edge table and trust histograms"},
      {"score", "Compute social scores and convergence traces"},
      {"eval", "Evaluate scores and baselines against ratings"},
      {"stress", "Run the synthetic trust-graph stress test"},
      {"report", "Summarize the outputs of the other commands"},
  };
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config_path, "Run configuration JSON")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    sub->add_option("--seed", seed, "Seed (overrides the config)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfigError;
  }

  auto* sub = app.get_subcommands().front();
  cli::Overrides overrides;
  if (!out_dir.empty()) overrides.output_dir = out_dir;
  if (sub->count("--seed") > 0) overrides.seed = seed;
  const std::string name = sub->get_name();
  try {
    const auto config = cli::load_config(config_path, overrides);
    if (name == "build") {
      cli::cmd_build(config, std::cerr);
    } else if (name == "trust") {
      cli::cmd_trust(config, std::cerr);
    } else if (name == "score") {
      cli::cmd_score(config, std::cerr);
    } else if (name == "eval") {
      cli::cmd_eval(config, std::cerr);
    } else if (name == "stress") {
      cli::cmd_stress(config, std::cerr);
    } else {
      cli::cmd_report(config, std::cout, std::cerr);
    }
  } catch (const mltrust::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return cli::kExitOk;
}
