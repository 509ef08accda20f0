#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "bef/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Boundary effect experiments on 1D spin chains"};
  app.require_subcommand(1, 1);

  bef::cli::RunRequest request;
  std::vector<std::string> formats;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string out;

  const std::map<std::string, std::string> help{
      {"solve", "Ground energies, gaps and residuals for every n"},
      {"mu-profile", "Boundary effect mu_n(r), its envelope and decay fits"},
      {"eta-scan", "Trace-distance boundary effect eta_n(m)"},
      {"correlations", "Connected correlators in the bridge geometry"},
      {"entropy-scan", "Half-chain entropies S_n(m)"},
      {"verify", "Run the configured inequality suites"},
      {"gap-scan", "Spectral gap against fitted decay rate over a parameter sweep"},
      {"report", "Collate JSON reports into tables and plots"},
  };
  for (const auto& name : bef::cli::subcommands()) {
    const auto it = help.find(name);
    auto* sub = app.add_subcommand(name, it == help.end() ? "" : it->second);
    sub->add_option("--config,-c", request.config_path, "YAML experiment config");
    sub->add_option("--set", request.sets, "Override a config leaf, e.g. model.couplings.g_x=1.5");
    sub->add_option("--out,-o", out, "Output directory");
    sub->add_option("--threads,-j", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Solver seed");
    sub->add_option("--format,-f", formats, "csv, json, svg (repeatable or comma list)")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json", "svg"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bef::cli::kExitUsage;
  }

  request.subcommand = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();
  if (sub->count("--out")) request.out = out;
  if (sub->count("--threads")) request.threads = threads;
  if (sub->count("--seed")) request.seed = seed;
  request.formats = formats;
  return bef::cli::run(request, std::cerr);
}
