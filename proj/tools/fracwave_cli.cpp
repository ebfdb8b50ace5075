#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "fracwave/experiments.hpp"

using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

json read_document(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw fracwave::ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw fracwave::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

int run(const std::string& kind, const Flags& flags) {
  try {
    json doc = read_document(flags.config);
    if (!doc.is_object()) throw fracwave::ConfigError("config must be a JSON object");
    json& exp = doc["experiment"];
    if (exp.is_null()) exp = json::object();
    if (!exp.is_object()) throw fracwave::ConfigError("experiment: expected an object");
    if (exp.contains("kind") && exp["kind"] != kind)
      throw fracwave::ConfigError("config declares experiment '" + exp["kind"].dump() + "' but subcommand is '" +
                                  kind + "'");
    exp["kind"] = kind;
    if (flags.seed) doc["initial_data"]["seed"] = *flags.seed;
    const fracwave::RunConfig config = fracwave::parse_config(doc);
    const fracwave::ExperimentReport report = fracwave::run_experiment(config, flags.out);
    if (!flags.quiet) {
      for (const auto& c : report.criteria)
        std::printf("%s  %s  value=%.6g  (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.tolerance.c_str());
      if (report.diverged) std::printf("DIVERGED at t=%.6g: %s\n", report.last_good_time, report.error.c_str());
      else if (!report.error.empty()) std::printf("note: %s\n", report.error.c_str());
      std::printf("%s %s [%s]\n", report.kind.c_str(), report.passed() ? "passed" : "failed",
                  report.config_hash.c_str());
    }
    return report.exit_code();
  } catch (const fracwave::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped fractional wave experiments on a Dirichlet box"};
  app.require_subcommand(1);
  Flags flags;
  std::uint64_t seed = 0;
  for (const auto& kind : fracwave::experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
    sub->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "run directory for ledgers and report.json");
    sub->add_option("--seed", seed, "initial-data seed, overrides the config");
    sub->add_flag("--quiet", flags.quiet, "suppress the criterion summary");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed")) flags.seed = seed;
  return run(chosen->get_name(), flags);
}
