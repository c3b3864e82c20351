// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

// ctcsim: run, validate and list CR/CTC protocol scenarios.
//
//   ctcsim run <scenario.json> [--csv out.csv] [--seed N] [--trials N] [--tol X]
//   ctcsim validate <scenario.json>
//   ctcsim list-protocols
//
// Exit status: 0 ok, 2 parse/validation/usage error, 3 runtime failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ctcsim/runner.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ctc::Error("cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deutsch-model CTC protocol simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string csv_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> tol;

  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--csv", csv_path, "Write sweep rows as CSV to this path");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--trials", trials, "Override the Monte Carlo trial count");
  run->add_option("--tol", tol, "Override the numerical tolerance");

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario");
  validate->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  auto* list = app.add_subcommand("list-protocols", "List available protocols");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  namespace r = ctc::runner;

  if (list->parsed()) {
    for (auto p : r::all_protocols()) {
      std::cout << r::to_string(p) << "\t" << r::describe(p) << "\n";
    }
    return 0;
  }

  r::Scenario scenario;
  try {
    r::json doc = r::parse_json(read_file(scenario_path));
    if (doc.is_object()) {
      if (seed) doc["seed"] = *seed;
      if (trials) doc["trials"] = *trials;
      if (tol) doc["tol"] = *tol;
    }
    scenario = r::scenario_from_json(doc);
  } catch (const ctc::Error& e) {
    std::cerr << "ctcsim: " << scenario_path << ": " << e.what() << "\n";
    return kExitInvalid;
  }

  if (validate->parsed()) {
    std::cout << scenario_path << ": ok (" << r::to_string(scenario.protocol)
              << ")\n";
    return 0;
  }

  try {
    const r::RunReport report = r::run_scenario(scenario);
    std::cout << r::summarize(report);
    if (!csv_path.empty()) {
      std::ofstream out(csv_path, std::ios::binary);
      out << r::emit_csv(report);
      if (!out) {
        std::cerr << "ctcsim: cannot write " << csv_path << "\n";
        return kExitRuntime;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "ctcsim: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
