// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

// Scenario files, dispatch to the protocols, and CSV output.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ctcsim/protocols.hpp"

namespace ctc::runner {

using nlohmann::json;
using qmath::ComplexMatrix;
using qmath::DensityOperator;
using qmath::PureState;

// Malformed JSON text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Well-formed JSON that breaks the scenario schema. field() names the
// offending member, e.g. "state_specs.psi".
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// A runtime failure while executing a scenario, annotated with context.
class RunError : public Error {
 public:
  using Error::Error;
};

enum class ProtocolKind {
  PoppingUp,
  Elimination,
  Clone,
  Delete,
  CreateState,
  NoEntanglement,
  Teleport,
  AvgFidelitySweep,
};

const std::vector<ProtocolKind>& all_protocols();
std::string to_string(ProtocolKind p);
std::optional<ProtocolKind> protocol_from_string(std::string_view name);
// One-line description for list-protocols.
std::string describe(ProtocolKind p);

struct StateSpec {
  json source;                   // as written in the scenario
  DensityOperator density;
  std::optional<PureState> pure; // set for ket / bloch / bell / vector forms
};

struct UnitarySpec {
  json source;
  ComplexMatrix matrix;
};

inline constexpr int kDefaultTrials = 10000;

struct Scenario {
  ProtocolKind protocol = ProtocolKind::PoppingUp;
  std::map<std::string, StateSpec> states;
  std::optional<UnitarySpec> unitary;
  std::vector<double> epsilon_grid;
  int trials = kDefaultTrials;
  std::uint64_t seed = 0;
  double tol = qmath::kDefaultTol;
};

bool operator==(const Scenario& a, const Scenario& b);

Scenario parse_scenario(std::string_view text);
Scenario scenario_from_json(const json& doc);
// Parses text into JSON only, with ParseError carrying line and column.
json parse_json(std::string_view text);
json to_json(const Scenario& s);

struct SweepRow {
  double epsilon = 0.0;
  double mean_fidelity = 0.0;
  double std_error = 0.0;
  bool beats_classical = false;
};

inline constexpr double kClassicalFidelity = 2.0 / 3.0;
// mean - 3 stderr must clear the classical value by more than this to count;
// absorbs rounding at exact ties such as eps = 1/3.
inline constexpr double kClassicalMargin = 1e-12;

bool beats_classical(double mean, double std_error);

struct RunReport {
  Scenario scenario;
  std::vector<protocols::ProtocolReport> reports;
  std::vector<SweepRow> rows;
  double wall_seconds = 0.0;
};

RunReport run_scenario(const Scenario& s);

// Header `epsilon,mean_fidelity,stderr,beats_classical`, one row per grid
// point, LF line endings.
std::string emit_csv(const RunReport& r);

// Human-readable summary for standard output.
std::string summarize(const RunReport& r);

}  // namespace ctc::runner
