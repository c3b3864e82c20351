// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#include "ctcsim/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

namespace ctc::runner {

using qmath::Complex;
using qmath::ComplexVector;
namespace gates = qmath::gates;
namespace proto = protocols;

namespace {

struct ProtocolInfo {
  ProtocolKind kind;
  const char* name;
  const char* description;
};

const ProtocolInfo kProtocols[] = {
    {ProtocolKind::PoppingUp, "popping_up",
     "CR state psi meets a fresh CTC; consistency makes the CTC carry psi"},
    {ProtocolKind::Elimination, "elimination",
     "single SWAP; reports the product output and the forced CTC state "
     "(optional prepared 'ctc' erases the CR input)"},
    {ProtocolKind::Clone, "clone",
     "two SWAPs (CR(1):CTC then CR(2):CTC) copy psi onto the blank"},
    {ProtocolKind::Delete, "delete",
     "one SWAP (CR(2):CTC) with the CTC at |0> deletes the second copy"},
    {ProtocolKind::CreateState, "create_state",
     "moves rho12 onto CR(1):CTC through a consistent SWAP"},
    {ProtocolKind::NoEntanglement, "no_entanglement",
     "correlated CR pair against a pure CTC: consistent or inconsistent?"},
    {ProtocolKind::Teleport, "teleport",
     "teleport psi into the CTC: unconstrained, Deutsch, and each epsilon"},
    {ProtocolKind::AvgFidelitySweep, "avg_fidelity_sweep",
     "Haar-averaged epsilon-CTC teleportation fidelity over epsilon_grid"},
};

// Named inputs each protocol reads from state_specs.
struct Role {
  const char* name;
  bool required;
  bool needs_pure;
};

std::vector<Role> roles_of(ProtocolKind p) {
  switch (p) {
    case ProtocolKind::PoppingUp: return {{"psi", true, true}};
    case ProtocolKind::Elimination:
      return {{"psi", true, true}, {"ctc", false, false}};
    case ProtocolKind::Clone: return {{"psi", true, true}, {"blank", false, true}};
    case ProtocolKind::Delete: return {{"psi", true, true}};
    case ProtocolKind::CreateState: return {{"rho12", true, false}};
    case ProtocolKind::NoEntanglement:
      return {{"rho12", true, false}, {"ctc", false, true}};
    case ProtocolKind::Teleport:
      return {{"psi", true, true}, {"shared", false, false}};
    case ProtocolKind::AvgFidelitySweep: return {{"shared", false, false}};
  }
  return {};
}

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

Complex parse_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ValidationError(field, "expected a number or a [re, im] pair");
}

double parse_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError(field, "expected a number");
  return j.get<double>();
}

ComplexMatrix parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ValidationError(field, "expected a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ValidationError(field, "rows must all have the same length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                              field + "[" + std::to_string(r) + "][" +
                                  std::to_string(c) + "]");
    }
  }
  return m;
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& field) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ValidationError(field + "." + key, "unknown field");
    }
  }
}

// ---------------------------------------------------------------------------
// State specs
// ---------------------------------------------------------------------------

StateSpec materialize(const json& spec, const std::string& field, double tol);

StateSpec from_pure(const json& src, PureState psi) {
  DensityOperator rho = DensityOperator::from_pure(psi);
  return {src, std::move(rho), std::move(psi)};
}

StateSpec materialize_unchecked(const json& spec, const std::string& field,
                                double tol) {
  if (!spec.is_object() || spec.empty()) {
    throw ValidationError(field, "state spec must be a nonempty object");
  }
  if (spec.contains("ket")) {
    require_keys(spec, {"ket", "dim"}, field);
    const int dim = spec.contains("dim") ? spec["dim"].get<int>() : 2;
    if (!spec["ket"].is_string() || spec["ket"].get<std::string>().empty()) {
      throw ValidationError(field + ".ket", "expected a nonempty digit string");
    }
    if (dim < 2 || dim > 10) {
      throw ValidationError(field + ".dim", "ket digits need 2 <= dim <= 10");
    }
    const std::string digits = spec["ket"].get<std::string>();
    int index = 0;
    int total = 1;
    for (char ch : digits) {
      const int digit = ch - '0';
      if (digit < 0 || digit >= dim) {
        throw ValidationError(field + ".ket", "digit out of range for dim");
      }
      index = index * dim + digit;
      total *= dim;
    }
    return from_pure(spec, PureState::basis(total, index));
  }
  require_keys(spec,
               {"bloch", "bloch_vector", "bell", "werner", "vector", "matrix",
                "product"},
               field);
  if (spec.size() != 1) {
    throw ValidationError(field, "exactly one state form expected");
  }
  const auto& [key, value] = *spec.items().begin();
  const std::string sub = field + "." + key;
  if (key == "bloch") {
    if (!value.is_array() || value.size() != 2) {
      throw ValidationError(sub, "expected [theta, phi] in radians");
    }
    return from_pure(spec, PureState::from_bloch_angles(
                               parse_number(value[0], sub + "[0]"),
                               parse_number(value[1], sub + "[1]")));
  }
  if (key == "bloch_vector") {
    if (!value.is_array() || value.size() != 3) {
      throw ValidationError(sub, "expected [x, y, z]");
    }
    const qmath::BlochVector v{parse_number(value[0], sub + "[0]"),
                               parse_number(value[1], sub + "[1]"),
                               parse_number(value[2], sub + "[2]")};
    return {spec, qmath::to_density(v, tol), std::nullopt};
  }
  if (key == "bell") {
    static const std::map<std::string, gates::Bell> names{
        {"phi+", gates::Bell::PhiPlus},
        {"phi-", gates::Bell::PhiMinus},
        {"psi+", gates::Bell::PsiPlus},
        {"psi-", gates::Bell::PsiMinus}};
    if (!value.is_string() || !names.count(value.get<std::string>())) {
      throw ValidationError(sub, "expected one of phi+, phi-, psi+, psi-");
    }
    return from_pure(spec, gates::bell_state(names.at(value.get<std::string>())));
  }
  if (key == "werner") {
    const double v = parse_number(value, sub);
    if (v < 0.0 || v > 1.0) {
      throw ValidationError(sub, "visibility must lie in [0, 1]");
    }
    const ComplexMatrix m =
        v * gates::bell_state(gates::Bell::PhiPlus).projector() +
        (1.0 - v) * ComplexMatrix::Identity(4, 4) / 4.0;
    return {spec, DensityOperator::from_matrix(m, tol), std::nullopt};
  }
  if (key == "vector") {
    if (!value.is_array() || value.size() < 2) {
      throw ValidationError(sub, "expected at least two amplitudes");
    }
    ComplexVector amps(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) {
      amps(static_cast<Eigen::Index>(i)) =
          parse_complex(value[i], sub + "[" + std::to_string(i) + "]");
    }
    return from_pure(spec, PureState::from_amplitudes(std::move(amps), tol));
  }
  if (key == "matrix") {
    return {spec, DensityOperator::from_matrix(parse_matrix(value, sub), tol),
            std::nullopt};
  }
  // product
  if (!value.is_array() || value.size() < 2) {
    throw ValidationError(sub, "expected an array of at least two state specs");
  }
  StateSpec acc = materialize(value[0], sub + "[0]", tol);
  for (std::size_t i = 1; i < value.size(); ++i) {
    const StateSpec next =
        materialize(value[i], sub + "[" + std::to_string(i) + "]", tol);
    acc.density = qmath::tensor(acc.density, next.density);
    if (acc.pure && next.pure) {
      acc.pure = PureState::from_amplitudes(
          qmath::tensor(acc.pure->amplitudes(), next.pure->amplitudes()));
    } else {
      acc.pure.reset();
    }
  }
  acc.source = spec;
  return acc;
}

StateSpec materialize(const json& spec, const std::string& field, double tol) {
  try {
    return materialize_unchecked(spec, field, tol);
  } catch (const ValidationError&) {
    throw;
  } catch (const json::exception& e) {
    throw ValidationError(field, e.what());
  } catch (const Error& e) {
    throw ValidationError(field, std::string("invalid state: ") + e.what());
  }
}

UnitarySpec materialize_unitary(const json& spec, int dim, double tol) {
  const std::string field = "unitary_spec";
  ComplexMatrix u;
  if (spec.is_string()) {
    const std::string name = spec.get<std::string>();
    if (name == "SWAP") {
      u = gates::swap(dim);
    } else if (name == "I") {
      u = gates::identity(dim * dim);
    } else if (name == "CNOT") {
      if (dim != 2) throw ValidationError(field, "CNOT needs qubit subsystems");
      u = gates::cnot();
    } else {
      throw ValidationError(field, "expected SWAP, CNOT, I or {\"matrix\": ...}");
    }
  } else if (spec.is_object()) {
    require_keys(spec, {"matrix"}, field);
    if (!spec.contains("matrix")) {
      throw ValidationError(field, "expected {\"matrix\": ...}");
    }
    u = parse_matrix(spec["matrix"], field + ".matrix");
    if (u.rows() != dim * dim || u.cols() != dim * dim) {
      throw ValidationError(field + ".matrix",
                            "must act on CR (x) CTC of dimension " +
                                std::to_string(dim * dim));
    }
    if (!qmath::is_unitary(u, tol)) {
      throw ValidationError(field + ".matrix", "matrix is not unitary");
    }
  } else {
    throw ValidationError(field, "expected a gate name or {\"matrix\": ...}");
  }
  return {spec, std::move(u)};
}

int side_dim(int dim) {
  const int d = static_cast<int>(std::lround(std::sqrt(dim)));
  return d * d == dim ? d : -1;
}

// Cross-field dimension checks once all states are materialized.
void check_dimensions(const Scenario& s) {
  auto dim_of = [&](const char* role) {
    auto it = s.states.find(role);
    return it == s.states.end() ? -1 : it->second.density.dim();
  };
  const std::string ss = "state_specs.";
  switch (s.protocol) {
    case ProtocolKind::Clone:
      if (dim_of("blank") != -1 && dim_of("blank") != dim_of("psi")) {
        throw ValidationError(ss + "blank", "must match the dimension of psi");
      }
      break;
    case ProtocolKind::Elimination:
      if (dim_of("ctc") != -1 && dim_of("ctc") != dim_of("psi")) {
        throw ValidationError(ss + "ctc", "must match the dimension of psi");
      }
      break;
    case ProtocolKind::CreateState:
    case ProtocolKind::NoEntanglement: {
      const int side = side_dim(dim_of("rho12"));
      if (side < 2) {
        throw ValidationError(ss + "rho12", "must be a state on C^d (x) C^d");
      }
      if (dim_of("ctc") != -1 && dim_of("ctc") != side) {
        throw ValidationError(ss + "ctc", "must match one side of rho12");
      }
      break;
    }
    case ProtocolKind::Teleport:
      if (dim_of("psi") != 2) {
        throw ValidationError(ss + "psi", "teleportation needs a qubit input");
      }
      [[fallthrough]];
    case ProtocolKind::AvgFidelitySweep:
      if (dim_of("shared") != -1 && dim_of("shared") != 4) {
        throw ValidationError(ss + "shared", "must be a two-qubit state");
      }
      break;
    default:
      break;
  }
}

const DensityOperator& state_or(const Scenario& s, const char* role,
                                const DensityOperator& fallback) {
  auto it = s.states.find(role);
  return it == s.states.end() ? fallback : it->second.density;
}

const PureState& pure_of(const Scenario& s, const char* role) {
  return *s.states.at(role).pure;
}

std::string format_fixed12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.12g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Protocol names
// ---------------------------------------------------------------------------

const std::vector<ProtocolKind>& all_protocols() {
  static const std::vector<ProtocolKind> all = [] {
    std::vector<ProtocolKind> v;
    for (const auto& p : kProtocols) v.push_back(p.kind);
    return v;
  }();
  return all;
}

std::string to_string(ProtocolKind p) {
  for (const auto& info : kProtocols) {
    if (info.kind == p) return info.name;
  }
  return "unknown";
}

std::optional<ProtocolKind> protocol_from_string(std::string_view name) {
  for (const auto& info : kProtocols) {
    if (name == info.name) return info.kind;
  }
  return std::nullopt;
}

std::string describe(ProtocolKind p) {
  for (const auto& info : kProtocols) {
    if (info.kind == p) return info.description;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t stop = std::min<std::size_t>(e.byte, text.size());
    int line = 1;
    int column = 0;
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 0;
      } else {
        ++column;
      }
    }
    // Keep only the description from the library message.
    std::string detail = e.what();
    const auto at = detail.find(": ", detail.find("column"));
    if (at != std::string::npos) detail = detail.substr(at + 2);
    std::ostringstream os;
    os << "parse error at line " << line << ", column " << column << ": "
       << detail;
    throw ParseError(os.str(), line, column);
  }
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("<root>", "expected a JSON object");
  require_keys(doc,
               {"protocol", "state_specs", "unitary_spec", "epsilon_grid",
                "trials", "seed", "tol"},
               "<root>");

  Scenario s;
  if (!doc.contains("protocol") || !doc["protocol"].is_string()) {
    throw ValidationError("protocol", "required string field");
  }
  const auto kind = protocol_from_string(doc["protocol"].get<std::string>());
  if (!kind) {
    throw ValidationError("protocol", "unknown protocol '" +
                                          doc["protocol"].get<std::string>() +
                                          "'");
  }
  s.protocol = *kind;

  if (!doc.contains("seed") || !doc["seed"].is_number_integer() ||
      (doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned() &&
       doc["seed"].get<std::int64_t>() < 0)) {
    throw ValidationError("seed", "required unsigned 64-bit integer");
  }
  s.seed = doc["seed"].get<std::uint64_t>();

  if (doc.contains("tol")) {
    s.tol = parse_number(doc["tol"], "tol");
    if (!(s.tol > 0.0 && s.tol < 1.0)) {
      throw ValidationError("tol", "must lie in (0, 1)");
    }
  }
  if (doc.contains("trials")) {
    const json& t = doc["trials"];
    if (!t.is_number_integer() || t.get<std::int64_t>() < 1 ||
        t.get<std::int64_t>() > 100000000) {
      throw ValidationError("trials", "must be a positive integer");
    }
    s.trials = t.get<int>();
  }
  if (s.protocol == ProtocolKind::AvgFidelitySweep && s.trials < 100) {
    throw ValidationError("trials", "Monte Carlo sweeps need at least 100 trials");
  }

  if (doc.contains("epsilon_grid")) {
    const json& g = doc["epsilon_grid"];
    if (!g.is_array()) throw ValidationError("epsilon_grid", "expected an array");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string f = "epsilon_grid[" + std::to_string(i) + "]";
      const double e = parse_number(g[i], f);
      if (!(e >= 0.0 && e <= 1.0)) throw ValidationError(f, "must lie in [0, 1]");
      s.epsilon_grid.push_back(e);
    }
  }

  const auto roles = roles_of(s.protocol);
  if (doc.contains("state_specs")) {
    const json& specs = doc["state_specs"];
    if (!specs.is_object()) {
      throw ValidationError("state_specs", "expected an object");
    }
    for (const auto& [name, spec] : specs.items()) {
      const std::string field = "state_specs." + name;
      const auto role = std::find_if(roles.begin(), roles.end(), [&](const Role& r) {
        return name == r.name;
      });
      if (role == roles.end()) {
        throw ValidationError(field, "not used by protocol " +
                                         to_string(s.protocol));
      }
      StateSpec st = materialize(spec, field, s.tol);
      if (role->needs_pure && !st.pure) {
        throw ValidationError(field, "must be a pure state (ket, bloch, bell, "
                                     "vector or a product of those)");
      }
      s.states.emplace(name, std::move(st));
    }
  }
  for (const Role& r : roles) {
    if (r.required && !s.states.count(r.name)) {
      throw ValidationError(std::string("state_specs.") + r.name,
                            "required by protocol " + to_string(s.protocol));
    }
  }
  check_dimensions(s);

  if (doc.contains("unitary_spec")) {
    if (s.protocol != ProtocolKind::PoppingUp) {
      throw ValidationError("unitary_spec",
                            "only the popping_up protocol takes a unitary");
    }
    s.unitary = materialize_unitary(doc["unitary_spec"],
                                    s.states.at("psi").density.dim(), s.tol);
  }
  return s;
}

Scenario parse_scenario(std::string_view text) {
  return scenario_from_json(parse_json(text));
}

json to_json(const Scenario& s) {
  json doc;
  doc["protocol"] = to_string(s.protocol);
  json specs = json::object();
  for (const auto& [name, st] : s.states) specs[name] = st.source;
  doc["state_specs"] = specs;
  if (s.unitary) doc["unitary_spec"] = s.unitary->source;
  doc["epsilon_grid"] = s.epsilon_grid;
  doc["trials"] = s.trials;
  doc["seed"] = s.seed;
  doc["tol"] = s.tol;
  return doc;
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.protocol != b.protocol || a.epsilon_grid != b.epsilon_grid ||
      a.trials != b.trials || a.seed != b.seed || a.tol != b.tol ||
      a.states.size() != b.states.size() ||
      a.unitary.has_value() != b.unitary.has_value()) {
    return false;
  }
  for (const auto& [name, st] : a.states) {
    auto it = b.states.find(name);
    if (it == b.states.end() || st.source != it->second.source ||
        st.density.matrix() != it->second.density.matrix() ||
        st.pure.has_value() != it->second.pure.has_value()) {
      return false;
    }
  }
  if (a.unitary && (a.unitary->source != b.unitary->source ||
                    a.unitary->matrix != b.unitary->matrix)) {
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

bool beats_classical(double mean, double std_error) {
  return mean - 3.0 * std_error > kClassicalFidelity + kClassicalMargin;
}

RunReport run_scenario(const Scenario& s) {
  const auto start = std::chrono::steady_clock::now();
  RunReport out;
  out.scenario = s;
  const double tol = s.tol;
  const DensityOperator bell =
      DensityOperator::from_pure(gates::bell_state(gates::Bell::PhiPlus));

  try {
    switch (s.protocol) {
      case ProtocolKind::PoppingUp: {
        const PureState& psi = pure_of(s, "psi");
        out.reports.push_back(
            s.unitary ? proto::popping_up(psi, s.unitary->matrix, tol)
                      : proto::popping_up(psi, tol));
        break;
      }
      case ProtocolKind::Elimination: {
        const PureState& psi = pure_of(s, "psi");
        out.reports.push_back(proto::elimination(psi, tol));
        if (s.states.count("ctc")) {
          out.reports.push_back(
              proto::elimination(psi, s.states.at("ctc").density, tol));
        }
        break;
      }
      case ProtocolKind::Clone: {
        const PureState& psi = pure_of(s, "psi");
        const PureState blank = s.states.count("blank")
                                    ? pure_of(s, "blank")
                                    : PureState::basis(psi.dim(), 0);
        out.reports.push_back(proto::clone(psi, blank, tol));
        break;
      }
      case ProtocolKind::Delete:
        out.reports.push_back(proto::delete_copy(pure_of(s, "psi"), tol));
        break;
      case ProtocolKind::CreateState:
        out.reports.push_back(
            proto::create_cr_ctc_state(s.states.at("rho12").density, tol));
        break;
      case ProtocolKind::NoEntanglement: {
        const DensityOperator& rho12 = s.states.at("rho12").density;
        const PureState ctc = s.states.count("ctc")
                                  ? pure_of(s, "ctc")
                                  : PureState::basis(side_dim(rho12.dim()), 0);
        out.reports.push_back(proto::no_entanglement_check(rho12, ctc, tol));
        break;
      }
      case ProtocolKind::Teleport: {
        const PureState& psi = pure_of(s, "psi");
        const DensityOperator& shared = state_or(s, "shared", bell);
        out.reports.push_back(proto::teleport_to_ctc(
            {shared, psi, proto::TeleportMode::unconstrained()}, tol));
        out.reports.push_back(proto::teleport_to_ctc(
            {shared, psi, proto::TeleportMode::deutsch()}, tol));
        for (double eps : s.epsilon_grid) {
          auto r = proto::teleport_to_ctc(
              {shared, psi, proto::TeleportMode::relaxed(eps)}, tol);
          const double f = r.fidelities.at("output");
          out.rows.push_back({eps, f, 0.0, beats_classical(f, 0.0)});
          out.reports.push_back(std::move(r));
        }
        break;
      }
      case ProtocolKind::AvgFidelitySweep: {
        const DensityOperator& shared = state_or(s, "shared", bell);
        const qmath::SeededRng rng(s.seed);
        for (double eps : s.epsilon_grid) {
          const auto est = proto::average_fidelity(
              shared, proto::TeleportMode::relaxed(eps), s.trials, rng, tol);
          out.rows.push_back({eps, est.mean, est.std_error,
                              beats_classical(est.mean, est.std_error)});
        }
        break;
      }
    }
  } catch (const Error& e) {
    throw RunError("protocol " + to_string(s.protocol) + " (seed " +
                   std::to_string(s.seed) + "): " + e.what());
  }

  out.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return out;
}

std::string emit_csv(const RunReport& r) {
  std::string out = "epsilon,mean_fidelity,stderr,beats_classical\n";
  for (const SweepRow& row : r.rows) {
    out += format_fixed12(row.epsilon) + "," + format_sig12(row.mean_fidelity) +
           "," + format_sig12(row.std_error) + "," +
           (row.beats_classical ? "true" : "false") + "\n";
  }
  return out;
}

std::string summarize(const RunReport& r) {
  std::ostringstream os;
  os << "protocol: " << to_string(r.scenario.protocol)
     << "  seed: " << r.scenario.seed << "  tol: " << r.scenario.tol << "\n";
  for (const auto& rep : r.reports) {
    os << "- " << rep.protocol;
    if (!rep.status.empty()) os << " [" << rep.status << "]";
    os << ": " << proto::to_string(rep.verdict)
       << "  (steps " << rep.steps.size() << ", max residual "
       << rep.max_residual() << ")\n";
    for (const auto& [k, v] : rep.fidelities) {
      os << "    fidelity." << k << " = " << v << "\n";
    }
    for (const auto& [k, v] : rep.metrics) {
      os << "    " << k << " = " << v << "\n";
    }
    for (const auto& [k, v] : rep.flags) {
      os << "    " << k << " = " << (v ? "true" : "false") << "\n";
    }
  }
  if (!r.rows.empty()) {
    os << "epsilon      mean_fidelity   stderr          beats 2/3\n";
    for (const auto& row : r.rows) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-12.6f %-15.10f %-15.3e %s\n",
                    row.epsilon, row.mean_fidelity, row.std_error,
                    row.beats_classical ? "yes" : "no");
      os << buf;
    }
  }
  os << "wall time: " << r.wall_seconds << " s\n";
  return os.str();
}

}  // namespace ctc::runner
