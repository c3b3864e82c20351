// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#include "ctcsim/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace ctc::protocols {

using deutsch::DeutschMap;
using qmath::Complex;
using qmath::RealVector;
using RealMatrix = Eigen::MatrixXd;

namespace {

int product(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

void validate(const InteractionCircuit& c) {
  if (c.cr_dims.empty() ||
      std::any_of(c.cr_dims.begin(), c.cr_dims.end(),
                  [](int d) { return d < 1; }) ||
      c.ctc_dim < 1) {
    throw ConfigError("circuit: subsystem dimensions must be >= 1");
  }
  if (c.consistency.kind == Consistency::Kind::Epsilon &&
      !(c.consistency.epsilon >= 0.0 && c.consistency.epsilon <= 1.0)) {
    throw ConfigError("circuit: epsilon must lie in [0, 1]");
  }
  if (c.initial_ctc && c.initial_ctc->dim() != c.ctc_dim) {
    throw ConfigError("circuit: initial CTC state has the wrong dimension");
  }
  const int n = static_cast<int>(c.cr_dims.size());
  for (std::size_t s = 0; s < c.steps.size(); ++s) {
    const InteractionStep& step = c.steps[s];
    std::vector<int> subs = step.cr_subsystems;
    std::sort(subs.begin(), subs.end());
    const bool bad_index =
        std::adjacent_find(subs.begin(), subs.end()) != subs.end() ||
        (!subs.empty() && (subs.front() < 0 || subs.back() >= n));
    if (bad_index || (subs.empty() && !step.acts_on_ctc)) {
      std::ostringstream os;
      os << "circuit: step " << s << " touches an invalid set of subsystems";
      throw ConfigError(os.str());
    }
    int expected = step.acts_on_ctc ? c.ctc_dim : 1;
    for (int i : step.cr_subsystems) expected *= c.cr_dims[i];
    if (step.unitary.rows() != expected || step.unitary.cols() != expected) {
      std::ostringstream os;
      os << "circuit: step " << s << " unitary is " << step.unitary.rows()
         << "x" << step.unitary.cols() << ", expected " << expected;
      throw ConfigError(os.str());
    }
  }
}

// Finds tau on the touched CR subsystems with Tr_T(U (tau (x) sigma) U^dag)
// = sigma. The system is linear in tau; the least-norm solution is used.
std::optional<DensityOperator> forced_touched_state(
    const ComplexMatrix& local_unitary, int touched_dim,
    const DensityOperator& sigma, double tol) {
  const int d_ctc = sigma.dim();
  const auto basis_t = deutsch::hermitian_basis(touched_dim);
  const auto basis_c = deutsch::hermitian_basis(d_ctc);
  const ComplexMatrix u_adj = local_unitary.adjoint();

  const int rows = d_ctc * d_ctc + 1;
  const int cols = touched_dim * touched_dim;
  RealMatrix a(rows, cols);
  for (int k = 0; k < cols; ++k) {
    const ComplexMatrix image = qmath::partial_trace(
        local_unitary * qmath::tensor(basis_t[k], sigma.matrix()) * u_adj,
        {touched_dim, d_ctc}, {1});
    a.col(k).head(rows - 1) = deutsch::hermitian_coords(basis_c, image);
    a(rows - 1, k) = basis_t[k].trace().real();
  }
  RealVector b(rows);
  b.head(rows - 1) = deutsch::hermitian_coords(basis_c, sigma.matrix());
  b(rows - 1) = 1.0;

  const RealVector c = a.completeOrthogonalDecomposition().solve(b);
  if ((a * c - b).norm() > tol) return std::nullopt;
  ComplexMatrix tau = ComplexMatrix::Zero(touched_dim, touched_dim);
  for (int k = 0; k < cols; ++k) tau += c(k) * basis_t[k];
  try {
    return DensityOperator::clamped(tau, tol);
  } catch (const InvalidState&) {
    return std::nullopt;
  }
}

// Replaces the touched CR subsystems by tau, keeping the marginal of the
// rest; correlations between the two groups are discarded.
DensityOperator replace_subsystems(const DensityOperator& cr,
                                   const std::vector<int>& dims,
                                   const std::vector<int>& touched,
                                   const DensityOperator& tau) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> rest;
  for (int i = 0; i < n; ++i) {
    if (std::find(touched.begin(), touched.end(), i) == touched.end()) {
      rest.push_back(i);
    }
  }
  ComplexMatrix joined = tau.matrix();
  std::vector<int> current = touched;
  if (!rest.empty()) {
    joined = qmath::tensor(qmath::partial_trace(cr.matrix(), dims, rest),
                           tau.matrix());
    current = rest;
    current.insert(current.end(), touched.begin(), touched.end());
  }
  std::vector<int> current_dims(n), order(n);
  for (int k = 0; k < n; ++k) current_dims[k] = dims[current[k]];
  for (int k = 0; k < n; ++k) order[current[k]] = k;
  return DensityOperator::clamped(
      qmath::permute_subsystems(joined, current_dims, order));
}

PureState orthogonal_to(const PureState& psi) {
  const qmath::ComplexVector& v = psi.amplitudes();
  Eigen::Index k = 0;
  v.cwiseAbs().minCoeff(&k);
  qmath::ComplexVector w = qmath::ComplexVector::Zero(v.size());
  w(k) = 1.0;
  w -= v * v.dot(w);
  w.normalize();
  return PureState::from_amplitudes(std::move(w));
}

DensityOperator pure(const PureState& psi) {
  return DensityOperator::from_pure(psi);
}

bool states_close(const DensityOperator& a, const DensityOperator& b,
                  double tol) {
  return qmath::trace_distance(a, b) <= tol;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

std::string to_string(const TeleportMode& mode) {
  switch (mode.kind) {
    case TeleportMode::Kind::Unconstrained: return "unconstrained";
    case TeleportMode::Kind::Deutsch: return "deutsch";
    case TeleportMode::Kind::Epsilon: {
      std::ostringstream os;
      os << "epsilon(" << mode.epsilon << ")";
      return os.str();
    }
  }
  return "unknown";
}

double ProtocolReport::max_residual() const {
  double r = 0.0;
  for (const auto& s : steps) r = std::max(r, s.residual);
  return r;
}

InteractionStep swap_step(int cr_subsystem, int dim, std::string label) {
  return {qmath::gates::swap(dim), {cr_subsystem}, true, std::move(label)};
}

// ---------------------------------------------------------------------------
// Circuit execution
// ---------------------------------------------------------------------------

ProtocolReport run_circuit(const InteractionCircuit& circuit,
                           const DensityOperator& initial_cr, double tol) {
  validate(circuit);
  const std::vector<int>& dims = circuit.cr_dims;
  if (initial_cr.dim() != product(dims)) {
    throw DimensionError("run_circuit: initial CR state does not match cr_dims");
  }
  const int n = static_cast<int>(dims.size());
  std::vector<int> joint_dims = dims;
  joint_dims.push_back(circuit.ctc_dim);
  std::vector<int> cr_keep(n);
  std::iota(cr_keep.begin(), cr_keep.end(), 0);

  ProtocolReport report;
  report.protocol = "circuit";
  DensityOperator cr = initial_cr;
  std::optional<DensityOperator> ctc = circuit.initial_ctc;

  for (std::size_t s = 0; s < circuit.steps.size(); ++s) {
    const InteractionStep& step = circuit.steps[s];
    StepRecord rec{step.label.empty() ? "step " + std::to_string(s) : step.label,
                   cr, cr, std::nullopt, std::nullopt, 0.0, 0.0, std::nullopt,
                   ComplexMatrix(), true};

    if (!step.acts_on_ctc) {
      const ComplexMatrix u = qmath::embed(step.unitary, dims, step.cr_subsystems);
      cr = DensityOperator::clamped(u * cr.matrix() * u.adjoint(), tol);
      rec.post_cr = cr;
      rec.joint_output = cr.matrix();
      report.steps.push_back(std::move(rec));
      continue;
    }

    std::vector<int> targets = step.cr_subsystems;
    targets.push_back(n);
    const ComplexMatrix u = qmath::embed(step.unitary, joint_dims, targets);
    DeutschMap map(u, cr, circuit.ctc_dim, tol);

    const DensityOperator sigma =
        ctc ? *ctc : deutsch::max_entropy_fixed_point(map, tol);
    rec.ctc_state = sigma;
    rec.premise_residual = deutsch::consistency_residual(map, sigma);

    const bool relaxed = circuit.consistency.kind == Consistency::Kind::Epsilon &&
                         circuit.consistency.epsilon > 0.0;
    if (relaxed) {
      // The CTC leaves as (1 - eps) sigma + eps D(sigma).
      const double eps = circuit.consistency.epsilon;
      const DensityOperator raw = deutsch::apply_deutsch_map(map, sigma);
      const DensityOperator out = deutsch::epsilon_final_state(
          deutsch::EpsilonModel(eps, sigma), raw);
      rec.joint_output = map.joint_output(sigma.matrix());
      cr = DensityOperator::clamped(
          qmath::partial_trace(rec.joint_output, joint_dims, cr_keep), tol);
      rec.residual = qmath::trace_distance(out, sigma);
      rec.epsilon_close = deutsch::epsilon_close(sigma, out, eps, tol);
      rec.ctc_output = out;
      ctc = out;
    } else {
      if (rec.premise_residual > tol) {
        // The CTC state is already fixed along its world line; consistency
        // then constrains the CR systems the step touches.
        int touched_dim = 1;
        for (int i : step.cr_subsystems) touched_dim *= dims[i];
        const auto tau =
            forced_touched_state(step.unitary, touched_dim, sigma, tol);
        if (!tau) {
          std::ostringstream os;
          os << "run_circuit: " << rec.label
             << ": no CR input on the touched subsystems is consistent with "
                "the fixed CTC state (residual "
             << rec.premise_residual << ")";
          throw PreconditionError(os.str());
        }
        const DensityOperator forced =
            replace_subsystems(cr, dims, step.cr_subsystems, *tau);
        rec.forced_cr_input = forced;
        map = DeutschMap(u, forced, circuit.ctc_dim, tol);
      }
      rec.residual = deutsch::consistency_residual(map, sigma);
      cr = deutsch::cr_output(map, sigma, tol);
      rec.joint_output = map.joint_output(sigma.matrix());
      rec.ctc_output = deutsch::apply_deutsch_map(map, sigma);
      ctc = sigma;
    }
    rec.post_cr = cr;
    report.steps.push_back(std::move(rec));
  }

  report.final_cr = cr;
  report.final_ctc = ctc;
  return report;
}

// ---------------------------------------------------------------------------
// Popping up and elimination
// ---------------------------------------------------------------------------

ProtocolReport popping_up(const PureState& psi, const ComplexMatrix& unitary,
                          double tol) {
  const int d = psi.dim();
  InteractionCircuit c{{d}, d, {{unitary, {0}, true, "CR:CTC"}},
                       Consistency::deutsch(), std::nullopt};
  ProtocolReport r = run_circuit(c, pure(psi), tol);
  r.protocol = "popping_up";
  r.fidelities["ctc"] = qmath::fidelity_to_pure(psi, *r.final_ctc);
  r.fidelities["cr"] = qmath::fidelity_to_pure(psi, r.final_cr);
  const bool ok = states_close(*r.final_ctc, pure(psi), tol) &&
                  states_close(r.final_cr, pure(psi), tol);
  r.verdict = ok ? Verdict::Pass : Verdict::Fail;
  return r;
}

ProtocolReport popping_up(const PureState& psi, double tol) {
  return popping_up(psi, qmath::gates::swap(psi.dim()), tol);
}

ProtocolReport elimination(const PureState& psi, double tol) {
  const int d = psi.dim();
  InteractionCircuit c{{d}, d, {swap_step(0, d, "SWAP CR:CTC")},
                       Consistency::deutsch(), std::nullopt};
  ProtocolReport r = run_circuit(c, pure(psi), tol);
  r.protocol = "elimination";
  r.joint_state = qmath::tensor(r.final_cr.matrix(), r.final_ctc->matrix());
  r.metrics["residual"] = r.max_residual();
  r.fidelities["forced_ctc"] = qmath::fidelity_to_pure(psi, *r.final_ctc);

  // Input dependence: compare with the state forced by an orthogonal input.
  ProtocolReport other = run_circuit(c, pure(orthogonal_to(psi)), tol);
  const double spread = qmath::trace_distance(*r.final_ctc, *other.final_ctc);
  r.metrics["forced_ctc_input_spread"] = spread;
  r.flags["forced_ctc_carries_input"] = spread > tol;
  r.status = "fixed point forced by consistency";
  r.verdict = r.max_residual() <= tol ? Verdict::Pass : Verdict::Fail;
  return r;
}

ProtocolReport elimination(const PureState& psi,
                           const DensityOperator& prepared_ctc, double tol) {
  const int d = psi.dim();
  if (prepared_ctc.dim() != d) {
    throw DimensionError("elimination: prepared CTC state has the wrong dimension");
  }
  InteractionCircuit c{{d}, d, {swap_step(0, d, "SWAP CR:CTC")},
                       Consistency::deutsch(), prepared_ctc};
  ProtocolReport r = run_circuit(c, pure(psi), tol);
  r.protocol = "elimination";
  r.joint_state = qmath::tensor(r.final_cr.matrix(), r.final_ctc->matrix());
  r.metrics["residual"] = r.max_residual();
  r.metrics["premise_residual"] = r.steps.front().premise_residual;
  r.fidelities["cr_keeps_input"] = qmath::fidelity_to_pure(psi, r.final_cr);
  r.flags["forced_ctc_carries_input"] = false;
  r.status = "CR premise forced to the prepared CTC state";
  r.verdict = states_close(r.final_cr, prepared_ctc, tol) &&
                      r.max_residual() <= tol
                  ? Verdict::Pass
                  : Verdict::Fail;
  return r;
}

// ---------------------------------------------------------------------------
// Cloning and deleting
// ---------------------------------------------------------------------------

ProtocolReport clone(const PureState& psi, const PureState& blank, double tol) {
  const int d = psi.dim();
  if (blank.dim() != d) throw DimensionError("clone: blank has the wrong dimension");
  InteractionCircuit c{{d, d},
                       d,
                       {swap_step(0, d, "SWAP CR(1):CTC"),
                        swap_step(1, d, "SWAP CR(2):CTC")},
                       Consistency::deutsch(),
                       std::nullopt};
  ProtocolReport r =
      run_circuit(c, qmath::tensor(pure(psi), pure(blank)), tol);
  r.protocol = "clone";
  const auto cr1 = qmath::partial_trace(r.final_cr, {d, d}, {0});
  const auto cr2 = qmath::partial_trace(r.final_cr, {d, d}, {1});
  r.fidelities["cr1"] = qmath::fidelity_to_pure(psi, cr1);
  r.fidelities["cr2"] = qmath::fidelity_to_pure(psi, cr2);
  r.metrics["residual"] = r.max_residual();
  const bool ok = r.fidelities["cr1"] >= 1.0 - tol &&
                  r.fidelities["cr2"] >= 1.0 - tol && r.max_residual() <= tol;
  r.verdict = ok ? Verdict::Pass : Verdict::Fail;
  return r;
}

ProtocolReport delete_copy(const PureState& psi, double tol) {
  const int d = psi.dim();
  const DensityOperator zero = pure(PureState::basis(d, 0));
  InteractionCircuit c{{d, d}, d, {swap_step(1, d, "SWAP CR(2):CTC")},
                       Consistency::deutsch(), zero};
  ProtocolReport r = run_circuit(c, qmath::tensor(pure(psi), pure(psi)), tol);
  r.protocol = "delete";
  const auto cr1 = qmath::partial_trace(r.final_cr, {d, d}, {0});
  const auto cr2 = qmath::partial_trace(r.final_cr, {d, d}, {1});
  r.fidelities["cr1"] = qmath::fidelity_to_pure(psi, cr1);
  r.metrics["cr2_distance_to_zero"] = qmath::trace_distance(cr2, zero);
  r.metrics["ctc_leak"] = qmath::trace_distance(*r.final_ctc, zero);
  r.metrics["residual"] = r.max_residual();
  const bool ok = r.fidelities["cr1"] >= 1.0 - tol &&
                  r.metrics["cr2_distance_to_zero"] <= tol &&
                  r.metrics["ctc_leak"] <= tol && r.max_residual() <= tol;
  r.verdict = ok ? Verdict::Pass : Verdict::Fail;
  return r;
}

// ---------------------------------------------------------------------------
// Correlations between CR and CTC
// ---------------------------------------------------------------------------

namespace {

int side_of(const DensityOperator& rho12, const char* what) {
  const int d = static_cast<int>(std::lround(std::sqrt(rho12.dim())));
  if (d * d != rho12.dim()) {
    throw DimensionError(std::string(what) +
                         ": bipartite state must be on C^d (x) C^d");
  }
  return d;
}

}  // namespace

ProtocolReport create_cr_ctc_state(const DensityOperator& rho12,
                                   const DensityOperator& ctc_init, double tol) {
  const int d = side_of(rho12, "create_cr_ctc_state");
  if (ctc_init.dim() != d) {
    throw DimensionError("create_cr_ctc_state: CTC state has the wrong dimension");
  }
  const auto marginal = qmath::partial_trace(rho12, {d, d}, {1});
  const double mismatch = qmath::trace_distance(marginal, ctc_init);
  if (mismatch > tol) {
    std::ostringstream os;
    os << "create_cr_ctc_state: CTC initialization differs from the CR(2) "
          "marginal by "
       << mismatch;
    throw PreconditionError(os.str());
  }
  InteractionCircuit c{{d, d}, d, {swap_step(1, d, "SWAP CR(2):CTC")},
                       Consistency::deutsch(), ctc_init};
  ProtocolReport r = run_circuit(c, rho12, tol);
  r.protocol = "create_state";
  const ComplexMatrix cr1_ctc =
      qmath::partial_trace(r.steps.front().joint_output, {d, d, d}, {0, 2});
  r.joint_state = cr1_ctc;
  r.metrics["max_entry_error"] = qmath::max_abs_diff(cr1_ctc, rho12.matrix());
  r.metrics["residual"] = r.max_residual();
  r.flags["forced"] = r.steps.front().forced_cr_input.has_value();
  const bool ok = r.metrics["max_entry_error"] <= tol &&
                  r.max_residual() <= tol && !r.flags["forced"];
  r.verdict = ok ? Verdict::Pass : Verdict::Fail;
  return r;
}

ProtocolReport create_cr_ctc_state(const DensityOperator& rho12, double tol) {
  const int d = side_of(rho12, "create_cr_ctc_state");
  return create_cr_ctc_state(rho12, qmath::partial_trace(rho12, {d, d}, {1}),
                             tol);
}

ProtocolReport no_entanglement_check(const DensityOperator& rho12,
                                     const PureState& ctc_pure, double tol) {
  const int d = side_of(rho12, "no_entanglement_check");
  if (ctc_pure.dim() != d) {
    throw DimensionError("no_entanglement_check: CTC state has the wrong dimension");
  }
  const DensityOperator ctc = pure(ctc_pure);
  InteractionCircuit c{{d, d}, d, {swap_step(1, d, "SWAP CR(2):CTC")},
                       Consistency::deutsch(), ctc};
  ProtocolReport r = run_circuit(c, rho12, tol);
  r.protocol = "no_entanglement";

  const auto rho1 = qmath::partial_trace(rho12, {d, d}, {0});
  const auto rho2 = qmath::partial_trace(rho12, {d, d}, {1});
  const double obstruction = qmath::trace_distance(rho2, ctc);
  const double correlation = qmath::trace_distance(
      rho12.matrix(), qmath::tensor(rho1.matrix(), rho2.matrix()));
  const auto f1 = qmath::partial_trace(r.final_cr, {d, d}, {0});
  const auto f2 = qmath::partial_trace(r.final_cr, {d, d}, {1});
  r.metrics["obstruction"] = obstruction;
  r.metrics["input_correlation"] = correlation;
  r.metrics["final_correlation"] = qmath::trace_distance(
      r.final_cr.matrix(), qmath::tensor(f1.matrix(), f2.matrix()));

  if (obstruction > tol) {
    r.status = "inconsistent_premises";
    r.verdict = Verdict::Pass;
  } else if (correlation <= tol) {
    r.status = "consistent_uncorrelated";
    r.verdict = Verdict::Pass;
  } else {
    r.status = "consistent_correlated";
    r.verdict = Verdict::Fail;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Teleportation into a CTC
// ---------------------------------------------------------------------------

DensityOperator teleport_channel(const DensityOperator& shared,
                                 const DensityOperator& input) {
  if (shared.dim() != 4 || input.dim() != 2) {
    throw ConfigError("teleportation is implemented for a qubit input and a "
                      "two-qubit shared state only");
  }
  using qmath::gates::Bell;
  const std::vector<int> dims{2, 2, 2};  // CR(1), CR(2), CTC
  // shared (x) input is ordered CR(1), CTC, CR(2).
  const ComplexMatrix joint = qmath::permute_subsystems(
      qmath::tensor(shared.matrix(), input.matrix()), dims, {0, 2, 1});

  const Bell outcomes[] = {Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus,
                           Bell::PsiMinus};
  const ComplexMatrix corrections[] = {
      qmath::gates::identity(2), qmath::gates::pauli_z(),
      qmath::gates::pauli_x(),
      qmath::gates::pauli_x() * qmath::gates::pauli_z()};

  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (int k = 0; k < 4; ++k) {
    // Bell projector on (CR(2), CR(1)) then Pauli correction on the CTC.
    const ComplexMatrix op =
        qmath::embed(corrections[k], dims, {2}) *
        qmath::embed(qmath::gates::bell_state(outcomes[k]).projector(), dims,
                     {1, 0});
    out += qmath::partial_trace(op * joint * op.adjoint(), dims, {2});
  }
  return DensityOperator::clamped(out);
}

ProtocolReport teleport_to_ctc(const TeleportSetup& setup, double tol) {
  const DensityOperator input = pure(setup.input);
  const DensityOperator raw = teleport_channel(setup.shared, input);
  const DensityOperator fixed_ctc =
      qmath::partial_trace(setup.shared, {2, 2}, {1});

  ProtocolReport r;
  r.protocol = "teleport";
  r.status = to_string(setup.mode);
  r.final_cr = qmath::partial_trace(setup.shared, {2, 2}, {0});
  r.fidelities["unconstrained"] = qmath::fidelity_to_pure(setup.input, raw);
  r.metrics["deutsch_residual"] = qmath::trace_distance(raw, fixed_ctc);

  switch (setup.mode.kind) {
    case TeleportMode::Kind::Unconstrained:
      r.final_ctc = raw;
      r.verdict = r.fidelities["unconstrained"] >= 1.0 - tol ? Verdict::Pass
                                                              : Verdict::Fail;
      break;
    case TeleportMode::Kind::Deutsch:
      // The CTC state before and after is the fixed Tr_CR(1) of the
      // shared state, whatever the input.
      r.final_ctc = fixed_ctc;
      r.verdict = Verdict::NotApplicable;
      break;
    case TeleportMode::Kind::Epsilon: {
      const deutsch::EpsilonModel model(setup.mode.epsilon, fixed_ctc);
      r.final_ctc = deutsch::epsilon_final_state(model, input);
      r.flags["epsilon_close"] = deutsch::epsilon_close(
          fixed_ctc, *r.final_ctc, setup.mode.epsilon, tol);
      r.flags["approx_teleport_condition"] =
          deutsch::approx_teleport_condition(fixed_ctc, input, tol);
      r.verdict = r.flags["epsilon_close"] ? Verdict::Pass : Verdict::Fail;
      break;
    }
  }
  r.fidelities["output"] = qmath::fidelity_to_pure(setup.input, *r.final_ctc);
  return r;
}

FidelityEstimate average_fidelity(const DensityOperator& shared,
                                  const TeleportMode& mode, int trials,
                                  const qmath::SeededRng& rng, double tol,
                                  int workers) {
  if (trials < 100) {
    throw ContractViolation("average_fidelity: at least 100 trials required");
  }
  if (workers <= 0) {
    workers = static_cast<int>(
        std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
  }
  workers = std::min(workers, trials);

  std::vector<double> values(static_cast<std::size_t>(trials));
  auto run_range = [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      qmath::SeededRng trial_rng = rng.derive(static_cast<std::uint64_t>(t));
      const PureState psi = qmath::haar_pure_state(2, trial_rng);
      values[static_cast<std::size_t>(t)] =
          teleport_to_ctc({shared, psi, mode}, tol).fidelities.at("output");
    }
  };
  if (workers == 1) {
    run_range(0, trials);
  } else {
    std::vector<std::jthread> pool;
    const int chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(trials, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
  }

  // Summed in trial order so the result is independent of the worker count.
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / trials;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / (trials - 1);
  return {mean, std::sqrt(var / trials), trials};
}

}  // namespace ctc::protocols
