// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

// Swap-based CR/CTC protocols built on the Deutsch core: popping up,
// elimination, cloning, deleting, CR-CTC state creation, the no-correlation
// check, and teleportation into a CTC (plain, Deutsch-constrained and
// epsilon-relaxed).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctcsim/deutsch.hpp"
#include "ctcsim/qmath.hpp"

namespace ctc::protocols {

using qmath::ComplexMatrix;
using qmath::DensityOperator;
using qmath::kDefaultTol;
using qmath::PureState;

struct InteractionStep {
  ComplexMatrix unitary;
  // The unitary acts on these CR subsystems (in this order), followed by
  // the CTC when acts_on_ctc is set.
  std::vector<int> cr_subsystems;
  bool acts_on_ctc = true;
  std::string label;
};

struct Consistency {
  enum class Kind { Deutsch, Epsilon };
  Kind kind = Kind::Deutsch;
  double epsilon = 0.0;

  static Consistency deutsch() { return {}; }
  static Consistency relaxed(double epsilon) { return {Kind::Epsilon, epsilon}; }
};

struct InteractionCircuit {
  std::vector<int> cr_dims;
  int ctc_dim = 2;
  std::vector<InteractionStep> steps;
  Consistency consistency;
  // CTC state fixed before the first interaction. When absent, the first
  // CTC-touching step selects it as its maximum-entropy fixed point.
  std::optional<DensityOperator> initial_ctc;
};

struct StepRecord {
  std::string label;
  DensityOperator pre_cr;
  DensityOperator post_cr;
  // CTC state entering the step (the consistent fixed point under Deutsch
  // consistency); empty for CR-only steps.
  std::optional<DensityOperator> ctc_state;
  // CTC state leaving the step. Equal to ctc_state under Deutsch consistency.
  std::optional<DensityOperator> ctc_output;
  // Trace distance between the CTC state leaving and entering the step,
  // evaluated on the CR input actually used.
  double residual = 0.0;
  // Same quantity evaluated on the CR state before any forcing.
  double premise_residual = 0.0;
  // Set when an already fixed CTC state was inconsistent with the incoming
  // CR state and consistency was restored by constraining the touched CR
  // subsystems instead.
  std::optional<DensityOperator> forced_cr_input;
  // U (rho_CR (x) sigma) U^dagger over CR (x) CTC (CR only for CR steps).
  ComplexMatrix joint_output;
  bool epsilon_close = true;
};

enum class Verdict { Pass, Fail, NotApplicable };
const char* to_string(Verdict v);

struct ProtocolReport {
  std::string protocol;
  std::vector<StepRecord> steps;
  DensityOperator final_cr = DensityOperator::maximally_mixed(1);
  std::optional<DensityOperator> final_ctc;
  // Protocol-specific joint state of interest (e.g. the CR(1)-CTC pair).
  std::optional<ComplexMatrix> joint_state;
  std::map<std::string, double> fidelities;
  std::map<std::string, double> metrics;
  std::map<std::string, bool> flags;
  std::string status;
  Verdict verdict = Verdict::NotApplicable;

  double max_residual() const;
};

ProtocolReport run_circuit(const InteractionCircuit& circuit,
                           const DensityOperator& initial_cr,
                           double tol = kDefaultTol);

ProtocolReport popping_up(const PureState& psi, double tol = kDefaultTol);
// Same single-interaction experiment with an arbitrary CR-CTC unitary.
ProtocolReport popping_up(const PureState& psi, const ComplexMatrix& unitary,
                          double tol = kDefaultTol);

// One SWAP with no prior CTC state: consistency forces sigma* = |psi><psi|
// and the joint output is the product rho_CR (x) rho_CTC.
ProtocolReport elimination(const PureState& psi, double tol = kDefaultTol);
// One SWAP against a CTC prepared beforehand in `prepared_ctc`: the CR
// premise is forced to the prepared state and the input is erased.
ProtocolReport elimination(const PureState& psi,
                           const DensityOperator& prepared_ctc,
                           double tol = kDefaultTol);

ProtocolReport clone(const PureState& psi, const PureState& blank,
                     double tol = kDefaultTol);
// `delete` is reserved.
ProtocolReport delete_copy(const PureState& psi, double tol = kDefaultTol);

// CTC starts in Tr_CR(1) rho12, then SWAP on (CR(2), CTC).
ProtocolReport create_cr_ctc_state(const DensityOperator& rho12,
                                   double tol = kDefaultTol);
// Throws PreconditionError unless ctc_init equals the CR(2) marginal.
ProtocolReport create_cr_ctc_state(const DensityOperator& rho12,
                                   const DensityOperator& ctc_init,
                                   double tol = kDefaultTol);

// Status is one of "consistent_uncorrelated", "inconsistent_premises" (both
// confirm the no-correlation result) or "consistent_correlated" (fail).
// metrics["obstruction"] = T(Tr_CR(1) rho12, |ctc><ctc|).
ProtocolReport no_entanglement_check(const DensityOperator& rho12,
                                     const PureState& ctc_pure,
                                     double tol = kDefaultTol);

struct TeleportMode {
  enum class Kind { Unconstrained, Deutsch, Epsilon };
  Kind kind = Kind::Unconstrained;
  double epsilon = 0.0;

  static TeleportMode unconstrained() { return {}; }
  static TeleportMode deutsch() { return {Kind::Deutsch, 0.0}; }
  static TeleportMode relaxed(double epsilon) { return {Kind::Epsilon, epsilon}; }
};
std::string to_string(const TeleportMode& mode);

struct TeleportSetup {
  DensityOperator shared;  // on CR(1) (x) CTC
  PureState input;         // on CR(2)
  TeleportMode mode;
};

// Outcome-averaged Bell-measurement teleportation of `input` from CR(2)
// through `shared` into the CTC, followed by the mode's constraint.
ProtocolReport teleport_to_ctc(const TeleportSetup& setup,
                               double tol = kDefaultTol);

// Channel of the standard protocol: CTC output for a CR(2) input, averaged
// over the four Bell outcomes with Pauli corrections.
DensityOperator teleport_channel(const DensityOperator& shared,
                                 const DensityOperator& input);

struct FidelityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

// Monte Carlo Haar average of the output fidelity. Trial t draws its input
// from rng.derive(t), so results do not depend on `workers`.
FidelityEstimate average_fidelity(const DensityOperator& shared,
                                  const TeleportMode& mode, int trials,
                                  const qmath::SeededRng& rng,
                                  double tol = kDefaultTol, int workers = 0);

// Convenience gate on (CR subsystem, CTC) pairs.
InteractionStep swap_step(int cr_subsystem, int dim, std::string label = {});

}  // namespace ctc::protocols
