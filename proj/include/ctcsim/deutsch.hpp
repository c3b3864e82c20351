// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

// Deutsch-model core. A CR system in state rho_CR meets a CTC system through
// a unitary U on CR (x) CTC. The CTC state must be a fixed point of
//
//     sigma -> Tr_CR( U (rho_CR (x) sigma) U^dagger ),
//
// the maximum-entropy fixed point is selected when there are several, and
// the CR system leaves in Tr_CTC( U (rho_CR (x) sigma*) U^dagger ).

#include <vector>

#include "ctcsim/qmath.hpp"

namespace ctc::deutsch {

using qmath::ComplexMatrix;
using qmath::DensityOperator;
using qmath::kDefaultTol;

// Singular values of (L - I) below this count as fixed-point directions.
inline constexpr double kKernelThreshold = 1e-8;

class DeutschMap {
 public:
  // The CR dimension is taken from cr_input; unitary must be square of size
  // cr_input.dim() * ctc_dim and unitary within tol.
  DeutschMap(ComplexMatrix unitary, DensityOperator cr_input, int ctc_dim,
             double tol = kDefaultTol);

  int cr_dim() const { return cr_input_.dim(); }
  int ctc_dim() const { return ctc_dim_; }
  const ComplexMatrix& unitary() const { return unitary_; }
  const DensityOperator& cr_input() const { return cr_input_; }

  // Linear action on an arbitrary d_CTC x d_CTC operator.
  ComplexMatrix apply_linear(const ComplexMatrix& sigma) const;
  // U (rho_CR (x) sigma) U^dagger on the joint space.
  ComplexMatrix joint_output(const ComplexMatrix& sigma) const;

 private:
  ComplexMatrix unitary_;
  ComplexMatrix unitary_adj_;
  DensityOperator cr_input_;
  int ctc_dim_;
};

DensityOperator apply_deutsch_map(const DeutschMap& m,
                                  const DensityOperator& sigma);

// Trace distance between sigma and its image; zero iff sigma is consistent.
double consistency_residual(const DeutschMap& m, const DensityOperator& sigma);

// Column-stacking representation: vec(D(sigma)) = L vec(sigma), where
// vec(sigma)[i + d*j] = sigma(i, j).
ComplexMatrix liouville_matrix(const DeutschMap& m);

struct FixedPointSet {
  DensityOperator particular;
  // Traceless, Hilbert-Schmidt orthonormal Hermitian directions along which
  // the Deutsch condition stays satisfied.
  std::vector<ComplexMatrix> basis;

  int dim_kernel() const { return static_cast<int>(basis.size()); }
};

FixedPointSet fixed_point_set(const DeutschMap& m, double tol = kDefaultTol);

// Cesaro mean (1/N) sum_{n<N} D^n(I/d). Stops early once the mean is a fixed
// point to within stop_residual (Frobenius norm).
ComplexMatrix cesaro_average(const DeutschMap& m, int max_terms = 10000,
                             double stop_residual = 1e-13);

struct AscentOptions {
  double gradient_tol = 1e-9;
  int max_iterations = 100000;
};

// Projected gradient ascent of the von Neumann entropy over the PSD part of
// the affine fixed set, started from `start` (which must lie in the set).
DensityOperator max_entropy_by_ascent(const FixedPointSet& set,
                                      const DensityOperator& start,
                                      double tol = kDefaultTol,
                                      const AscentOptions& options = {});

// Qubit CTC only: the fixed set is an affine slice of the Bloch ball, and
// entropy falls with Bloch radius, so the answer is its least-norm point.
DensityOperator max_entropy_qubit_closed_form(const FixedPointSet& set,
                                              double tol = kDefaultTol);

// Closed form for d_CTC == 2, gradient ascent otherwise.
DensityOperator max_entropy_fixed_point(const DeutschMap& m,
                                        double tol = kDefaultTol);

// Throws PreconditionError when sigma_star is not consistent within tol.
DensityOperator cr_output(const DeutschMap& m, const DensityOperator& sigma_star,
                          double tol = kDefaultTol);

struct Evolution {
  DensityOperator ctc;
  DensityOperator cr;
};

Evolution evolve(const DeutschMap& m, double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// epsilon-close relaxation
// ---------------------------------------------------------------------------

class EpsilonModel {
 public:
  EpsilonModel(double epsilon, DensityOperator rho_i);

  double epsilon() const { return epsilon_; }
  const DensityOperator& rho_i() const { return rho_i_; }

 private:
  double epsilon_;
  DensityOperator rho_i_;
};

// rho_f - (1 - eps) rho_i >= 0 and (1 + eps) rho_i - rho_f >= 0.
bool epsilon_close(const DensityOperator& rho_i, const DensityOperator& rho_f,
                   double epsilon, double tol = kDefaultTol);

// 2 rho_i - rho >= 0.
bool approx_teleport_condition(const DensityOperator& rho_i,
                               const DensityOperator& rho,
                               double tol = kDefaultTol);

// (1 - eps) rho_i + eps rho.
DensityOperator epsilon_final_state(const EpsilonModel& model,
                                    const DensityOperator& rho);

// Trace distance between the CR output for the mixture p rho1 + (1-p) rho2
// and the same mixture of the individual CR outputs. A positive value
// certifies that the CR evolution is not linear in its input.
double nonlinearity_witness(const ComplexMatrix& unitary,
                            const DensityOperator& rho1,
                            const DensityOperator& rho2, double p,
                            double tol = kDefaultTol);

// Orthonormal Hermitian operator basis of C^{d x d} (diagonal units, then
// symmetric and antisymmetric off-diagonal pairs) and coordinates in it.
std::vector<ComplexMatrix> hermitian_basis(int dim);
qmath::RealVector hermitian_coords(const std::vector<ComplexMatrix>& basis,
                                   const ComplexMatrix& h);

}  // namespace ctc::deutsch
