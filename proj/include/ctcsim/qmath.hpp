// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

// Finite-dimensional complex linear algebra for density-matrix simulation.
//
// Conventions used throughout the library:
//  * Composite spaces are ordered CR factors first, CTC factor last, and the
//    Kronecker product puts its left operand in the most significant digit
//    (basis order |00>, |01>, |10>, |11> for two qubits).
//  * Every spectral quantity (entropy, PSD tests, trace distance) goes
//    through eigh(), the single Hermitian eigensolver entry point.
//  * Entropies are in bits.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "ctcsim/errors.hpp"

namespace ctc::qmath {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-9;

class PureState {
 public:
  // Validates unit norm within tol; the stored vector is renormalized.
  static PureState from_amplitudes(ComplexVector amplitudes,
                                   double tol = kDefaultTol);
  static PureState basis(int dim, int index);
  // cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
  static PureState from_bloch_angles(double theta, double phi);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  ComplexMatrix projector() const;

 private:
  explicit PureState(ComplexVector amplitudes)
      : amplitudes_(std::move(amplitudes)) {}
  ComplexVector amplitudes_;
};

class DensityOperator {
 public:
  // Strict validation: Hermitian, unit trace and PSD, each within tol.
  static DensityOperator from_matrix(const ComplexMatrix& m,
                                     double tol = kDefaultTol);
  // For numerically produced states: eigenvalues in (-tol, 0) are clamped
  // to zero and the trace renormalized. Larger violations still throw.
  static DensityOperator clamped(const ComplexMatrix& m,
                                 double tol = kDefaultTol);
  static DensityOperator from_pure(const PureState& psi);
  static DensityOperator maximally_mixed(int dim);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  explicit DensityOperator(ComplexMatrix m) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
};

// rho = (I + x X + y Y + z Z) / 2. Throws InvalidState when |v| > 1 + tol.
DensityOperator to_density(const BlochVector& v, double tol = kDefaultTol);
// Throws DimensionError for non-qubit states.
BlochVector to_bloch(const DensityOperator& rho);

// Kronecker product a (x) b.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// Reduced operator on the subsystems listed in `keep`, returned in their
// original relative order. `dims` lists every subsystem dimension.
ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep);
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& dims,
                              const std::vector<int>& keep);

// Reorders subsystems: output factor k is input factor order[k].
ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const std::vector<int>& dims,
                                 const std::vector<int>& order);

// Lifts `op`, which acts on the listed subsystems in the listed order, to the
// full space (identity elsewhere).
ComplexMatrix embed(const ComplexMatrix& op, const std::vector<int>& dims,
                    const std::vector<int>& targets);

struct Eigh {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns are eigenvectors
};

// Eigendecomposition of the Hermitian part of m.
Eigh eigh(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol);
bool is_unitary(const ComplexMatrix& u, double tol = kDefaultTol);
// Throws ContractViolation for non-square or non-Hermitian input.
bool is_psd(const ComplexMatrix& m, double tol = kDefaultTol);

double von_neumann_entropy(const DensityOperator& rho);
double fidelity_to_pure(const PureState& psi, const DensityOperator& rho);
double trace_distance(const DensityOperator& a, const DensityOperator& b);
// Same metric on arbitrary Hermitian operands.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// Seeded pseudo-random source. One instance per worker; independent
// streams come from derive().
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  Complex complex_normal() { return {normal(), normal()}; }
  // Seed of the index-th derived stream (splitmix64 of seed and index).
  std::uint64_t derived_seed(std::uint64_t index) const;
  SeededRng derive(std::uint64_t index) const {
    return SeededRng(derived_seed(index));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Normalized vector of iid standard complex Gaussians.
PureState haar_pure_state(int dim, SeededRng& rng);
// QR of a Ginibre matrix with the R-diagonal phases divided out.
ComplexMatrix haar_unitary(int dim, SeededRng& rng);
// Hilbert-Schmidt random mixed state G G^dagger / tr(G G^dagger).
DensityOperator random_density(int dim, SeededRng& rng);

namespace gates {

ComplexMatrix identity(int dim);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
// |i>|j> -> |j>|i> on C^d (x) C^d.
ComplexMatrix swap(int dim);
// Control on the first factor, target on the second.
ComplexMatrix cnot();

enum class Bell { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
PureState bell_state(Bell which);

}  // namespace gates

}  // namespace ctc::qmath
