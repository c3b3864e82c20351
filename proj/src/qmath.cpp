// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#include "ctcsim/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace ctc::qmath {

namespace {

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) * 0.5;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a nonempty square matrix, got " << m.rows()
       << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

int product(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

// Row-major strides: the last subsystem varies fastest.
std::vector<int> strides_of(const std::vector<int>& dims) {
  std::vector<int> strides(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) {
    strides[i] = strides[i + 1] * dims[i + 1];
  }
  return strides;
}

void check_dims(const ComplexMatrix& m, const std::vector<int>& dims,
                const char* what) {
  require_square(m, what);
  if (dims.empty() ||
      std::any_of(dims.begin(), dims.end(), [](int d) { return d < 1; })) {
    throw DimensionError(std::string(what) + ": subsystem dims must be >= 1");
  }
  if (product(dims) != m.rows()) {
    std::ostringstream os;
    os << what << ": product of subsystem dims " << product(dims)
       << " != matrix dimension " << m.rows();
    throw DimensionError(os.str());
  }
}

void check_subset(const std::vector<int>& subset, int n, bool allow_any_order,
                  const char* what) {
  if (subset.empty()) {
    throw DimensionError(std::string(what) + ": subsystem list is empty");
  }
  std::vector<int> sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
      sorted.front() < 0 || sorted.back() >= n) {
    throw DimensionError(std::string(what) +
                         ": subsystem indices out of range or repeated");
  }
  if (!allow_any_order && sorted != subset) {
    throw DimensionError(std::string(what) + ": indices must be ascending");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

PureState PureState::from_amplitudes(ComplexVector amplitudes, double tol) {
  if (amplitudes.size() < 1) {
    throw DimensionError("pure state: empty amplitude vector");
  }
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > tol) {
    std::ostringstream os;
    os << "pure state: squared norm " << norm2 << " is not 1";
    throw InvalidState(os.str());
  }
  amplitudes /= std::sqrt(norm2);
  return PureState(std::move(amplitudes));
}

PureState PureState::basis(int dim, int index) {
  if (dim < 1 || index < 0 || index >= dim) {
    throw DimensionError("basis state index out of range");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

PureState PureState::from_bloch_angles(double theta, double phi) {
  ComplexVector v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::polar(std::sin(theta / 2.0), phi);
  return PureState(std::move(v));
}

ComplexMatrix PureState::projector() const {
  return amplitudes_ * amplitudes_.adjoint();
}

DensityOperator DensityOperator::from_matrix(const ComplexMatrix& m,
                                             double tol) {
  require_square(m, "density operator");
  if (!is_hermitian(m, tol)) {
    throw InvalidState("density operator: matrix is not Hermitian");
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << "density operator: trace " << tr << " is not 1";
    throw InvalidState(os.str());
  }
  if (!is_psd(m, tol)) {
    throw InvalidState("density operator: matrix is not positive semidefinite");
  }
  return DensityOperator(hermitian_part(m));
}

DensityOperator DensityOperator::clamped(const ComplexMatrix& m, double tol) {
  require_square(m, "density operator");
  if (!is_hermitian(m, tol)) {
    throw InvalidState("density operator: matrix is not Hermitian");
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << "density operator: trace " << tr << " is not 1";
    throw InvalidState(os.str());
  }
  Eigh e = eigh(m);
  if (e.values(0) < -tol) {
    std::ostringstream os;
    os << "density operator: eigenvalue " << e.values(0) << " below -tol";
    throw InvalidState(os.str());
  }
  if (e.values(0) >= 0.0) {
    return DensityOperator(hermitian_part(m) / tr);
  }
  RealVector vals = e.values.cwiseMax(0.0);
  vals /= vals.sum();
  ComplexMatrix rebuilt =
      e.vectors * vals.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  return DensityOperator(hermitian_part(rebuilt));
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
  return DensityOperator(psi.projector());
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  if (dim < 1) throw DimensionError("maximally mixed state: dim must be >= 1");
  return DensityOperator(ComplexMatrix::Identity(dim, dim) /
                         static_cast<double>(dim));
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

DensityOperator to_density(const BlochVector& v, double tol) {
  if (v.norm() > 1.0 + tol) {
    std::ostringstream os;
    os << "Bloch vector of length " << v.norm() << " is outside the ball";
    throw InvalidState(os.str());
  }
  ComplexMatrix m = 0.5 * (gates::identity(2) + v.x * gates::pauli_x() +
                           v.y * gates::pauli_y() + v.z * gates::pauli_z());
  return DensityOperator::clamped(m, tol);
}

BlochVector to_bloch(const DensityOperator& rho) {
  if (rho.dim() != 2) {
    throw DimensionError("Bloch vector requires a qubit state");
  }
  const ComplexMatrix& m = rho.matrix();
  return {(gates::pauli_x() * m).trace().real(),
          (gates::pauli_y() * m).trace().real(),
          (gates::pauli_z() * m).trace().real()};
}

// ---------------------------------------------------------------------------
// Tensor structure
// ---------------------------------------------------------------------------

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator::clamped(tensor(a.matrix(), b.matrix()));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  check_dims(m, dims, "partial_trace");
  const int n = static_cast<int>(dims.size());
  check_subset(keep, n, /*allow_any_order=*/true, "partial_trace");

  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  std::vector<int> traced;
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(kept.begin(), kept.end(), i)) traced.push_back(i);
  }

  const std::vector<int> strides = strides_of(dims);
  auto offsets = [&](const std::vector<int>& subs) {
    // Full-space offset contributed by each multi-index over `subs`.
    std::vector<int> sub_dims;
    for (int s : subs) sub_dims.push_back(dims[s]);
    const int count = subs.empty() ? 1 : product(sub_dims);
    std::vector<int> out(count, 0);
    for (int idx = 0; idx < count; ++idx) {
      int rem = idx;
      int off = 0;
      for (int k = static_cast<int>(subs.size()) - 1; k >= 0; --k) {
        off += (rem % sub_dims[k]) * strides[subs[k]];
        rem /= sub_dims[k];
      }
      out[idx] = off;
    }
    return out;
  };
  const std::vector<int> kept_off = offsets(kept);
  const std::vector<int> traced_off = offsets(traced);

  const int dk = static_cast<int>(kept_off.size());
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (int r = 0; r < dk; ++r) {
    for (int c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (int t : traced_off) acc += m(kept_off[r] + t, kept_off[c] + t);
      out(r, c) = acc;
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& dims,
                              const std::vector<int>& keep) {
  return DensityOperator::clamped(partial_trace(rho.matrix(), dims, keep));
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const std::vector<int>& dims,
                                 const std::vector<int>& order) {
  check_dims(m, dims, "permute_subsystems");
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(order.size()) != n) {
    throw DimensionError("permute_subsystems: order must list every subsystem");
  }
  check_subset(order, n, /*allow_any_order=*/true, "permute_subsystems");

  std::vector<int> new_dims(n);
  for (int k = 0; k < n; ++k) new_dims[k] = dims[order[k]];
  const std::vector<int> new_strides = strides_of(new_dims);

  // Map each old index to its new position.
  const int total = static_cast<int>(m.rows());
  std::vector<int> remap(total);
  std::vector<int> digits(n);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int k = n - 1; k >= 0; --k) {
      digits[k] = rem % dims[k];
      rem /= dims[k];
    }
    int out = 0;
    for (int k = 0; k < n; ++k) out += digits[order[k]] * new_strides[k];
    remap[idx] = out;
  }
  ComplexMatrix out(total, total);
  for (int r = 0; r < total; ++r) {
    for (int c = 0; c < total; ++c) out(remap[r], remap[c]) = m(r, c);
  }
  return out;
}

ComplexMatrix embed(const ComplexMatrix& op, const std::vector<int>& dims,
                    const std::vector<int>& targets) {
  const int n = static_cast<int>(dims.size());
  check_subset(targets, n, /*allow_any_order=*/true, "embed");
  require_square(op, "embed");
  int target_dim = 1;
  for (int t : targets) target_dim *= dims[t];
  if (op.rows() != target_dim) {
    std::ostringstream os;
    os << "embed: operator dimension " << op.rows()
       << " != product of target dims " << target_dim;
    throw DimensionError(os.str());
  }

  // Move targets to the front (in the given order), tensor with identity,
  // and move them back.
  std::vector<int> order = targets;
  for (int i = 0; i < n; ++i) {
    if (std::find(targets.begin(), targets.end(), i) == targets.end()) {
      order.push_back(i);
    }
  }
  const int total = product(dims);
  ComplexMatrix front = tensor(op, ComplexMatrix::Identity(total / target_dim,
                                                           total / target_dim));
  std::vector<int> front_dims(n);
  for (int k = 0; k < n; ++k) front_dims[k] = dims[order[k]];
  std::vector<int> inverse(n);
  for (int k = 0; k < n; ++k) inverse[order[k]] = k;
  return permute_subsystems(front, front_dims, inverse);
}

// ---------------------------------------------------------------------------
// Spectral quantities
// ---------------------------------------------------------------------------

Eigh eigh(const ComplexMatrix& m) {
  require_square(m, "eigh");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw SolverError("eigh: Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const ComplexMatrix id = ComplexMatrix::Identity(u.rows(), u.cols());
  return (u * u.adjoint() - id).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw ContractViolation("is_psd: matrix is not square");
  }
  if (!is_hermitian(m, tol)) {
    throw ContractViolation("is_psd: matrix is not Hermitian within tol");
  }
  return eigh(m).values(0) >= -tol;
}

double von_neumann_entropy(const DensityOperator& rho) {
  const RealVector vals = eigh(rho.matrix()).values;
  double s = 0.0;
  for (double v : vals) {
    if (v > 0.0) s -= v * std::log2(v);
  }
  return s;
}

double fidelity_to_pure(const PureState& psi, const DensityOperator& rho) {
  if (psi.dim() != rho.dim()) {
    throw DimensionError("fidelity_to_pure: dimension mismatch");
  }
  const Complex f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  return std::clamp(f.real(), 0.0, 1.0);
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("trace_distance: dimension mismatch");
  }
  return 0.5 * eigh(a - b).values.cwiseAbs().sum();
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  return trace_distance(a.matrix(), b.matrix());
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff: dimension mismatch");
  }
  return (a - b).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

std::uint64_t SeededRng::derived_seed(std::uint64_t index) const {
  std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PureState haar_pure_state(int dim, SeededRng& rng) {
  if (dim < 2) throw DimensionError("haar_pure_state: dim must be >= 2");
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  v.normalize();
  return PureState::from_amplitudes(std::move(v));
}

ComplexMatrix haar_unitary(int dim, SeededRng& rng) {
  if (dim < 1) throw DimensionError("haar_unitary: dim must be >= 1");
  ComplexMatrix z(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) z(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

DensityOperator random_density(int dim, SeededRng& rng) {
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_normal();
  }
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityOperator::clamped(m);
}

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

namespace gates {

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix swap(int dim) {
  ComplexMatrix m = ComplexMatrix::Zero(dim * dim, dim * dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(j * dim + i, i * dim + j) = 1.0;
  }
  return m;
}

ComplexMatrix cnot() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 3) = 1.0;
  m(3, 2) = 1.0;
  return m;
}

PureState bell_state(Bell which) {
  const double h = 1.0 / std::sqrt(2.0);
  ComplexVector v = ComplexVector::Zero(4);
  switch (which) {
    case Bell::PhiPlus:  v(0) = h; v(3) = h;  break;
    case Bell::PhiMinus: v(0) = h; v(3) = -h; break;
    case Bell::PsiPlus:  v(1) = h; v(2) = h;  break;
    case Bell::PsiMinus: v(1) = h; v(2) = -h; break;
  }
  return PureState::from_amplitudes(std::move(v));
}

}  // namespace gates

}  // namespace ctc::qmath
