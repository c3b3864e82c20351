// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#include "ctcsim/deutsch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ctc::deutsch {

using qmath::Complex;
using qmath::RealVector;
using RealMatrix = Eigen::MatrixXd;

namespace {

ComplexMatrix from_coords(const std::vector<ComplexMatrix>& basis,
                          const RealVector& c) {
  ComplexMatrix h = ComplexMatrix::Zero(basis.front().rows(),
                                        basis.front().cols());
  for (std::size_t a = 0; a < basis.size(); ++a) h += c(a) * basis[a];
  return h;
}

// Real representation R(a, b) = tr(B_a D(B_b)) of the (Hermiticity
// preserving) Deutsch map.
RealMatrix real_representation(const DeutschMap& m,
                               const std::vector<ComplexMatrix>& basis) {
  const int n = static_cast<int>(basis.size());
  RealMatrix r(n, n);
  for (int b = 0; b < n; ++b) {
    r.col(b) = hermitian_coords(basis, m.apply_linear(basis[b]));
  }
  return r;
}

// Orthonormal basis of the orthogonal complement of w in R^k.
RealMatrix complement_of(const RealVector& w) {
  const int k = static_cast<int>(w.size());
  Eigen::JacobiSVD<RealMatrix> svd(w.transpose(), Eigen::ComputeFullV);
  return svd.matrixV().rightCols(k - 1);
}

// Null space of c (rows may be zero), as orthonormal columns.
RealMatrix null_space(const RealMatrix& c, int cols, double threshold) {
  if (c.rows() == 0) return RealMatrix::Identity(cols, cols);
  Eigen::JacobiSVD<RealMatrix> svd(c, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

ComplexMatrix matrix_log2(const qmath::Eigh& e) {
  RealVector logs = e.values.unaryExpr([](double v) { return std::log2(v); });
  return e.vectors * logs.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

// d/deta S(X + eta*delta) for traceless delta, or -inf outside the cone.
double directional_derivative(const ComplexMatrix& x,
                              const ComplexMatrix& delta) {
  const qmath::Eigh e = qmath::eigh(x);
  if (e.values(0) <= 0.0) return -std::numeric_limits<double>::infinity();
  return -(delta * matrix_log2(e)).trace().real();
}

}  // namespace

// ---------------------------------------------------------------------------
// Hermitian coordinates
// ---------------------------------------------------------------------------

std::vector<ComplexMatrix> hermitian_basis(int dim) {
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(dim) * dim);
  const double h = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
    e(i, i) = 1.0;
    basis.push_back(std::move(e));
  }
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
      s(j, k) = h;
      s(k, j) = h;
      basis.push_back(std::move(s));
      ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
      a(j, k) = Complex(0.0, h);
      a(k, j) = Complex(0.0, -h);
      basis.push_back(std::move(a));
    }
  }
  return basis;
}

RealVector hermitian_coords(const std::vector<ComplexMatrix>& basis,
                            const ComplexMatrix& h) {
  RealVector c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t a = 0; a < basis.size(); ++a) {
    c(static_cast<Eigen::Index>(a)) =
        basis[a].cwiseProduct(h.transpose()).sum().real();
  }
  return c;
}

// ---------------------------------------------------------------------------
// The map
// ---------------------------------------------------------------------------

DeutschMap::DeutschMap(ComplexMatrix unitary, DensityOperator cr_input,
                       int ctc_dim, double tol)
    : unitary_(std::move(unitary)),
      cr_input_(std::move(cr_input)),
      ctc_dim_(ctc_dim) {
  if (ctc_dim_ < 1) throw DimensionError("DeutschMap: ctc_dim must be >= 1");
  const int joint = cr_input_.dim() * ctc_dim_;
  if (unitary_.rows() != joint || unitary_.cols() != joint) {
    std::ostringstream os;
    os << "DeutschMap: unitary is " << unitary_.rows() << "x"
       << unitary_.cols() << ", expected " << joint << "x" << joint;
    throw DimensionError(os.str());
  }
  if (!qmath::is_unitary(unitary_, tol)) {
    throw ContractViolation("DeutschMap: interaction is not unitary");
  }
  unitary_adj_ = unitary_.adjoint();

  // Trace preservation on the matrix-unit basis: tr D(E_ij) = delta_ij.
  for (int i = 0; i < ctc_dim_; ++i) {
    for (int j = 0; j < ctc_dim_; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(ctc_dim_, ctc_dim_);
      e(i, j) = 1.0;
      const Complex tr = apply_linear(e).trace();
      if (std::abs(tr - Complex(i == j ? 1.0 : 0.0, 0.0)) > tol) {
        throw ContractViolation("DeutschMap: induced map is not trace preserving");
      }
    }
  }
}

ComplexMatrix DeutschMap::joint_output(const ComplexMatrix& sigma) const {
  if (sigma.rows() != ctc_dim_ || sigma.cols() != ctc_dim_) {
    throw DimensionError("DeutschMap: CTC operand has the wrong dimension");
  }
  return unitary_ * qmath::tensor(cr_input_.matrix(), sigma) * unitary_adj_;
}

ComplexMatrix DeutschMap::apply_linear(const ComplexMatrix& sigma) const {
  return qmath::partial_trace(joint_output(sigma), {cr_dim(), ctc_dim_}, {1});
}

DensityOperator apply_deutsch_map(const DeutschMap& m,
                                  const DensityOperator& sigma) {
  return DensityOperator::clamped(m.apply_linear(sigma.matrix()));
}

double consistency_residual(const DeutschMap& m, const DensityOperator& sigma) {
  return qmath::trace_distance(m.apply_linear(sigma.matrix()), sigma.matrix());
}

ComplexMatrix liouville_matrix(const DeutschMap& m) {
  const int d = m.ctc_dim();
  ComplexMatrix l(d * d, d * d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(i, j) = 1.0;
      const ComplexMatrix image = m.apply_linear(e);
      l.col(i + d * j) = image.reshaped();  // column-major == column stacking
    }
  }
  return l;
}

// ---------------------------------------------------------------------------
// Fixed points
// ---------------------------------------------------------------------------

ComplexMatrix cesaro_average(const DeutschMap& m, int max_terms,
                             double stop_residual) {
  const int d = m.ctc_dim();
  const auto basis = hermitian_basis(d);
  const RealMatrix r = real_representation(m, basis);

  RealVector term = hermitian_coords(
      basis, ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  RealVector sum = RealVector::Zero(term.size());
  int terms = 0;
  while (terms < std::max(1, max_terms)) {
    sum += term;
    ++terms;
    const RealVector mean = sum / static_cast<double>(terms);
    if ((r * mean - mean).norm() <= stop_residual) break;
    term = r * term;
  }
  const RealVector mean = sum / static_cast<double>(terms);
  return from_coords(basis, mean);
}

FixedPointSet fixed_point_set(const DeutschMap& m, double tol) {
  const int d = m.ctc_dim();
  const auto basis = hermitian_basis(d);
  const int n = d * d;
  const RealMatrix r = real_representation(m, basis);
  const RealMatrix a = r - RealMatrix::Identity(n, n);

  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();  // descending
  int k = 0;
  for (int i = n - 1; i >= 0 && s(i) < kKernelThreshold; --i) ++k;
  if (k == 0) {
    throw SolverError("fixed_point_set: (L - I) has no kernel; the induced "
                      "map lost trace preservation numerically");
  }
  const RealMatrix right = svd.matrixV().rightCols(k);
  const RealMatrix left = svd.matrixU().rightCols(k);

  // Cesaro mean of I/d, then the spectral projector onto eigenvalue 1,
  // right (left^T right)^{-1} left^T, which is exact because the peripheral
  // eigenvalue of a channel is semisimple.
  const RealVector mean =
      hermitian_coords(basis, cesaro_average(m, 10000, 1e-13));
  const RealMatrix overlap = left.transpose() * right;
  Eigen::FullPivLU<RealMatrix> lu(overlap);
  if (!lu.isInvertible()) {
    throw SolverError("fixed_point_set: degenerate spectral projector");
  }
  const RealVector projected = right * lu.solve(left.transpose() * mean);
  ComplexMatrix particular = from_coords(basis, projected);
  const double tr = particular.trace().real();
  if (!(std::abs(tr) > 0.5)) {
    throw SolverError("fixed_point_set: projected Cesaro mean lost its trace");
  }
  particular /= tr;

  FixedPointSet out{DensityOperator::maximally_mixed(d), {}};
  try {
    out.particular = DensityOperator::clamped(particular, tol);
  } catch (const InvalidState& e) {
    throw SolverError(std::string("fixed_point_set: no PSD fixed point found: ") +
                      e.what());
  }

  if (k > 1) {
    const RealVector trace_dir =
        hermitian_coords(basis, ComplexMatrix::Identity(d, d));
    const RealMatrix traceless = right * complement_of(right.transpose() * trace_dir);
    for (Eigen::Index c = 0; c < traceless.cols(); ++c) {
      out.basis.push_back(from_coords(basis, traceless.col(c)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maximum entropy
// ---------------------------------------------------------------------------

DensityOperator max_entropy_by_ascent(const FixedPointSet& set,
                                      const DensityOperator& start, double tol,
                                      const AscentOptions& options) {
  const ComplexMatrix& p = set.particular.matrix();
  const int d = set.particular.dim();
  if (start.dim() != d) {
    throw DimensionError("max_entropy_by_ascent: start has the wrong dimension");
  }
  if (set.basis.empty()) return set.particular;

  // Every fixed point is supported inside the support of the particular
  // point (a Cesaro limit of the full-rank I/d); the ascent runs there.
  const qmath::Eigh pe = qmath::eigh(p);
  std::vector<int> in_support, out_support;
  for (int i = 0; i < d; ++i) {
    (pe.values(i) > tol ? in_support : out_support).push_back(i);
  }
  const int rank = static_cast<int>(in_support.size());
  ComplexMatrix q(d, rank), q_perp(d, d - rank);
  for (int i = 0; i < rank; ++i) q.col(i) = pe.vectors.col(in_support[i]);
  for (int i = 0; i < d - rank; ++i) q_perp.col(i) = pe.vectors.col(out_support[i]);

  // Kernel directions whose range stays inside the support.
  const int m = set.dim_kernel();
  RealMatrix constraint(2 * (d - rank) * d, m);
  for (int k = 0; k < m; ++k) {
    const ComplexMatrix block = q_perp.adjoint() * set.basis[k];
    const Eigen::Index len = block.size();
    constraint.col(k).head(len) = block.reshaped().real();
    constraint.col(k).tail(len) = block.reshaped().imag();
  }
  const RealMatrix feasible = null_space(constraint, m, kKernelThreshold);
  std::vector<ComplexMatrix> dirs;
  for (Eigen::Index j = 0; j < feasible.cols(); ++j) {
    ComplexMatrix dj = ComplexMatrix::Zero(d, d);
    for (int k = 0; k < m; ++k) dj += feasible(k, j) * set.basis[k];
    dirs.push_back(q.adjoint() * dj * q);
  }
  if (dirs.empty()) return set.particular;

  ComplexMatrix x = q.adjoint() * start.matrix() * q;
  const ComplexMatrix x_particular = q.adjoint() * p * q;
  for (int i = 0; i < 64 && qmath::eigh(x).values(0) <= 0.0; ++i) {
    x = 0.5 * (x + x_particular);
  }

  bool converged = false;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const qmath::Eigh e = qmath::eigh(x);
    const ComplexMatrix log_x = matrix_log2(e);
    RealVector g(static_cast<Eigen::Index>(dirs.size()));
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      g(static_cast<Eigen::Index>(j)) = -(dirs[j] * log_x).trace().real();
    }
    if (g.norm() <= options.gradient_tol) {
      converged = true;
      break;
    }
    ComplexMatrix delta = ComplexMatrix::Zero(rank, rank);
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      delta += g(static_cast<Eigen::Index>(j)) * dirs[j];
    }

    // Largest step keeping X + eta*delta PSD: -1 / min eig(X^-1/2 delta X^-1/2).
    const RealVector inv_sqrt =
        e.values.unaryExpr([](double v) { return 1.0 / std::sqrt(v); });
    const ComplexMatrix w =
        e.vectors * inv_sqrt.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    const double mu = qmath::eigh(w * delta * w).values(0);
    double hi = mu < 0.0 ? -1.0 / mu : 1.0;
    double lo = 0.0;
    if (mu >= 0.0) {
      while (directional_derivative(x + hi * delta, delta) > 0.0 && hi < 1e12) {
        hi *= 2.0;
      }
    }
    // Exact line search: the directional derivative is decreasing in eta.
    for (int b = 0; b < 100 && hi - lo > 1e-15 * hi; ++b) {
      const double mid = 0.5 * (lo + hi);
      if (directional_derivative(x + mid * delta, delta) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    if (lo == 0.0) {
      converged = true;  // no representable ascent step left
      break;
    }
    x += lo * delta;
    x = 0.5 * (x + x.adjoint()).eval();
  }
  if (!converged) {
    throw SolverError("max_entropy_by_ascent: no convergence within the "
                      "iteration limit");
  }
  ComplexMatrix sigma = q * x * q.adjoint();
  sigma /= sigma.trace().real();
  return DensityOperator::clamped(sigma, tol);
}

DensityOperator max_entropy_qubit_closed_form(const FixedPointSet& set,
                                              double tol) {
  if (set.particular.dim() != 2) {
    throw DimensionError("qubit closed form needs a two-dimensional CTC");
  }
  const qmath::BlochVector b = qmath::to_bloch(set.particular);
  Eigen::Vector3d r0(b.x, b.y, b.z);

  Eigen::MatrixXd dirs(3, set.dim_kernel());
  for (int k = 0; k < set.dim_kernel(); ++k) {
    const ComplexMatrix& t = set.basis[k];
    dirs(0, k) = (qmath::gates::pauli_x() * t).trace().real();
    dirs(1, k) = (qmath::gates::pauli_y() * t).trace().real();
    dirs(2, k) = (qmath::gates::pauli_z() * t).trace().real();
  }
  if (dirs.cols() > 0) {
    // Orthogonal projection of the origin onto r0 + span(dirs).
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(dirs);
    const Eigen::MatrixXd qm =
        qr.householderQ() * Eigen::MatrixXd::Identity(3, dirs.cols());
    r0 -= qm * (qm.transpose() * r0);
  }
  return qmath::to_density({r0(0), r0(1), r0(2)}, tol);
}

DensityOperator max_entropy_fixed_point(const DeutschMap& m, double tol) {
  const FixedPointSet set = fixed_point_set(m, tol);
  if (set.dim_kernel() == 0) return set.particular;
  if (m.ctc_dim() == 2) return max_entropy_qubit_closed_form(set, tol);
  return max_entropy_by_ascent(set, set.particular, tol);
}

DensityOperator cr_output(const DeutschMap& m, const DensityOperator& sigma_star,
                          double tol) {
  const double residual = consistency_residual(m, sigma_star);
  if (residual > tol) {
    std::ostringstream os;
    os << "cr_output: CTC state violates the Deutsch condition (residual "
       << residual << ")";
    throw PreconditionError(os.str());
  }
  return DensityOperator::clamped(qmath::partial_trace(
      m.joint_output(sigma_star.matrix()), {m.cr_dim(), m.ctc_dim()}, {0}));
}

Evolution evolve(const DeutschMap& m, double tol) {
  DensityOperator sigma = max_entropy_fixed_point(m, tol);
  DensityOperator cr = cr_output(m, sigma, tol);
  return {std::move(sigma), std::move(cr)};
}

// ---------------------------------------------------------------------------
// epsilon-close relaxation
// ---------------------------------------------------------------------------

EpsilonModel::EpsilonModel(double epsilon, DensityOperator rho_i)
    : epsilon_(epsilon), rho_i_(std::move(rho_i)) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ContractViolation("EpsilonModel: epsilon must lie in [0, 1]");
  }
}

bool epsilon_close(const DensityOperator& rho_i, const DensityOperator& rho_f,
                   double epsilon, double tol) {
  if (rho_i.dim() != rho_f.dim()) {
    throw DimensionError("epsilon_close: dimension mismatch");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ContractViolation("epsilon_close: epsilon must lie in [0, 1]");
  }
  const ComplexMatrix& i = rho_i.matrix();
  const ComplexMatrix& f = rho_f.matrix();
  return qmath::is_psd(f - (1.0 - epsilon) * i, tol) &&
         qmath::is_psd((1.0 + epsilon) * i - f, tol);
}

bool approx_teleport_condition(const DensityOperator& rho_i,
                               const DensityOperator& rho, double tol) {
  if (rho_i.dim() != rho.dim()) {
    throw DimensionError("approx_teleport_condition: dimension mismatch");
  }
  return qmath::is_psd(2.0 * rho_i.matrix() - rho.matrix(), tol);
}

DensityOperator epsilon_final_state(const EpsilonModel& model,
                                    const DensityOperator& rho) {
  if (rho.dim() != model.rho_i().dim()) {
    throw DimensionError("epsilon_final_state: dimension mismatch");
  }
  const double eps = model.epsilon();
  return DensityOperator::clamped((1.0 - eps) * model.rho_i().matrix() +
                                  eps * rho.matrix());
}

double nonlinearity_witness(const ComplexMatrix& unitary,
                            const DensityOperator& rho1,
                            const DensityOperator& rho2, double p, double tol) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ContractViolation("nonlinearity_witness: p must lie in (0, 1)");
  }
  if (rho1.dim() != rho2.dim()) {
    throw DimensionError("nonlinearity_witness: input dimension mismatch");
  }
  const int d_cr = rho1.dim();
  if (unitary.rows() % d_cr != 0) {
    throw DimensionError("nonlinearity_witness: unitary does not factor over CR");
  }
  const int d_ctc = static_cast<int>(unitary.rows()) / d_cr;

  const DensityOperator mix = DensityOperator::clamped(
      p * rho1.matrix() + (1.0 - p) * rho2.matrix());
  const auto out_mix = evolve(DeutschMap(unitary, mix, d_ctc, tol), tol).cr;
  const auto out1 = evolve(DeutschMap(unitary, rho1, d_ctc, tol), tol).cr;
  const auto out2 = evolve(DeutschMap(unitary, rho2, d_ctc, tol), tol).cr;
  return qmath::trace_distance(out_mix.matrix(),
                               p * out1.matrix() + (1.0 - p) * out2.matrix());
}

}  // namespace ctc::deutsch
