// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/SVD>

#include "ctcsim/deutsch.hpp"
#include "fixtures.hpp"
#include "qubit_oracle.hpp"
#include "test_support.hpp"

using namespace ctc;
using namespace ctc::qmath;
using namespace ctc::deutsch;
using ctc::testing::kPi;
using ctc::testing::max_abs;
using ctc::testing::bloch_to_matrix;
using ctc::testing::channel_oracle;
using ctc::testing::degenerate_qubit_unitary;
using ctc::testing::least_norm_bloch_oracle;
using ctc::testing::random_feasible;

namespace {

const ComplexMatrix kPlus = ctc::testing::ket_projector(
    {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
const ComplexMatrix kMinus = ctc::testing::ket_projector(
    {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)});
const ComplexMatrix kZero = ctc::testing::ket_projector({1.0, 0.0});

DensityOperator dm(const ComplexMatrix& m) { return DensityOperator::from_matrix(m); }

// Fixed point of a map with a one-dimensional fixed space, from the null
// vector of (L - I) where L is assembled here from images of matrix units.
ComplexMatrix unique_fixed_point_oracle(const DeutschMap& m) {
  const int d = m.ctc_dim();
  ComplexMatrix l(d * d, d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(i, j) = 1.0;
      const ComplexMatrix img = channel_oracle(m.unitary(), m.cr_input().matrix(), e);
      for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) l(r + d * c, i + d * j) = img(r, c);
    }
  Eigen::JacobiSVD<ComplexMatrix> svd(l - ComplexMatrix::Identity(d * d, d * d),
                                      Eigen::ComputeFullV);
  const ComplexVector v = svd.matrixV().col(d * d - 1);
  ComplexMatrix sigma(d, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) sigma(r, c) = v(r + d * c);
  return sigma / sigma.trace();
}

}  // namespace

TEST_CASE("apply_deutsch_map examples") {
  const DeutschMap swap_map(gates::swap(2), dm(kPlus), 2);
  CHECK(max_abs(apply_deutsch_map(swap_map, dm(kZero)).matrix(), kPlus) < 1e-15);

  SeededRng rng(31);
  const DensityOperator rho = random_density(3, rng);
  const DensityOperator sigma = random_density(2, rng);
  const DeutschMap id(gates::identity(6), rho, 2);
  CHECK(max_abs(apply_deutsch_map(id, sigma).matrix(), sigma.matrix()) < 1e-15);

  const DeutschMap cnot_map(gates::cnot(), dm(kPlus), 2);
  CHECK(max_abs(apply_deutsch_map(cnot_map, dm(kZero)).matrix(),
                ComplexMatrix::Identity(2, 2) / 2.0) < 1e-15);
  CHECK_THROWS_AS(apply_deutsch_map(cnot_map, DensityOperator::maximally_mixed(3)),
                  DimensionError);
}

TEST_CASE("DeutschMap construction errors") {
  CHECK_THROWS_AS(DeutschMap(gates::swap(2), DensityOperator::maximally_mixed(3), 2),
                  DimensionError);
  ComplexMatrix bad = gates::swap(2);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(DeutschMap(bad, DensityOperator::maximally_mixed(2), 2),
                  ContractViolation);
}

TEST_CASE("apply_deutsch_map preserves trace and positivity") {
  SeededRng rng(32);
  int checked = 0;
  for (int d_ctc : {2, 3, 4}) {
    for (int i = 0; i < 40; ++i) {
      const int d_cr = 2 + i % 2;
      const ComplexMatrix u = haar_unitary(d_cr * d_ctc, rng);
      const DeutschMap m(u, random_density(d_cr, rng), d_ctc);
      const DensityOperator sigma = random_density(d_ctc, rng);
      const ComplexMatrix img = m.apply_linear(sigma.matrix());
      CHECK(std::abs(img.trace() - Complex(1.0)) < 1e-12);
      CHECK(is_psd(img, 1e-12));
      CHECK(max_abs(img, channel_oracle(u, m.cr_input().matrix(), sigma.matrix())) <
            1e-13);
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("liouville_matrix") {
  SeededRng rng(33);
  const DeutschMap id(gates::identity(4), random_density(2, rng), 2);
  CHECK(max_abs(liouville_matrix(id), ComplexMatrix::Identity(4, 4)) < 1e-15);

  const DensityOperator rho = random_density(3, rng);
  const DeutschMap sw(gates::swap(3), rho, 3);
  const ComplexMatrix l = liouville_matrix(sw);
  Eigen::JacobiSVD<ComplexMatrix> svd(l);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-10) ++rank;
  // vec(sigma) -> tr(sigma) vec(rho) has rank one, not d.
  CHECK(rank == 1);
  for (int t = 0; t < 5; ++t) {
    ComplexMatrix s(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s(i, j) = rng.complex_normal();
    const ComplexVector out = l * s.reshaped();
    CHECK(max_abs(out, s.trace() * rho.matrix().reshaped()) < 1e-12);
  }
}

TEST_CASE("fixed_point_set examples") {
  SeededRng rng(34);
  const PureState psi = haar_pure_state(2, rng);
  const FixedPointSet unique =
      fixed_point_set(DeutschMap(gates::swap(2), DensityOperator::from_pure(psi), 2));
  CHECK(unique.dim_kernel() == 0);
  CHECK(max_abs(unique.particular.matrix(), psi.projector()) < 1e-9);

  for (int d : {2, 3}) {
    const FixedPointSet all =
        fixed_point_set(DeutschMap(gates::identity(2 * d), random_density(2, rng), d));
    CHECK(all.dim_kernel() == d * d - 1);
    CHECK(max_abs(all.particular.matrix(), ComplexMatrix::Identity(d, d) / d) < 1e-9);
  }

  const FixedPointSet cn = fixed_point_set(DeutschMap(gates::cnot(), dm(kPlus), 2));
  REQUIRE(cn.dim_kernel() == 1);
  // The family is a|+><+| + (1-a)|-><-|: every member commutes with X and the
  // direction is proportional to |+><+| - |-><-| = X.
  const ComplexMatrix& b = cn.basis[0];
  CHECK(std::abs(b.trace()) < 1e-12);
  CHECK(std::abs(std::abs((b.adjoint() * gates::pauli_x()).trace()) - std::sqrt(2.0)) <
        1e-9);
  CHECK(max_abs(cn.particular.matrix() * gates::pauli_x(),
                gates::pauli_x() * cn.particular.matrix()) < 1e-9);
  for (double a : {0.0, 0.3, 1.0}) {
    const DensityOperator s = dm(a * kPlus + (1 - a) * kMinus);
    CHECK(consistency_residual(DeutschMap(gates::cnot(), dm(kPlus), 2), s) < 1e-12);
  }
  CHECK(consistency_residual(DeutschMap(gates::cnot(), dm(kPlus), 2), dm(kZero)) >
        0.4);
}

TEST_CASE("fixed sets stay consistent along their directions") {
  SeededRng rng(35);
  std::vector<DeutschMap> maps;
  for (int i = 0; i < 6; ++i) {
    maps.emplace_back(degenerate_qubit_unitary(2, rng), random_density(2, rng), 2);
  }
  maps.emplace_back(gates::identity(6), random_density(2, rng), 3);
  maps.emplace_back(haar_unitary(6, rng), random_density(2, rng), 3);
  maps.emplace_back(haar_unitary(8, rng), random_density(2, rng), 4);
  for (const auto& m : maps) {
    const FixedPointSet set = fixed_point_set(m);
    CHECK(consistency_residual(m, set.particular) <= 1e-8);
    for (int k = 0; k < 10; ++k) {
      const DensityOperator s = random_feasible(set, rng, 0.0);
      CHECK(consistency_residual(m, s) <= 1e-8);
    }
    for (std::size_t i = 0; i < set.basis.size(); ++i) {
      CHECK(is_hermitian(set.basis[i]));
      CHECK(std::abs(set.basis[i].trace()) < 1e-10);
      for (std::size_t j = 0; j < set.basis.size(); ++j) {
        const double g = (set.basis[i].adjoint() * set.basis[j]).trace().real();
        CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-9);
      }
    }
  }
}

TEST_CASE("unique fixed points agree with Cesaro and with a Liouville null vector") {
  SeededRng rng(36);
  for (int i = 0; i < 10; ++i) {
    const int d = 2 + i % 3;
    const DeutschMap m(haar_unitary(2 * d, rng), random_density(2, rng), d);
    const ComplexMatrix oracle = unique_fixed_point_oracle(m);
    const DensityOperator star = max_entropy_fixed_point(m);
    CHECK(trace_distance(star.matrix(), oracle) < 1e-8);
    // The plain Cesaro mean converges like 1/N.
    const double e1 = trace_distance(cesaro_average(m, 1000, 0.0), oracle);
    const double e2 = trace_distance(cesaro_average(m, 10000, 0.0), oracle);
    CHECK(e2 < 1e-3);
    CHECK(e2 < e1 / 5.0);
  }
}

TEST_CASE("max_entropy_fixed_point examples") {
  SeededRng rng(37);
  const DensityOperator id =
      max_entropy_fixed_point(DeutschMap(gates::identity(4), random_density(2, rng), 2));
  CHECK(max_abs(id.matrix(), ComplexMatrix::Identity(2, 2) / 2.0) < 1e-9);
  CHECK(std::abs(von_neumann_entropy(id) - 1.0) < 1e-6);

  const PureState psi = haar_pure_state(2, rng);
  const DensityOperator sw = max_entropy_fixed_point(
      DeutschMap(gates::swap(2), DensityOperator::from_pure(psi), 2));
  CHECK(max_abs(sw.matrix(), psi.projector()) < 1e-9);
  CHECK(von_neumann_entropy(sw) < 1e-6);

  const DensityOperator cn =
      max_entropy_fixed_point(DeutschMap(gates::cnot(), dm(kPlus), 2));
  CHECK(max_abs(cn.matrix(), ComplexMatrix::Identity(2, 2) / 2.0) < 1e-9);
}

TEST_CASE("qubit selection agrees with the least-norm Bloch oracle") {
  SeededRng rng(38);
  for (int i = 0; i < 30; ++i) {
    const int d_cr = 2 + i % 2;
    const bool degenerate = i % 3 != 0;
    const ComplexMatrix u =
        degenerate ? degenerate_qubit_unitary(d_cr, rng) : haar_unitary(2 * d_cr, rng);
    const DeutschMap m(u, random_density(d_cr, rng), 2);
    const ComplexMatrix oracle =
        bloch_to_matrix(least_norm_bloch_oracle(u, m.cr_input().matrix()));
    const DensityOperator star = max_entropy_fixed_point(m);
    CHECK(ctc::testing::qubit_trace_distance(star.matrix(), oracle) <= 1e-6);

    const FixedPointSet set = fixed_point_set(m);
    if (set.dim_kernel() > 0) {
      const DensityOperator start = random_feasible(set, rng, 1e-3);
      const DensityOperator ascent = max_entropy_by_ascent(set, start);
      CHECK(ctc::testing::qubit_trace_distance(ascent.matrix(), oracle) <= 1e-6);
    }
  }
}

TEST_CASE("qutrit CTC: entropy maximized over a one-parameter family") {
  // CR qubit swapped with the {|1>, |2>} block of a qutrit CTC; CR (x) |0>
  // is left alone. For mixed rho the fixed set is a|0><0| + (1-a)(0 (+) rho)
  // with entropy h(a) + (1-a) S(rho), maximal at a = 1/(1 + 2^S) where it
  // equals log2(1 + 2^S).
  ComplexMatrix u = ComplexMatrix::Zero(6, 6);
  auto idx = [](int cr, int ctc) { return cr * 3 + ctc; };
  for (int a = 0; a < 2; ++a) {
    u(idx(a, 0), idx(a, 0)) = 1.0;
    for (int b = 0; b < 2; ++b) u(idx(b, 1 + a), idx(a, 1 + b)) = 1.0;
  }
  SeededRng rng(39);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityOperator rho = random_density(2, rng);
    const DeutschMap m(u, rho, 3);
    const double s = von_neumann_entropy(rho);

    // Brute-force the one-dimensional family.
    double best = -1.0, best_a = 0.0;
    for (int k = 0; k <= 200000; ++k) {
      const double a = k / 200000.0;
      double h = 0.0;
      for (double p : {a, 1.0 - a})
        if (p > 0.0) h -= p * std::log2(p);
      const double value = h + (1.0 - a) * s;
      if (value > best) {
        best = value;
        best_a = a;
      }
    }
    CHECK(std::abs(best - std::log2(1.0 + std::exp2(s))) < 1e-9);
    CHECK(std::abs(best_a - 1.0 / (1.0 + std::exp2(s))) < 1e-5);

    const DensityOperator star = max_entropy_fixed_point(m);
    CHECK(std::abs(von_neumann_entropy(star) - best) < 1e-7);
    CHECK(std::abs(star.matrix()(0, 0).real() - 1.0 / (1.0 + std::exp2(s))) < 1e-6);
    CHECK(consistency_residual(m, star) < 1e-8);
  }
}

TEST_CASE("max entropy dominates other fixed points") {
  SeededRng rng(40);
  std::vector<DeutschMap> maps;
  maps.emplace_back(degenerate_qubit_unitary(2, rng), random_density(2, rng), 2);
  maps.emplace_back(gates::identity(6), random_density(2, rng), 3);
  ComplexMatrix u = ComplexMatrix::Zero(6, 6);
  for (int a = 0; a < 2; ++a) {
    u(a * 3, a * 3) = 1.0;
    for (int b = 0; b < 2; ++b) u(b * 3 + 1 + a, a * 3 + 1 + b) = 1.0;
  }
  maps.emplace_back(u, random_density(2, rng), 3);
  // CTC qutrit rotated by a unitary with a doubly degenerate spectrum.
  const ComplexMatrix w = haar_unitary(3, rng);
  ComplexMatrix ph = ComplexMatrix::Identity(3, 3);
  ph(2, 2) = std::polar(1.0, 1.3);
  maps.emplace_back(ctc::testing::kron_loops(gates::identity(2), w * ph * w.adjoint()),
                    random_density(2, rng), 3);
  for (const auto& m : maps) {
    const FixedPointSet set = fixed_point_set(m);
    const double top = von_neumann_entropy(max_entropy_fixed_point(m));
    for (int k = 0; k < 50; ++k) {
      CHECK(von_neumann_entropy(random_feasible(set, rng, 0.0)) <= top + 1e-7);
    }
  }
}

TEST_CASE("cr_output and evolve") {
  SeededRng rng(41);
  const PureState psi = haar_pure_state(2, rng);
  const DeutschMap sw(gates::swap(2), DensityOperator::from_pure(psi), 2);
  CHECK(max_abs(cr_output(sw, DensityOperator::from_pure(psi)).matrix(),
                psi.projector()) < 1e-12);
  CHECK_THROWS_AS(cr_output(sw, DensityOperator::maximally_mixed(2)),
                  PreconditionError);

  const DensityOperator rho = random_density(3, rng);
  const DeutschMap id(gates::identity(6), rho, 2);
  CHECK(max_abs(cr_output(id, DensityOperator::maximally_mixed(2)).matrix(),
                rho.matrix()) < 1e-12);

  // CNOT against I/2 = (|+><+| + |-><-|)/2: the |-> half kicks a Z back
  // onto the control, so |+> leaves fully dephased.
  const DeutschMap cn(gates::cnot(), dm(kPlus), 2);
  const ComplexMatrix cn_joint = gates::cnot() *
                                 ctc::testing::kron_loops(kPlus, ComplexMatrix::Identity(2, 2) / 2.0) *
                                 gates::cnot().adjoint();
  const ComplexMatrix cn_cr = ctc::testing::trace_second(cn_joint, 2, 2);
  CHECK(max_abs(cn_cr, ComplexMatrix::Identity(2, 2) / 2.0) < 1e-15);
  CHECK(max_abs(cr_output(cn, DensityOperator::maximally_mixed(2)).matrix(), cn_cr) <
        1e-12);

  const Evolution e0 = evolve(DeutschMap(gates::swap(2), dm(kZero), 2));
  CHECK(max_abs(e0.ctc.matrix(), kZero) < 1e-9);
  CHECK(max_abs(e0.cr.matrix(), kZero) < 1e-9);
  const Evolution ei = evolve(id);
  CHECK(max_abs(ei.ctc.matrix(), ComplexMatrix::Identity(2, 2) / 2.0) < 1e-9);
  CHECK(max_abs(ei.cr.matrix(), rho.matrix()) < 1e-9);
  const Evolution ec = evolve(cn);
  CHECK(max_abs(ec.ctc.matrix(), ComplexMatrix::Identity(2, 2) / 2.0) < 1e-9);
  CHECK(max_abs(ec.cr.matrix(), cn_cr) < 1e-9);
}

TEST_CASE("epsilon_close") {
  SeededRng rng(42);
  const DensityOperator rho = random_density(2, rng);
  CHECK(epsilon_close(rho, rho, 0.0));
  const DensityOperator half = DensityOperator::maximally_mixed(2);
  for (int i = 0; i < 20; ++i) {
    const PureState psi = haar_pure_state(2, rng);
    const double eps = rng.uniform();
    const DensityOperator f =
        dm((1 - eps) * half.matrix() + eps * psi.projector());
    CHECK(epsilon_close(half, f, eps));
  }
  CHECK_FALSE(epsilon_close(dm(kZero), dm(ComplexMatrix::Identity(2, 2) - kZero), 0.5));
  // At eps = 0 closeness is equality.
  CHECK_FALSE(epsilon_close(rho, random_density(2, rng), 0.0));
  CHECK_THROWS_AS(epsilon_close(rho, DensityOperator::maximally_mixed(3), 0.1),
                  DimensionError);
}

TEST_CASE("approx_teleport_condition") {
  SeededRng rng(43);
  const DensityOperator half = DensityOperator::maximally_mixed(2);
  for (int i = 0; i < 10; ++i) {
    CHECK(approx_teleport_condition(half,
                                    DensityOperator::from_pure(haar_pure_state(2, rng))));
    const DensityOperator r = random_density(3, rng);
    CHECK(approx_teleport_condition(r, r));
  }
  CHECK_FALSE(approx_teleport_condition(dm(kZero),
                                        dm(ComplexMatrix::Identity(2, 2) - kZero)));
}

TEST_CASE("epsilon_final_state") {
  SeededRng rng(44);
  const DensityOperator ri = random_density(2, rng);
  const DensityOperator r = random_density(2, rng);
  CHECK(max_abs(epsilon_final_state(EpsilonModel(0.0, ri), r).matrix(), ri.matrix()) <
        1e-15);
  CHECK(max_abs(epsilon_final_state(EpsilonModel(1.0, ri), r).matrix(), r.matrix()) <
        1e-15);
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(0, 0) = 0.75;
  expected(1, 1) = 0.25;
  CHECK(max_abs(epsilon_final_state(EpsilonModel(0.5, DensityOperator::maximally_mixed(2)),
                                    dm(kZero))
                    .matrix(),
                expected) < 1e-15);
  CHECK_THROWS_AS(EpsilonModel(1.5, ri), ContractViolation);

  // Fidelity to the target is nondecreasing in epsilon.
  for (int i = 0; i < 10; ++i) {
    const PureState psi = haar_pure_state(2, rng);
    const DensityOperator start = random_density(2, rng);
    double prev = -1.0;
    for (int k = 0; k <= 20; ++k) {
      const double f = fidelity_to_pure(
          psi, epsilon_final_state(EpsilonModel(k / 20.0, start),
                                   DensityOperator::from_pure(psi)));
      CHECK(f >= prev - 1e-12);
      prev = f;
    }
  }
}

TEST_CASE("nonlinearity witness") {
  SeededRng rng(45);
  const DensityOperator r1 = random_density(2, rng);
  const DensityOperator r2 = random_density(2, rng);
  CHECK(nonlinearity_witness(gates::identity(4), r1, r2, 0.3) <= 1e-10);
  CHECK(nonlinearity_witness(gates::swap(2), dm(kZero),
                             dm(ComplexMatrix::Identity(2, 2) - kZero), 0.5) <= 1e-10);

  // Frozen regression unitary, cross-checked against an independent
  // evaluation through the Bloch oracle.
  const ComplexMatrix u = ctc::testing::nonlinear_unitary();
  const DensityOperator plus = dm(kPlus);
  const double w = nonlinearity_witness(u, dm(kZero), plus, 0.5);
  CHECK(w > 0.01);
  CHECK(std::abs(w - ctc::testing::kNonlinearWitnessAtFreeze) < 1e-6);

  auto cr_out = [&](const ComplexMatrix& rho) {
    const ComplexMatrix sigma = bloch_to_matrix(least_norm_bloch_oracle(u, rho));
    return ctc::testing::trace_second(
        u * ctc::testing::kron_loops(rho, sigma) * u.adjoint(), 2, 2);
  };
  const ComplexMatrix mix = 0.5 * kZero + 0.5 * kPlus;
  const double oracle =
      ctc::testing::qubit_trace_distance(cr_out(mix), 0.5 * cr_out(kZero) +
                                                          0.5 * cr_out(kPlus));
  CHECK(std::abs(w - oracle) < 1e-8);
  CHECK_THROWS_AS(nonlinearity_witness(u, r1, r2, 1.0), ContractViolation);
}

TEST_CASE("hermitian basis is orthonormal") {
  for (int d : {2, 3, 4}) {
    const auto basis = hermitian_basis(d);
    REQUIRE(static_cast<int>(basis.size()) == d * d);
    for (int i = 0; i < d * d; ++i) {
      CHECK(is_hermitian(basis[i]));
      for (int j = 0; j < d * d; ++j) {
        const Complex g = (basis[i].adjoint() * basis[j]).trace();
        CHECK(std::abs(g - Complex(i == j ? 1.0 : 0.0)) < 1e-14);
      }
    }
    SeededRng rng(46);
    const DensityOperator rho = random_density(d, rng);
    const RealVector c = hermitian_coords(basis, rho.matrix());
    ComplexMatrix back = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d * d; ++i) back += c(i) * basis[i];
    CHECK(max_abs(back, rho.matrix()) < 1e-14);
  }
}
