// Copyright 2026 The seqpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "seqpt/designs.hpp"
#include "test_util.hpp"

using namespace seqpt;
using seqpt::testing::omega;
using seqpt::testing::pauli;

TEST_CASE("sylvester_basis in d=2 matches the Pauli operators") {
  const auto b = sylvester_basis(2);
  CHECK(max_abs_diff(b.at(0, 0), identity(2)) == 0.0);
  CHECK(max_abs_diff(b.at(0, 1), pauli('z')) <= 1e-15);
  CHECK(max_abs_diff(b.at(1, 0), pauli('x')) <= 1e-15);
  // The formula gives |1><0| - |0><1| = -iσy.
  CHECK(max_abs_diff(b.at(1, 1), Complex(0, -1) * pauli('y')) <= 1e-15);
}

TEST_CASE("sylvester_basis in d=3") {
  const auto b = sylvester_basis(3);
  const Complex w = omega(3);
  ComplexMatrix diag = ComplexMatrix::Zero(3, 3);
  diag(0, 0) = 1.0;
  diag(1, 1) = w;
  diag(2, 2) = w * w;
  CHECK(max_abs_diff(b.at(0, 1), diag) <= 1e-15);
}

TEST_CASE("sylvester_basis invariants up to d=6") {
  for (std::size_t d : {2u, 3u, 4u, 5u, 6u}) {
    CAPTURE(d);
    const auto b = sylvester_basis(d);
    REQUIRE(b.size() == d * d);
    CHECK(max_abs_diff(b[0], identity(d)) == 0.0);
    for (std::size_t m = 0; m < b.size(); ++m) {
      CHECK(max_abs_diff(b[m] * b[m].adjoint(), identity(d)) <= 1e-12);
      for (std::size_t n = 0; n < b.size(); ++n) {
        const Complex t = (b[m] * b[n].adjoint()).trace();
        CHECK(std::abs(t - (m == n ? static_cast<double>(d) : 0.0)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("Sylvester composition closes up to phase") {
  for (std::size_t d : {2u, 3u, 5u}) {
    const auto b = sylvester_basis(d);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t l = 0; l < d; ++l)
        for (std::size_t k2 = 0; k2 < d; ++k2)
          for (std::size_t l2 = 0; l2 < d; ++l2) {
            const ComplexMatrix prod = b.at(k, l) * b.at(k2, l2);
            const ComplexMatrix& target = b.at((k + k2) % d, (l + l2) % d);
            const Complex phase = (target.adjoint() * prod).trace() / static_cast<double>(d);
            CHECK(std::abs(std::abs(phase) - 1.0) <= 1e-12);
            CHECK(max_abs_diff(prod, phase * target) <= 1e-12);
          }
  }
}

TEST_CASE("product_basis indexing") {
  const auto b1 = sylvester_basis(2), b2 = sylvester_basis(3);
  const auto p = product_basis(b1, b2);
  REQUIRE(p.size() == 36);
  REQUIRE(p.factor_dims().has_value());
  CHECK(p.factor_dims()->d1 == 2);
  CHECK(p.label() == "sylvester(2)xsylvester(3)");
  for (std::size_t n1 = 0; n1 < 4; ++n1)
    for (std::size_t n2 = 0; n2 < 9; ++n2)
      CHECK(max_abs_diff(p[n1 * 9 + n2], tensor_product(b1[n1], b2[n2])) == 0.0);

  // U^† U = d I and expand() inverts the column map.
  const ComplexMatrix& u = p.column_matrix();
  CHECK(max_abs_diff(u.adjoint() * u, 6.0 * identity(36)) <= 1e-12);
  auto rng = derive_stream(5, {1});
  const ComplexMatrix a = random_ginibre(6, 6, rng);
  const ComplexVector c = p.expand(a);
  ComplexMatrix rebuilt = ComplexMatrix::Zero(6, 6);
  for (std::size_t n = 0; n < 36; ++n) rebuilt += c(static_cast<Eigen::Index>(n)) * p[n];
  CHECK(max_abs_diff(rebuilt, a) <= 1e-12);
}

TEST_CASE("mub_prime rejects non-primes") {
  CHECK_THROWS_AS(mub_prime(4), Error);
  CHECK_THROWS_AS(mub_prime(6), Error);
  CHECK_THROWS_AS(mub_prime(1), Error);
  CHECK(is_prime(2));
  CHECK(is_prime(7));
  CHECK_FALSE(is_prime(9));
}

TEST_CASE("mub_prime d=2") {
  const auto m = mub_prime(2);
  REQUIRE(m.basis_count() == 3);
  const PureState plus = m.state(1, 0);
  CHECK(std::norm(basis_state(2, 0).inner(plus)) == doctest::Approx(0.5).epsilon(1e-12));
  // Basis 1 diagonalizes σx, basis 2 diagonalizes σy.
  for (std::size_t j = 1; j <= 2; ++j) {
    const ComplexMatrix op = pauli(j == 1 ? 'x' : 'y');
    for (const auto& s : m.basis(j)) {
      const Complex ev = s.amplitudes().dot(op * s.amplitudes());
      CHECK((op * s.amplitudes() - ev * s.amplitudes()).norm() <= 1e-12);
    }
  }
}

TEST_CASE("mub_prime d=3 contains the uniform superposition basis") {
  const auto m = mub_prime(3);
  const double s = 1.0 / std::sqrt(3.0);
  ComplexVector uniform(3);
  uniform << s, s, s;
  const PureState u = PureState::from_normalized(uniform);
  bool found = false;
  for (std::size_t j = 1; j < m.basis_count(); ++j)
    for (const auto& st : m.basis(j))
      if (std::abs(std::abs(st.inner(u)) - 1.0) <= 1e-12) found = true;
  CHECK(found);
  // Basis j = 1, m = 0 is that state with the adopted phase convention.
  CHECK(max_abs_diff(m.state(1, 0).amplitudes(), uniform) <= 1e-12);
}

TEST_CASE("MUB invariants for d in {2, 3, 5, 7}") {
  for (std::size_t d : {2u, 3u, 5u, 7u}) {
    CAPTURE(d);
    const auto m = mub_prime(d);
    REQUIRE(m.basis_count() == d + 1);
    REQUIRE(m.size() == (d + 1) * d);
    for (std::size_t j = 0; j <= d; ++j) {
      ComplexMatrix avg = ComplexMatrix::Zero(static_cast<Eigen::Index>(d),
                                              static_cast<Eigen::Index>(d));
      for (std::size_t a = 0; a < d; ++a) {
        const auto& sa = m.state(j, a);
        avg += sa.projector();
        // Phase convention: first nonzero component real and positive.
        for (std::size_t k = 0; k < d; ++k) {
          if (std::abs(sa[k]) > 1e-12) {
            CHECK(std::abs(sa[k].imag()) <= 1e-12);
            CHECK(sa[k].real() > 0.0);
            break;
          }
        }
        for (std::size_t jb = 0; jb <= d; ++jb)
          for (std::size_t b = 0; b < d; ++b) {
            const double ov = std::norm(sa.inner(m.state(jb, b)));
            if (jb == j) {
              CHECK(std::abs(ov - (a == b ? 1.0 : 0.0)) <= 1e-12);
            } else {
              CHECK(std::abs(ov - 1.0 / static_cast<double>(d)) <= 1e-10);
            }
          }
      }
      CHECK(max_abs_diff(avg / static_cast<double>(d), identity(d) / static_cast<double>(d)) <=
            1e-12);
    }
  }
}

TEST_CASE("MUB sets are state 2-designs") {
  auto rng = derive_stream(5, {2});
  for (std::size_t d : {2u, 3u, 5u}) {
    const auto m = mub_prime(d);
    CHECK(two_design_residual(m, identity(d), identity(d)) <= 1e-12);
    for (int t = 0; t < 100; ++t) {
      const ComplexMatrix a = random_hermitian(d, rng), b = random_hermitian(d, rng);
      CHECK(two_design_residual(m, a, b) <= 1e-10);
    }
    const ComplexMatrix a = random_ginibre(d, d, rng), b = random_ginibre(d, d, rng);
    CHECK(two_design_residual(m, a, b) <= 1e-10);
  }
}

TEST_CASE("product design") {
  const auto pd = product_design(mub_prime(2), mub_prime(3));
  REQUIRE(pd.size() == 72);
  CHECK(max_abs_diff(pd.state(0).amplitudes(), basis_state(6, 0).amplitudes()) == 0.0);
  for (std::size_t e = 0; e < pd.size(); ++e) {
    CHECK(std::abs(pd.state(e).amplitudes().norm() - 1.0) <= 1e-12);
    const auto idx = pd.index(e);
    CHECK(pd.flat(idx) == e);
    const auto expect = tensor_product(pd.first().state(idx.j1, idx.m1),
                                       pd.second().state(idx.j2, idx.m2));
    CHECK(max_abs_diff(pd.state(e).amplitudes(), expect.amplitudes()) == 0.0);
  }
  CHECK(pd.flat({1, 1, 2, 0}) == (1 * 2 + 1) * 12 + (2 * 3 + 0));

  // Not a uniform 2-design in d = 6.
  auto rng = derive_stream(5, {3});
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix a = random_hermitian(6, rng), b = random_hermitian(6, rng);
    worst = std::max(worst, two_design_residual(pd, a, b));
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("covariance_action") {
  const auto b2 = sylvester_basis(2);
  const auto m2 = mub_prime(2);
  const auto x_on_zero = covariance_action(b2, m2, 1, 0, {0, 0});
  CHECK(x_on_zero.image == DesignIndex{0, 1});
  CHECK(std::abs(x_on_zero.phase) <= 1e-12);

  // E_11 |0> = |1> with the sign produced by the formula.
  const auto y_on_zero = covariance_action(b2, m2, 1, 1, {0, 0});
  CHECK(y_on_zero.image == DesignIndex{0, 1});
  const ComplexVector direct = b2.at(1, 1) * basis_state(2, 0).amplitudes();
  CHECK(std::abs(direct(1) - std::polar(1.0, y_on_zero.phase)) <= 1e-12);

  const auto b3 = sylvester_basis(3);
  const auto m3 = mub_prime(3);
  const auto act = covariance_action(b3, m3, 0, 1, {1, 0});
  CHECK(act.image.basis == 1);
  const ComplexVector moved = b3.at(0, 1) * m3.state(1, 0).amplitudes();
  CHECK(std::abs(std::abs(m3.state(act.image.basis, act.image.element).amplitudes().dot(moved)) -
                 1.0) <= 1e-12);

  // A non-Sylvester unitary generally leaves the design.
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 0) = h(0, 1) = h(1, 0) = 1.0 / std::sqrt(2.0);
  h(1, 1) = -1.0 / std::sqrt(2.0);
  ComplexMatrix t = identity(2);
  t(1, 1) = std::polar(1.0, M_PI / 4);
  CHECK_THROWS_AS(covariance_image(t, m2, {1, 0}), Error);
}

TEST_CASE("covariance closure for d in {2, 3}") {
  for (std::size_t d : {2u, 3u}) {
    const auto b = sylvester_basis(d);
    const auto m = mub_prime(d);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t l = 0; l < d; ++l)
        for (std::size_t j = 0; j <= d; ++j)
          for (std::size_t s = 0; s < d; ++s) {
            const auto act = covariance_action(b, m, k, l, {j, s});
            CHECK(act.image.basis == j);
            const ComplexVector lhs = b.at(k, l) * m.state(j, s).amplitudes();
            const ComplexVector rhs = std::polar(1.0, act.phase) *
                                      m.state(j, act.image.element).amplitudes();
            CHECK((lhs - rhs).norm() <= 1e-10);
          }
  }
}
