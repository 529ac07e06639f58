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

#include <algorithm>
#include <cmath>
#include <set>

#include "seqpt/estimator.hpp"
#include "test_util.hpp"

using namespace seqpt;
using seqpt::testing::pauli;

namespace {

const SeqptContext& ctx6() {
  static const SeqptContext ctx(2, 3);
  return ctx;
}

ComplexMatrix outer(const PureState& a, const PureState& b) {
  return a.amplitudes() * b.amplitudes().adjoint();
}

SamplePlan full_plan(CoefficientIndex c) {
  return make_sample_plan(c, ctx6().design().size(), ctx6().design().size(), 0);
}

}  // namespace

TEST_CASE("decompose_outer") {
  auto rng = derive_stream(31, {1});
  SUBCASE("parallel vectors give one term") {
    const PureState a = random_pure_state(6, rng);
    const auto d = decompose_outer(a, a);
    REQUIRE(d.terms.size() == 1);
    CHECK(std::abs(d.terms[0].weight - 1.0) <= 1e-14);
    const PureState b = PureState::from_normalized(std::polar(1.0, 0.7) * a.amplitudes());
    const auto db = decompose_outer(a, b);
    REQUIRE(db.terms.size() == 1);
    CHECK(std::abs(db.terms[0].weight - std::polar(1.0, -0.7)) <= 1e-12);
    CHECK(max_abs_diff(db.reassemble(), outer(a, b)) <= 1e-12);
  }
  SUBCASE("orthogonal pair") {
    const PureState a = basis_state(6, 0), b = basis_state(6, 3);
    const auto d = decompose_outer(a, b);
    REQUIRE(d.terms.size() == 4);
    const Complex expect[] = {{1, 0}, {0, 1}, {-0.5, -0.5}, {-0.5, -0.5}};
    const TermRole roles[] = {TermRole::plus, TermRole::minus, TermRole::alpha, TermRole::beta};
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(d.terms[k].weight - expect[k]) <= 1e-14);
      CHECK(d.terms[k].role == roles[k]);
    }
    CHECK(max_abs_diff(d.reassemble(), outer(a, b)) <= 1e-12);
  }
  SUBCASE("random pairs") {
    for (std::size_t dim : {2u, 3u, 6u}) {
      for (int t = 0; t < 200; ++t) {
        const PureState a = random_pure_state(dim, rng), b = random_pure_state(dim, rng);
        const auto d = decompose_outer(a, b);
        CHECK(d.terms.size() <= 5);
        CHECK(max_abs_diff(d.reassemble(), outer(a, b)) <= 1e-12);
      }
    }
  }
  SUBCASE("printed combination does not reassemble") {
    DecompositionRule printed;
    printed.minus_weight = {1.0, 0.0};
    const PureState a = basis_state(2, 0), b = basis_state(2, 1);
    CHECK(max_abs_diff(decompose_outer(a, b, printed).reassemble(), outer(a, b)) > 0.1);
  }
}

TEST_CASE("sample plans") {
  const auto p1 = make_sample_plan({3, 17}, 72, 10, 99, 4);
  const auto p2 = make_sample_plan({3, 17}, 72, 10, 99, 4);
  CHECK(p1.elements == p2.elements);
  CHECK(p1.elements.size() == 10);
  CHECK(std::set<std::size_t>(p1.elements.begin(), p1.elements.end()).size() == 10);
  CHECK(std::all_of(p1.elements.begin(), p1.elements.end(), [](auto e) { return e < 72; }));
  CHECK(make_sample_plan({3, 17}, 72, 10, 99, 5).elements != p1.elements);
  CHECK(make_sample_plan({3, 18}, 72, 10, 99, 4).elements != p1.elements);

  const auto full = make_sample_plan({0, 0}, 72, 72, 1);
  for (std::size_t k = 0; k < 72; ++k) CHECK(full.elements[k] == k);

  CHECK_THROWS_AS(make_sample_plan({0, 0}, 72, 0, 1), Error);
  CHECK_THROWS_AS(make_sample_plan({0, 0}, 72, 73, 1), Error);
}

TEST_CASE("chi_from_fidelities examples") {
  FidelityTriple unit{1.0, 1.0, 1.0};
  CHECK(std::abs(chi_from_fidelities(unit, {0, 0}, {2, 3}).value - 1.0) <= 1e-14);
  FidelityTriple zero{0.0, 0.0, 0.0};
  CHECK(std::abs(chi_from_fidelities(zero, {0, 5}, {2, 3}).value) == 0.0);
  FidelityTriple t{{0.5, 0.1}, {0.2, 0.0}, {0.3, 0.0}, 0.01, 0.02, 0.03, 10};
  const auto e = chi_from_fidelities(t, {2, 7}, {2, 3});
  CHECK(std::abs(e.value - (t.f_tensor * 12.0 - t.f1 * 3.0 - t.f2 * 4.0) / 6.0) <= 1e-15);
  CHECK(e.std_error == doctest::Approx(std::hypot(0.01 * 12, 0.02 * 3, 0.03 * 4) / 6.0));
  CHECK(e.std_error >= 0.0);
}

TEST_CASE("fidelity_triple examples") {
  const auto id = identity_channel(6);
  const ExactSource sid(id.superoperator(), ctx6().design());
  const auto t = fidelity_triple(sid, ctx6(), full_plan({0, 0}));
  CHECK(std::abs(t.f_tensor - 1.0) <= 1e-12);
  CHECK(std::abs(t.f1 - 1.0) <= 1e-12);
  CHECK(std::abs(t.f2 - 1.0) <= 1e-12);
  CHECK(t.samples == 72);

  const auto et = target_process();
  const auto chi = chi_from_kraus(et, ctx6().basis_ptr());
  const ExactSource set(et.superoperator(), ctx6().design());
  const auto t0 = fidelity_triple(set, ctx6(), full_plan({0, 0}));
  for (auto f : {t0.f_tensor, t0.f1, t0.f2}) {
    CHECK(f.real() >= -1e-12);
    CHECK(f.real() <= 1.0 + 1e-12);
    CHECK(std::abs(f.imag()) <= 1e-12);
  }
  CHECK(std::abs(chi_from_fidelities(t0, {0, 0}, {2, 3}).value - chi.entries()(0, 0)) <= 1e-10);
}

TEST_CASE("target process block coefficients") {
  const auto et = target_process();
  const auto chi = chi_from_kraus(et, ctx6().basis_ptr());
  const ExactSource src(et.superoperator(), ctx6().design());
  const std::vector<std::size_t> block{0, 1, 2, 9, 10, 11};
  for (auto i : block)
    for (auto j : block) {
      const CoefficientIndex c{i, j};
      const auto e = chi_from_fidelities(fidelity_triple(src, ctx6(), full_plan(c)), c, {2, 3});
      CHECK(std::abs(e.value - chi.entries()(i, j)) <= 1e-10);
    }
}

TEST_CASE("off-diagonal reduction matches direct evaluation") {
  auto rng = derive_stream(31, {2});
  const auto ch = build_random_unitary(6, rng);
  const ExactSource src(ch.superoperator(), ctx6().design());
  for (const CoefficientIndex c : {CoefficientIndex{1, 14}, CoefficientIndex{5, 30},
                                   CoefficientIndex{0, 35}, CoefficientIndex{12, 13}}) {
    for (std::size_t e : {0u, 17u, 40u, 71u}) {
      SamplePlan plan{c, {e}, 0, 0};
      const auto t = fidelity_triple(src, ctx6(), plan);
      const PureState& psi = ctx6().design().state(e);
      const ComplexMatrix out = modified_apply(ch, ctx6().basis(), c.i, c.j, psi.projector());
      const Complex direct = psi.amplitudes().dot(out * psi.amplitudes());
      CHECK(std::abs(t.f_tensor - direct) <= 1e-10);
      CHECK(t.se_tensor == 0.0);
    }
  }
}

TEST_CASE("covariance economy for diagonal coefficients") {
  const auto& ctx = ctx6();
  for (std::size_t n = 0; n < 36; ++n) {
    for (std::size_t e = 0; e < ctx.design().size(); ++e) {
      const auto preps = preparations(ctx, {n, n}, e);
      REQUIRE(preps.size() == 1);
      const auto [image, phase] = ctx.adjoint_image(n, e);
      CHECK(preps[0].key == design_key(image));
      CHECK(std::abs(preps[0].weight - 1.0) <= 1e-12);
      const ComplexVector direct = ctx.basis()[n].adjoint() * ctx.design().state(e).amplitudes();
      const ComplexVector via = std::polar(1.0, phase) * ctx.design().state(image).amplitudes();
      CHECK((direct - via).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  CHECK(preparations(ctx, {0, 4}, 0).size() <= 4);
  CHECK(preparations(ctx, {0, 4}, 0).size() >= 2);
}

TEST_CASE("projector sets") {
  const auto& d = ctx6().design();
  for (std::size_t e = 0; e < d.size(); ++e) {
    const auto ps = projector_set(d, e);
    CHECK(ps.survival == e);
    CHECK(ps.marginal1.size() == 3);
    CHECK(ps.marginal2.size() == 2);
    CHECK(std::count(ps.marginal1.begin(), ps.marginal1.end(), e) == 1);
    CHECK(std::count(ps.marginal2.begin(), ps.marginal2.end(), e) == 1);
    const auto idx = d.index(e);
    for (auto f : ps.marginal1) {
      const auto fi = d.index(f);
      CHECK((fi.j1 == idx.j1 && fi.m1 == idx.m1 && fi.j2 == idx.j2));
    }
    for (auto f : ps.marginal2) {
      const auto fi = d.index(f);
      CHECK((fi.j1 == idx.j1 && fi.j2 == idx.j2 && fi.m2 == idx.m2));
    }
  }
}

TEST_CASE("prime path") {
  SUBCASE("identity, d = 2") {
    auto b = sylvester_basis(2);
    const auto f = mean_fidelity_prime(identity_channel(2).superoperator(), b, mub_prime(2), 0, 0);
    CHECK(std::abs(f - 1.0) <= 1e-12);
    CHECK(std::abs(chi_from_prime_fidelity(f, 2, true) - 1.0) <= 1e-12);
  }
  SUBCASE("sigma x, d = 2") {
    auto b = sylvester_basis(2);
    const auto ch = unitary_channel(pauli('x'));
    const auto mub = mub_prime(2);
    for (std::size_t n = 0; n < 4; ++n) {
      const auto chi = chi_from_prime_fidelity(
          mean_fidelity_prime(ch.superoperator(), b, mub, n, n), 2, true);
      CHECK(std::abs(chi - (n == 2 ? 1.0 : 0.0)) <= 1e-12);
    }
  }
  SUBCASE("random channels, d = 2, 3") {
    auto rng = derive_stream(31, {3});
    for (std::size_t d : {2u, 3u}) {
      auto b = std::make_shared<const OperatorBasis>(sylvester_basis(d));
      const auto mub = mub_prime(d);
      for (const auto& ch : {build_random_unitary(d, rng), build_depolarizing(d, 0.37)}) {
        const auto oracle = chi_from_kraus(ch, b);
        for (std::size_t i = 0; i < d * d; ++i)
          for (std::size_t j = 0; j < d * d; ++j) {
            const auto f = mean_fidelity_prime(ch.superoperator(), *b, mub, i, j);
            CHECK(std::abs(chi_from_prime_fidelity(f, d, i == j) - oracle.entries()(i, j)) <=
                  1e-10);
          }
      }
    }
  }
  CHECK_THROWS_AS(mean_fidelity_prime(identity_channel(3).superoperator(), sylvester_basis(2),
                                      mub_prime(2), 0, 0),
                  DimensionError);
}

TEST_CASE("noiseless exactness of full reconstruction") {
  auto rng = derive_stream(31, {4});
  const auto coeffs = all_coefficients(36);
  CHECK(coeffs.size() == 666);
  for (const auto& ch : {target_process(), build_random_unitary(6, rng),
                         build_depolarizing(6, 0.25), identity_channel(6)}) {
    const ExactSource src(ch.superoperator(), ctx6().design());
    const auto rec = reconstruct(src, ctx6(), coeffs, 72, 7);
    const auto oracle = chi_from_kraus(ch, ctx6().basis_ptr());
    CHECK(max_abs_diff(rec.values, oracle.entries()) <= 1e-8);
    CHECK(rec.estimated.all());
    CHECK(is_hermitian(rec.values));
  }
}

TEST_CASE("selective reconstruction") {
  const auto et = target_process();
  const auto oracle = chi_from_kraus(et, ctx6().basis_ptr());
  const ExactSource src(et.superoperator(), ctx6().design());
  const auto rec = reconstruct(src, ctx6(), {{9, 9}}, 72, 3);
  REQUIRE(rec.at(9, 9).has_value());
  CHECK(std::abs(*rec.at(9, 9) - oracle.entries()(9, 9)) <= 1e-10);
  CHECK_FALSE(rec.at(0, 0).has_value());
  CHECK_FALSE(rec.at(0, 9).has_value());
  CHECK(rec.estimates.size() == 1);
  CHECK(rec.estimates[0].samples == 72);

  const auto off = reconstruct(src, ctx6(), {{1, 10}}, 72, 3);
  REQUIRE(off.at(10, 1).has_value());
  CHECK(std::abs(*off.at(10, 1) - std::conj(*off.at(1, 10))) <= 1e-15);
  CHECK(std::abs(*off.at(1, 10) - oracle.entries()(1, 10)) <= 1e-10);
  CHECK(off.zero_filled().entries()(0, 0) == Complex{});

  CHECK_THROWS_AS(reconstruct(src, ctx6(), {{0, 36}}, 72, 3), Error);
  CHECK_THROWS_AS(reconstruct(src, ctx6(), {{0, 0}}, 0, 3), Error);

  const auto support = support_coefficients(oracle);
  CHECK(support.size() == 21);
  CHECK(reconstruct(src, ctx6(), support, 72, 3).estimates.size() == 21);
}

TEST_CASE("estimator is unbiased over random plans") {
  auto rng = derive_stream(31, {5});
  const auto ch = build_random_unitary(6, rng);
  const ExactSource src(ch.superoperator(), ctx6().design());
  for (const CoefficientIndex c : {CoefficientIndex{0, 0}, CoefficientIndex{4, 4},
                                   CoefficientIndex{1, 14}, CoefficientIndex{7, 29}}) {
    const Complex exact =
        chi_from_fidelities(fidelity_triple(src, ctx6(), full_plan(c)), c, {2, 3}).value;
    const int plans = 200;
    std::vector<Complex> v;
    for (int p = 0; p < plans; ++p) {
      const auto plan = make_sample_plan(c, 72, 8, 1234, static_cast<std::uint64_t>(p));
      v.push_back(chi_from_fidelities(fidelity_triple(src, ctx6(), plan), c, {2, 3}).value);
    }
    Complex mean{};
    for (auto x : v) mean += x;
    mean /= double(plans);
    double var_re = 0, var_im = 0;
    for (auto x : v) {
      var_re += std::pow(x.real() - mean.real(), 2);
      var_im += std::pow(x.imag() - mean.imag(), 2);
    }
    const double se_re = std::sqrt(var_re / (plans - 1) / plans);
    const double se_im = std::sqrt(var_im / (plans - 1) / plans);
    CHECK(std::abs(mean.real() - exact.real()) <= 3 * se_re + 1e-12);
    CHECK(std::abs(mean.imag() - exact.imag()) <= 3 * se_im + 1e-12);
  }
}

TEST_CASE("standard errors") {
  const auto et = target_process();
  const ExactSource src(et.superoperator(), ctx6().design());
  const auto one = fidelity_triple(src, ctx6(), make_sample_plan({1, 10}, 72, 1, 5));
  CHECK(one.se_tensor == 0.0);
  const auto many = fidelity_triple(src, ctx6(), make_sample_plan({1, 10}, 72, 10, 5));
  CHECK(many.se_tensor > 0.0);
  CHECK(std::isfinite(many.se1));
}
