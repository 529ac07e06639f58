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

#include "seqpt/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqpt/parallel.hpp"

namespace seqpt {

// ---------------------------------------------------------------------------
// Outer-product decomposition

ComplexMatrix OuterDecomposition::reassemble() const {
  if (terms.empty()) return {};
  const auto d = static_cast<Eigen::Index>(terms.front().state.dim());
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& t : terms) out += t.weight * t.state.projector();
  return out;
}

OuterDecomposition decompose_outer(const PureState& alpha, const PureState& beta,
                                   const DecompositionRule& rule) {
  if (alpha.dim() != beta.dim()) throw DimensionError("decompose_outer: dimension mismatch");
  for (const auto* s : {&alpha, &beta}) {
    if (std::abs(s->amplitudes().norm() - 1.0) > kTol.unit_norm) {
      throw Error("decompose_outer: input state is not normalized");
    }
  }
  const ComplexVector& a = alpha.amplitudes();
  const ComplexVector& b = beta.amplitudes();

  OuterDecomposition out;
  const Complex overlap = a.dot(b);
  if (std::abs(overlap) > 0.5) {
    const Complex phase = overlap / std::abs(overlap);
    if ((b - phase * a).norm() < 1e-13) {
      out.terms.push_back({std::conj(phase), alpha, TermRole::single});
      return out;
    }
  }

  auto push_mix = [&](Complex mix, Complex weight, TermRole role) {
    const ComplexVector u = (a + mix * b) / std::sqrt(2.0);
    const double n2 = u.squaredNorm();
    if (n2 < 1e-24) return;
    out.terms.push_back({weight * n2, PureState(u), role});
  };
  push_mix(rule.plus_mix, rule.plus_weight, TermRole::plus);
  push_mix(rule.minus_mix, rule.minus_weight, TermRole::minus);
  out.terms.push_back({rule.alpha_weight, alpha, TermRole::alpha});
  out.terms.push_back({rule.beta_weight, beta, TermRole::beta});
  return out;
}

// ---------------------------------------------------------------------------
// Sampling plans

SamplePlan make_sample_plan(CoefficientIndex coefficient, std::size_t design_size,
                            std::size_t sample_size, std::uint64_t seed,
                            std::uint64_t permutation) {
  if (sample_size == 0 || sample_size > design_size) {
    throw Error("make_sample_plan: sample size " + std::to_string(sample_size) +
                " outside [1, " + std::to_string(design_size) + "]");
  }
  SamplePlan plan{coefficient, {}, seed, permutation};
  std::vector<std::size_t> pool(design_size);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  if (sample_size == design_size) {
    plan.elements = std::move(pool);
    return plan;
  }
  auto rng = derive_stream(seed, {coefficient.i, coefficient.j, permutation});
  for (std::size_t k = 0; k < sample_size; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, design_size - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  pool.resize(sample_size);
  plan.elements = std::move(pool);
  return plan;
}

// ---------------------------------------------------------------------------
// Context

SeqptContext::SeqptContext(std::size_t d1, std::size_t d2)
    : basis1_(std::make_shared<const OperatorBasis>(sylvester_basis(d1))),
      basis2_(std::make_shared<const OperatorBasis>(sylvester_basis(d2))),
      basis_(std::make_shared<const OperatorBasis>(product_basis(*basis1_, *basis2_))),
      design_(mub_prime(d1), mub_prime(d2)) {
  adjoint_table_.resize(2);
  for (int f = 0; f < 2; ++f) {
    const auto& basis = f == 0 ? *basis1_ : *basis2_;
    const auto& mub = f == 0 ? design_.first() : design_.second();
    auto& table = adjoint_table_[static_cast<std::size_t>(f)];
    table.resize(basis.size());
    for (std::size_t n = 0; n < basis.size(); ++n) {
      const ComplexMatrix dagger = basis[n].adjoint();
      for (std::size_t s = 0; s < mub.size(); ++s) {
        const DesignIndex idx{s / mub.dim(), s % mub.dim()};
        const auto act = covariance_image(dagger, mub, idx);
        table[n].emplace_back(mub.flat(act.image), act.phase);
      }
    }
  }
}

std::pair<std::size_t, double> SeqptContext::adjoint_image(std::size_t n,
                                                           std::size_t element) const {
  const std::size_t sq2 = basis2_->size();
  const std::size_t n1 = n / sq2, n2 = n % sq2;
  const std::size_t size2 = design_.second().size();
  const std::size_t a = element / size2, b = element % size2;
  const auto& [a_img, phase1] = adjoint_table_[0].at(n1).at(a);
  const auto& [b_img, phase2] = adjoint_table_[1].at(n2).at(b);
  return {a_img * size2 + b_img, phase1 + phase2};
}

std::string design_key(std::size_t flat) { return "x" + std::to_string(flat); }

std::vector<Preparation> preparations(const SeqptContext& ctx, CoefficientIndex c,
                                      std::size_t element) {
  const auto& design = ctx.design();
  const auto n = ctx.basis().size();
  if (c.i >= n || c.j >= n) throw Error("preparations: coefficient index out of range");

  const auto [a, phase_a] = ctx.adjoint_image(c.i, element);
  if (c.diagonal()) {
    // E_i^† P_ψ E_i = P_{x_a}: the covariance phase must drop out.
    const ComplexVector direct = ctx.basis()[c.i].adjoint() * design.state(element).amplitudes();
    if (std::abs(std::abs(design.state(a).amplitudes().dot(direct)) - 1.0) > 1e-10) {
      throw Error("preparations: covariance image does not reproduce E^dagger|psi>");
    }
    return {{design_key(a), Complex{1.0, 0.0}, design.state(a), TermRole::single}};
  }

  const auto [b, phase_b] = ctx.adjoint_image(c.j, element);
  const PureState alpha =
      PureState::from_normalized(std::polar(1.0, phase_a) * design.state(a).amplitudes());
  const PureState beta =
      PureState::from_normalized(std::polar(1.0, phase_b) * design.state(b).amplitudes());
  const auto decomposition = decompose_outer(alpha, beta);

  std::vector<Preparation> out;
  const std::string prefix = "q" + std::to_string(c.i) + "." + std::to_string(c.j) + "." +
                             std::to_string(element);
  for (const auto& t : decomposition.terms) {
    switch (t.role) {
      case TermRole::single:
      case TermRole::alpha:
        out.push_back({design_key(a), t.weight, design.state(a), t.role});
        break;
      case TermRole::beta:
        out.push_back({design_key(b), t.weight, design.state(b), t.role});
        break;
      case TermRole::plus:
        out.push_back({prefix + ".p", t.weight, t.state, t.role});
        break;
      case TermRole::minus:
        out.push_back({prefix + ".m", t.weight, t.state, t.role});
        break;
    }
  }
  return out;
}

ProjectorSet projector_set(const ProductDesign& design, std::size_t element) {
  const ProductIndex idx = design.index(element);
  ProjectorSet set{element, {}, {}};
  for (std::size_t m = 0; m < design.second().dim(); ++m)
    set.marginal1.push_back(design.flat({idx.j1, idx.m1, idx.j2, m}));
  for (std::size_t m = 0; m < design.first().dim(); ++m)
    set.marginal2.push_back(design.flat({idx.j1, m, idx.j2, idx.m2}));
  return set;
}

// ---------------------------------------------------------------------------
// Sources

void ExactSource::probabilities(const Preparation& prep,
                                std::span<const std::size_t> projectors,
                                std::span<double> out) const {
  const ComplexMatrix evolved = channel_.apply(prep.state.projector());
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    const ComplexVector& f = design_.state(projectors[k]).amplitudes();
    const double p = std::real(f.dot(evolved * f));
    if (p < -kTol.probability || p > 1.0 + kTol.probability) {
      throw Error("ExactSource: probability " + std::to_string(p) +
                  " outside [0, 1]; channel is not physical");
    }
    out[k] = std::clamp(p, 0.0, 1.0);
  }
}

// ---------------------------------------------------------------------------
// Estimation

namespace {

struct Moments {
  Complex mean;
  double std_error;
};

Moments moments(const std::vector<Complex>& v) {
  Complex mean = std::accumulate(v.begin(), v.end(), Complex{}) /
                 static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const auto& x : v) ss += std::norm(x - mean);
  const double m = static_cast<double>(v.size());
  return {mean, std::sqrt(ss / (m - 1.0) / m)};
}

}  // namespace

FidelityTriple fidelity_triple(const ProbabilitySource& source, const SeqptContext& ctx,
                               const SamplePlan& plan) {
  if (plan.elements.empty()) throw Error("fidelity_triple: empty sample plan");
  const auto& design = ctx.design();
  std::vector<Complex> xs, ys, zs;
  xs.reserve(plan.elements.size());
  ys.reserve(plan.elements.size());
  zs.reserve(plan.elements.size());

  std::vector<std::size_t> projectors;
  std::vector<double> probs;
  for (std::size_t e : plan.elements) {
    const auto set = projector_set(design, e);
    projectors.clear();
    projectors.push_back(set.survival);
    projectors.insert(projectors.end(), set.marginal1.begin(), set.marginal1.end());
    projectors.insert(projectors.end(), set.marginal2.begin(), set.marginal2.end());
    probs.assign(projectors.size(), 0.0);

    Complex x{}, y{}, z{};
    for (const auto& prep : preparations(ctx, plan.coefficient, e)) {
      source.probabilities(prep, projectors, probs);
      const std::size_t n1 = set.marginal1.size();
      double sum1 = 0.0, sum2 = 0.0;
      for (std::size_t k = 0; k < n1; ++k) sum1 += probs[1 + k];
      for (std::size_t k = 0; k < set.marginal2.size(); ++k) sum2 += probs[1 + n1 + k];
      x += prep.weight * probs[0];
      y += prep.weight * sum1;
      z += prep.weight * sum2;
    }
    xs.push_back(x);
    ys.push_back(y);
    zs.push_back(z);
  }
  const auto mx = moments(xs), my = moments(ys), mz = moments(zs);
  return {mx.mean, my.mean, mz.mean, mx.std_error, my.std_error, mz.std_error,
          plan.elements.size()};
}

ChiEstimate chi_from_fidelities(const FidelityTriple& t, CoefficientIndex c,
                                BipartiteDims dims) {
  const double d1 = static_cast<double>(dims.d1);
  const double d2 = static_cast<double>(dims.d2);
  const double d = d1 * d2;
  const double a = (1.0 + d1) * (1.0 + d2) / d;
  const double b = (1.0 + d1) / d;
  const double g = (1.0 + d2) / d;
  const double delta = c.diagonal() ? 1.0 : 0.0;
  ChiEstimate est;
  est.coefficient = c;
  est.value = a * t.f_tensor + delta / d - b * t.f1 - g * t.f2;
  est.std_error = std::sqrt(std::pow(a * t.se_tensor, 2) + std::pow(b * t.se1, 2) +
                            std::pow(g * t.se2, 2));
  est.samples = t.samples;
  return est;
}

Complex mean_fidelity_prime(const Superoperator& channel, const OperatorBasis& basis,
                            const MubDesign& design, std::size_t i, std::size_t j) {
  if (basis.dim() != channel.dim() || design.dim() != channel.dim()) {
    throw DimensionError("mean_fidelity_prime: dimension mismatch");
  }
  if (i >= basis.size() || j >= basis.size()) {
    throw Error("mean_fidelity_prime: operator index out of range");
  }
  const ComplexMatrix left = basis[i].adjoint();
  const ComplexMatrix& right = basis[j];
  Complex sum{};
  for (std::size_t s = 0; s < design.size(); ++s) {
    const auto& psi = design.state(s);
    const ComplexMatrix out = channel.apply(left * psi.projector() * right);
    sum += psi.amplitudes().dot(out * psi.amplitudes());
  }
  return sum / static_cast<double>(design.size());
}

Complex chi_from_prime_fidelity(Complex mean_fidelity, std::size_t d, bool diagonal) {
  const double dd = static_cast<double>(d);
  return ((dd + 1.0) * mean_fidelity - (diagonal ? 1.0 : 0.0)) / dd;
}

// ---------------------------------------------------------------------------
// Reconstruction

std::optional<Complex> ChiReconstruction::at(std::size_t i, std::size_t j) const {
  const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
  if (!estimated(r, c)) return std::nullopt;
  return values(r, c);
}

ChiMatrix ChiReconstruction::zero_filled() const {
  ComplexMatrix out = values;
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      if (!estimated(r, c)) out(r, c) = 0.0;
  return ChiMatrix(basis, std::move(out));
}

std::vector<CoefficientIndex> all_coefficients(std::size_t basis_size) {
  std::vector<CoefficientIndex> out;
  out.reserve(basis_size * (basis_size + 1) / 2);
  for (std::size_t i = 0; i < basis_size; ++i)
    for (std::size_t j = i; j < basis_size; ++j) out.push_back({i, j});
  return out;
}

std::vector<CoefficientIndex> support_coefficients(const ChiMatrix& chi, double threshold) {
  std::vector<CoefficientIndex> out;
  for (const auto& [i, j] : support_indices(chi, threshold)) out.push_back({i, j});
  return out;
}

ChiReconstruction reconstruct(const ProbabilitySource& source, const SeqptContext& ctx,
                              const std::vector<CoefficientIndex>& coeffs,
                              std::size_t sample_size, std::uint64_t seed,
                              std::uint64_t permutation) {
  const std::size_t n = ctx.basis().size();
  for (const auto& c : coeffs) {
    if (c.i >= n || c.j >= n || c.i > c.j) {
      throw Error("reconstruct: invalid coefficient index (" + std::to_string(c.i) + ", " +
                  std::to_string(c.j) + "); expected i <= j < " + std::to_string(n));
    }
  }
  std::vector<ChiEstimate> estimates(coeffs.size());
  parallel_for(coeffs.size(), [&](std::size_t k) {
    const auto plan =
        make_sample_plan(coeffs[k], ctx.design().size(), sample_size, seed, permutation);
    const auto triple = fidelity_triple(source, ctx, plan);
    estimates[k] = chi_from_fidelities(triple, coeffs[k], ctx.dims());
    estimates[k].seed = seed;
  });

  const auto ni = static_cast<Eigen::Index>(n);
  ChiReconstruction out{ctx.basis_ptr(), ComplexMatrix::Zero(ni, ni),
                        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                            ni, ni, false),
                        std::move(estimates)};
  for (const auto& e : out.estimates) {
    const auto i = static_cast<Eigen::Index>(e.coefficient.i);
    const auto j = static_cast<Eigen::Index>(e.coefficient.j);
    if (i == j) {
      out.values(i, i) = e.value.real();
    } else {
      out.values(i, j) = e.value;
      out.values(j, i) = std::conj(e.value);
    }
    out.estimated(i, j) = out.estimated(j, i) = true;
  }
  return out;
}

}  // namespace seqpt
