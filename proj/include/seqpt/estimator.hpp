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

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqpt/algebra.hpp"
#include "seqpt/channels.hpp"
#include "seqpt/designs.hpp"

namespace seqpt {

// ---------------------------------------------------------------------------
// Outer-product decomposition
// ---------------------------------------------------------------------------

enum class TermRole { single, plus, minus, alpha, beta };

struct OuterTerm {
  Complex weight;
  PureState state;
  TermRole role;
};

struct OuterDecomposition {
  std::vector<OuterTerm> terms;
  /// Σ w_k |s_k><s_k|
  ComplexMatrix reassemble() const;
};

/// Weights of |α><β| = w+·|u+><u+| + w-·|u-><u-| + wα·Pα + wβ·Pβ, with
/// |u±> = (|α> + c±|β>)/√2 left unnormalized.
struct DecompositionRule {
  Complex plus_mix{1.0, 0.0};
  Complex minus_mix{0.0, 1.0};
  Complex plus_weight{1.0, 0.0};
  Complex minus_weight{0.0, 1.0};
  Complex alpha_weight{-0.5, -0.5};
  Complex beta_weight{-0.5, -0.5};
};

/// Identity valid for any pair of unit vectors.
inline constexpr DecompositionRule kOuterRule{};

/// Decomposes |α><β| into at most four weighted pure-state projectors. When
/// β = e^{iθ}α (to 1e-13) the single term (e^{-iθ}, α) is returned. Terms whose
/// unnormalized vector vanishes are dropped.
OuterDecomposition decompose_outer(const PureState& alpha, const PureState& beta,
                                   const DecompositionRule& rule = kOuterRule);

// ---------------------------------------------------------------------------
// Coefficients and sampling plans
// ---------------------------------------------------------------------------

/// χ_{ij} with flat product-basis indices i = i1*D2^2 + i2, j = j1*D2^2 + j2.
struct CoefficientIndex {
  std::size_t i;
  std::size_t j;
  bool diagonal() const { return i == j; }
  bool operator==(const CoefficientIndex&) const = default;
};

struct SamplePlan {
  CoefficientIndex coefficient;
  std::vector<std::size_t> elements;  // ProductDesign flat indices, no repeats
  std::uint64_t seed = 0;
  std::uint64_t permutation = 0;
};

/// Draws `sample_size` distinct design elements. The draw is a pure function
/// of (seed, coefficient, permutation). sample_size == design_size yields
/// every element in index order.
SamplePlan make_sample_plan(CoefficientIndex coefficient, std::size_t design_size,
                            std::size_t sample_size, std::uint64_t seed,
                            std::uint64_t permutation = 0);

/// Everything needed to run the estimator for one product dimension.
class SeqptContext {
 public:
  SeqptContext(std::size_t d1, std::size_t d2);

  BipartiteDims dims() const { return design_.dims(); }
  std::size_t dim() const { return design_.dims().total(); }
  const ProductDesign& design() const { return design_; }
  const OperatorBasis& basis() const { return *basis_; }
  std::shared_ptr<const OperatorBasis> basis_ptr() const { return basis_; }
  const OperatorBasis& factor_basis(int which) const {
    return which == 1 ? *basis1_ : *basis2_;
  }

  /// Design element e' and phase with E_n^† |x_e> = e^{iφ}|x_e'>.
  std::pair<std::size_t, double> adjoint_image(std::size_t n, std::size_t element) const;

 private:
  std::shared_ptr<const OperatorBasis> basis1_;
  std::shared_ptr<const OperatorBasis> basis2_;
  std::shared_ptr<const OperatorBasis> basis_;
  ProductDesign design_;
  // [factor][n][state flat] -> (image state flat, phase)
  std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> adjoint_table_;
};

/// One pure input state fed to the channel, with its weight in the
/// decomposition of E_i^† P_ψ E_j.
struct Preparation {
  std::string key;  // "x<flat>" for design elements, synthesized otherwise
  Complex weight;
  PureState state;
  TermRole role;
};

std::string design_key(std::size_t flat);

/// Preparations for coefficient (i, j) and design element `element`. Diagonal
/// coefficients reuse a design state through covariance; the dropped phase is
/// verified to cancel.
std::vector<Preparation> preparations(const SeqptContext& ctx, CoefficientIndex c,
                                      std::size_t element);

/// Projector design elements for element (j1,m1,j2,m2): the survival
/// projector, then (j1,m1,j2,·) for F1 and (j1,·,j2,m2) for F2.
struct ProjectorSet {
  std::size_t survival;
  std::vector<std::size_t> marginal1;  // D2 entries, includes survival
  std::vector<std::size_t> marginal2;  // D1 entries, includes survival
};
ProjectorSet projector_set(const ProductDesign& design, std::size_t element);

// ---------------------------------------------------------------------------
// Probability sources
// ---------------------------------------------------------------------------

/// Supplies success probabilities p = <proj| E(|prep><prep|) |proj>.
class ProbabilitySource {
 public:
  virtual ~ProbabilitySource() = default;
  /// Fills out[k] with the probability for projector design element
  /// projectors[k].
  virtual void probabilities(const Preparation& prep,
                             std::span<const std::size_t> projectors,
                             std::span<double> out) const = 0;
};

/// Noiseless probabilities computed from the channel.
class ExactSource : public ProbabilitySource {
 public:
  ExactSource(const Superoperator& channel, const ProductDesign& design)
      : channel_(channel), design_(design) {}
  void probabilities(const Preparation& prep, std::span<const std::size_t> projectors,
                     std::span<double> out) const override;

 private:
  const Superoperator& channel_;
  const ProductDesign& design_;
};

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

struct FidelityTriple {
  Complex f_tensor;
  Complex f1;
  Complex f2;
  double se_tensor = 0.0;
  double se1 = 0.0;
  double se2 = 0.0;
  std::size_t samples = 0;
};

struct ChiEstimate {
  CoefficientIndex coefficient;
  Complex value;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Mean survival, F1 and F2 over the plan's design elements. Standard errors
/// are sample standard deviations over elements divided by √M (0 when M = 1).
FidelityTriple fidelity_triple(const ProbabilitySource& source, const SeqptContext& ctx,
                               const SamplePlan& plan);

/// χ = F⊗(1+D1)(1+D2)/d + δ/d − F1(1+D1)/d − F2(1+D2)/d.
ChiEstimate chi_from_fidelities(const FidelityTriple& t, CoefficientIndex c,
                                BipartiteDims dims);

/// Single-system path: design average of Tr[P_ψ E(E_i^† P_ψ E_j)].
Complex mean_fidelity_prime(const Superoperator& channel, const OperatorBasis& basis,
                            const MubDesign& design, std::size_t i, std::size_t j);
/// χ_ij = ((d+1)F − δ_ij)/d.
Complex chi_from_prime_fidelity(Complex mean_fidelity, std::size_t d, bool diagonal);

/// χ estimate with an explicit "not estimated" mask.
struct ChiReconstruction {
  std::shared_ptr<const OperatorBasis> basis;
  ComplexMatrix values;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> estimated;
  std::vector<ChiEstimate> estimates;  // i <= j entries, in request order

  std::optional<Complex> at(std::size_t i, std::size_t j) const;
  /// χ with unestimated entries set to zero.
  ChiMatrix zero_filled() const;
};

/// Every (i, j) with i <= j.
std::vector<CoefficientIndex> all_coefficients(std::size_t basis_size);
/// Upper-triangle support of a channel's χ above `threshold`.
std::vector<CoefficientIndex> support_coefficients(const ChiMatrix& chi,
                                                   double threshold = 1e-10);

/// Estimates every coefficient in `coeffs` from `sample_size` design elements
/// drawn independently per coefficient. Lower-triangle entries are filled by
/// conjugation; coefficients outside `coeffs` stay unestimated.
ChiReconstruction reconstruct(const ProbabilitySource& source, const SeqptContext& ctx,
                              const std::vector<CoefficientIndex>& coeffs,
                              std::size_t sample_size, std::uint64_t seed,
                              std::uint64_t permutation = 0);

}  // namespace seqpt
