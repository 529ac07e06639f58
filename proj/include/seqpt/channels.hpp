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

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "seqpt/algebra.hpp"
#include "seqpt/designs.hpp"

namespace seqpt {

/// Linear map on d x d matrices acting on row-major vectorizations:
/// vec(E(X)) = S vec(X), vec(X)[a*d + b] = X[a, b].
class Superoperator {
 public:
  Superoperator(std::size_t dim, ComplexMatrix matrix);

  std::size_t dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  ComplexMatrix apply(const ComplexMatrix& x) const;
  /// <phi| E(|s><s|) |phi>, without forming the output matrix twice.
  Complex expectation(const PureState& prep, const PureState& proj) const;

 private:
  std::size_t dim_;
  ComplexMatrix matrix_;
};

/// Channel in operator-sum form, E(ρ) = Σ A_i ρ A_i^†.
class KrausChannel {
 public:
  KrausChannel(std::size_t dim, std::vector<ComplexMatrix> kraus_ops,
               bool trace_preserving = true);

  std::size_t dim() const { return dim_; }
  const std::vector<ComplexMatrix>& kraus_ops() const { return ops_; }
  bool trace_preserving() const { return trace_preserving_; }
  /// ‖Σ A_i^† A_i − I‖ (max entry).
  double completeness_defect() const;
  const Superoperator& superoperator() const { return *superop_; }

 private:
  std::size_t dim_;
  std::vector<ComplexMatrix> ops_;
  bool trace_preserving_;
  std::shared_ptr<const Superoperator> superop_;
};

/// Process matrix relative to an operator basis,
/// E(ρ) = Σ_mn χ_mn E_m ρ E_n^†.
class ChiMatrix {
 public:
  ChiMatrix(std::shared_ptr<const OperatorBasis> basis, ComplexMatrix entries);

  const OperatorBasis& basis() const { return *basis_; }
  std::shared_ptr<const OperatorBasis> basis_ptr() const { return basis_; }
  const ComplexMatrix& entries() const { return entries_; }
  std::size_t dim() const { return basis_->dim(); }

  /// ‖Σ_mn χ_mn E_n^† E_m − I‖ (max entry).
  double trace_preservation_defect() const;
  Superoperator superoperator() const;

 private:
  std::shared_ptr<const OperatorBasis> basis_;
  ComplexMatrix entries_;
};

/// Choi state (E ⊗ id)(|Φ+><Φ+|), unit trace. The channel output is the
/// FIRST tensor factor: J[a*d + j, b*d + k] = E(|j><k|)[a, b] / d.
struct ChoiMatrix {
  std::size_t dim;  // channel dimension d; entries are d^2 x d^2
  ComplexMatrix entries;

  /// ‖Tr_out J − I/d‖_F
  double tp_residual() const;
  double min_eigenvalue() const;
};

ComplexMatrix apply(const KrausChannel& ch, const ComplexMatrix& x);
ComplexMatrix apply(const ChiMatrix& ch, const ComplexMatrix& x);

/// E(E_i^† X E_j).
ComplexMatrix modified_apply(const KrausChannel& ch, const OperatorBasis& basis,
                             std::size_t i, std::size_t j, const ComplexMatrix& x);
ComplexMatrix modified_apply(const ChiMatrix& ch, std::size_t i, std::size_t j,
                             const ComplexMatrix& x);

ChiMatrix chi_from_kraus(const KrausChannel& ch,
                         std::shared_ptr<const OperatorBasis> basis);
ChoiMatrix choi_from_kraus(const KrausChannel& ch);
ChoiMatrix choi_from_chi(const ChiMatrix& chi);
ChiMatrix chi_from_choi(const ChoiMatrix& choi,
                        std::shared_ptr<const OperatorBasis> basis);

KrausChannel identity_channel(std::size_t d);
KrausChannel unitary_channel(const ComplexMatrix& u);

/// Single diagonal Kraus operator applying e^{i·phase} on `support`.
KrausChannel build_phase_slab(std::size_t d, double phase,
                              const std::vector<std::size_t>& support);

/// E(ρ) = (1−p)ρ + p·I/d, realized with the Sylvester basis of dimension d:
/// √(1 − p + p/d²)·I together with √p/d·E_n for every non-identity E_n. The
/// coefficients follow from Σ_n E_n ρ E_n^† = d·Tr(ρ)·I.
KrausChannel build_depolarizing(std::size_t d, double p);
KrausChannel build_random_unitary(std::size_t d, std::mt19937_64& rng);

/// Default slab phase shift, radians.
inline constexpr double kSlabPhase = 5.42;

/// Six-level target: phase kSlabPhase on |0> and |1>.
KrausChannel target_process(double phase = kSlabPhase);

/// Count of independent nonzero χ entries (upper triangle incl. diagonal)
/// with modulus above `threshold`.
std::size_t independent_support_count(const ChiMatrix& chi, double threshold = 1e-10);

/// Upper-triangle (i <= j) index pairs with |χ_ij| above `threshold`.
std::vector<std::pair<std::size_t, std::size_t>> support_indices(
    const ChiMatrix& chi, double threshold = 1e-10);

}  // namespace seqpt
