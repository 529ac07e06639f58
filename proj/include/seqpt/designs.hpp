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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "seqpt/algebra.hpp"

namespace seqpt {

/// A family of d^2 unitary, trace-orthogonal operators on C^d.
///
/// Sylvester bases are indexed by (k, l) with flat index n = k*d + l. A
/// product basis over D1 x D2 uses n = n1*D2^2 + n2, so element n equals
/// E_{n1} ⊗ E_{n2}.
class OperatorBasis {
 public:
  OperatorBasis(std::size_t dim, std::vector<ComplexMatrix> elements,
                std::string label);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const ComplexMatrix& operator[](std::size_t n) const { return elements_.at(n); }
  const ComplexMatrix& at(std::size_t k, std::size_t l) const {
    return elements_.at(k * dim_ + l);
  }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }
  const std::string& label() const { return label_; }

  /// Factor dimensions when built by product_basis.
  std::optional<BipartiteDims> factor_dims() const { return factors_; }

  /// Matrix U with U[a*d + b, n] = (E_n)[a, b]. Satisfies U^† U = d·I.
  const ComplexMatrix& column_matrix() const { return columns_; }

  /// Expansion coefficients c_n = Tr(E_n^† A)/d so that A = Σ c_n E_n.
  ComplexVector expand(const ComplexMatrix& a) const;

 private:
  friend OperatorBasis product_basis(const OperatorBasis&, const OperatorBasis&);

  std::size_t dim_;
  std::vector<ComplexMatrix> elements_;
  std::string label_;
  std::optional<BipartiteDims> factors_;
  ComplexMatrix columns_;
};

/// E_kl = Σ_m ω^{ml} |m ⊕ k><m|, ω = exp(2πi/d).
OperatorBasis sylvester_basis(std::size_t d);

/// Kronecker enumeration {E_{n1} ⊗ E_{n2}} with flat index n1*D2^2 + n2.
OperatorBasis product_basis(const OperatorBasis& first, const OperatorBasis& second);

bool is_prime(std::size_t n);

/// State index inside a MUB design: basis id j, element m.
struct DesignIndex {
  std::size_t basis;
  std::size_t element;
  bool operator==(const DesignIndex&) const = default;
};

/// Complete set of d+1 mutually unbiased bases for prime d. Basis 0 is the
/// canonical basis.
class MubDesign {
 public:
  MubDesign(std::size_t dim, std::vector<std::vector<PureState>> bases);

  std::size_t dim() const { return dim_; }
  std::size_t basis_count() const { return bases_.size(); }
  /// Total number of states, (d+1)*d.
  std::size_t size() const { return bases_.size() * dim_; }
  const std::vector<PureState>& basis(std::size_t j) const { return bases_.at(j); }
  const PureState& state(std::size_t j, std::size_t m) const {
    return bases_.at(j).at(m);
  }
  const PureState& state(std::size_t flat) const {
    return state(flat / dim_, flat % dim_);
  }
  std::size_t flat(DesignIndex idx) const { return idx.basis * dim_ + idx.element; }

 private:
  std::size_t dim_;
  std::vector<std::vector<PureState>> bases_;
};

/// Maximal MUB set for prime d.
///
/// d = 2 uses the eigenbases of σz, σx, σy. Odd primes use the canonical
/// basis plus bases j = 1..d with <k|ψ_m^j> = ω^{(j-1)k^2 + mk}/√d, so basis
/// 1 is the Fourier basis as in the d = 2 ordering. Every state
/// is rephased so its first nonzero component is real and positive. Basis j
/// is checked to diagonalize its abelian Sylvester subset before returning.
MubDesign mub_prime(std::size_t d);

/// Index tuple of a product-design element.
struct ProductIndex {
  std::size_t j1, m1, j2, m2;
  bool operator==(const ProductIndex&) const = default;
};

/// All products |ψ1> ⊗ |ψ2> of two MUB designs.
///
/// Flat index: (j1*D1 + m1) * |X2| + (j2*D2 + m2).
class ProductDesign {
 public:
  ProductDesign(MubDesign first, MubDesign second);

  const MubDesign& first() const { return first_; }
  const MubDesign& second() const { return second_; }
  BipartiteDims dims() const { return {first_.dim(), second_.dim()}; }
  std::size_t size() const { return first_.size() * second_.size(); }

  ProductIndex index(std::size_t flat) const;
  std::size_t flat(const ProductIndex& idx) const;
  const PureState& state(std::size_t flat) const { return states_.at(flat); }
  const PureState& state(const ProductIndex& idx) const { return states_.at(flat(idx)); }

 private:
  MubDesign first_;
  MubDesign second_;
  std::vector<PureState> states_;
};

ProductDesign product_design(MubDesign first, MubDesign second);

/// Image of a design state under a basis operator: op|ψ_m^j> = e^{iα}|ψ_m'^j>.
struct CovarianceAction {
  DesignIndex image;
  double phase;  // α, radians
};

/// Finds the design state in basis `st_idx.basis` that `op` maps ψ onto, up
/// to phase. Throws when no overlap reaches modulus 1 - 1e-8.
CovarianceAction covariance_image(const ComplexMatrix& op, const MubDesign& design,
                                  DesignIndex st_idx);

CovarianceAction covariance_action(const OperatorBasis& basis, const MubDesign& design,
                                   std::size_t k, std::size_t l, DesignIndex st_idx);

/// |mean_design Tr[P A P B] - (Tr A Tr B + Tr AB)/(d(d+1))|.
double two_design_residual(const MubDesign& design, const ComplexMatrix& a,
                           const ComplexMatrix& b);
double two_design_residual(const ProductDesign& design, const ComplexMatrix& a,
                           const ComplexMatrix& b);

}  // namespace seqpt
