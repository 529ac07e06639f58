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

#include "seqpt/channels.hpp"

#include <cmath>

namespace seqpt {

namespace {

Eigen::Map<const ComplexVector> vec_view(const ComplexMatrix& x) {
  return {x.data(), x.size()};
}

void require_square(const ComplexMatrix& x, std::size_t d, const char* what) {
  const auto di = static_cast<Eigen::Index>(d);
  if (x.rows() != di || x.cols() != di) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(d) + "x" +
                         std::to_string(d) + " input, got " + std::to_string(x.rows()) +
                         "x" + std::to_string(x.cols()));
  }
}

}  // namespace

Superoperator::Superoperator(std::size_t dim, ComplexMatrix matrix)
    : dim_(dim), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(dim * dim);
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw DimensionError("Superoperator: matrix must be d^2 x d^2");
  }
}

ComplexMatrix Superoperator::apply(const ComplexMatrix& x) const {
  require_square(x, dim_, "Superoperator::apply");
  const ComplexVector out = matrix_ * vec_view(x);
  const auto d = static_cast<Eigen::Index>(dim_);
  return Eigen::Map<const ComplexMatrix>(out.data(), d, d);
}

Complex Superoperator::expectation(const PureState& prep, const PureState& proj) const {
  const ComplexVector& s = prep.amplitudes();
  const ComplexVector& f = proj.amplitudes();
  const ComplexMatrix in = s * s.adjoint();
  const ComplexMatrix out = apply(in);
  return f.dot(out * f);
}

KrausChannel::KrausChannel(std::size_t dim, std::vector<ComplexMatrix> kraus_ops,
                           bool trace_preserving)
    : dim_(dim), ops_(std::move(kraus_ops)), trace_preserving_(trace_preserving) {
  if (ops_.empty()) throw Error("KrausChannel: at least one Kraus operator required");
  const auto n = static_cast<Eigen::Index>(dim_ * dim_);
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  for (const auto& a : ops_) {
    require_square(a, dim_, "KrausChannel");
    s += tensor_product(a, a.conjugate());
  }
  superop_ = std::make_shared<const Superoperator>(dim_, std::move(s));
  if (trace_preserving_ && completeness_defect() > 1e-10) {
    throw Error("KrausChannel: Kraus operators are not complete (defect " +
                std::to_string(completeness_defect()) + ")");
  }
}

double KrausChannel::completeness_defect() const {
  ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim_),
                                          static_cast<Eigen::Index>(dim_));
  for (const auto& a : ops_) sum += a.adjoint() * a;
  return max_abs_diff(sum, identity(dim_));
}

ChiMatrix::ChiMatrix(std::shared_ptr<const OperatorBasis> basis, ComplexMatrix entries)
    : basis_(std::move(basis)), entries_(std::move(entries)) {
  if (!basis_) throw Error("ChiMatrix: null basis");
  const auto n = static_cast<Eigen::Index>(basis_->size());
  if (entries_.rows() != n || entries_.cols() != n) {
    throw DimensionError("ChiMatrix: entries must be d^2 x d^2");
  }
}

double ChiMatrix::trace_preservation_defect() const {
  const auto d = dim();
  ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(d),
                                          static_cast<Eigen::Index>(d));
  for (std::size_t m = 0; m < basis_->size(); ++m) {
    for (std::size_t n = 0; n < basis_->size(); ++n) {
      const Complex c = entries_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
      if (c == Complex{}) continue;
      sum += c * (*basis_)[n].adjoint() * (*basis_)[m];
    }
  }
  return max_abs_diff(sum, identity(d));
}

Superoperator ChiMatrix::superoperator() const {
  // S = Σ_mn χ_mn E_m ⊗ conj(E_n) = (U ⊗ conj U) reshaped; assemble via Kraus-like
  // sums over rows of χ to keep the cost at O(d^6).
  const auto d = static_cast<Eigen::Index>(dim());
  const auto n = d * d;
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  for (std::size_t m = 0; m < basis_->size(); ++m) {
    ComplexMatrix right = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < basis_->size(); ++k) {
      const Complex c = entries_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
      if (c != Complex{}) right += c * (*basis_)[k].conjugate();
    }
    s += tensor_product((*basis_)[m], right);
  }
  return Superoperator(dim(), std::move(s));
}

double ChoiMatrix::tp_residual() const {
  const ComplexMatrix marginal = partial_trace(entries, {dim, dim}, Subsystem::second);
  const ComplexMatrix target = identity(dim) / static_cast<double>(dim);
  return (marginal - target).norm();
}

double ChoiMatrix::min_eigenvalue() const {
  return hermitian_eig(entries, 1e-8).eigenvalues(0);
}

ComplexMatrix apply(const KrausChannel& ch, const ComplexMatrix& x) {
  require_square(x, ch.dim(), "apply");
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (const auto& a : ch.kraus_ops()) out += a * x * a.adjoint();
  return out;
}

ComplexMatrix apply(const ChiMatrix& ch, const ComplexMatrix& x) {
  require_square(x, ch.dim(), "apply");
  const auto& basis = ch.basis();
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const ComplexMatrix left = basis[m] * x;
    for (std::size_t n = 0; n < basis.size(); ++n) {
      const Complex c =
          ch.entries()(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
      if (c != Complex{}) out += c * left * basis[n].adjoint();
    }
  }
  return out;
}

ComplexMatrix modified_apply(const KrausChannel& ch, const OperatorBasis& basis,
                             std::size_t i, std::size_t j, const ComplexMatrix& x) {
  if (basis.dim() != ch.dim()) throw DimensionError("modified_apply: basis dimension");
  require_square(x, ch.dim(), "modified_apply");
  return seqpt::apply(ch, ComplexMatrix(basis[i].adjoint() * x * basis[j]));
}

ComplexMatrix modified_apply(const ChiMatrix& ch, std::size_t i, std::size_t j,
                             const ComplexMatrix& x) {
  require_square(x, ch.dim(), "modified_apply");
  const auto& basis = ch.basis();
  return seqpt::apply(ch, ComplexMatrix(basis[i].adjoint() * x * basis[j]));
}

ChiMatrix chi_from_kraus(const KrausChannel& ch,
                         std::shared_ptr<const OperatorBasis> basis) {
  if (basis->dim() != ch.dim()) {
    throw DimensionError("chi_from_kraus: basis dimension " +
                         std::to_string(basis->dim()) + " != channel dimension " +
                         std::to_string(ch.dim()));
  }
  const auto n = static_cast<Eigen::Index>(basis->size());
  ComplexMatrix chi = ComplexMatrix::Zero(n, n);
  for (const auto& a : ch.kraus_ops()) {
    const ComplexVector c = basis->expand(a);
    chi += c * c.adjoint();
  }
  return ChiMatrix(std::move(basis), hermitian_part(chi));
}

namespace {

// J = (1/d) Σ_jk E(|j><k|) ⊗ |j><k|, with E given as a superoperator.
ChoiMatrix choi_from_superoperator(const Superoperator& s) {
  const std::size_t d = s.dim();
  const auto di = static_cast<Eigen::Index>(d);
  ComplexMatrix j_mat = ComplexMatrix::Zero(di * di, di * di);
  for (Eigen::Index j = 0; j < di; ++j) {
    for (Eigen::Index k = 0; k < di; ++k) {
      ComplexMatrix unit = ComplexMatrix::Zero(di, di);
      unit(j, k) = 1.0;
      j_mat += tensor_product(s.apply(unit), unit);
    }
  }
  j_mat /= static_cast<double>(d);
  return {d, hermitian_part(j_mat)};
}

}  // namespace

ChoiMatrix choi_from_kraus(const KrausChannel& ch) {
  return choi_from_superoperator(ch.superoperator());
}

ChoiMatrix choi_from_chi(const ChiMatrix& chi) {
  return choi_from_superoperator(chi.superoperator());
}

ChiMatrix chi_from_choi(const ChoiMatrix& choi,
                        std::shared_ptr<const OperatorBasis> basis) {
  if (basis->dim() != choi.dim) throw DimensionError("chi_from_choi: basis dimension");
  const ComplexMatrix& u = basis->column_matrix();
  ComplexMatrix chi = u.adjoint() * choi.entries * u / static_cast<double>(choi.dim);
  return ChiMatrix(std::move(basis), hermitian_part(chi));
}

KrausChannel identity_channel(std::size_t d) { return KrausChannel(d, {identity(d)}); }

KrausChannel unitary_channel(const ComplexMatrix& u) {
  return KrausChannel(static_cast<std::size_t>(u.rows()), {u});
}

KrausChannel build_phase_slab(std::size_t d, double phase,
                              const std::vector<std::size_t>& support) {
  ComplexMatrix a = identity(d);
  for (std::size_t k : support) {
    if (k >= d) {
      throw DimensionError("build_phase_slab: support index " + std::to_string(k) +
                           " outside dimension " + std::to_string(d));
    }
    a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = std::polar(1.0, phase);
  }
  return KrausChannel(d, {a});
}

KrausChannel build_depolarizing(std::size_t d, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error("build_depolarizing: p = " + std::to_string(p) + " outside [0, 1]");
  }
  const OperatorBasis basis = sylvester_basis(d);
  const double dd = static_cast<double>(d);
  std::vector<ComplexMatrix> ops;
  ops.push_back(std::sqrt(1.0 - p + p / (dd * dd)) * identity(d));
  if (p > 0.0) {
    for (std::size_t n = 1; n < basis.size(); ++n) ops.push_back(std::sqrt(p) / dd * basis[n]);
  }
  return KrausChannel(d, std::move(ops));
}

KrausChannel build_random_unitary(std::size_t d, std::mt19937_64& rng) {
  return unitary_channel(random_unitary(d, rng));
}

KrausChannel target_process(double phase) { return build_phase_slab(6, phase, {0, 1}); }

std::vector<std::pair<std::size_t, std::size_t>> support_indices(const ChiMatrix& chi,
                                                                 double threshold) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto& e = chi.entries();
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = i; j < e.cols(); ++j)
      if (std::abs(e(i, j)) > threshold)
        out.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return out;
}

std::size_t independent_support_count(const ChiMatrix& chi, double threshold) {
  return support_indices(chi, threshold).size();
}

}  // namespace seqpt
