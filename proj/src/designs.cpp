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

#include "seqpt/designs.hpp"

#include <cmath>
#include <numbers>

namespace seqpt {

namespace {

Complex root_of_unity(std::size_t d, std::size_t power) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(power % d) /
                       static_cast<double>(d);
  return std::polar(1.0, angle);
}

// First nonzero component real positive.
PureState rephase(const ComplexVector& v) {
  ComplexVector out = v;
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const double a = std::abs(out(k));
    if (a > 1e-12) {
      out *= std::conj(out(k)) / a;
      out(k) = a;
      break;
    }
  }
  return PureState(std::move(out));
}

// Checks that every state of basis j is an eigenvector of every operator of
// the abelian set `ops`.
void verify_diagonalizes(const std::vector<PureState>& states,
                         const std::vector<ComplexMatrix>& ops, std::size_t j) {
  for (const auto& psi : states) {
    for (const auto& op : ops) {
      const ComplexVector image = op * psi.amplitudes();
      const Complex lambda = psi.amplitudes().dot(image);
      const double residual = (image - lambda * psi.amplitudes()).norm();
      if (residual > 1e-10) {
        throw Error("mub_prime: basis " + std::to_string(j) +
                    " does not diagonalize its abelian Sylvester subset");
      }
    }
  }
}

}  // namespace

OperatorBasis::OperatorBasis(std::size_t dim, std::vector<ComplexMatrix> elements,
                             std::string label)
    : dim_(dim), elements_(std::move(elements)), label_(std::move(label)) {
  if (elements_.size() != dim_ * dim_) {
    throw DimensionError("OperatorBasis: expected d^2 elements");
  }
  const auto d = static_cast<Eigen::Index>(dim_);
  columns_.resize(d * d, d * d);
  for (std::size_t n = 0; n < elements_.size(); ++n) {
    const auto& e = elements_[n];
    if (e.rows() != d || e.cols() != d) {
      throw DimensionError("OperatorBasis: element has wrong shape");
    }
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        columns_(a * d + b, static_cast<Eigen::Index>(n)) = e(a, b);
  }
}

ComplexVector OperatorBasis::expand(const ComplexMatrix& a) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  if (a.rows() != d || a.cols() != d) throw DimensionError("expand: shape mismatch");
  const Eigen::Map<const ComplexVector> vec(a.data(), d * d);  // row-major vec
  return columns_.adjoint() * vec / static_cast<double>(dim_);
}

OperatorBasis sylvester_basis(std::size_t d) {
  if (d < 2) throw DimensionError("sylvester_basis: d must be >= 2");
  std::vector<ComplexMatrix> elements;
  elements.reserve(d * d);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < d; ++l) {
      ComplexMatrix e = ComplexMatrix::Zero(static_cast<Eigen::Index>(d),
                                            static_cast<Eigen::Index>(d));
      for (std::size_t m = 0; m < d; ++m) {
        e(static_cast<Eigen::Index>((m + k) % d), static_cast<Eigen::Index>(m)) =
            root_of_unity(d, m * l);
      }
      elements.push_back(std::move(e));
    }
  }
  return OperatorBasis(d, std::move(elements), "sylvester(" + std::to_string(d) + ")");
}

OperatorBasis product_basis(const OperatorBasis& first, const OperatorBasis& second) {
  std::vector<ComplexMatrix> elements;
  elements.reserve(first.size() * second.size());
  for (const auto& e1 : first.elements())
    for (const auto& e2 : second.elements()) elements.push_back(tensor_product(e1, e2));
  OperatorBasis out(first.dim() * second.dim(), std::move(elements),
                    first.label() + "x" + second.label());
  out.factors_ = BipartiteDims{first.dim(), second.dim()};
  return out;
}

bool is_prime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

MubDesign::MubDesign(std::size_t dim, std::vector<std::vector<PureState>> bases)
    : dim_(dim), bases_(std::move(bases)) {
  for (const auto& b : bases_) {
    if (b.size() != dim_) throw DimensionError("MubDesign: basis has wrong size");
    for (const auto& s : b)
      if (s.dim() != dim_) throw DimensionError("MubDesign: state has wrong dimension");
  }
}

MubDesign mub_prime(std::size_t d) {
  if (!is_prime(d)) {
    throw Error("mub_prime: " + std::to_string(d) +
                " is not prime (prime-power factors are not supported)");
  }
  const auto di = static_cast<Eigen::Index>(d);
  std::vector<std::vector<PureState>> bases;
  std::vector<PureState> canonical;
  for (std::size_t m = 0; m < d; ++m) canonical.push_back(basis_state(d, m));
  bases.push_back(std::move(canonical));

  const OperatorBasis sylvester = sylvester_basis(d);
  if (d == 2) {
    const double r = 1.0 / std::sqrt(2.0);
    const Complex i{0.0, 1.0};
    auto make = [&](Complex a, Complex b) {
      ComplexVector v(2);
      v << a, b;
      return rephase(v);
    };
    bases.push_back({make(r, r), make(r, -r)});          // σx
    bases.push_back({make(r, i * r), make(r, -i * r)});  // σy
  } else {
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t j = 1; j <= d; ++j) {
      std::vector<PureState> basis;
      for (std::size_t m = 0; m < d; ++m) {
        ComplexVector v(di);
        for (std::size_t k = 0; k < d; ++k)
          v(static_cast<Eigen::Index>(k)) = norm * root_of_unity(d, (j - 1) * k * k + m * k);
        basis.push_back(rephase(v));
      }
      bases.push_back(std::move(basis));
    }
  }

  // Abelian subset diagonalized by each basis.
  for (std::size_t j = 0; j < bases.size(); ++j) {
    std::vector<ComplexMatrix> ops;
    for (std::size_t a = 0; a < d; ++a) {
      std::size_t k = 0, l = 0;
      if (j == 0) {
        l = a;  // powers of Z
      } else if (d == 2) {
        k = a;
        l = (j == 2) ? a : 0;  // X, or XZ
      } else {
        k = a;
        l = (2 * (j - 1) * a) % d;
      }
      ops.push_back(sylvester.at(k, l));
    }
    verify_diagonalizes(bases[j], ops, j);
  }
  return MubDesign(d, std::move(bases));
}

ProductDesign::ProductDesign(MubDesign first, MubDesign second)
    : first_(std::move(first)), second_(std::move(second)) {
  states_.reserve(size());
  for (std::size_t a = 0; a < first_.size(); ++a)
    for (std::size_t b = 0; b < second_.size(); ++b)
      states_.push_back(tensor_product(first_.state(a), second_.state(b)));
}

ProductIndex ProductDesign::index(std::size_t flat) const {
  if (flat >= size()) throw DimensionError("ProductDesign: index out of range");
  const std::size_t a = flat / second_.size();
  const std::size_t b = flat % second_.size();
  return {a / first_.dim(), a % first_.dim(), b / second_.dim(), b % second_.dim()};
}

std::size_t ProductDesign::flat(const ProductIndex& idx) const {
  if (idx.j1 >= first_.basis_count() || idx.m1 >= first_.dim() ||
      idx.j2 >= second_.basis_count() || idx.m2 >= second_.dim()) {
    throw DimensionError("ProductDesign: index tuple out of range");
  }
  return (idx.j1 * first_.dim() + idx.m1) * second_.size() +
         (idx.j2 * second_.dim() + idx.m2);
}

ProductDesign product_design(MubDesign first, MubDesign second) {
  return ProductDesign(std::move(first), std::move(second));
}

CovarianceAction covariance_image(const ComplexMatrix& op, const MubDesign& design,
                                  DesignIndex st_idx) {
  const auto& psi = design.state(st_idx.basis, st_idx.element);
  if (op.rows() != static_cast<Eigen::Index>(design.dim()) || op.cols() != op.rows()) {
    throw DimensionError("covariance_image: operator and design dimension differ");
  }
  const ComplexVector image = op * psi.amplitudes();
  for (std::size_t m = 0; m < design.dim(); ++m) {
    const auto& candidate = design.state(st_idx.basis, m);
    const Complex overlap = candidate.amplitudes().dot(image);
    if (std::abs(overlap) >= 1.0 - 1e-8) {
      return {{st_idx.basis, m}, std::arg(overlap)};
    }
  }
  throw Error("covariance_image: no design state matches the operator image of (" +
              std::to_string(st_idx.basis) + ", " + std::to_string(st_idx.element) +
              ")");
}

CovarianceAction covariance_action(const OperatorBasis& basis, const MubDesign& design,
                                   std::size_t k, std::size_t l, DesignIndex st_idx) {
  if (basis.dim() != design.dim()) {
    throw DimensionError("covariance_action: basis and design dimension differ");
  }
  return covariance_image(basis.at(k, l), design, st_idx);
}

namespace {

template <typename StateAt>
double design_residual(std::size_t count, std::size_t d, StateAt state_at,
                       const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto di = static_cast<Eigen::Index>(d);
  if (a.rows() != di || a.cols() != di || b.rows() != di || b.cols() != di) {
    throw DimensionError("two_design_residual: operator dimension mismatch");
  }
  Complex mean = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    const ComplexVector& v = state_at(n).amplitudes();
    mean += v.dot(a * v) * v.dot(b * v);
  }
  mean /= static_cast<double>(count);
  const double dd = static_cast<double>(d);
  const Complex haar = (a.trace() * b.trace() + (a * b).trace()) / (dd * (dd + 1.0));
  return std::abs(mean - haar);
}

}  // namespace

double two_design_residual(const MubDesign& design, const ComplexMatrix& a,
                           const ComplexMatrix& b) {
  return design_residual(
      design.size(), design.dim(),
      [&](std::size_t n) -> const PureState& { return design.state(n); }, a, b);
}

double two_design_residual(const ProductDesign& design, const ComplexMatrix& a,
                           const ComplexMatrix& b) {
  return design_residual(
      design.size(), design.dims().total(),
      [&](std::size_t n) -> const PureState& { return design.state(n); }, a, b);
}

}  // namespace seqpt
