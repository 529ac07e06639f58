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

#include "seqpt/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seqpt {

PureState::PureState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  const double n = amps_.norm();
  if (amps_.size() == 0 || !(n > 0.0) || !std::isfinite(n)) {
    throw Error("PureState: amplitude vector has zero or non-finite norm");
  }
  amps_ /= n;
}

PureState PureState::from_normalized(ComplexVector amplitudes, double tol) {
  const double n = amplitudes.norm();
  if (std::abs(n - 1.0) > tol) {
    throw Error("PureState: input is not normalized (norm " +
                std::to_string(n) + ")");
  }
  PureState s;
  s.amps_ = std::move(amplitudes);
  return s;
}

ComplexMatrix PureState::projector() const { return amps_ * amps_.adjoint(); }

Complex PureState::inner(const PureState& other) const {
  if (other.dim() != dim()) throw DimensionError("inner: dimension mismatch");
  return amps_.dot(other.amps_);  // conjugates the left operand
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index rb = b.rows(), cb = b.cols();
  ComplexMatrix out(a.rows() * rb, a.cols() * cb);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

PureState tensor_product(const PureState& a, const PureState& b) {
  return PureState::from_normalized(
      tensor_product(a.amplitudes(), b.amplitudes()), 1e-11);
}

ComplexMatrix partial_trace(const ComplexMatrix& m, BipartiteDims dims,
                            Subsystem keep) {
  const auto n = static_cast<Eigen::Index>(dims.total());
  if (m.rows() != n || m.cols() != n) {
    throw DimensionError("partial_trace: matrix is " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + ", expected " +
                         std::to_string(n) + "x" + std::to_string(n));
  }
  const auto d1 = static_cast<Eigen::Index>(dims.d1);
  const auto d2 = static_cast<Eigen::Index>(dims.d2);
  if (keep == Subsystem::first) {
    ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
    for (Eigen::Index i = 0; i < d1; ++i)
      for (Eigen::Index j = 0; j < d1; ++j)
        for (Eigen::Index k = 0; k < d2; ++k) out(i, j) += m(i * d2 + k, j * d2 + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
  for (Eigen::Index k = 0; k < d2; ++k)
    for (Eigen::Index l = 0; l < d2; ++l)
      for (Eigen::Index i = 0; i < d1; ++i) out(k, l) += m(i * d2 + k, i * d2 + l);
  return out;
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return hermiticity_defect(m) <= tol;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

EigenDecomposition hermitian_eig(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("hermitian_eig: not square");
  const double defect = hermiticity_defect(m);
  if (defect > tol) {
    throw Error("hermitian_eig: input deviates from Hermitian by " +
                std::to_string(defect));
  }
  // Eigen's self-adjoint solver wants column-major input.
  const Eigen::MatrixXcd h = hermitian_part(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw Error("hermitian_eig: solver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m, double clip_tol) {
  const auto eig = hermitian_eig(m);
  RealVector roots(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < roots.size(); ++k) {
    const double lambda = eig.eigenvalues(k);
    if (lambda < -clip_tol) {
      throw Error("psd_sqrt: eigenvalue " + std::to_string(lambda) +
                  " is below the clipping tolerance");
    }
    roots(k) = std::sqrt(std::max(lambda, 0.0));
  }
  const ComplexMatrix& v = eig.eigenvectors;
  return hermitian_part(v * roots.cast<Complex>().asDiagonal() * v.adjoint());
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

ComplexMatrix identity(std::size_t d) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(d),
                                 static_cast<Eigen::Index>(d));
}

ComplexMatrix basis_projector(std::size_t d, std::size_t k) {
  ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(d),
                                        static_cast<Eigen::Index>(d));
  p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
  return p;
}

PureState basis_state(std::size_t d, std::size_t k) {
  if (k >= d) throw DimensionError("basis_state: index out of range");
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(d));
  v(static_cast<Eigen::Index>(k)) = 1.0;
  return PureState::from_normalized(std::move(v));
}

namespace {

Complex complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

}  // namespace

ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols,
                             std::mt19937_64& rng) {
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = complex_gaussian(rng);
  return g;
}

ComplexMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng) {
  return hermitian_part(random_ginibre(dim, dim, rng));
}

PureState random_pure_state(std::size_t dim, std::mt19937_64& rng) {
  if (dim == 0) throw DimensionError("random_pure_state: dim must be >= 1");
  ComplexVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = complex_gaussian(rng);
  return PureState(std::move(v));
}

ComplexMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  const Eigen::MatrixXcd g = random_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex rkk = r(k, k);
    const double a = std::abs(rkk);
    if (a > 0.0) q.col(k) *= rkk / a;
  }
  return q;
}

std::mt19937_64 derive_stream(std::uint64_t master_seed,
                              std::initializer_list<std::uint64_t> task) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (task.size() + 1));
  auto push = [&](std::uint64_t w) {
    words.push_back(static_cast<std::uint32_t>(w));
    words.push_back(static_cast<std::uint32_t>(w >> 32));
  };
  push(master_seed);
  for (auto w : task) push(w);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

std::mt19937_64 derive_stream(std::uint64_t master_seed, const std::string& key) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(master_seed),
                                   static_cast<std::uint32_t>(master_seed >> 32)};
  for (unsigned char c : key) words.push_back(c);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace seqpt
