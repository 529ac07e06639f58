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

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace seqpt {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major.
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealVector = Eigen::VectorXd;

/// Base class of every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Shared numerical tolerances. Tests and the CPTP projector read the same
/// record so a tolerance is changed in exactly one place.
struct Tolerances {
  double hermitian = 1e-10;
  double reconstruction = 1e-9;
  double unit_norm = 1e-12;
  double psd_clip = 1e-10;
  double probability = 1e-9;
};

inline constexpr Tolerances kTol{};

/// Unit-norm state vector. Construction normalizes and rejects zero vectors.
class PureState {
 public:
  PureState() = default;
  explicit PureState(ComplexVector amplitudes);

  /// Wraps amplitudes that must already be normalized within `tol`.
  static PureState from_normalized(ComplexVector amplitudes,
                                   double tol = kTol.unit_norm);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const ComplexVector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t k) const { return amps_(static_cast<Eigen::Index>(k)); }

  /// |psi><psi|
  ComplexMatrix projector() const;
  /// <this|other>
  Complex inner(const PureState& other) const;

 private:
  ComplexVector amps_;
};

/// Subsystem selector for a bipartite partial trace.
enum class Subsystem { first = 1, second = 2 };

struct BipartiteDims {
  std::size_t d1;
  std::size_t d2;
  std::size_t total() const { return d1 * d2; }
};

/// Kronecker product, (a ⊗ b)[i*rb + k, j*cb + l] = a[i,j] b[k,l].
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b);
PureState tensor_product(const PureState& a, const PureState& b);

/// Traces out the factor that is not `keep`. Composite index is k1*D2 + k2.
ComplexMatrix partial_trace(const ComplexMatrix& m, BipartiteDims dims,
                            Subsystem keep);

struct EigenDecomposition {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // columns
};

double hermiticity_defect(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kTol.hermitian);
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Eigen-decomposition of a Hermitian matrix. The input is symmetrized first;
/// throws if it is further than `tol` from Hermitian. No guarantee is made
/// about the eigenvector choice inside a degenerate eigenspace.
EigenDecomposition hermitian_eig(const ComplexMatrix& m,
                                 double tol = kTol.hermitian);

/// Principal square root of a PSD matrix. Eigenvalues in [-clip_tol, 0) are
/// treated as zero; anything more negative throws.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, double clip_tol = kTol.psd_clip);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix identity(std::size_t d);
/// |k><k| in dimension d.
ComplexMatrix basis_projector(std::size_t d, std::size_t k);
PureState basis_state(std::size_t d, std::size_t k);

/// Haar-random pure state: normalized vector of i.i.d. standard complex
/// Gaussians.
PureState random_pure_state(std::size_t dim, std::mt19937_64& rng);

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix
/// with the phases of R's diagonal divided out.
ComplexMatrix random_unitary(std::size_t dim, std::mt19937_64& rng);

/// Matrix with i.i.d. standard complex Gaussian entries.
ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols,
                             std::mt19937_64& rng);
ComplexMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng);

/// Deterministic independent stream for a task identified by integer words.
std::mt19937_64 derive_stream(std::uint64_t master_seed,
                              std::initializer_list<std::uint64_t> task);
std::mt19937_64 derive_stream(std::uint64_t master_seed, const std::string& key);

}  // namespace seqpt
