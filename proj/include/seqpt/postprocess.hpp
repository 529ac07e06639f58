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
#include <memory>
#include <span>
#include <vector>

#include "seqpt/algebra.hpp"
#include "seqpt/channels.hpp"
#include "seqpt/designs.hpp"
#include "seqpt/estimator.hpp"
#include "seqpt/json_io.hpp"
#include "seqpt/simlab.hpp"

namespace seqpt {

// ---------------------------------------------------------------------------
// CPTP projection
// ---------------------------------------------------------------------------

struct ProjectionReport {
  ChoiMatrix input;
  ChoiMatrix output;
  std::size_t iterations = 0;
  double tp_residual = 0.0;
  double min_eigenvalue = 0.0;
  bool converged = false;
};

/// Nearest CPTP Choi matrix in Frobenius norm, by Dykstra's alternating
/// projections between the PSD cone and the trace-preserving affine set
///   C -> C + (1/d) I ⊗ (I/d − Tr_out C).
/// Stops when the PSD iterate is trace preserving within `tol` and moved by at
/// most `tol` in the last sweep. The output is the PSD iterate, so it is
/// positive semidefinite up to rounding. The input is symmetrized first.
ProjectionReport cptp_project(const ChoiMatrix& choi, double tol = 1e-8,
                              std::size_t max_iter = 10000);

/// Projection onto {C : Tr_out C = I/d}.
ComplexMatrix project_trace_preserving(const ComplexMatrix& c, std::size_t d);
/// Eigenvalue clipping onto the PSD cone.
ComplexMatrix project_psd(const ComplexMatrix& c);

Json to_json(const ProjectionReport& report);

/// E(ρ) read off a Choi matrix: E(ρ)[a,b] = d Σ_jk ρ[j,k] J[a*d + j, b*d + k].
ComplexMatrix apply_choi(const ChoiMatrix& choi, const ComplexMatrix& rho);

// ---------------------------------------------------------------------------
// Fidelities
// ---------------------------------------------------------------------------

/// F = Tr √(√ρ1 ρ2 √ρ1), evaluated as the trace norm of √ρ1 √ρ2.
/// Inputs must be PSD and unit trace within `tol`; small violations are
/// clipped and renormalized (logged to std::clog when SEQPT_VERBOSE is set).
double state_fidelity(const ComplexMatrix& rho1, const ComplexMatrix& rho2,
                      double tol = 1e-8);

/// State fidelity of the trace-normalized Choi matrices.
double process_fidelity(const ChoiMatrix& a, const ChoiMatrix& b);
/// Throws if the two χ matrices use differently labelled bases.
double process_fidelity(const ChiMatrix& a, const ChiMatrix& b);

// ---------------------------------------------------------------------------
// Baseline tomography
// ---------------------------------------------------------------------------

/// Least-squares state tomography over a fixed list of rank-one projectors.
/// ρ is parametrized by d^2 real numbers (diagonal, then Re/Im of the upper
/// triangle); the fit is clipped to PSD and renormalized.
class QstSolver {
 public:
  explicit QstSolver(std::vector<PureState> projectors);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return projectors_.size(); }
  const std::vector<PureState>& projectors() const { return projectors_; }

  /// Unconstrained least-squares Hermitian estimate.
  ComplexMatrix fit_raw(std::span<const double> probabilities) const;
  /// fit_raw followed by PSD clipping and trace normalization.
  ComplexMatrix fit(std::span<const double> probabilities) const;

 private:
  std::size_t dim_;
  std::vector<PureState> projectors_;
  Eigen::MatrixXd design_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

/// Projectors of every product-MUB element, in design order.
std::vector<PureState> design_projectors(const ProductDesign& design);

ComplexMatrix qst_ls(const std::vector<PureState>& projectors,
                     std::span<const double> probabilities);

/// The d^2 inputs |j>, then (|j>+|k>)/√2 and (|j>+i|k>)/√2 for each j < k.
std::vector<PureState> sqpt_inputs(std::size_t d);

/// χ from the channel outputs on sqpt_inputs(d), in that order. Solves
/// U χ U^† = Σ_jk E(|j><k|) ⊗ |j><k| by least squares.
ChiMatrix standard_qpt(const std::vector<ComplexMatrix>& outputs,
                       std::shared_ptr<const OperatorBasis> basis);
/// Noiseless standard QPT of a channel.
ChiMatrix standard_qpt(const Superoperator& channel,
                       std::shared_ptr<const OperatorBasis> basis);

/// Settings for standard QPT: every input of sqpt_inputs(d) against every
/// projector of the design, tagged sqpt. Preparation keys are "s<k>".
std::vector<Setting> sqpt_settings(const ProductDesign& design);

/// Standard QPT from measured data: each output is reconstructed with `qst`.
ChiMatrix standard_qpt(const MeasurementDataset& ds, const ProductDesign& design,
                       const QstSolver& qst, std::shared_ptr<const OperatorBasis> basis);

}  // namespace seqpt
