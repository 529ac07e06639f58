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

#include "seqpt/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>

namespace seqpt {

namespace {

// Eigenvalues below this (relative to the trace) are rounding noise; taking
// their square root would inject errors of order 1e-8.
constexpr double kSqrtFloor = 1e-13;

bool verbose() { return std::getenv("SEQPT_VERBOSE") != nullptr; }

ComplexMatrix from_eig(const EigenDecomposition& e, const RealVector& values) {
  return e.eigenvectors * values.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint();
}

// Clip-and-renormalize policy shared by both fidelity arguments. Returns the
// square root of the sanitized density matrix.
ComplexMatrix sanitized_sqrt(const ComplexMatrix& rho, double tol, const char* which) {
  const auto e = hermitian_eig(rho, tol);
  const double tr = e.eigenvalues.sum();
  if (e.eigenvalues(0) < -tol) {
    throw Error(std::string("state_fidelity: ") + which + " has eigenvalue " +
                std::to_string(e.eigenvalues(0)) + " below -" + std::to_string(tol));
  }
  if (std::abs(tr - 1.0) > tol) {
    throw Error(std::string("state_fidelity: ") + which + " has trace " +
                std::to_string(tr));
  }
  RealVector clipped = e.eigenvalues.cwiseMax(0.0);
  const double norm = clipped.sum();
  if (verbose() && (e.eigenvalues(0) < 0.0 || std::abs(tr - 1.0) > 1e-14)) {
    std::clog << "state_fidelity: " << which << " clipped (min eig " << e.eigenvalues(0)
              << ", trace " << tr << ")\n";
  }
  clipped /= norm;
  for (Eigen::Index k = 0; k < clipped.size(); ++k)
    clipped(k) = clipped(k) < kSqrtFloor ? 0.0 : std::sqrt(clipped(k));
  return from_eig(e, clipped);
}

}  // namespace

// ---------------------------------------------------------------------------

ComplexMatrix project_trace_preserving(const ComplexMatrix& c, std::size_t d) {
  const ComplexMatrix marginal = partial_trace(c, {d, d}, Subsystem::second);
  const ComplexMatrix correction =
      (identity(d) / static_cast<double>(d) - marginal) / static_cast<double>(d);
  return c + tensor_product(identity(d), correction);
}

ComplexMatrix project_psd(const ComplexMatrix& c) {
  const auto e = hermitian_eig(c, 1e-6);
  return from_eig(e, e.eigenvalues.cwiseMax(0.0));
}

ProjectionReport cptp_project(const ChoiMatrix& choi, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw Error("cptp_project: tol must be positive");
  if (max_iter == 0) throw Error("cptp_project: max_iter must be >= 1");
  const std::size_t d = choi.dim;
  const auto n = static_cast<Eigen::Index>(d * d);
  if (choi.entries.rows() != n || choi.entries.cols() != n) {
    throw DimensionError("cptp_project: Choi matrix must be d^2 x d^2");
  }

  ProjectionReport report{choi, choi};
  ComplexMatrix x = hermitian_part(choi.entries);
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  ComplexMatrix q = ComplexMatrix::Zero(n, n);
  ComplexMatrix y_prev = x;
  ComplexMatrix y;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    y = project_psd(x + p);
    p = x + p - y;
    const ComplexMatrix x_next = project_trace_preserving(y + q, d);
    q = y + q - x_next;
    x = x_next;

    const double step = (y - y_prev).norm();
    y_prev = y;
    report.iterations = k;
    report.tp_residual = ChoiMatrix{d, y}.tp_residual();
    if (report.tp_residual <= tol && step <= tol) {
      report.converged = true;
      break;
    }
  }
  report.output = ChoiMatrix{d, hermitian_part(y)};
  report.min_eigenvalue = hermitian_eig(report.output.entries).eigenvalues(0);
  return report;
}

Json to_json(const ProjectionReport& report) {
  return {{"iterations", report.iterations},
          {"tp_residual", report.tp_residual},
          {"min_eigenvalue", report.min_eigenvalue},
          {"converged", report.converged},
          {"input_min_eigenvalue", report.input.min_eigenvalue()},
          {"input_tp_residual", report.input.tp_residual()},
          {"output", to_json(report.output)}};
}

ComplexMatrix apply_choi(const ChoiMatrix& choi, const ComplexMatrix& rho) {
  const auto d = static_cast<Eigen::Index>(choi.dim);
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("apply_choi: input shape");
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k)
          out(a, b) += rho(j, k) * choi.entries(a * d + j, b * d + k);
  return out * static_cast<double>(d);
}

// ---------------------------------------------------------------------------

double state_fidelity(const ComplexMatrix& rho1, const ComplexMatrix& rho2, double tol) {
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols() || rho1.rows() != rho1.cols()) {
    throw DimensionError("state_fidelity: shape mismatch");
  }
  const ComplexMatrix s1 = sanitized_sqrt(rho1, tol, "first argument");
  const ComplexMatrix s2 = sanitized_sqrt(rho2, tol, "second argument");
  const Eigen::MatrixXcd prod = s1 * s2;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(prod);
  return svd.singularValues().sum();
}

double process_fidelity(const ChoiMatrix& a, const ChoiMatrix& b) {
  if (a.dim != b.dim) throw DimensionError("process_fidelity: dimension mismatch");
  const Complex ta = a.entries.trace(), tb = b.entries.trace();
  if (std::abs(ta) < 1e-12 || std::abs(tb) < 1e-12) {
    throw Error("process_fidelity: Choi matrix with zero trace");
  }
  return state_fidelity(ComplexMatrix(a.entries / ta.real()),
                        ComplexMatrix(b.entries / tb.real()));
}

double process_fidelity(const ChiMatrix& a, const ChiMatrix& b) {
  if (a.basis().label() != b.basis().label()) {
    throw Error("process_fidelity: basis mismatch (\"" + a.basis().label() + "\" vs \"" +
                b.basis().label() + "\")");
  }
  return process_fidelity(choi_from_chi(a), choi_from_chi(b));
}

// ---------------------------------------------------------------------------

QstSolver::QstSolver(std::vector<PureState> projectors) : projectors_(std::move(projectors)) {
  if (projectors_.empty()) throw Error("QstSolver: no projectors");
  dim_ = projectors_.front().dim();
  const auto d = static_cast<Eigen::Index>(dim_);
  const auto params = d * d;
  design_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(projectors_.size()), params);
  for (std::size_t r = 0; r < projectors_.size(); ++r) {
    const auto& x = projectors_[r];
    if (x.dim() != dim_) throw DimensionError("QstSolver: projector dimensions differ");
    const auto row = static_cast<Eigen::Index>(r);
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < d; ++j) design_(row, col++) = std::norm(x.amplitudes()(j));
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = j + 1; k < d; ++k) {
        // <x|ρ|x> picks up 2 Re(conj(x_j) ρ_jk x_k).
        const Complex c = std::conj(x.amplitudes()(j)) * x.amplitudes()(k);
        design_(row, col++) = 2.0 * c.real();
        design_(row, col++) = -2.0 * c.imag();
      }
    }
  }
  qr_.compute(design_);
  if (qr_.rank() < params) {
    throw Error("QstSolver: " + std::to_string(projectors_.size()) +
                " projectors do not identify a state (rank " + std::to_string(qr_.rank()) +
                " < " + std::to_string(params) + ")");
  }
}

ComplexMatrix QstSolver::fit_raw(std::span<const double> probabilities) const {
  if (probabilities.size() != projectors_.size()) {
    throw DimensionError("QstSolver: expected " + std::to_string(projectors_.size()) +
                         " probabilities, got " + std::to_string(probabilities.size()));
  }
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(
      probabilities.data(), static_cast<Eigen::Index>(probabilities.size()));
  const Eigen::VectorXd theta = qr_.solve(b);
  const auto d = static_cast<Eigen::Index>(dim_);
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < d; ++j) rho(j, j) = theta(col++);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      rho(j, k) = Complex(theta(col), theta(col + 1));
      rho(k, j) = std::conj(rho(j, k));
      col += 2;
    }
  }
  return rho;
}

ComplexMatrix QstSolver::fit(std::span<const double> probabilities) const {
  const ComplexMatrix clipped = project_psd(fit_raw(probabilities));
  const double tr = clipped.trace().real();
  if (!(tr > 0.0)) throw Error("QstSolver: fitted state has no positive part");
  return clipped / tr;
}

std::vector<PureState> design_projectors(const ProductDesign& design) {
  std::vector<PureState> out;
  out.reserve(design.size());
  for (std::size_t e = 0; e < design.size(); ++e) out.push_back(design.state(e));
  return out;
}

ComplexMatrix qst_ls(const std::vector<PureState>& projectors,
                     std::span<const double> probabilities) {
  return QstSolver(projectors).fit(probabilities);
}

// ---------------------------------------------------------------------------

std::vector<PureState> sqpt_inputs(std::size_t d) {
  std::vector<PureState> out;
  out.reserve(d * d);
  for (std::size_t j = 0; j < d; ++j) out.push_back(basis_state(d, j));
  const double h = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j + 1; k < d; ++k) {
      ComplexVector plus = ComplexVector::Zero(static_cast<Eigen::Index>(d));
      plus(static_cast<Eigen::Index>(j)) = h;
      plus(static_cast<Eigen::Index>(k)) = h;
      ComplexVector phased = plus;
      phased(static_cast<Eigen::Index>(k)) = Complex(0.0, h);
      out.push_back(PureState::from_normalized(plus));
      out.push_back(PureState::from_normalized(phased));
    }
  }
  return out;
}

ChiMatrix standard_qpt(const std::vector<ComplexMatrix>& outputs,
                       std::shared_ptr<const OperatorBasis> basis) {
  const std::size_t d = basis->dim();
  if (outputs.size() != d * d) {
    throw Error("standard_qpt: rank-deficient system, " + std::to_string(outputs.size()) +
                " outputs for " + std::to_string(d * d) + " unknown input directions");
  }
  const auto di = static_cast<Eigen::Index>(d);
  for (const auto& o : outputs) {
    if (o.rows() != di || o.cols() != di) throw DimensionError("standard_qpt: output shape");
  }

  // E(|j><k|) from the outputs on |j>, |k>, (|j>+|k>)/√2 and (|j>+i|k>)/√2.
  std::vector<ComplexMatrix> unit(d * d);
  for (std::size_t j = 0; j < d; ++j) unit[j * d + j] = outputs[j];
  std::size_t slot = d;
  const Complex half_1i(0.5, 0.5);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j + 1; k < d; ++k) {
      const ComplexMatrix& plus = outputs[slot++];
      const ComplexMatrix& phased = outputs[slot++];
      const ComplexMatrix jk = plus + Complex(0.0, 1.0) * phased -
                               half_1i * (outputs[j] + outputs[k]);
      unit[j * d + k] = jk;
      unit[k * d + j] = jk.adjoint();
    }
  }

  ComplexMatrix lambda = ComplexMatrix::Zero(di * di, di * di);
  for (Eigen::Index j = 0; j < di; ++j)
    for (Eigen::Index k = 0; k < di; ++k)
      for (Eigen::Index a = 0; a < di; ++a)
        for (Eigen::Index b = 0; b < di; ++b)
          lambda(a * di + j, b * di + k) = unit[static_cast<std::size_t>(j * di + k)](a, b);

  const Eigen::MatrixXcd u = basis->column_matrix();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(u);
  if (qr.rank() < u.cols()) {
    throw Error("standard_qpt: rank-deficient operator basis (rank " +
                std::to_string(qr.rank()) + ")");
  }
  const Eigen::MatrixXcd x = qr.solve(Eigen::MatrixXcd(lambda));
  const Eigen::MatrixXcd y = qr.solve(Eigen::MatrixXcd(x.adjoint()));
  return ChiMatrix(std::move(basis), hermitian_part(ComplexMatrix(y.adjoint())));
}

ChiMatrix standard_qpt(const Superoperator& channel,
                       std::shared_ptr<const OperatorBasis> basis) {
  if (channel.dim() != basis->dim()) throw DimensionError("standard_qpt: basis dimension");
  std::vector<ComplexMatrix> outputs;
  for (const auto& s : sqpt_inputs(channel.dim())) outputs.push_back(channel.apply(s.projector()));
  return standard_qpt(outputs, std::move(basis));
}

std::vector<Setting> sqpt_settings(const ProductDesign& design) {
  const auto inputs = sqpt_inputs(design.dims().total());
  std::vector<Setting> out;
  out.reserve(inputs.size() * design.size());
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t e = 0; e < design.size(); ++e) {
      SettingIndices idx;
      idx.term = static_cast<std::int64_t>(k);
      idx.projector = static_cast<std::int64_t>(e);
      out.push_back({inputs[k], design.state(e), SettingRole::sqpt, "s" + std::to_string(k),
                     design_key(e), idx});
    }
  }
  return out;
}

ChiMatrix standard_qpt(const MeasurementDataset& ds, const ProductDesign& design,
                       const QstSolver& qst, std::shared_ptr<const OperatorBasis> basis) {
  if (qst.size() != design.size()) {
    throw Error("standard_qpt: QST solver does not match the design projectors");
  }
  const DatasetSource source(ds);
  const std::size_t d = design.dims().total();
  std::vector<std::size_t> projectors(design.size());
  for (std::size_t e = 0; e < projectors.size(); ++e) projectors[e] = e;
  std::vector<double> probs(design.size());
  std::vector<ComplexMatrix> outputs;
  const auto inputs = sqpt_inputs(d);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Preparation prep{"s" + std::to_string(k), Complex(1.0), inputs[k], TermRole::single};
    source.probabilities(prep, projectors, probs);
    outputs.push_back(qst.fit(probs));
  }
  return standard_qpt(outputs, std::move(basis));
}

}  // namespace seqpt
