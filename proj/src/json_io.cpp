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

#include "seqpt/json_io.hpp"

#include <cstdint>
#include <cstdio>

namespace seqpt {

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(to_json(v(k)));
  return out;
}

Json to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error("expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error("expected an array of complex pairs");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k]);
  return v;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error("expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error("ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Json to_json(const OperatorBasis& basis) {
  Json elements = Json::array();
  for (const auto& e : basis.elements()) elements.push_back(to_json(e));
  return {{"kind", "operator_basis"},
          {"label", basis.label()},
          {"dim", basis.dim()},
          {"elements", std::move(elements)}};
}

Json to_json(const MubDesign& design) {
  Json bases = Json::array();
  for (std::size_t j = 0; j < design.basis_count(); ++j) {
    Json states = Json::array();
    for (const auto& s : design.basis(j)) states.push_back(to_json(s.amplitudes()));
    bases.push_back(std::move(states));
  }
  return {{"kind", "mub_design"}, {"dim", design.dim()}, {"bases", std::move(bases)}};
}

Json to_json(const ChiMatrix& chi) {
  return {{"kind", "chi"},
          {"basis", chi.basis().label()},
          {"dim", chi.dim()},
          {"entries", to_json(chi.entries())}};
}

Json to_json(const ChoiMatrix& choi) {
  return {{"kind", "choi"},
          {"dim", choi.dim},
          {"output_factor", "first"},
          {"entries", to_json(choi.entries)}};
}

KrausChannel channel_from_spec(const Json& spec) {
  if (!spec.is_object() || !spec.contains("type")) {
    throw Error("channel spec: object with a \"type\" field required");
  }
  const auto type = spec.at("type").get<std::string>();
  const auto dim = spec.value("dim", std::size_t{6});
  if (type == "identity") return identity_channel(dim);
  if (type == "phase_slab") {
    const auto support = spec.value("support", std::vector<std::size_t>{0, 1});
    return build_phase_slab(dim, spec.value("phase", kSlabPhase), support);
  }
  if (type == "depolarizing") {
    if (!spec.contains("p")) throw Error("channel spec: depolarizing requires \"p\"");
    return build_depolarizing(dim, spec.at("p").get<double>());
  }
  if (type == "random_unitary") {
    if (!spec.contains("seed")) throw Error("channel spec: random_unitary requires \"seed\"");
    auto rng = derive_stream(spec.at("seed").get<std::uint64_t>(), {0x52554eULL});
    return build_random_unitary(dim, rng);
  }
  if (type == "kraus") {
    std::vector<ComplexMatrix> ops;
    for (const auto& m : spec.at("kraus")) ops.push_back(matrix_from_json(m));
    return KrausChannel(dim, std::move(ops), spec.value("trace_preserving", true));
  }
  throw Error("channel spec: unknown type \"" + type + "\"");
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace seqpt
