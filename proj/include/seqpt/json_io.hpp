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

#include <string>

#include <json.hpp>

#include "seqpt/algebra.hpp"
#include "seqpt/channels.hpp"
#include "seqpt/designs.hpp"

namespace seqpt {

using Json = nlohmann::json;

// Complex numbers are [re, im] pairs. Matrices are arrays of rows.
Json to_json(Complex z);
Json to_json(const ComplexVector& v);
Json to_json(const ComplexMatrix& m);
Complex complex_from_json(const Json& j);
ComplexVector vector_from_json(const Json& j);
ComplexMatrix matrix_from_json(const Json& j);

Json to_json(const OperatorBasis& basis);
Json to_json(const MubDesign& design);
Json to_json(const ChiMatrix& chi);
Json to_json(const ChoiMatrix& choi);

/// Builds a channel from a spec such as
///   {"type": "phase_slab", "dim": 6, "phase": 5.42, "support": [0, 1]}
///   {"type": "depolarizing", "dim": 6, "p": 0.3}
///   {"type": "random_unitary", "dim": 6, "seed": 7}
///   {"type": "identity", "dim": 6}
///   {"type": "kraus", "dim": 2, "kraus": [<matrix>, ...]}
KrausChannel channel_from_spec(const Json& spec);

/// FNV-1a 64-bit digest rendered as 16 hex digits. Stable across platforms.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace seqpt
