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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seqpt/estimator.hpp"
#include "seqpt/json_io.hpp"

namespace seqpt {

/// Validation failure naming the offending config field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error("config." + field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class CoefficientSelection { full, support, explicit_list };

struct NamedChannel {
  std::string label;
  Json spec;
};

/// Everything an experiment run depends on. Parsed from JSON, validated
/// before any computation and echoed into every output.
struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  std::size_t d1 = 2;
  std::size_t d2 = 3;
  Json channel = {{"type", "phase_slab"}, {"dim", 6}, {"phase", kSlabPhase},
                  {"support", {0, 1}}};
  /// Declared target for fidelities; defaults to `channel`.
  Json target;
  /// Extra channels the efficiency curve compares against.
  std::vector<NamedChannel> comparisons{
      {"identity", {{"type", "identity"}, {"dim", 6}}},
      {"target_shifted",
       {{"type", "phase_slab"}, {"dim", 6}, {"phase", kSlabPhase + 1.0}, {"support", {0, 1}}}}};

  bool exact = false;  // mode "noiseless"
  std::uint64_t shots = 10000;

  CoefficientSelection selection = CoefficientSelection::full;
  std::vector<CoefficientIndex> coefficients;  // explicit_list only
  std::size_t sample_size = 0;                 // 0 means the whole design

  std::vector<std::size_t> m_grid{1, 2, 3, 5, 8, 10, 15, 20, 25, 30, 40, 50, 60, 72};
  std::size_t repetitions = 20;
  std::size_t states = 250;
  bool sqpt = true;
  double cptp_tol = 1e-8;
  std::size_t cptp_max_iter = 10000;

  std::uint64_t seed = 42;
  std::string out_dir = "out";
  std::string report;   // qst-histogram input; default <out_dir>/reconstruction.json
  std::string dataset;  // optional dataset output path for reconstruct

  static ExperimentConfig from_json(const Json& j);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Applies "noiseless" or "shots:<N>".
  void set_mode(const std::string& mode);
  std::string mode() const;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
  Json to_json() const;
  /// Digest of to_json() without the output locations.
  std::string hash() const;

  std::size_t design_size() const { return (d1 + 1) * d1 * (d2 + 1) * d2; }
  Json resolved_target() const { return target.is_null() ? channel : target; }
};

/// Result of one command: files written and whether every audit passed.
struct CommandResult {
  std::vector<std::filesystem::path> files;
  bool audits_passed = true;
  std::vector<std::string> failed_audits;
};

/// Simulates the experiment, reconstructs χ, projects onto CPTP maps and
/// compares with the declared target. Writes reconstruction.json,
/// chi_abs.csv and fidelity.csv.
CommandResult cmd_reconstruct(const ExperimentConfig& config);

/// Sampling-efficiency sweep over the target's χ support. Writes
/// efficiency.csv and efficiency_points.csv.
CommandResult cmd_efficiency_curve(const ExperimentConfig& config);

/// Random-state cross-check of a prior reconstruction report. Writes
/// qst_histogram.csv and qst_summary.csv.
CommandResult cmd_qst_histogram(const ExperimentConfig& config);

/// Deterministic decimal rendering used in every CSV.
std::string format_number(double x);

}  // namespace seqpt
