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
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqpt/channels.hpp"
#include "seqpt/estimator.hpp"
#include "seqpt/json_io.hpp"

namespace seqpt {

enum class SettingRole { f_tensor, f1_marginal, f2_marginal, qst, sqpt };

std::string to_string(SettingRole role);
SettingRole setting_role_from_string(const std::string& s);

/// Where a setting came from. Unused fields stay at kNoIndex.
struct SettingIndices {
  static constexpr std::int64_t kNoIndex = -1;
  std::int64_t coefficient_i = kNoIndex;
  std::int64_t coefficient_j = kNoIndex;
  std::int64_t element = kNoIndex;
  std::int64_t term = kNoIndex;
  std::int64_t projector = kNoIndex;
  bool operator==(const SettingIndices&) const = default;
};

/// One (preparation, projector) pair: prepare |φA>, send it through the
/// channel, project onto |φB>.
struct Setting {
  PureState preparation;
  PureState projector;
  SettingRole tag;
  std::string prep_key;
  std::string proj_key;
  SettingIndices indices;

  std::string key() const { return prep_key + "|" + proj_key; }
};

struct Record {
  Setting setting;
  std::uint64_t shots = 0;
  std::uint64_t successes = 0;
  double probability = 0.0;  // stored only in exact mode

  double rate(bool exact) const;
};

/// Simulated measurement data. In exact mode the true probabilities are
/// stored in place of counts.
struct MeasurementDataset {
  static constexpr int kSchemaVersion = 1;
  Json channel_spec;
  std::uint64_t seed = 0;
  bool exact = false;
  std::vector<Record> records;
};

/// p = <φB| E(|φA><φA|) |φB>, clipped to [0, 1]. Throws if p falls outside
/// [-1e-9, 1 + 1e-9].
double survival_probability(const Superoperator& channel, const Setting& s);
double survival_probability(const KrausChannel& channel, const Setting& s);

/// Binomial(shots, p) draw.
std::uint64_t simulate_counts(double p, std::uint64_t shots, std::mt19937_64& rng);

/// Settings for every element of the plan: for each preparation term, the
/// survival projector (tag f_tensor), the D2 projectors |ψ1>⊗|φ> (f1) and the
/// D1 projectors |φ>⊗|ψ2> (f2). The survival pair recurs in both marginal
/// lists; use deduplicate() to collapse repeats.
std::vector<Setting> settings_for(const SamplePlan& plan, const SeqptContext& ctx);

/// Keeps the first occurrence of every (prep_key, proj_key) pair.
std::vector<Setting> deduplicate(const std::vector<Setting>& settings);

/// Measures every unique setting with `shots` trials each. With exact = true
/// the true probability is recorded instead of counts. Each setting draws
/// from a stream derived from (seed, setting key), so counts do not depend on
/// list order.
MeasurementDataset run_experiment(const Superoperator& channel, const Json& channel_spec,
                                  const std::vector<Setting>& settings,
                                  std::uint64_t shots, std::uint64_t seed,
                                  bool exact = false);

/// JSON-lines: a header line, then one record per line.
void store_dataset(const MeasurementDataset& ds, const std::filesystem::path& path);
MeasurementDataset load_dataset(const std::filesystem::path& path);
std::string serialize_dataset(const MeasurementDataset& ds);
MeasurementDataset parse_dataset(const std::string& text);

bool operator==(const Record& a, const Record& b);
bool operator==(const MeasurementDataset& a, const MeasurementDataset& b);

/// Probability source backed by measured rates.
class DatasetSource : public ProbabilitySource {
 public:
  explicit DatasetSource(const MeasurementDataset& ds);

  void probabilities(const Preparation& prep, std::span<const std::size_t> projectors,
                     std::span<double> out) const override;

  /// Keys of `settings` that have no record.
  std::vector<std::string> missing(const std::vector<Setting>& settings) const;

 private:
  std::unordered_map<std::string, double> rates_;
};

/// Throws unless every setting needed by `plans` is in the dataset.
void audit_completeness(const DatasetSource& source,
                        const std::vector<SamplePlan>& plans, const SeqptContext& ctx);

}  // namespace seqpt
