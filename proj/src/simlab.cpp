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

#include "seqpt/simlab.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace seqpt {

namespace {

constexpr std::pair<SettingRole, const char*> kRoleNames[] = {
    {SettingRole::f_tensor, "f_tensor"},
    {SettingRole::f1_marginal, "f1-marginal"},
    {SettingRole::f2_marginal, "f2-marginal"},
    {SettingRole::qst, "qst"},
    {SettingRole::sqpt, "sqpt"},
};

double clip_probability(double p) {
  if (p < -kTol.probability || p > 1.0 + kTol.probability) {
    throw Error("survival probability " + std::to_string(p) +
                " outside [0, 1]; the channel is not physical");
  }
  return std::clamp(p, 0.0, 1.0);
}

double expectation(const ComplexMatrix& evolved, const PureState& proj) {
  const ComplexVector& f = proj.amplitudes();
  return std::real(f.dot(evolved * f));
}

Json indices_to_json(const SettingIndices& idx) {
  return {{"i", idx.coefficient_i},
          {"j", idx.coefficient_j},
          {"element", idx.element},
          {"term", idx.term},
          {"projector", idx.projector}};
}

SettingIndices indices_from_json(const Json& j) {
  return {j.at("i").get<std::int64_t>(), j.at("j").get<std::int64_t>(),
          j.at("element").get<std::int64_t>(), j.at("term").get<std::int64_t>(),
          j.at("projector").get<std::int64_t>()};
}

bool same_bits(const PureState& a, const PureState& b) {
  return a.dim() == b.dim() && a.amplitudes() == b.amplitudes();
}

}  // namespace

std::string to_string(SettingRole role) {
  for (const auto& [r, name] : kRoleNames)
    if (r == role) return name;
  return "unknown";
}

SettingRole setting_role_from_string(const std::string& s) {
  for (const auto& [r, name] : kRoleNames)
    if (s == name) return r;
  throw Error("unknown setting tag \"" + s + "\"");
}

double Record::rate(bool exact) const {
  if (exact) return probability;
  if (shots == 0) throw Error("record has zero shots");
  return static_cast<double>(successes) / static_cast<double>(shots);
}

double survival_probability(const Superoperator& channel, const Setting& s) {
  if (s.preparation.dim() != s.projector.dim() || s.preparation.dim() != channel.dim()) {
    throw DimensionError("survival_probability: setting and channel dimension differ");
  }
  return clip_probability(std::real(channel.expectation(s.preparation, s.projector)));
}

double survival_probability(const KrausChannel& channel, const Setting& s) {
  return survival_probability(channel.superoperator(), s);
}

std::uint64_t simulate_counts(double p, std::uint64_t shots, std::mt19937_64& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error("simulate_counts: p outside [0, 1]");
  if (shots == 0 || p == 0.0) return 0;
  if (p == 1.0) return shots;
  std::binomial_distribution<std::uint64_t> draw(shots, p);
  return draw(rng);
}

std::vector<Setting> settings_for(const SamplePlan& plan, const SeqptContext& ctx) {
  const auto& design = ctx.design();
  std::vector<Setting> out;
  for (std::size_t e : plan.elements) {
    const auto set = projector_set(design, e);
    const auto preps = preparations(ctx, plan.coefficient, e);
    for (std::size_t t = 0; t < preps.size(); ++t) {
      const auto& prep = preps[t];
      auto emit = [&](std::size_t proj, SettingRole role) {
        SettingIndices idx;
        idx.coefficient_i = static_cast<std::int64_t>(plan.coefficient.i);
        idx.coefficient_j = static_cast<std::int64_t>(plan.coefficient.j);
        idx.element = static_cast<std::int64_t>(e);
        idx.term = static_cast<std::int64_t>(t);
        idx.projector = static_cast<std::int64_t>(proj);
        out.push_back({prep.state, design.state(proj), role, prep.key, design_key(proj), idx});
      };
      emit(set.survival, SettingRole::f_tensor);
      for (std::size_t p : set.marginal1) emit(p, SettingRole::f1_marginal);
      for (std::size_t p : set.marginal2) emit(p, SettingRole::f2_marginal);
    }
  }
  return out;
}

std::vector<Setting> deduplicate(const std::vector<Setting>& settings) {
  std::unordered_set<std::string> seen;
  std::vector<Setting> out;
  for (const auto& s : settings)
    if (seen.insert(s.key()).second) out.push_back(s);
  return out;
}

MeasurementDataset run_experiment(const Superoperator& channel, const Json& channel_spec,
                                  const std::vector<Setting>& settings,
                                  std::uint64_t shots, std::uint64_t seed, bool exact) {
  if (!exact && shots == 0) throw Error("run_experiment: shots must be >= 1");
  MeasurementDataset ds;
  ds.channel_spec = channel_spec;
  ds.seed = seed;
  ds.exact = exact;

  std::string cached_key;
  ComplexMatrix evolved;
  for (const auto& s : deduplicate(settings)) {
    if (s.preparation.dim() != channel.dim() || s.projector.dim() != channel.dim()) {
      throw DimensionError("run_experiment: setting dimension differs from channel");
    }
    // Settings arrive grouped by preparation; reuse E(P) across its projectors.
    if (s.prep_key != cached_key || evolved.size() == 0) {
      evolved = channel.apply(s.preparation.projector());
      cached_key = s.prep_key;
    }
    const double p = clip_probability(expectation(evolved, s.projector));
    Record r{s, exact ? 0 : shots, 0, 0.0};
    if (exact) {
      r.probability = p;
    } else {
      auto rng = derive_stream(seed, s.key());
      r.successes = simulate_counts(p, shots, rng);
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

std::string serialize_dataset(const MeasurementDataset& ds) {
  std::ostringstream out;
  const Json header = {{"schema_version", MeasurementDataset::kSchemaVersion},
                       {"kind", "seqpt_dataset"},
                       {"channel", ds.channel_spec},
                       {"seed", ds.seed},
                       {"exact", ds.exact},
                       {"records", ds.records.size()}};
  out << header.dump() << '\n';
  for (const auto& r : ds.records) {
    Json line = {{"tag", to_string(r.setting.tag)},
                 {"prep_key", r.setting.prep_key},
                 {"proj_key", r.setting.proj_key},
                 {"prep", to_json(r.setting.preparation.amplitudes())},
                 {"proj", to_json(r.setting.projector.amplitudes())},
                 {"shots", r.shots},
                 {"successes", r.successes},
                 {"indices", indices_to_json(r.setting.indices)}};
    if (ds.exact) line["probability"] = r.probability;
    out << line.dump() << '\n';
  }
  return out.str();
}

MeasurementDataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("dataset: empty input");
  const Json header = Json::parse(line);
  if (header.value("kind", std::string{}) != "seqpt_dataset") {
    throw Error("dataset: header is not a seqpt dataset");
  }
  const int version = header.at("schema_version").get<int>();
  if (version != MeasurementDataset::kSchemaVersion) {
    throw Error("dataset: unsupported schema version " + std::to_string(version));
  }
  MeasurementDataset ds;
  ds.channel_spec = header.at("channel");
  ds.seed = header.at("seed").get<std::uint64_t>();
  ds.exact = header.at("exact").get<bool>();
  const auto expected = header.at("records").get<std::size_t>();
  ds.records.reserve(expected);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    Record r;
    // Amplitudes are stored exactly as written; no renormalization.
    r.setting.preparation = PureState::from_normalized(vector_from_json(j.at("prep")), 1e-9);
    r.setting.projector = PureState::from_normalized(vector_from_json(j.at("proj")), 1e-9);
    r.setting.tag = setting_role_from_string(j.at("tag").get<std::string>());
    r.setting.prep_key = j.at("prep_key").get<std::string>();
    r.setting.proj_key = j.at("proj_key").get<std::string>();
    r.setting.indices = indices_from_json(j.at("indices"));
    r.shots = j.at("shots").get<std::uint64_t>();
    r.successes = j.at("successes").get<std::uint64_t>();
    if (r.successes > r.shots) throw Error("dataset: successes exceed shots");
    if (ds.exact) r.probability = j.at("probability").get<double>();
    ds.records.push_back(std::move(r));
  }
  if (ds.records.size() != expected) {
    throw Error("dataset: header announces " + std::to_string(expected) +
                " records, found " + std::to_string(ds.records.size()));
  }
  return ds;
}

void store_dataset(const MeasurementDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << serialize_dataset(ds);
  if (!out) throw Error("write failed for " + path.string());
}

MeasurementDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset(buf.str());
  } catch (const std::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

bool operator==(const Record& a, const Record& b) {
  return a.shots == b.shots && a.successes == b.successes &&
         a.probability == b.probability && a.setting.tag == b.setting.tag &&
         a.setting.prep_key == b.setting.prep_key &&
         a.setting.proj_key == b.setting.proj_key &&
         a.setting.indices == b.setting.indices &&
         same_bits(a.setting.preparation, b.setting.preparation) &&
         same_bits(a.setting.projector, b.setting.projector);
}

bool operator==(const MeasurementDataset& a, const MeasurementDataset& b) {
  return a.channel_spec == b.channel_spec && a.seed == b.seed && a.exact == b.exact &&
         a.records == b.records;
}

DatasetSource::DatasetSource(const MeasurementDataset& ds) {
  rates_.reserve(ds.records.size());
  for (const auto& r : ds.records) rates_.emplace(r.setting.key(), r.rate(ds.exact));
}

void DatasetSource::probabilities(const Preparation& prep,
                                  std::span<const std::size_t> projectors,
                                  std::span<double> out) const {
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    const auto key = prep.key + "|" + design_key(projectors[k]);
    const auto it = rates_.find(key);
    if (it == rates_.end()) throw Error("dataset is missing required setting " + key);
    out[k] = it->second;
  }
}

std::vector<std::string> DatasetSource::missing(const std::vector<Setting>& settings) const {
  std::vector<std::string> out;
  for (const auto& s : settings)
    if (!rates_.contains(s.key())) out.push_back(s.key());
  return out;
}

void audit_completeness(const DatasetSource& source, const std::vector<SamplePlan>& plans,
                        const SeqptContext& ctx) {
  for (const auto& plan : plans) {
    const auto gaps = source.missing(settings_for(plan, ctx));
    if (!gaps.empty()) {
      throw Error("dataset is missing " + std::to_string(gaps.size()) +
                  " settings for coefficient (" + std::to_string(plan.coefficient.i) + ", " +
                  std::to_string(plan.coefficient.j) + "), first: " + gaps.front());
    }
  }
}

}  // namespace seqpt
