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

#include "seqpt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "seqpt/parallel.hpp"
#include "seqpt/postprocess.hpp"
#include "seqpt/simlab.hpp"

namespace seqpt {

namespace {

constexpr const char* kEfficiencySchema = "seqpt-efficiency/1";
constexpr const char* kHistogramSchema = "seqpt-qst-histogram/1";
constexpr const char* kSummarySchema = "seqpt-qst-summary/1";
constexpr const char* kPointsSchema = "seqpt-efficiency-points/1";
constexpr const char* kChiCsvSchema = "seqpt-chi-abs/1";
constexpr const char* kFidelitySchema = "seqpt-fidelity/1";

// Stream tags keep the random draws of different stages apart.
constexpr std::uint64_t kTagData = 0x44415441;    // "DATA"
constexpr std::uint64_t kTagPlan = 0x504c414e;    // "PLAN"
constexpr std::uint64_t kTagSqpt = 0x53515054;    // "SQPT"
constexpr std::uint64_t kTagState = 0x53544154;   // "STAT"

std::uint64_t sub_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  return derive_stream(seed, tags)();
}

Json default_channel(std::size_t dim, double phase) {
  return {{"type", "phase_slab"}, {"dim", dim}, {"phase", phase}, {"support", {0, 1}}};
}

std::vector<NamedChannel> default_comparisons(std::size_t dim) {
  return {{"identity", {{"type", "identity"}, {"dim", dim}}},
          {"target_shifted", default_channel(dim, kSlabPhase + 1.0)}};
}

template <typename T>
T field(const Json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(name, std::string("wrong type (") + e.what() + ")");
  }
}

KrausChannel checked_channel(const Json& spec, std::size_t dim, const std::string& name) {
  try {
    KrausChannel ch = channel_from_spec(spec);
    if (ch.dim() != dim) {
      throw ConfigError(name, "channel dimension " + std::to_string(ch.dim()) +
                                  " differs from D1*D2 = " + std::to_string(dim));
    }
    return ch;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(name, e.what());
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

std::string csv_preamble(const char* schema, const ExperimentConfig& config) {
  std::ostringstream out;
  out << "# schema=" << schema << '\n'
      << "# config_hash=" << config.hash() << '\n'
      << "# seed=" << config.seed << '\n';
  return out.str();
}

Json coefficient_json(const ChiEstimate& e) {
  return {{"index", {e.coefficient.i, e.coefficient.j}},
          {"value", to_json(e.value)},
          {"std_error", e.std_error},
          {"M", e.samples},
          {"seed", e.seed}};
}

Json masked_chi_json(const ChiReconstruction& rec) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < rec.values.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < rec.values.cols(); ++c) {
      if (rec.estimated(r, c)) {
        row.push_back(to_json(rec.values(r, c)));
      } else {
        row.push_back(nullptr);
      }
    }
    rows.push_back(std::move(row));
  }
  return {{"kind", "chi"},
          {"basis", rec.basis->label()},
          {"dim", rec.basis->dim()},
          {"entries", std::move(rows)}};
}

std::vector<CoefficientIndex> select_coefficients(const ExperimentConfig& config,
                                                  const SeqptContext& ctx,
                                                  const KrausChannel& target) {
  switch (config.selection) {
    case CoefficientSelection::full:
      return all_coefficients(ctx.basis().size());
    case CoefficientSelection::support:
      return support_coefficients(chi_from_kraus(target, ctx.basis_ptr()));
    case CoefficientSelection::explicit_list:
      return config.coefficients;
  }
  return {};
}

std::vector<Setting> plan_settings(const std::vector<SamplePlan>& plans, const SeqptContext& ctx) {
  std::vector<Setting> out;
  for (const auto& plan : plans) {
    auto s = deduplicate(settings_for(plan, ctx));
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

ComplexMatrix normalized(const ComplexMatrix& rho) {
  return hermitian_part(rho) / rho.trace().real();
}

}  // namespace

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  static const std::set<std::string> known = {
      "schema_version", "dims", "channel", "target", "comparisons", "mode",
      "coefficients", "sample_size", "m_grid", "repetitions", "states", "sqpt",
      "cptp", "seed", "out_dir", "report", "dataset"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError(key, "unknown field");
  }

  ExperimentConfig c;
  if (j.contains("schema_version") && field<int>(j, "schema_version") != kSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version");
  }
  if (j.contains("dims")) {
    const auto dims = field<std::vector<std::size_t>>(j, "dims");
    if (dims.size() != 2) throw ConfigError("dims", "expected [D1, D2]");
    c.d1 = dims[0];
    c.d2 = dims[1];
  }
  c.channel = j.contains("channel") ? j.at("channel") : default_channel(c.d1 * c.d2, kSlabPhase);
  if (j.contains("target")) c.target = j.at("target");
  if (j.contains("comparisons")) {
    const auto& list = j.at("comparisons");
    if (!list.is_array()) throw ConfigError("comparisons", "expected an array");
    c.comparisons.clear();
    for (const auto& item : list) {
      if (!item.is_object() || !item.contains("label") || !item.contains("channel")) {
        throw ConfigError("comparisons", "entries need \"label\" and \"channel\"");
      }
      c.comparisons.push_back({item.at("label").get<std::string>(), item.at("channel")});
    }
  } else {
    c.comparisons = default_comparisons(c.d1 * c.d2);
  }
  if (j.contains("mode")) c.set_mode(field<std::string>(j, "mode"));
  if (j.contains("coefficients")) {
    const auto& sel = j.at("coefficients");
    if (sel.is_string()) {
      const auto s = sel.get<std::string>();
      if (s == "full") {
        c.selection = CoefficientSelection::full;
      } else if (s == "support") {
        c.selection = CoefficientSelection::support;
      } else {
        throw ConfigError("coefficients", "expected \"full\", \"support\" or a list of [i, j]");
      }
    } else if (sel.is_array()) {
      c.selection = CoefficientSelection::explicit_list;
      for (const auto& pair : sel) {
        if (!pair.is_array() || pair.size() != 2) {
          throw ConfigError("coefficients", "each entry must be [i, j]");
        }
        c.coefficients.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
      }
    } else {
      throw ConfigError("coefficients", "expected a string or an array");
    }
  }
  if (j.contains("sample_size")) c.sample_size = field<std::size_t>(j, "sample_size");
  if (j.contains("m_grid")) c.m_grid = field<std::vector<std::size_t>>(j, "m_grid");
  if (j.contains("repetitions")) c.repetitions = field<std::size_t>(j, "repetitions");
  if (j.contains("states")) c.states = field<std::size_t>(j, "states");
  if (j.contains("sqpt")) c.sqpt = field<bool>(j, "sqpt");
  if (j.contains("cptp")) {
    const auto& cp = j.at("cptp");
    if (!cp.is_object()) throw ConfigError("cptp", "expected an object");
    if (cp.contains("tol")) c.cptp_tol = field<double>(cp, "tol");
    if (cp.contains("max_iter")) c.cptp_max_iter = field<std::size_t>(cp, "max_iter");
  }
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("out_dir")) c.out_dir = field<std::string>(j, "out_dir");
  if (j.contains("report")) c.report = field<std::string>(j, "report");
  if (j.contains("dataset")) c.dataset = field<std::string>(j, "dataset");
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return from_json(j);
}

void ExperimentConfig::set_mode(const std::string& mode) {
  if (mode == "noiseless") {
    exact = true;
    return;
  }
  const std::string prefix = "shots:";
  if (mode.rfind(prefix, 0) == 0) {
    const std::string digits = mode.substr(prefix.size());
    std::size_t used = 0;
    unsigned long long n = 0;
    try {
      n = std::stoull(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != digits.size() || n == 0) {
      throw ConfigError("mode", "shot count must be a positive integer, got \"" + digits + "\"");
    }
    exact = false;
    shots = n;
    return;
  }
  throw ConfigError("mode", "expected \"noiseless\" or \"shots:<N>\", got \"" + mode + "\"");
}

std::string ExperimentConfig::mode() const {
  return exact ? "noiseless" : "shots:" + std::to_string(shots);
}

void ExperimentConfig::validate() const {
  for (auto [name, d] : {std::pair{"dims[0]", d1}, std::pair{"dims[1]", d2}}) {
    if (!is_prime(d)) {
      throw ConfigError(name, std::to_string(d) + " is not prime (prime-power factors "
                                                  "are not supported)");
    }
  }
  const std::size_t dim = d1 * d2;
  checked_channel(channel, dim, "channel");
  checked_channel(resolved_target(), dim, "target");
  std::set<std::string> labels{"target"};
  for (const auto& c : comparisons) {
    if (!labels.insert(c.label).second) {
      throw ConfigError("comparisons", "duplicate label \"" + c.label + "\"");
    }
    checked_channel(c.spec, dim, "comparisons." + c.label);
  }
  if (!exact && shots == 0) throw ConfigError("mode", "shots must be >= 1");
  const std::size_t n = dim * dim;
  for (const auto& c : coefficients) {
    if (c.i > c.j || c.j >= n) {
      throw ConfigError("coefficients", "index [" + std::to_string(c.i) + ", " +
                                            std::to_string(c.j) +
                                            "] needs i <= j < " + std::to_string(n));
    }
  }
  if (selection == CoefficientSelection::explicit_list && coefficients.empty()) {
    throw ConfigError("coefficients", "explicit list is empty");
  }
  if (sample_size > design_size()) {
    throw ConfigError("sample_size", "must be at most the design size " +
                                         std::to_string(design_size()));
  }
  if (m_grid.empty()) throw ConfigError("m_grid", "must not be empty");
  std::set<std::size_t> seen;
  for (std::size_t m : m_grid) {
    if (m < 1 || m > design_size()) {
      throw ConfigError("m_grid", "value " + std::to_string(m) + " outside [1, " +
                                      std::to_string(design_size()) + "]");
    }
    if (!seen.insert(m).second) throw ConfigError("m_grid", "duplicate value " + std::to_string(m));
  }
  if (repetitions == 0) throw ConfigError("repetitions", "must be >= 1");
  if (states == 0) throw ConfigError("states", "must be >= 1");
  if (!(cptp_tol > 0.0)) throw ConfigError("cptp.tol", "must be positive");
  if (cptp_max_iter == 0) throw ConfigError("cptp.max_iter", "must be >= 1");
  if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
}

Json ExperimentConfig::to_json() const {
  Json coeffs;
  switch (selection) {
    case CoefficientSelection::full: coeffs = "full"; break;
    case CoefficientSelection::support: coeffs = "support"; break;
    case CoefficientSelection::explicit_list:
      coeffs = Json::array();
      for (const auto& c : coefficients) coeffs.push_back({c.i, c.j});
      break;
  }
  Json comps = Json::array();
  for (const auto& c : comparisons) comps.push_back({{"label", c.label}, {"channel", c.spec}});
  return {{"schema_version", kSchemaVersion},
          {"dims", {d1, d2}},
          {"channel", channel},
          {"target", resolved_target()},
          {"comparisons", comps},
          {"mode", mode()},
          {"coefficients", coeffs},
          {"sample_size", sample_size == 0 ? design_size() : sample_size},
          {"m_grid", m_grid},
          {"repetitions", repetitions},
          {"states", states},
          {"sqpt", sqpt},
          {"cptp", {{"tol", cptp_tol}, {"max_iter", cptp_max_iter}}},
          {"seed", seed},
          {"out_dir", out_dir},
          {"report", report},
          {"dataset", dataset}};
}

std::string ExperimentConfig::hash() const {
  Json j = to_json();
  j.erase("out_dir");
  j.erase("report");
  j.erase("dataset");
  return fnv1a_hex(j.dump());
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

CommandResult cmd_reconstruct(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);
  CommandResult result;
  Json audits = Json::object();
  auto audit = [&](const std::string& name, bool ok) {
    audits[name] = ok;
    if (!ok) {
      result.audits_passed = false;
      result.failed_audits.push_back(name);
    }
  };

  const SeqptContext ctx(config.d1, config.d2);
  const auto basis = ctx.basis_ptr();
  const KrausChannel channel = channel_from_spec(config.channel);
  const KrausChannel target = channel_from_spec(config.resolved_target());
  const ChoiMatrix target_choi = choi_from_kraus(target);
  const auto coeffs = select_coefficients(config, ctx, target);
  const std::size_t m = config.sample_size == 0 ? ctx.design().size() : config.sample_size;

  std::vector<SamplePlan> plans;
  plans.reserve(coeffs.size());
  for (const auto& c : coeffs) plans.push_back(make_sample_plan(c, ctx.design().size(), m, config.seed));

  const auto dataset = run_experiment(channel.superoperator(), config.channel,
                                      plan_settings(plans, ctx), config.shots,
                                      sub_seed(config.seed, {kTagData}), config.exact);
  if (!config.dataset.empty()) {
    store_dataset(dataset, config.dataset);
    result.files.emplace_back(config.dataset);
  }
  const DatasetSource source(dataset);
  bool complete = true;
  try {
    audit_completeness(source, plans, ctx);
  } catch (const Error&) {
    complete = false;
  }
  audit("dataset_complete", complete);

  const ChiReconstruction rec = reconstruct(source, ctx, coeffs, m, config.seed);
  audit("chi_hermitian", is_hermitian(rec.values, kTol.hermitian));
  const ProjectionReport projection =
      cptp_project(choi_from_chi(rec.zero_filled()), config.cptp_tol, config.cptp_max_iter);
  audit("projection_converged", projection.converged);
  const double fidelity = process_fidelity(projection.output, target_choi);
  const ChiMatrix chi_projected = chi_from_choi(projection.output, basis);

  Json report = {{"schema_version", 1},
                 {"kind", "seqpt_reconstruction"},
                 {"config", config.to_json()},
                 {"config_hash", config.hash()},
                 {"seed", config.seed},
                 {"mode", config.mode()},
                 {"dims", {config.d1, config.d2}},
                 {"sample_size", m},
                 {"coefficient_count", coeffs.size()},
                 {"settings_count", dataset.records.size()},
                 {"chi", masked_chi_json(rec)},
                 {"chi_projected", to_json(chi_projected)},
                 {"projection", to_json(projection)},
                 {"fidelity", {{"target", fidelity}}}};
  Json estimates = Json::array();
  for (const auto& e : rec.estimates) estimates.push_back(coefficient_json(e));
  report["estimates"] = std::move(estimates);

  std::ostringstream fid_csv;
  fid_csv << csv_preamble(kFidelitySchema, config) << "method,reference,fidelity\n"
          << "seqpt,target," << format_number(fidelity) << '\n';

  if (config.sqpt) {
    const auto sq_settings = sqpt_settings(ctx.design());
    const auto sq_data = run_experiment(channel.superoperator(), config.channel, sq_settings,
                                        config.shots, sub_seed(config.seed, {kTagSqpt}),
                                        config.exact);
    const QstSolver qst(design_projectors(ctx.design()));
    const ChiMatrix sq_chi = standard_qpt(sq_data, ctx.design(), qst, basis);
    const ProjectionReport sq_proj =
        cptp_project(choi_from_chi(sq_chi), config.cptp_tol, config.cptp_max_iter);
    audit("sqpt_projection_converged", sq_proj.converged);
    const double sq_fid = process_fidelity(sq_proj.output, target_choi);
    report["sqpt"] = {{"settings_count", sq_data.records.size()},
                      {"chi", to_json(sq_chi)},
                      {"projection", to_json(sq_proj)},
                      {"fidelity", {{"target", sq_fid}}}};
    fid_csv << "sqpt,target," << format_number(sq_fid) << '\n';
  }
  report["audits"] = audits;

  std::ostringstream chi_csv;
  chi_csv << csv_preamble(kChiCsvSchema, config)
          << "i,j,i1,i2,j1,j2,estimated,abs_chi,abs_chi_projected\n";
  const std::size_t d2sq = config.d2 * config.d2;
  for (Eigen::Index i = 0; i < rec.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < rec.values.cols(); ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      const bool est = rec.estimated(i, j);
      chi_csv << i << ',' << j << ',' << ui / d2sq << ',' << ui % d2sq << ',' << uj / d2sq
              << ',' << uj % d2sq << ',' << (est ? 1 : 0) << ','
              << (est ? format_number(std::abs(rec.values(i, j))) : "") << ','
              << format_number(std::abs(chi_projected.entries()(i, j))) << '\n';
    }
  }

  write_text(out_dir / "reconstruction.json", report.dump(2) + "\n");
  write_text(out_dir / "chi_abs.csv", chi_csv.str());
  write_text(out_dir / "fidelity.csv", fid_csv.str());
  result.files.push_back(out_dir / "reconstruction.json");
  result.files.push_back(out_dir / "chi_abs.csv");
  result.files.push_back(out_dir / "fidelity.csv");
  return result;
}

// ---------------------------------------------------------------------------
// efficiency-curve
// ---------------------------------------------------------------------------

CommandResult cmd_efficiency_curve(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);
  CommandResult result;

  const SeqptContext ctx(config.d1, config.d2);
  const KrausChannel channel = channel_from_spec(config.channel);
  const KrausChannel target = channel_from_spec(config.resolved_target());
  const auto coeffs = support_coefficients(chi_from_kraus(target, ctx.basis_ptr()));

  std::vector<std::string> labels{"target"};
  std::vector<ChoiMatrix> references{choi_from_kraus(target)};
  for (const auto& c : config.comparisons) {
    labels.push_back(c.label);
    references.push_back(choi_from_kraus(channel_from_spec(c.spec)));
  }

  const std::size_t n_size = ctx.design().size();
  std::vector<SamplePlan> full_plans;
  for (const auto& c : coeffs) full_plans.push_back(make_sample_plan(c, n_size, n_size, 0));
  const auto settings = plan_settings(full_plans, ctx);

  const std::size_t reps = config.repetitions, grid = config.m_grid.size();
  // fid[(rep * grid + g) * refs + t]
  std::vector<double> fid(reps * grid * references.size());
  std::vector<char> converged(reps * grid, 0);
  parallel_for(reps, [&](std::size_t r) {
    const auto ds = run_experiment(channel.superoperator(), config.channel, settings,
                                   config.shots, sub_seed(config.seed, {kTagData, r}),
                                   config.exact);
    const DatasetSource source(ds);
    for (std::size_t g = 0; g < grid; ++g) {
      const std::size_t m = config.m_grid[g];
      const auto rec =
          reconstruct(source, ctx, coeffs, m, sub_seed(config.seed, {kTagPlan, r, m}));
      const auto proj =
          cptp_project(choi_from_chi(rec.zero_filled()), config.cptp_tol, config.cptp_max_iter);
      converged[r * grid + g] = proj.converged ? 1 : 0;
      for (std::size_t t = 0; t < references.size(); ++t)
        fid[(r * grid + g) * references.size() + t] =
            process_fidelity(proj.output, references[t]);
    }
  });

  std::ostringstream curve, points;
  curve << csv_preamble(kEfficiencySchema, config)
        << "settings_count,M,target_label,fidelity_mean,fidelity_std,repetitions\n";
  points << csv_preamble(kPointsSchema, config)
         << "repetition,M,settings_count,target_label,fidelity\n";
  for (std::size_t g = 0; g < grid; ++g) {
    const std::size_t m = config.m_grid[g];
    const std::size_t count = coeffs.size() * m;
    for (std::size_t t = 0; t < references.size(); ++t) {
      std::vector<double> vals;
      for (std::size_t r = 0; r < reps; ++r) {
        const double f = fid[(r * grid + g) * references.size() + t];
        vals.push_back(f);
        points << r << ',' << m << ',' << count << ',' << labels[t] << ','
               << format_number(f) << '\n';
      }
      curve << count << ',' << m << ',' << labels[t] << ',' << format_number(mean_of(vals))
            << ',' << format_number(std_of(vals)) << ',' << reps << '\n';
    }
  }
  for (char ok : converged) {
    if (!ok) {
      result.audits_passed = false;
      result.failed_audits.push_back("projection_converged");
      break;
    }
  }

  write_text(out_dir / "efficiency.csv", curve.str());
  write_text(out_dir / "efficiency_points.csv", points.str());
  result.files.push_back(out_dir / "efficiency.csv");
  result.files.push_back(out_dir / "efficiency_points.csv");
  return result;
}

// ---------------------------------------------------------------------------
// qst-histogram
// ---------------------------------------------------------------------------

CommandResult cmd_qst_histogram(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path out_dir(config.out_dir);
  const std::filesystem::path report_path =
      config.report.empty() ? out_dir / "reconstruction.json" : std::filesystem::path(config.report);
  std::ifstream in(report_path);
  if (!in) {
    throw Error("missing reconstruction input: " + report_path.string() +
                " (run reconstruct first or set \"report\")");
  }
  Json report;
  try {
    in >> report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(report_path.string() + ": " + e.what());
  }
  if (report.value("kind", std::string{}) != "seqpt_reconstruction") {
    throw Error(report_path.string() + ": not a reconstruction report");
  }
  const auto dims = report.at("dims").get<std::vector<std::size_t>>();
  if (dims != std::vector<std::size_t>{config.d1, config.d2}) {
    throw Error(report_path.string() + ": report dimensions differ from the config");
  }
  std::filesystem::create_directories(out_dir);

  const std::size_t d = config.d1 * config.d2;
  const ChoiMatrix seqpt_choi{d, matrix_from_json(report.at("projection").at("output").at("entries"))};
  std::optional<ChoiMatrix> sqpt_choi;
  if (report.contains("sqpt")) {
    sqpt_choi = ChoiMatrix{d, matrix_from_json(report.at("sqpt").at("projection").at("output").at("entries"))};
  }

  const SeqptContext ctx(config.d1, config.d2);
  const KrausChannel channel = channel_from_spec(config.channel);
  const QstSolver qst(design_projectors(ctx.design()));

  std::vector<double> f_seqpt(config.states), f_sqpt(config.states);
  parallel_for(config.states, [&](std::size_t k) {
    auto rng = derive_stream(config.seed, {kTagState, k});
    const PureState psi = random_pure_state(d, rng);
    const ComplexMatrix in_rho = psi.projector();
    const ComplexMatrix out_rho = channel.superoperator().apply(in_rho);
    std::vector<double> probs(qst.size());
    for (std::size_t e = 0; e < qst.size(); ++e) {
      const ComplexVector& f = qst.projectors()[e].amplitudes();
      const double p = std::clamp(std::real(f.dot(out_rho * f)), 0.0, 1.0);
      if (config.exact) {
        probs[e] = p;
      } else {
        auto counts = derive_stream(config.seed, "h" + std::to_string(k) + "|" + design_key(e));
        probs[e] = static_cast<double>(simulate_counts(p, config.shots, counts)) /
                   static_cast<double>(config.shots);
      }
    }
    const ComplexMatrix measured = qst.fit(probs);
    f_seqpt[k] = state_fidelity(measured, normalized(apply_choi(seqpt_choi, in_rho)));
    if (sqpt_choi) f_sqpt[k] = state_fidelity(measured, normalized(apply_choi(*sqpt_choi, in_rho)));
  });

  std::ostringstream hist, summary;
  hist << csv_preamble(kHistogramSchema, config) << "# report_config_hash="
       << report.value("config_hash", std::string{}) << '\n'
       << "state,fidelity_seqpt,fidelity_sqpt\n";
  for (std::size_t k = 0; k < config.states; ++k) {
    hist << k << ',' << format_number(f_seqpt[k]) << ','
         << (sqpt_choi ? format_number(f_sqpt[k]) : "") << '\n';
  }
  summary << csv_preamble(kSummarySchema, config) << "method,states,mean,std,min,max\n";
  auto row = [&](const char* name, const std::vector<double>& v) {
    summary << name << ',' << v.size() << ',' << format_number(mean_of(v)) << ','
            << format_number(std_of(v)) << ','
            << format_number(*std::min_element(v.begin(), v.end())) << ','
            << format_number(*std::max_element(v.begin(), v.end())) << '\n';
  };
  row("seqpt", f_seqpt);
  if (sqpt_choi) row("sqpt", f_sqpt);

  CommandResult result;
  write_text(out_dir / "qst_histogram.csv", hist.str());
  write_text(out_dir / "qst_summary.csv", summary.str());
  result.files.push_back(out_dir / "qst_histogram.csv");
  result.files.push_back(out_dir / "qst_summary.csv");
  return result;
}

}  // namespace seqpt
