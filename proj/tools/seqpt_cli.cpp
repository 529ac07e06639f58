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

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "seqpt/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string mode;
  std::string report;
  std::string dataset;
};

seqpt::ExperimentConfig resolve(const Overrides& o) {
  seqpt::ExperimentConfig c;
  if (!o.config.empty()) c = seqpt::ExperimentConfig::load(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (!o.mode.empty()) c.set_mode(o.mode);
  if (!o.report.empty()) c.report = o.report;
  if (!o.dataset.empty()) c.dataset = o.dataset;
  return c;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_option("--out-dir", o.out_dir, "output directory (overrides the config)");
  cmd->add_option("--mode", o.mode, "noiseless | shots:<N>");
}

int report(const seqpt::CommandResult& r) {
  for (const auto& f : r.files) std::cout << "wrote " << f.string() << '\n';
  for (const auto& a : r.failed_audits) std::cerr << "audit failed: " << a << '\n';
  return r.audits_passed ? EXIT_SUCCESS : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective and efficient process tomography on a simulated bench"};
  app.require_subcommand(1);

  Overrides rec_opts, eff_opts, qst_opts;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct χ and compare with the target");
  add_common(rec, rec_opts);
  rec->add_option("--dataset", rec_opts.dataset, "also store the simulated dataset here");

  auto* eff = app.add_subcommand("efficiency-curve", "fidelity versus sampled states");
  add_common(eff, eff_opts);

  auto* qst = app.add_subcommand("qst-histogram", "random-state cross-check of a report");
  add_common(qst, qst_opts);
  qst->add_option("--report", qst_opts.report, "reconstruction.json to check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rec->parsed()) return report(seqpt::cmd_reconstruct(resolve(rec_opts)));
    if (eff->parsed()) return report(seqpt::cmd_efficiency_curve(resolve(eff_opts)));
    if (qst->parsed()) return report(seqpt::cmd_qst_histogram(resolve(qst_opts)));
  } catch (const seqpt::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return EXIT_FAILURE;
}
