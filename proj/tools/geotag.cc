// tools/geotag.cc

// Copyright 2026  The Geotag Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "geotag/common.h"
#include "geotag/config.h"
#include "geotag/pipeline.h"
#include "geotag/synthgen.h"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  int jobs = 1;
};

void AddCommon(CLI::App *cmd, CommonOptions *opts, bool needs_config) {
  auto *c = cmd->add_option("--config", opts->config, "Pipeline config (JSON)");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts->seed, "Override the config seed");
  cmd->add_option("--output-dir", opts->output_dir, "Override the output directory");
  cmd->add_option("--jobs", opts->jobs, "Worker threads")->check(CLI::PositiveNumber);
}

geotag::PipelineConfig ResolveConfig(const CommonOptions &opts) {
  geotag::PipelineConfig cfg = geotag::LoadConfig(opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
  return cfg;
}

void PrintBases(const std::vector<geotag::ClassBasis> &bases) {
  for (const geotag::ClassBasis &b : bases) {
    std::printf("class %s: d=%ld k=%ld frames=%d sweeps=%zu%s\n",
                b.basis.class_name.c_str(), static_cast<long>(b.basis.dim()),
                static_cast<long>(b.basis.k()), b.frames,
                b.trace.empty() ? 0 : b.trace.size() - 1, b.reused ? " (reused)" : "");
    std::printf("  objective:");
    for (double v : b.trace) std::printf(" %.6g", v);
    std::printf("\n  final relative objective: %.6g\n",
                b.trace.empty() || b.data_norm_sq == 0.0 ? 0.0
                                                         : b.trace.back() / b.data_norm_sq);
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"City-level audio geotagging from sound-class composition"};
  app.require_subcommand(1);
  int verbose = 0;
  app.add_flag("-v,--verbose", verbose, "More logging (repeatable)");

  CommonOptions opts;
  auto *train_basis = app.add_subcommand("train-basis", "Learn one basis per sound class");
  auto *featurize = app.add_subcommand("featurize", "Build the feature table");
  auto *train_eval = app.add_subcommand("train-eval", "Train SVMs and write the report");
  auto *run_all = app.add_subcommand("run-all", "train-basis, featurize, train-eval");
  for (auto *cmd : {train_basis, featurize, train_eval, run_all}) AddCommon(cmd, &opts, true);

  auto *synth = app.add_subcommand("synth", "Write the synthetic city dataset");
  std::uint64_t synth_seed = 0;
  double noise = 0.0;
  std::string synth_dir;
  synth->add_option("--output-dir", synth_dir, "Destination directory")->required();
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--noise", noise, "Frame noise standard deviation")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  geotag::SetVerbosity(verbose);

  try {
    if (synth->parsed()) {
      geotag::SynthSpec spec = geotag::DefaultCitySpec(synth_seed);
      spec.noise_sigma = noise;
      const geotag::SynthPaths paths = geotag::WriteSynthDataset(spec, synth_dir);
      std::printf("wrote %s\n", paths.config.string().c_str());
      return 0;
    }
    const geotag::PipelineConfig cfg = ResolveConfig(opts);
    if (train_basis->parsed()) {
      PrintBases(geotag::RunTrainBasis(cfg, opts.jobs));
    } else if (featurize->parsed()) {
      const geotag::FeaturizeResult r = geotag::RunFeaturize(cfg, opts.jobs);
      std::printf("featurized %zu recordings (%zu skipped)\n", r.table.features.size(),
                  r.table.skipped.size());
    } else {
      geotag::EvalReport report;
      if (run_all->parsed()) {
        report = geotag::RunAll(cfg, opts.jobs);
      } else {
        report = geotag::RunTrainEval(cfg, opts.jobs);
      }
      std::fputs(geotag::FormatReportTable(report).c_str(), stdout);
    }
  } catch (const geotag::ValidationError &e) {
    std::cerr << "ERROR: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "ERROR: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
