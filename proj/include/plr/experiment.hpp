// Experiment driver: runs a configured world/engine pair for a number of
// epochs and writes report.jsonl, summary.csv and final state dumps.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "plr/config.hpp"
#include "plr/engine.hpp"

namespace plr {

// Runs every epoch in memory; no files touched.
std::vector<EpochReport> run_in_memory(const RunConfig& cfg);

// Full run with outputs under out_dir:
//   run_config.json     effective configuration (round-trippable)
//   run_header.json     derived quantities (K, gamma, ...)
//   report.jsonl        one EpochReport object per line
//   summary.csv         per-epoch metric table
//   ground_truth.csv    sample_id,true_class
//   banks.csv           final per-sample banks
//   cluster_labels_h<h>.csv  final K x C tables
//   cluster_state_h<h>.json  final centroid/dual snapshots
//   prototypes.csv      final C x d prototype matrix
std::vector<EpochReport> run_experiment(const RunConfig& cfg,
                                        const std::filesystem::path& out_dir,
                                        std::ostream* log = nullptr);

// Applies `param` = value on a copy of the base config. Valid params:
// n, alpha, d, tau, H, lambda_dual, target_temp_mult.
RunConfig apply_sweep_param(const RunConfig& base, const std::string& param,
                            double value);

// One run per value under out_dir/<param>_<value>/ plus a combined
// sweep_summary.csv comparing the runs.
void run_sweep(const RunConfig& base, const std::string& param,
               const std::vector<double>& values,
               const std::filesystem::path& out_dir, std::ostream* log = nullptr);

}  // namespace plr
