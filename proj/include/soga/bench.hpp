#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "soga/adapt.hpp"
#include "soga/datagen.hpp"
#include "soga/metrics.hpp"

namespace soga {

// Multi-seed benchmark harness: per (arch, variant, seed) cell it trains the
// source model, evaluates the unadapted and adapted target metrics, and
// aggregates mean +/- std tables plus stability statistics and learning
// curves.
struct BenchConfig {
  std::optional<DomainPairConfig> datagen;
  std::string source_manifest;
  std::string target_manifest;

  std::vector<Arch> archs = {Arch::kGcn, Arch::kGraphSage, Arch::kGat};
  std::vector<std::uint64_t> seeds = {1, 3, 5, 7, 9};
  // "full" = both objectives; "im" drops structure consistency; "sc" drops
  // information maximization.
  std::vector<std::string> variants = {"full"};

  SourceTrainConfig source_train;  // arch and seed overridden per cell
  SogaConfig adapt_cfg;            // seed overridden per cell
  StructPairConfig mine;
  double split_ratio = 0.8;
  std::size_t stability_skip = 20;
  std::string out_dir = "bench_out";
  int jobs = 1;
};

struct CellResult {
  std::string arch;
  std::string variant;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double source_val_macro_f1 = -1.0;
  double unadapted_macro_f1 = -1.0;
  double unadapted_micro_f1 = -1.0;
  double adapted_macro_f1 = -1.0;
  double adapted_micro_f1 = -1.0;
  double stability_mean = -1.0;
  double stability_std = -1.0;
  RunRecord record;
};

struct BenchResult {
  std::vector<CellResult> cells;  // ordered by (arch, variant, seed)
  nlohmann::json summary;
  bool target_labeled = false;
};

BenchConfig parse_bench_config(const nlohmann::json& j);
nlohmann::json bench_config_json(const BenchConfig& cfg);
BenchResult run_benchmark(const BenchConfig& cfg);

// Hyperparameter sweep: two arms of 10 (lambda1, lambda2) choices each
// (local-heavy lambda1 > lambda2, structural-heavy lambda2 > lambda1),
// reporting per-epoch Macro-F1 mean/std across each arm after skipping the
// first skip_epochs epochs.
struct SweepConfig {
  std::optional<DomainPairConfig> datagen;
  std::string source_manifest;
  std::string target_manifest;
  Arch arch = Arch::kGcn;
  std::uint64_t seed = 1;
  SourceTrainConfig source_train;
  SogaConfig adapt_cfg;
  StructPairConfig mine;
  double split_ratio = 0.8;
  std::size_t skip_epochs = 10;
  std::string out_dir = "sweep_out";
  int jobs = 1;
};

struct SweepArm {
  std::string name;
  std::vector<std::pair<double, double>> lambdas;      // the 10 choices
  std::vector<std::vector<double>> curves;             // [choice][epoch] macro-F1
  std::vector<double> epoch_mean;                      // epochs after skip
  std::vector<double> epoch_std;
};

struct SweepResult {
  SweepArm local_heavy;
  SweepArm structural_heavy;
  int epochs = 0;
};

SweepConfig parse_sweep_config(const nlohmann::json& j);
SweepResult sweep_lambdas(const SweepConfig& cfg);

}  // namespace soga
