#pragma once

#include <functional>
#include <utility>

#include "soga/gnn.hpp"
#include "soga/objectives.hpp"

namespace soga {

struct EpochStats {
  int epoch = 0;
  double l_im = 0.0;
  double l_sc = 0.0;
  double total = 0.0;
  double macro_f1 = -1.0;  // filled by the harness when labels are available
};

struct RunRecord {
  std::vector<EpochStats> epochs;
};

// Called after each epoch with the eval-mode prediction matrix. Used by the
// harness to track metrics; adapt itself never sees labels.
using EpochObserver = std::function<void(int epoch, const Tensor& eval_pred)>;

// Source-free adaptation: maximize the information-maximization plus
// structure-consistency objective over the checkpoint parameters, using only
// the unlabeled target graph. Returns the final-epoch checkpoint (no target
// validation set exists to pick another) and the per-epoch objective trace.
std::pair<ModelCheckpoint, RunRecord> adapt(const ModelCheckpoint& ckpt,
                                            const UnlabeledGraph& target,
                                            const PairSet& pairs, const SogaConfig& cfg,
                                            const EpochObserver& observer = {});

void write_curve_csv(const RunRecord& record, const std::string& path);

}  // namespace soga
