#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "soga/graph.hpp"
#include "soga/tape.hpp"

namespace soga {

enum class Arch { kGcn, kGraphSage, kGat };

std::string arch_name(Arch a);
Arch arch_from_name(const std::string& name);

// A trained two-layer GNN: the only artifact that crosses the source/target
// boundary. Parameter layout is fixed per architecture (see param_shapes).
struct ModelCheckpoint {
  Arch arch = Arch::kGcn;
  std::size_t feature_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t n_classes = 0;
  std::size_t heads = 1;  // GAT only; 1 otherwise
  double dropout = 0.5;
  std::vector<Tensor> params;
  nlohmann::json metadata;  // seed, epochs, best val Macro-F1, ...
};

enum class Mode { kTrain, kEval };

std::vector<std::pair<std::size_t, std::size_t>> param_shapes(Arch arch, std::size_t d,
                                                              std::size_t hidden,
                                                              std::size_t k,
                                                              std::size_t heads);

ModelCheckpoint init_model(Arch arch, std::size_t feature_dim, std::size_t hidden_dim,
                           std::size_t n_classes, std::size_t heads, double dropout,
                           std::mt19937_64& rng);

// Forward pass producing the NxK row-stochastic prediction matrix on the
// tape. In train mode dropout is driven by rng (required); eval mode is
// deterministic. param_vars, when given, receives the leaf handle of each
// checkpoint parameter in layout order.
Var forward(Tape& tape, const ModelCheckpoint& ckpt, const UnlabeledGraph& g, Mode mode,
            std::mt19937_64* rng = nullptr, std::vector<Var>* param_vars = nullptr);

// Eval-mode forward returning the prediction matrix by value.
Tensor predict(const ModelCheckpoint& ckpt, const UnlabeledGraph& g);

// Mean over idx of -log q(y_i | .) with the guarded log.
Var cross_entropy_loss(Tape& tape, Var pred, const std::vector<int>& labels,
                       const std::vector<int>& idx);

struct SourceTrainConfig {
  Arch arch = Arch::kGcn;
  double lr = 1e-2;
  double weight_decay = 5e-4;
  int max_epochs = 200;
  int patience = 20;
  double dropout = 0.5;
  std::size_t hidden_dim = 128;
  std::size_t heads = 2;  // GAT only
  std::uint64_t seed = 1;
};

// Supervised training on a labeled graph; returns the checkpoint of the
// epoch with the best validation Macro-F1. Deterministic per seed.
ModelCheckpoint train_source(const Graph& g, const SplitAssignment& split,
                             const SourceTrainConfig& cfg);

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

}  // namespace soga
