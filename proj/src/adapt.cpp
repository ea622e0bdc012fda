#include "soga/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "soga/adam.hpp"
#include "soga/error.hpp"

namespace soga {

std::pair<ModelCheckpoint, RunRecord> adapt(const ModelCheckpoint& ckpt,
                                            const UnlabeledGraph& target,
                                            const PairSet& pairs, const SogaConfig& cfg,
                                            const EpochObserver& observer) {
  if (target.feature_dim() != ckpt.feature_dim)
    throw ShapeError("adapt: target feature dim " + std::to_string(target.feature_dim()) +
                     " != checkpoint feature dim " + std::to_string(ckpt.feature_dim));
  if (cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0)
    throw ConfigError("adapt: lambda1 and lambda2 must be >= 0");
  if (cfg.epochs < 0) throw ConfigError("adapt: epochs must be >= 0");
  if (cfg.marginal_mode == SogaConfig::MarginalMode::kKlToPrior && cfg.label_prior.empty())
    throw ConfigError("adapt: kl marginal mode requires a label prior");

  ModelCheckpoint model = ckpt;
  RunRecord record;
  record.epochs.reserve(cfg.epochs);

  std::mt19937_64 dropout_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  NegativeSampler sampler(cfg.seed, target.n_nodes());
  const bool use_sc = cfg.lambda1 != 0.0 || cfg.lambda2 != 0.0;

  AdamState adam;
  adam.lr = cfg.lr;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Tape tape;
    std::vector<Var> pvars;
    Var pred = forward(tape, model, target, Mode::kTrain, &dropout_rng, &pvars);

    Var im = im_objective(pred, cfg);
    Var objective = im;
    Var sc = tape.constant(Tensor::scalar(0.0));
    if (use_sc) {
      const NegativeDraw negs = sampler.draw(pairs, cfg.negatives);
      sc = sc_objective(pred, pairs, negs, cfg);
      objective = add(im, sc);
    }
    Var loss = scale(objective, -1.0);

    const double loss_value = tape.value(loss).scalar_value();
    if (!std::isfinite(loss_value))
      throw NumericError("adapt: non-finite loss at epoch " + std::to_string(epoch));

    tape.backward(loss);
    std::vector<Tensor> grads;
    grads.reserve(pvars.size());
    for (Var v : pvars) grads.push_back(tape.grad(v));
    adam_step(model.params, grads, adam);

    EpochStats stats;
    stats.epoch = epoch;
    stats.l_im = tape.value(im).scalar_value();
    stats.l_sc = tape.value(sc).scalar_value();
    stats.total = -loss_value;
    record.epochs.push_back(stats);

    if (observer) observer(epoch, predict(model, target));
  }

  model.metadata["adapted"] = true;
  model.metadata["adapt_epochs"] = cfg.epochs;
  model.metadata["adapt_seed"] = cfg.seed;
  return {std::move(model), std::move(record)};
}

void write_curve_csv(const RunRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open curve file for writing: " + path);
  const bool with_f1 =
      !record.epochs.empty() &&
      std::any_of(record.epochs.begin(), record.epochs.end(),
                  [](const EpochStats& e) { return e.macro_f1 >= 0.0; });
  out << "epoch,l_im,l_sc,total" << (with_f1 ? ",macro_f1" : "") << '\n';
  char buf[128];
  for (const EpochStats& e : record.epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g", e.epoch, e.l_im, e.l_sc, e.total);
    out << buf;
    if (with_f1) {
      std::snprintf(buf, sizeof buf, ",%.17g", e.macro_f1);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace soga
