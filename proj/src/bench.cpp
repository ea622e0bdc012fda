#include "soga/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "soga/error.hpp"
#include "soga/run_manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace soga {

namespace {

DomainPairConfig parse_datagen(const json& j) {
  DomainPairConfig d;
  d.n_nodes = j.value("n_nodes", d.n_nodes);
  d.n_classes = j.value("n_classes", d.n_classes);
  d.feature_dim = j.value("feature_dim", d.feature_dim);
  d.p_in = j.value("p_in", d.p_in);
  d.p_out = j.value("p_out", d.p_out);
  d.density_ratio = j.value("density_ratio", d.density_ratio);
  d.feature_shift = j.value("feature_shift", d.feature_shift);
  d.feature_noise = j.value("feature_noise", d.feature_noise);
  d.seed = j.value("seed", d.seed);
  return d;
}

json datagen_json(const DomainPairConfig& d) {
  return {{"n_nodes", d.n_nodes},
          {"n_classes", d.n_classes},
          {"feature_dim", d.feature_dim},
          {"p_in", d.p_in},
          {"p_out", d.p_out},
          {"density_ratio", d.density_ratio},
          {"feature_shift", d.feature_shift},
          {"feature_noise", d.feature_noise},
          {"seed", d.seed}};
}

SourceTrainConfig parse_source_train(const json& j) {
  SourceTrainConfig c;
  c.lr = j.value("lr", c.lr);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.patience = j.value("patience", c.patience);
  c.dropout = j.value("dropout", c.dropout);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.heads = j.value("heads", c.heads);
  return c;
}

SogaConfig parse_adapt(const json& j) {
  SogaConfig c;
  c.lambda1 = j.value("lambda1", c.lambda1);
  c.lambda2 = j.value("lambda2", c.lambda2);
  c.negatives = j.value("negatives", c.negatives);
  c.lr = j.value("lr", c.lr);
  c.epochs = j.value("epochs", c.epochs);
  c.im_weight = j.value("im_weight", c.im_weight);
  c.marginal_weight = j.value("marginal_weight", c.marginal_weight);
  c.raw_sums = j.value("raw_sums", c.raw_sums);
  const std::string mode = j.value("marginal", std::string("entropy"));
  if (mode == "entropy") {
    c.marginal_mode = SogaConfig::MarginalMode::kEntropy;
  } else if (mode == "kl") {
    c.marginal_mode = SogaConfig::MarginalMode::kKlToPrior;
  } else {
    throw ConfigError("adapt.marginal must be 'entropy' or 'kl', got '" + mode + "'");
  }
  if (j.contains("prior") && !j.at("prior").is_null())
    c.label_prior = j.at("prior").get<std::vector<double>>();
  return c;
}

StructPairConfig parse_mine(const json& j) {
  StructPairConfig c;
  c.kappa = j.value("kappa", c.kappa);
  c.max_hop = j.value("max_hop", c.max_hop);
  c.bin_base = j.value("bin_base", c.bin_base);
  c.use_binning = j.value("use_binning", c.use_binning);
  c.exclude_edges = j.value("exclude_edges", c.exclude_edges);
  return c;
}

json adapt_json(const SogaConfig& c) {
  return {{"lambda1", c.lambda1},
          {"lambda2", c.lambda2},
          {"negatives", c.negatives},
          {"lr", c.lr},
          {"epochs", c.epochs},
          {"marginal",
           c.marginal_mode == SogaConfig::MarginalMode::kEntropy ? "entropy" : "kl"},
          {"prior", c.label_prior.empty() ? json(nullptr) : json(c.label_prior)},
          {"im_weight", c.im_weight},
          {"marginal_weight", c.marginal_weight},
          {"raw_sums", c.raw_sums}};
}

// Runs fn(i) for i in [0, n) across up to jobs threads; each index writes
// only its own output slot, so results are independent of scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  const int nthreads = static_cast<int>(std::min<std::size_t>(jobs, n));
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

struct DataBundle {
  Graph source;
  Graph target;
};

DataBundle load_data(const std::optional<DomainPairConfig>& datagen,
                     const std::string& source_manifest, const std::string& target_manifest) {
  if (datagen.has_value()) {
    auto [s, t] = gen_pair(*datagen);
    return {std::move(s), std::move(t)};
  }
  if (source_manifest.empty() || target_manifest.empty())
    throw ConfigError("config needs either 'datagen' or both manifests");
  return {load_graph(source_manifest), load_graph(target_manifest)};
}

SogaConfig variant_config(SogaConfig base, const std::string& variant) {
  if (variant == "full") return base;
  if (variant == "im") {
    base.lambda1 = 0.0;
    base.lambda2 = 0.0;
    return base;
  }
  if (variant == "sc") {
    base.im_weight = 0.0;
    return base;
  }
  throw ConfigError("unknown variant '" + variant + "' (expected full|im|sc)");
}

double eval_macro(const Tensor& pred, const std::vector<int>& labels, std::size_t k) {
  return macro_f1(argmax_rows(pred), labels, k);
}

std::string csv_double(double v) {
  if (v < 0.0) return "";  // sentinel for "not available"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

BenchConfig parse_bench_config(const json& j) {
  BenchConfig cfg;
  if (j.contains("datagen")) cfg.datagen = parse_datagen(j.at("datagen"));
  cfg.source_manifest = j.value("source_manifest", std::string());
  cfg.target_manifest = j.value("target_manifest", std::string());
  if (j.contains("archs")) {
    cfg.archs.clear();
    for (const auto& a : j.at("archs")) cfg.archs.push_back(arch_from_name(a));
  }
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("variants")) cfg.variants = j.at("variants").get<std::vector<std::string>>();
  if (j.contains("source_train")) cfg.source_train = parse_source_train(j.at("source_train"));
  if (j.contains("adapt")) cfg.adapt_cfg = parse_adapt(j.at("adapt"));
  if (j.contains("mine")) cfg.mine = parse_mine(j.at("mine"));
  cfg.split_ratio = j.value("split_ratio", cfg.split_ratio);
  cfg.stability_skip = j.value("stability_skip", cfg.stability_skip);
  cfg.out_dir = j.value("out", cfg.out_dir);
  cfg.jobs = j.value("jobs", cfg.jobs);
  return cfg;
}

json bench_config_json(const BenchConfig& cfg) {
  json j;
  if (cfg.datagen) j["datagen"] = datagen_json(*cfg.datagen);
  if (!cfg.source_manifest.empty()) j["source_manifest"] = cfg.source_manifest;
  if (!cfg.target_manifest.empty()) j["target_manifest"] = cfg.target_manifest;
  json archs = json::array();
  for (Arch a : cfg.archs) archs.push_back(arch_name(a));
  j["archs"] = archs;
  j["seeds"] = cfg.seeds;
  j["variants"] = cfg.variants;
  j["source_train"] = {{"lr", cfg.source_train.lr},
                       {"weight_decay", cfg.source_train.weight_decay},
                       {"max_epochs", cfg.source_train.max_epochs},
                       {"patience", cfg.source_train.patience},
                       {"dropout", cfg.source_train.dropout},
                       {"hidden_dim", cfg.source_train.hidden_dim},
                       {"heads", cfg.source_train.heads}};
  j["adapt"] = adapt_json(cfg.adapt_cfg);
  j["mine"] = {{"kappa", cfg.mine.kappa},
               {"max_hop", cfg.mine.max_hop},
               {"bin_base", cfg.mine.bin_base},
               {"use_binning", cfg.mine.use_binning},
               {"exclude_edges", cfg.mine.exclude_edges}};
  j["split_ratio"] = cfg.split_ratio;
  j["stability_skip"] = cfg.stability_skip;
  j["out"] = cfg.out_dir;
  j["jobs"] = cfg.jobs;
  return j;
}

BenchResult run_benchmark(const BenchConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  DataBundle data = load_data(cfg.datagen, cfg.source_manifest, cfg.target_manifest);
  const UnlabeledGraph target_view(data.target);

  BenchResult result;
  result.target_labeled = data.target.has_labels();
  if (!result.target_labeled)
    std::fprintf(stderr,
                 "notice: target manifest has no labels; evaluation columns are skipped "
                 "and only the adaptation pipeline runs\n");

  StructPairConfig mine_cfg = cfg.mine;
  mine_cfg.jobs = cfg.jobs;
  const PairSet pairs = mine_pairs(target_view, mine_cfg);

  // Phase 1: source models per (arch, seed), shared across variants.
  struct TrainedSource {
    ModelCheckpoint ckpt;
    bool ok = false;
    std::string error;
  };
  std::vector<TrainedSource> sources(cfg.archs.size() * cfg.seeds.size());
  parallel_for(sources.size(), cfg.jobs, [&](std::size_t i) {
    const Arch arch = cfg.archs[i / cfg.seeds.size()];
    const std::uint64_t seed = cfg.seeds[i % cfg.seeds.size()];
    try {
      SourceTrainConfig tc = cfg.source_train;
      tc.arch = arch;
      tc.seed = seed;
      const SplitAssignment split = split_train_val(data.source, cfg.split_ratio, seed);
      sources[i].ckpt = train_source(data.source, split, tc);
      sources[i].ok = true;
    } catch (const std::exception& e) {
      sources[i].error = e.what();
    }
  });

  // Phase 2: adaptation cells.
  struct CellKey {
    std::size_t arch_i, var_i, seed_i;
  };
  std::vector<CellKey> keys;
  for (std::size_t a = 0; a < cfg.archs.size(); ++a)
    for (std::size_t v = 0; v < cfg.variants.size(); ++v)
      for (std::size_t s = 0; s < cfg.seeds.size(); ++s) keys.push_back({a, v, s});

  result.cells.resize(keys.size());
  parallel_for(keys.size(), cfg.jobs, [&](std::size_t i) {
    const CellKey key = keys[i];
    CellResult& cell = result.cells[i];
    cell.arch = arch_name(cfg.archs[key.arch_i]);
    cell.variant = cfg.variants[key.var_i];
    cell.seed = cfg.seeds[key.seed_i];
    const TrainedSource& src = sources[key.arch_i * cfg.seeds.size() + key.seed_i];
    if (!src.ok) {
      cell.error = "source training failed: " + src.error;
      return;
    }
    try {
      if (src.ckpt.metadata.contains("best_val_macro_f1") &&
          !src.ckpt.metadata["best_val_macro_f1"].is_null())
        cell.source_val_macro_f1 = src.ckpt.metadata["best_val_macro_f1"];

      if (result.target_labeled) {
        const Tensor pred = predict(src.ckpt, target_view);
        const auto pl = argmax_rows(pred);
        cell.unadapted_macro_f1 = macro_f1(pl, data.target.labels, data.target.n_classes);
        cell.unadapted_micro_f1 = micro_f1(pl, data.target.labels, data.target.n_classes);
      }

      SogaConfig ac = variant_config(cfg.adapt_cfg, cell.variant);
      ac.seed = cell.seed;
      std::vector<double> f1_trace;
      EpochObserver observer;
      if (result.target_labeled) {
        observer = [&f1_trace, &data](int, const Tensor& pred) {
          f1_trace.push_back(eval_macro(pred, data.target.labels, data.target.n_classes));
        };
      }
      auto [adapted, record] = adapt(src.ckpt, target_view, pairs, ac, observer);
      for (std::size_t e = 0; e < record.epochs.size() && e < f1_trace.size(); ++e)
        record.epochs[e].macro_f1 = f1_trace[e];
      cell.record = std::move(record);

      if (result.target_labeled) {
        const Tensor pred = predict(adapted, target_view);
        const auto pl = argmax_rows(pred);
        cell.adapted_macro_f1 = macro_f1(pl, data.target.labels, data.target.n_classes);
        cell.adapted_micro_f1 = micro_f1(pl, data.target.labels, data.target.n_classes);
        if (f1_trace.size() >= cfg.stability_skip + 2) {
          const StabilityStats st = stability_stats(f1_trace, cfg.stability_skip);
          cell.stability_mean = st.mean;
          cell.stability_std = st.stddev;
        }
      }
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });

  // Aggregate per (arch, variant).
  json summary = json::array();
  for (std::size_t a = 0; a < cfg.archs.size(); ++a)
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
      std::vector<const CellResult*> group;
      for (const CellResult& c : result.cells)
        if (c.arch == arch_name(cfg.archs[a]) && c.variant == cfg.variants[v] && c.ok)
          group.push_back(&c);
      auto mean_std = [&](auto getter) {
        std::vector<double> xs;
        for (const CellResult* c : group) {
          const double x = getter(*c);
          if (x >= 0.0) xs.push_back(x);
        }
        json out = {{"mean", nullptr}, {"std", nullptr}, {"n", xs.size()}};
        if (!xs.empty()) {
          double m = 0.0;
          for (double x : xs) m += x;
          m /= xs.size();
          double var = 0.0;
          for (double x : xs) var += (x - m) * (x - m);
          out["mean"] = m;
          out["std"] = std::sqrt(var / xs.size());
        }
        return out;
      };
      summary.push_back(
          {{"arch", arch_name(cfg.archs[a])},
           {"variant", cfg.variants[v]},
           {"cells_ok", group.size()},
           {"unadapted_macro_f1", mean_std([](const CellResult& c) { return c.unadapted_macro_f1; })},
           {"adapted_macro_f1", mean_std([](const CellResult& c) { return c.adapted_macro_f1; })},
           {"unadapted_micro_f1", mean_std([](const CellResult& c) { return c.unadapted_micro_f1; })},
           {"adapted_micro_f1", mean_std([](const CellResult& c) { return c.adapted_micro_f1; })},
           {"stability_mean", mean_std([](const CellResult& c) { return c.stability_mean; })},
           {"stability_std", mean_std([](const CellResult& c) { return c.stability_std; })}});
    }
  result.summary = std::move(summary);

  // Emit artifacts.
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    {
      std::ofstream csv(out / "results.csv");
      csv << "arch,variant,seed,ok,source_val_macro_f1,unadapted_macro_f1,"
             "unadapted_micro_f1,adapted_macro_f1,adapted_micro_f1,stability_mean,"
             "stability_std,error\n";
      for (const CellResult& c : result.cells) {
        csv << c.arch << ',' << c.variant << ',' << c.seed << ',' << (c.ok ? 1 : 0) << ','
            << csv_double(c.source_val_macro_f1) << ',' << csv_double(c.unadapted_macro_f1)
            << ',' << csv_double(c.unadapted_micro_f1) << ','
            << csv_double(c.adapted_macro_f1) << ',' << csv_double(c.adapted_micro_f1)
            << ',' << csv_double(c.stability_mean) << ',' << csv_double(c.stability_std)
            << ',' << c.error << '\n';
      }
    }
    {
      std::ofstream js(out / "results.json");
      js << result.summary.dump(2) << '\n';
    }
    fs::create_directories(out / "curves");
    for (const CellResult& c : result.cells) {
      if (!c.ok) continue;
      write_curve_csv(c.record, (out / "curves" /
                                 (c.arch + "_" + c.variant + "_seed" +
                                  std::to_string(c.seed) + ".csv"))
                                    .string());
    }
    RunManifest manifest;
    manifest.subcommand = "run-benchmark";
    manifest.config = bench_config_json(cfg);
    manifest.seeds = cfg.seeds;
    if (!cfg.source_manifest.empty())
      manifest.input_hashes[cfg.source_manifest] = fnv1a_file_hex(cfg.source_manifest);
    if (!cfg.target_manifest.empty())
      manifest.input_hashes[cfg.target_manifest] = fnv1a_file_hex(cfg.target_manifest);
    manifest.outputs = {"results.csv", "results.json", "curves/"};
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    write_run_manifest(manifest, cfg.out_dir);
  }
  return result;
}

SweepConfig parse_sweep_config(const json& j) {
  SweepConfig cfg;
  if (j.contains("datagen")) cfg.datagen = parse_datagen(j.at("datagen"));
  cfg.source_manifest = j.value("source_manifest", std::string());
  cfg.target_manifest = j.value("target_manifest", std::string());
  cfg.arch = arch_from_name(j.value("arch", std::string("gcn")));
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("source_train")) cfg.source_train = parse_source_train(j.at("source_train"));
  if (j.contains("adapt")) cfg.adapt_cfg = parse_adapt(j.at("adapt"));
  if (j.contains("mine")) cfg.mine = parse_mine(j.at("mine"));
  cfg.split_ratio = j.value("split_ratio", cfg.split_ratio);
  cfg.skip_epochs = j.value("skip", cfg.skip_epochs);
  cfg.out_dir = j.value("out", cfg.out_dir);
  cfg.jobs = j.value("jobs", cfg.jobs);
  return cfg;
}

SweepResult sweep_lambdas(const SweepConfig& cfg) {
  // Ten asymmetric weightings; the structural-heavy arm mirrors them.
  const std::vector<std::pair<double, double>> heavy_light = {
      {1, 0.1}, {1, 0.2}, {1, 0.5}, {2, 0.2}, {2, 0.5},
      {2, 1},   {5, 0.5}, {5, 1},   {5, 2},   {10, 1}};

  DataBundle data = load_data(cfg.datagen, cfg.source_manifest, cfg.target_manifest);
  if (!data.target.has_labels())
    throw DataError("sweep-lambdas needs target labels for per-epoch Macro-F1");
  const UnlabeledGraph target_view(data.target);

  SourceTrainConfig tc = cfg.source_train;
  tc.arch = cfg.arch;
  tc.seed = cfg.seed;
  const SplitAssignment split = split_train_val(data.source, cfg.split_ratio, cfg.seed);
  const ModelCheckpoint source = train_source(data.source, split, tc);

  StructPairConfig mine_cfg = cfg.mine;
  mine_cfg.jobs = cfg.jobs;
  const PairSet pairs = mine_pairs(target_view, mine_cfg);

  const int epochs = cfg.adapt_cfg.epochs;
  if (cfg.skip_epochs + 1 >= static_cast<std::size_t>(epochs))
    throw ConfigError("sweep-lambdas: adapt.epochs must exceed skip + 1");

  SweepResult result;
  result.epochs = epochs;
  result.local_heavy.name = "lambda1_gt_lambda2";
  result.structural_heavy.name = "lambda2_gt_lambda1";
  for (auto [big, small] : heavy_light) {
    result.local_heavy.lambdas.emplace_back(big, small);
    result.structural_heavy.lambdas.emplace_back(small, big);
  }

  auto run_arm = [&](SweepArm& arm) {
    arm.curves.assign(arm.lambdas.size(), {});
    parallel_for(arm.lambdas.size(), cfg.jobs, [&](std::size_t i) {
      SogaConfig ac = cfg.adapt_cfg;
      ac.lambda1 = arm.lambdas[i].first;
      ac.lambda2 = arm.lambdas[i].second;
      ac.seed = cfg.seed;
      std::vector<double>& trace = arm.curves[i];
      trace.reserve(epochs);
      EpochObserver obs = [&trace, &data](int, const Tensor& pred) {
        trace.push_back(
            macro_f1(argmax_rows(pred), data.target.labels, data.target.n_classes));
      };
      adapt(source, target_view, pairs, ac, obs);
    });
    const std::size_t kept = epochs - cfg.skip_epochs;
    arm.epoch_mean.assign(kept, 0.0);
    arm.epoch_std.assign(kept, 0.0);
    for (std::size_t e = 0; e < kept; ++e) {
      double m = 0.0;
      for (const auto& c : arm.curves) m += c[cfg.skip_epochs + e];
      m /= arm.curves.size();
      double var = 0.0;
      for (const auto& c : arm.curves) {
        const double d = c[cfg.skip_epochs + e] - m;
        var += d * d;
      }
      arm.epoch_mean[e] = m;
      arm.epoch_std[e] = std::sqrt(var / arm.curves.size());
    }
  };
  run_arm(result.local_heavy);
  run_arm(result.structural_heavy);

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    std::ofstream csv(fs::path(cfg.out_dir) / "sweep.csv");
    csv << "epoch,local_heavy_mean,local_heavy_std,structural_heavy_mean,"
           "structural_heavy_std\n";
    char buf[160];
    for (std::size_t e = 0; e < result.local_heavy.epoch_mean.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f\n",
                    cfg.skip_epochs + e + 1, result.local_heavy.epoch_mean[e],
                    result.local_heavy.epoch_std[e], result.structural_heavy.epoch_mean[e],
                    result.structural_heavy.epoch_std[e]);
      csv << buf;
    }
    RunManifest manifest;
    manifest.subcommand = "sweep-lambdas";
    manifest.seeds = {cfg.seed};
    manifest.outputs = {"sweep.csv"};
    write_run_manifest(manifest, cfg.out_dir);
  }
  return result;
}

}  // namespace soga
