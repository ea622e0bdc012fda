// Command-line front end: data generation, source training, pair mining,
// source-free adaptation, evaluation, lemma checks, and the benchmark and
// sweep protocols. Exit codes: 0 ok, 2 config error, 3 data error,
// 4 numeric failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "soga/adapt.hpp"
#include "soga/bench.hpp"
#include "soga/datagen.hpp"
#include "soga/error.hpp"
#include "soga/lemmas.hpp"
#include "soga/run_manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace soga;

namespace {

int default_jobs() {
  if (const char* env = std::getenv("SOGA_JOBS")) {
    const int j = std::atoi(env);
    if (j >= 1) return j;
  }
  return 1;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("bad JSON in " + path + ": " + e.what());
  }
}

std::vector<double> load_prior(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing prior file: " + path);
  std::vector<double> prior;
  double v;
  while (in >> v) prior.push_back(v);
  if (prior.empty()) throw DataError("prior file is empty: " + path);
  return prior;
}

void write_pred_csv(const Tensor& pred, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write predictions: " + path);
  char buf[32];
  for (std::size_t r = 0; r < pred.rows; ++r) {
    for (std::size_t c = 0; c < pred.cols; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", pred.at(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

Tensor load_pred_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing prediction file: " + path);
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t row_cols = 0;
    while (std::getline(ls, cell, ',')) {
      values.push_back(std::stod(cell));
      row_cols++;
    }
    if (rows == 0)
      cols = row_cols;
    else if (row_cols != cols)
      throw DataError(path + ": ragged prediction rows");
    rows++;
  }
  Tensor t(rows, cols);
  t.data = std::move(values);
  return t;
}

std::vector<int> load_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing label file: " + path);
  std::vector<int> labels;
  int v;
  while (in >> v) labels.push_back(v);
  return labels;
}

struct GenDataArgs {
  DomainPairConfig cfg;
  std::string out = "data_out";
  bool drop_target_labels = false;
};

int cmd_gen_data(const GenDataArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  auto [source, target] = gen_pair(a.cfg);
  if (a.drop_target_labels) target.labels.clear();
  const std::string src_manifest = write_graph(source, (fs::path(a.out) / "source").string());
  const std::string tgt_manifest = write_graph(target, (fs::path(a.out) / "target").string());

  RunManifest m;
  m.subcommand = "gen-data";
  m.seeds = {a.cfg.seed};
  m.config = {{"n_nodes", a.cfg.n_nodes},
              {"n_classes", a.cfg.n_classes},
              {"feature_dim", a.cfg.feature_dim},
              {"p_in", a.cfg.p_in},
              {"p_out", a.cfg.p_out},
              {"density_ratio", a.cfg.density_ratio},
              {"feature_shift", a.cfg.feature_shift},
              {"feature_noise", a.cfg.feature_noise},
              {"seed", a.cfg.seed},
              {"drop_target_labels", a.drop_target_labels}};
  m.outputs = {src_manifest, tgt_manifest};
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_run_manifest(m, a.out);

  json report = {{"source_manifest", src_manifest},
                 {"target_manifest", tgt_manifest},
                 {"source_edges", source.n_edges},
                 {"target_edges", target.n_edges}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

struct TrainSourceArgs {
  std::string manifest;
  std::string out = "source.ckpt";
  std::string arch = "gcn";
  SourceTrainConfig cfg;
  double split_ratio = 0.8;
};

int cmd_train_source(TrainSourceArgs a) {
  const auto t0 = std::chrono::steady_clock::now();
  a.cfg.arch = arch_from_name(a.arch);
  const Graph g = load_graph(a.manifest);
  const SplitAssignment split = split_train_val(g, a.split_ratio, a.cfg.seed);
  const ModelCheckpoint ckpt = train_source(g, split, a.cfg);
  save_checkpoint(ckpt, a.out);

  RunManifest m;
  m.subcommand = "train-source";
  m.seeds = {a.cfg.seed};
  m.config = {{"manifest", a.manifest}, {"arch", a.arch},
              {"lr", a.cfg.lr},         {"weight_decay", a.cfg.weight_decay},
              {"max_epochs", a.cfg.max_epochs}, {"patience", a.cfg.patience},
              {"dropout", a.cfg.dropout},       {"hidden_dim", a.cfg.hidden_dim},
              {"heads", a.cfg.heads},           {"seed", a.cfg.seed},
              {"split_ratio", a.split_ratio}};
  m.input_hashes[a.manifest] = fnv1a_file_hex(a.manifest);
  m.outputs = {a.out};
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const fs::path outdir = fs::path(a.out).parent_path();
  write_run_manifest(m, outdir.empty() ? "." : outdir.string());

  std::cout << ckpt.metadata.dump(2) << '\n';
  return 0;
}

struct MinePairsArgs {
  std::string manifest;
  std::string out = "pairs.tsv";
  StructPairConfig cfg;
};

int cmd_mine_pairs(const MinePairsArgs& a) {
  const Graph g = load_graph(a.manifest);
  const UnlabeledGraph view(g);
  MiningStats stats;
  const PairSet pairs = mine_pairs(view, a.cfg, &stats);
  write_pairs_tsv(pairs, a.out);
  json report = {{"kappa", a.cfg.kappa == 0 ? g.n_edges : a.cfg.kappa},
                 {"max_hop", a.cfg.max_hop},
                 {"candidates", stats.candidates},
                 {"selected", pairs.structural.size()},
                 {"wall_seconds", stats.wall_seconds},
                 {"out", a.out}};

  RunManifest m;
  m.subcommand = "mine-pairs";
  m.config = {{"manifest", a.manifest},       {"kappa", a.cfg.kappa},
              {"max_hop", a.cfg.max_hop},     {"bin_base", a.cfg.bin_base},
              {"use_binning", a.cfg.use_binning}, {"exclude_edges", a.cfg.exclude_edges}};
  m.input_hashes[a.manifest] = fnv1a_file_hex(a.manifest);
  m.outputs = {a.out};
  m.wall_seconds = stats.wall_seconds;
  const fs::path outdir = fs::path(a.out).parent_path();
  write_run_manifest(m, outdir.empty() ? "." : outdir.string());

  std::cout << report.dump(2) << '\n';
  return 0;
}

struct AdaptArgs {
  std::string ckpt;
  std::string target_manifest;
  std::string pairs_path;
  std::string prior_path;
  std::string eval_labels;
  std::string marginal = "entropy";
  std::string out = "adapt_out";
  SogaConfig cfg;
  int jobs = 1;
};

int cmd_adapt(AdaptArgs a) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelCheckpoint source = load_checkpoint(a.ckpt);
  const Graph target = load_graph(a.target_manifest);
  const UnlabeledGraph view(target);

  if (a.marginal == "entropy") {
    a.cfg.marginal_mode = SogaConfig::MarginalMode::kEntropy;
  } else if (a.marginal == "kl") {
    a.cfg.marginal_mode = SogaConfig::MarginalMode::kKlToPrior;
    if (a.prior_path.empty()) throw ConfigError("--marginal kl requires --prior");
  } else {
    throw ConfigError("--marginal must be entropy or kl");
  }
  if (!a.prior_path.empty()) a.cfg.label_prior = load_prior(a.prior_path);

  PairSet pairs;
  if (a.pairs_path.empty()) {
    StructPairConfig mine_cfg;
    mine_cfg.jobs = a.jobs;
    pairs = mine_pairs(view, mine_cfg);
  } else {
    pairs = load_pairs_tsv(a.pairs_path, view);
  }

  // Optional evaluation labels feed the per-epoch curve only; the adaptation
  // call itself sees just the unlabeled view.
  std::vector<int> eval_labels;
  std::vector<double> f1_trace;
  EpochObserver observer;
  if (!a.eval_labels.empty()) {
    eval_labels = load_labels_file(a.eval_labels);
    if (eval_labels.size() != target.n_nodes)
      throw DataError("--eval-labels: label count does not match target nodes");
    observer = [&](int, const Tensor& pred) {
      f1_trace.push_back(macro_f1(argmax_rows(pred), eval_labels, source.n_classes));
    };
  }

  auto [adapted, record] = adapt(source, view, pairs, a.cfg, observer);
  for (std::size_t e = 0; e < f1_trace.size() && e < record.epochs.size(); ++e)
    record.epochs[e].macro_f1 = f1_trace[e];

  fs::create_directories(a.out);
  const fs::path out(a.out);
  save_checkpoint(adapted, (out / "adapted.ckpt").string());
  write_curve_csv(record, (out / "curve.csv").string());
  write_pred_csv(predict(adapted, view), (out / "pred.csv").string());

  RunManifest m;
  m.subcommand = "adapt";
  m.seeds = {a.cfg.seed};
  m.config = {{"ckpt", a.ckpt},
              {"target_manifest", a.target_manifest},
              {"pairs", a.pairs_path},
              {"lambda1", a.cfg.lambda1},
              {"lambda2", a.cfg.lambda2},
              {"negatives", a.cfg.negatives},
              {"lr", a.cfg.lr},
              {"epochs", a.cfg.epochs},
              {"seed", a.cfg.seed},
              {"marginal", a.marginal},
              {"prior", a.prior_path},
              {"im_weight", a.cfg.im_weight},
              {"marginal_weight", a.cfg.marginal_weight},
              {"raw_sums", a.cfg.raw_sums},
              {"eval_labels", a.eval_labels}};
  m.input_hashes[a.ckpt] = fnv1a_file_hex(a.ckpt);
  m.input_hashes[a.target_manifest] = fnv1a_file_hex(a.target_manifest);
  if (!a.pairs_path.empty()) m.input_hashes[a.pairs_path] = fnv1a_file_hex(a.pairs_path);
  m.outputs = {"adapted.ckpt", "curve.csv", "pred.csv"};
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_run_manifest(m, a.out);

  json report = {{"out", a.out},
                 {"epochs", a.cfg.epochs},
                 {"final_objective",
                  record.epochs.empty() ? json(nullptr) : json(record.epochs.back().total)}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

struct EvalArgs {
  std::string pred;
  std::string ckpt;
  std::string manifest;
  std::string labels;
  std::string out;
  std::size_t k = 0;
};

int cmd_eval(const EvalArgs& a) {
  Tensor pred;
  if (!a.pred.empty()) {
    pred = load_pred_csv(a.pred);
  } else if (!a.ckpt.empty() && !a.manifest.empty()) {
    const ModelCheckpoint ckpt = load_checkpoint(a.ckpt);
    const Graph g = load_graph(a.manifest);
    if (g.n_classes != ckpt.n_classes)
      throw DataError("eval: checkpoint predicts " + std::to_string(ckpt.n_classes) +
                      " classes but the dataset declares " + std::to_string(g.n_classes));
    pred = predict(ckpt, UnlabeledGraph(g));
  } else {
    throw ConfigError("eval needs --pred or both --ckpt and --manifest");
  }
  const std::vector<int> labels = load_labels_file(a.labels);
  if (labels.size() != pred.rows)
    throw DataError("eval: " + std::to_string(labels.size()) + " labels vs " +
                    std::to_string(pred.rows) + " prediction rows");
  const std::size_t k = a.k > 0 ? a.k : pred.cols;
  const MetricReport r = classification_report(argmax_rows(pred), labels, k);

  json per_class = json::array();
  for (std::size_t c = 0; c < k; ++c)
    per_class.push_back(
        {{"precision", r.precision[c]}, {"recall", r.recall[c]}, {"f1", r.f1[c]}});
  json report = {{"macro_f1", r.macro_f1},
                 {"micro_f1", r.micro_f1},
                 {"per_class", per_class},
                 {"confusion", r.confusion}};
  const std::string text = report.dump(2);
  if (!a.out.empty()) {
    std::ofstream outf(a.out);
    outf << text << '\n';
    RunManifest m;
    m.subcommand = "eval";
    m.config = {{"pred", a.pred}, {"ckpt", a.ckpt},   {"manifest", a.manifest},
                {"labels", a.labels}, {"k", k}, {"out", a.out}};
    m.input_hashes[a.labels] = fnv1a_file_hex(a.labels);
    if (!a.pred.empty()) m.input_hashes[a.pred] = fnv1a_file_hex(a.pred);
    if (!a.ckpt.empty()) m.input_hashes[a.ckpt] = fnv1a_file_hex(a.ckpt);
    m.outputs = {a.out};
    const fs::path outdir = fs::path(a.out).parent_path();
    write_run_manifest(m, outdir.empty() ? "." : outdir.string());
  }
  std::cout << text << '\n';
  return 0;
}

struct VerifyLemmasArgs {
  int classes = 6;
  int nodes = 200;
  int steps = 1000;
  double lr = 0.1;
  std::uint64_t seed = 1;
  double rp = 0.7;
  double rn = 0.7;
  int pos = 100;
  int neg = 100;
};

int cmd_verify_lemmas(const VerifyLemmasArgs& a) {
  const Lemma1Report l1 = verify_lemma1(a.classes, a.nodes, a.steps, a.lr, a.seed);
  LemmaTwoSetup setup;
  setup.r_p = a.rp;
  setup.r_n = a.rn;
  setup.n_pos = a.pos;
  setup.n_neg = a.neg;
  setup.seed = a.seed;
  const Lemma2Report l2 = verify_lemma2(setup);

  json report = {
      {"lemma1",
       {{"n_nodes", l1.n_nodes},
        {"n_classes", l1.n_classes},
        {"steps", l1.steps},
        {"max_linf_deviation", l1.max_linf_deviation}}},
      {"lemma2",
       {{"r_p", a.rp},
        {"r_n", a.rn},
        {"auc_before", l2.auc_before},
        {"expected_before", l2.expected_before},
        {"auc_after", l2.auc_after},
        {"expected_after", l2.expected_after},
        {"improvement", l2.improvement},
        {"max_hardening_gap", l2.max_hardening_gap}}},
  };
  std::cout << report.dump(2) << '\n';
  return 0;
}

int cmd_run_benchmark(const std::string& config_path, const std::string& out_override,
                      int jobs_override) {
  BenchConfig cfg = parse_bench_config(load_json_file(config_path));
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (jobs_override > 0) cfg.jobs = jobs_override;
  const BenchResult result = run_benchmark(cfg);
  std::cout << result.summary.dump(2) << '\n';
  for (const CellResult& c : result.cells)
    if (!c.ok)
      std::fprintf(stderr, "cell %s/%s/seed%llu failed: %s\n", c.arch.c_str(),
                   c.variant.c_str(), static_cast<unsigned long long>(c.seed),
                   c.error.c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              int jobs_override) {
  SweepConfig cfg = parse_sweep_config(load_json_file(config_path));
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (jobs_override > 0) cfg.jobs = jobs_override;
  const SweepResult result = sweep_lambdas(cfg);
  json report = {{"epochs", result.epochs},
                 {"rows", result.local_heavy.epoch_mean.size()},
                 {"out", cfg.out_dir}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"source-free graph domain adaptation toolkit"};
  app.require_subcommand(1);
  int jobs = default_jobs();

  GenDataArgs gen;
  auto* sc_gen = app.add_subcommand("gen-data", "generate a synthetic cross-domain pair");
  sc_gen->add_option("--out", gen.out, "output directory");
  sc_gen->add_option("--n-nodes", gen.cfg.n_nodes);
  sc_gen->add_option("--classes", gen.cfg.n_classes);
  sc_gen->add_option("--features", gen.cfg.feature_dim);
  sc_gen->add_option("--p-in", gen.cfg.p_in);
  sc_gen->add_option("--p-out", gen.cfg.p_out);
  sc_gen->add_option("--rho", gen.cfg.density_ratio, "target density ratio");
  sc_gen->add_option("--delta", gen.cfg.feature_shift, "feature shift magnitude");
  sc_gen->add_option("--noise", gen.cfg.feature_noise);
  sc_gen->add_option("--seed", gen.cfg.seed);
  sc_gen->add_flag("--drop-target-labels", gen.drop_target_labels,
                   "write the target manifest without labels");

  TrainSourceArgs train;
  auto* sc_train = app.add_subcommand("train-source", "train a source model");
  sc_train->add_option("--manifest", train.manifest)->required();
  sc_train->add_option("--out", train.out, "checkpoint path");
  sc_train->add_option("--arch", train.arch, "gcn|graphsage|gat");
  sc_train->add_option("--lr", train.cfg.lr);
  sc_train->add_option("--weight-decay", train.cfg.weight_decay);
  sc_train->add_option("--epochs", train.cfg.max_epochs);
  sc_train->add_option("--patience", train.cfg.patience);
  sc_train->add_option("--dropout", train.cfg.dropout);
  sc_train->add_option("--hidden", train.cfg.hidden_dim);
  sc_train->add_option("--heads", train.cfg.heads);
  sc_train->add_option("--seed", train.cfg.seed);
  sc_train->add_option("--split-ratio", train.split_ratio);

  MinePairsArgs mine;
  auto* sc_mine = app.add_subcommand("mine-pairs", "mine structural-role pairs");
  sc_mine->add_option("--manifest", mine.manifest)->required();
  sc_mine->add_option("--out", mine.out, "pairs TSV path");
  sc_mine->add_option("--kappa", mine.cfg.kappa, "0 = edge count");
  sc_mine->add_option("--max-hop", mine.cfg.max_hop);
  sc_mine->add_option("--bin-base", mine.cfg.bin_base);
  bool no_binning = false;
  sc_mine->add_flag("--no-binning", no_binning, "disable candidate pruning");
  sc_mine->add_flag("--exclude-edges", mine.cfg.exclude_edges);
  sc_mine->add_option("--jobs", mine.cfg.jobs);

  AdaptArgs ad;
  auto* sc_adapt = app.add_subcommand("adapt", "source-free adaptation on a target graph");
  sc_adapt->add_option("--ckpt", ad.ckpt)->required();
  sc_adapt->add_option("--target-manifest", ad.target_manifest)->required();
  sc_adapt->add_option("--pairs", ad.pairs_path, "pairs TSV (mined on the fly if absent)");
  sc_adapt->add_option("--lambda1", ad.cfg.lambda1);
  sc_adapt->add_option("--lambda2", ad.cfg.lambda2);
  sc_adapt->add_option("--neg", ad.cfg.negatives);
  sc_adapt->add_option("--lr", ad.cfg.lr);
  sc_adapt->add_option("--epochs", ad.cfg.epochs);
  sc_adapt->add_option("--seed", ad.cfg.seed);
  sc_adapt->add_option("--marginal", ad.marginal, "entropy|kl");
  sc_adapt->add_option("--prior", ad.prior_path, "label prior file (one float per line)");
  sc_adapt->add_option("--out", ad.out, "output directory");
  sc_adapt->add_option("--im-weight", ad.cfg.im_weight);
  sc_adapt->add_option("--marginal-weight", ad.cfg.marginal_weight);
  sc_adapt->add_flag("--raw-sums", ad.cfg.raw_sums, "literal unnormalized pair sums");
  sc_adapt->add_option("--eval-labels", ad.eval_labels,
                       "evaluation-only labels for the per-epoch curve");
  sc_adapt->add_option("--jobs", ad.jobs);

  EvalArgs ev;
  auto* sc_eval = app.add_subcommand("eval", "score predictions against labels");
  sc_eval->add_option("--pred", ev.pred, "prediction CSV");
  sc_eval->add_option("--ckpt", ev.ckpt);
  sc_eval->add_option("--manifest", ev.manifest);
  sc_eval->add_option("--labels", ev.labels)->required();
  sc_eval->add_option("--k", ev.k, "class count (default: prediction columns)");
  sc_eval->add_option("--out", ev.out, "also write the JSON report here");

  VerifyLemmasArgs vl;
  auto* sc_lemmas = app.add_subcommand("verify-lemmas", "empirical lemma checks");
  sc_lemmas->add_option("--classes", vl.classes);
  sc_lemmas->add_option("--nodes", vl.nodes);
  sc_lemmas->add_option("--steps", vl.steps);
  sc_lemmas->add_option("--lr", vl.lr);
  sc_lemmas->add_option("--seed", vl.seed);
  sc_lemmas->add_option("--rp", vl.rp);
  sc_lemmas->add_option("--rn", vl.rn);
  sc_lemmas->add_option("--pos", vl.pos);
  sc_lemmas->add_option("--neg", vl.neg);

  std::string bench_config, bench_out;
  auto* sc_bench = app.add_subcommand("run-benchmark", "multi-seed benchmark protocol");
  sc_bench->add_option("--config", bench_config)->required();
  sc_bench->add_option("--out", bench_out, "override the output directory");
  sc_bench->add_option("--jobs", jobs);

  std::string sweep_config, sweep_out;
  auto* sc_sweep = app.add_subcommand("sweep-lambdas", "lambda sensitivity protocol");
  sc_sweep->add_option("--config", sweep_config)->required();
  sc_sweep->add_option("--out", sweep_out, "override the output directory");
  sc_sweep->add_option("--jobs", jobs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sc_gen) return cmd_gen_data(gen);
    if (*sc_train) return cmd_train_source(train);
    if (*sc_mine) {
      mine.cfg.use_binning = !no_binning;
      return cmd_mine_pairs(mine);
    }
    if (*sc_adapt) return cmd_adapt(ad);
    if (*sc_eval) return cmd_eval(ev);
    if (*sc_lemmas) return cmd_verify_lemmas(vl);
    if (*sc_bench) return cmd_run_benchmark(bench_config, bench_out, jobs);
    if (*sc_sweep) return cmd_sweep(sweep_config, sweep_out, jobs);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 4;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
