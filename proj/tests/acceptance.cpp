// Acceptance suite: one pass/fail line per criterion, each criterion
// self-contained and runnable alone via `acceptance <n>`. Exit 0 when every
// selected criterion passes, 1 otherwise, 77 when the only selected
// criterion is skipped (externally-supplied datasets absent).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "soga/adapt.hpp"
#include "soga/bench.hpp"
#include "soga/datagen.hpp"
#include "soga/lemmas.hpp"

using namespace soga;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

int env_jobs() {
  if (const char* env = std::getenv("SOGA_JOBS")) {
    const int j = std::atoi(env);
    if (j >= 1) return j;
  }
  return 2;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// The desk-scale cross-domain task family used by criteria 6, 7 and 9:
// feature shift 1.0 plus a density ratio, n=1000, k=4.
DomainPairConfig task_datagen(double rho) {
  DomainPairConfig d;
  d.n_nodes = 1000;
  d.n_classes = 4;
  d.feature_dim = 32;
  d.p_in = 0.008;
  d.p_out = 0.0008;
  d.density_ratio = rho;
  d.feature_shift = 1.0;
  d.feature_noise = 2.0;
  d.seed = 7;
  return d;
}

BenchConfig task_bench(double rho) {
  BenchConfig cfg;
  cfg.datagen = task_datagen(rho);
  cfg.archs = {Arch::kGcn, Arch::kGraphSage, Arch::kGat};
  cfg.seeds = {1, 3, 5, 7, 9};
  cfg.variants = {"full"};
  // Defaults everywhere; the adaptation step size is the one protocol
  // parameter fixed for the whole desk-scale family (all architectures,
  // both tasks), chosen once and recorded.
  cfg.adapt_cfg.lr = 3e-4;
  cfg.out_dir = "";
  cfg.jobs = env_jobs();
  return cfg;
}

double median5(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic gradients of the supervised loss, both entropy
// terms, the KL replacement and the negative-sampled structure objective
// against central finite differences through a 10-node model.

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < 10; ++u)
    for (int v = u + 1; v < 10; ++v)
      if (unit(rng) < 0.4) edges.emplace_back(u, v);
  Tensor x = gaussian(10, 5, 0.0, 1.0, rng);
  std::vector<int> labels(10);
  for (int i = 0; i < 10; ++i) labels[i] = i % 3;
  const Graph g = build_graph(10, edges, std::move(x), labels, 3);
  const UnlabeledGraph view(g);

  StructPairConfig mine_cfg;
  const PairSet pairs = mine_pairs(view, mine_cfg);
  SogaConfig soga_cfg;
  NegativeSampler sampler(3, 10);
  const NegativeDraw negs = sampler.draw(pairs, soga_cfg.negatives);
  const std::vector<int> train_idx = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const std::vector<double> prior = {0.5, 0.3, 0.2};

  using LossFn = std::function<Var(Tape&, Var pred)>;
  const std::vector<std::pair<std::string, LossFn>> losses = {
      {"cross-entropy", [&](Tape& t, Var pred) {
         return cross_entropy_loss(t, pred, labels, train_idx);
       }},
      {"conditional-entropy", [&](Tape&, Var pred) { return conditional_entropy(pred); }},
      {"marginal-entropy", [&](Tape&, Var pred) { return marginal_entropy(pred); }},
      {"kl-marginal", [&](Tape&, Var pred) { return kl_marginal(pred, prior); }},
      {"structure-consistency", [&](Tape&, Var pred) {
         return sc_objective(pred, pairs, negs, soga_cfg);
       }},
  };

  double worst = 0.0;
  std::string worst_name;
  for (Arch arch : {Arch::kGcn, Arch::kGraphSage, Arch::kGat}) {
    std::mt19937_64 mrng(7);
    ModelCheckpoint model = init_model(arch, 5, 6, 3, 2, 0.0, mrng);
    for (const auto& [name, loss_fn] : losses) {
      // Analytic pass.
      Tape tape;
      std::vector<Var> pvars;
      Var pred = forward(tape, model, view, Mode::kEval, nullptr, &pvars);
      tape.backward(loss_fn(tape, pred));
      std::vector<Tensor> analytic;
      for (Var v : pvars) analytic.push_back(tape.grad(v));

      auto value_at = [&]() {
        Tape t2;
        Var p2 = forward(t2, model, view, Mode::kEval);
        return t2.value(loss_fn(t2, p2)).scalar_value();
      };
      const double step = 1e-6;
      for (std::size_t pi = 0; pi < model.params.size(); ++pi)
        for (std::size_t j = 0; j < model.params[pi].size(); ++j) {
          const double keep = model.params[pi].data[j];
          model.params[pi].data[j] = keep + step;
          const double up = value_at();
          model.params[pi].data[j] = keep - step;
          const double down = value_at();
          model.params[pi].data[j] = keep;
          const double fd = (up - down) / (2 * step);
          const double a = analytic[pi].data[j];
          const double rel = std::abs(a - fd) / std::max(1.0, std::abs(a));
          if (rel > worst) {
            worst = rel;
            worst_name = arch_name(arch) + "/" + name;
          }
        }
    }
  }
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = worst < 1e-4 && secs < 30.0;
  out.detail = fmt("max rel err %.2e (worst: %s), %.1f s (limit 30)", worst,
                   worst_name.c_str(), secs);
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 2: entropy descent over 200 free logit rows, k=6, with
// constructed eta in {1,2,3} ties; every node within 1e-3 of 1/eta mass.

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const Lemma1Report r = verify_lemma1(6, 200, 1000, 0.1, 42);
  int within = 0;
  for (double d : r.per_node_deviation) within += d < 1e-3;
  const double secs = seconds_since(t0);
  Outcome out;
  const bool ties_present = r.eta[0] == 1 && r.eta[1] == 2 && r.eta[2] == 3;
  out.pass = within == r.n_nodes && ties_present && secs < 60.0;
  out.detail = fmt("%d/%d nodes within 1e-3 (max dev %.2e), eta rows {%d,%d,%d}, %.1f s",
                   within, r.n_nodes, r.max_linf_deviation, r.eta[0], r.eta[1], r.eta[2],
                   secs);
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 3: the AUC lower-bound jump. Worst case at r_p = r_n = 0.7, then
// 20 random accuracy grids where after-hardening AUC must equal
// (r_p + r_n) / 2 by pair counting.

Outcome criterion3() {
  LemmaTwoSetup base;
  base.r_p = 0.7;
  base.r_n = 0.7;
  base.n_pos = 100;
  base.n_neg = 100;
  base.seed = 5;
  const Lemma2Report main = verify_lemma2(base);
  bool ok = std::abs(main.auc_before - 0.49) <= 0.02;
  ok = ok && std::abs(main.auc_after - 0.70) <= 1e-12;
  ok = ok && std::abs(main.improvement - 0.21) <= 0.02;
  ok = ok && main.max_hardening_gap < 1e-3;

  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> pct(50, 100);  // accuracies in {0.50..1.00}
  double worst_gap = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    LemmaTwoSetup s;
    s.r_p = pct(rng) / 100.0;
    s.r_n = pct(rng) / 100.0;
    s.n_pos = 100;
    s.n_neg = 100;
    s.seed = 1000 + trial;
    const Lemma2Report r = verify_lemma2(s);
    const double gap = std::abs(r.auc_after - 0.5 * (s.r_p + s.r_n));
    worst_gap = std::max(worst_gap, gap);
    ok = ok && gap <= 1e-12 && r.auc_before >= r.expected_before - 1e-12;
  }
  Outcome out;
  out.pass = ok;
  out.detail = fmt("before %.4f, after %.4f, improvement %.4f; grid worst |after-(rp+rn)/2| %.1e",
                   main.auc_before, main.auc_after, main.improvement, worst_gap);
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 4: mining equals the exact oracle bit-for-bit on 50 random
// graphs with binning disabled and kappa = |E_t|.

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(404);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> n_dist(10, 100);
    const int n = n_dist(rng);
    std::uniform_real_distribution<double> p_dist(0.05, 0.25);
    const double p = p_dist(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (unit(rng) < p) edges.emplace_back(u, v);
    const Graph g = build_graph(n, edges, Tensor(n, 1, 0.0), {}, 2);
    if (g.n_edges == 0) continue;
    StructPairConfig cfg;
    cfg.use_binning = false;
    cfg.jobs = env_jobs();
    const PairSet mined = mine_pairs(UnlabeledGraph(g), cfg);
    const PairSet brute = brute_force_pairs(UnlabeledGraph(g), cfg);
    if (mined.structural != brute.structural || mined.distances != brute.distances) {
      Outcome out;
      out.detail = fmt("divergence at trial %d (n=%d)", trial, n);
      return out;
    }
    checked++;
  }
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = checked >= 45 && secs < 60.0;
  out.detail = fmt("%d/50 graphs bit-identical (rest edgeless), %.1f s", checked, secs);
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 5: metric implementations against the independent oracles on
// 1000 random instances each.

Outcome criterion5() {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> n_dist(1, 50), k_dist(2, 6);
    const int n = n_dist(rng), k = k_dist(rng);
    std::uniform_int_distribution<int> cls(0, k - 1);
    std::vector<int> pred(n), truth(n);
    for (int i = 0; i < n; ++i) {
      pred[i] = cls(rng);
      truth[i] = cls(rng);
    }
    if (std::abs(macro_f1(pred, truth, k) - oracles::macro_f1(pred, truth, k)) > 1e-12 ||
        std::abs(micro_f1(pred, truth, k) - oracles::micro_f1(pred, truth)) > 1e-12) {
      Outcome out;
      out.detail = fmt("f1 divergence at trial %d", trial);
      return out;
    }
  }
  std::uniform_int_distribution<int> n_dist(2, 40), grid(0, 9), lab(0, 1);
  int auc_checked = 0;
  for (int trial = 0; trial < 2000 && auc_checked < 1000; ++trial) {
    const int n = n_dist(rng);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has_pos = false, has_neg = false;
    for (int i = 0; i < n; ++i) {
      scores[i] = grid(rng) / 10.0;
      labels[i] = lab(rng);
      (labels[i] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;
    if (std::abs(auc_binary(scores, labels) - oracles::auc_midrank(scores, labels)) >
        1e-12) {
      Outcome out;
      out.detail = fmt("auc divergence at trial %d", trial);
      return out;
    }
    auc_checked++;
  }
  Outcome out;
  out.pass = auc_checked == 1000;
  out.detail = fmt("1000 f1 instances and %d auc instances match within 1e-12", auc_checked);
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 6: end-to-end adaptation on both synthetic tasks, all three
// architectures, seeds {1,3,5,7,9}, lambda defaults, median improvement.

Outcome criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  out.pass = true;
  std::string detail;
  for (double rho : {0.25, 4.0}) {
    BenchConfig cfg = task_bench(rho);
    if (cfg.adapt_cfg.lambda1 != 1.0 || cfg.adapt_cfg.lambda2 != 1.0) {
      out.pass = false;
      out.detail = "lambda defaults not in effect";
      return out;
    }
    const BenchResult r = run_benchmark(cfg);
    for (Arch arch : cfg.archs) {
      std::vector<double> unadapted, adapted;
      for (const CellResult& c : r.cells) {
        if (c.arch != arch_name(arch) || !c.ok) continue;
        unadapted.push_back(c.unadapted_macro_f1);
        adapted.push_back(c.adapted_macro_f1);
      }
      if (unadapted.size() != 5) {
        out.pass = false;
        detail += fmt("[rho=%.2f %s: cells failed] ", rho, arch_name(arch).c_str());
        continue;
      }
      const double mu = median5(unadapted), ma = median5(adapted);
      if (!(ma > mu)) out.pass = false;
      detail += fmt("rho=%.2f %s %.3f->%.3f%s ", rho, arch_name(arch).c_str(), mu, ma,
                    ma > mu ? "" : " NOT-IMPROVED");
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 900.0) out.pass = false;
  out.detail = detail + fmt("(%.0f s, limit 900)", secs);
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 7: ablation variants on the harder task; the three variants must
// run and emit the stability-table artifacts (hard), and the full objective
// should be at least as stable as IM-only in 4/5 seeds (soft, reported).

Outcome criterion7() {
  BenchConfig cfg = task_bench(0.25);
  cfg.archs = {Arch::kGcn};
  cfg.variants = {"full", "im", "sc"};
  const fs::path outdir =
      fs::temp_directory_path() / ("soga_acceptance_c7_" + std::to_string(::getpid()));
  cfg.out_dir = outdir.string();
  const BenchResult r = run_benchmark(cfg);

  bool hard = fs::exists(outdir / "results.csv") && fs::exists(outdir / "results.json");
  std::map<std::string, int> variant_cells;
  std::map<std::uint64_t, double> full_std, im_std;
  for (const CellResult& c : r.cells) {
    if (!c.ok || c.stability_std < 0.0) continue;
    variant_cells[c.variant]++;
    if (c.variant == "full") full_std[c.seed] = c.stability_std;
    if (c.variant == "im") im_std[c.seed] = c.stability_std;
  }
  hard = hard && variant_cells["full"] == 5 && variant_cells["im"] == 5 &&
         variant_cells["sc"] == 5;

  int wins = 0;
  for (const auto& [seed, s] : full_std)
    if (im_std.count(seed) && s <= im_std[seed]) wins++;

  fs::remove_all(outdir);
  Outcome out;
  out.pass = hard;
  out.detail = fmt("3 variants x 5 seeds with stability stats emitted; soft criterion: "
                   "full std <= im std in %d/5 seeds (%s)",
                   wins, wins >= 4 ? "met" : "not met, reported");
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 8 (optional, environment-dependent): full-scale citation-network
// reproduction. Requires SOGA_DBLP_ACM_DIR with acmv9/manifest.json and
// dblpv8/manifest.json in the dataset manifest format.

Outcome criterion8() {
  const char* dir = std::getenv("SOGA_DBLP_ACM_DIR");
  Outcome out;
  if (!dir) {
    out.skipped = true;
    out.detail = "SOGA_DBLP_ACM_DIR not set; externally obtained datasets required";
    return out;
  }
  const auto t0 = std::chrono::steady_clock::now();
  BenchConfig cfg;
  cfg.source_manifest = (fs::path(dir) / "acmv9" / "manifest.json").string();
  cfg.target_manifest = (fs::path(dir) / "dblpv8" / "manifest.json").string();
  cfg.archs = {Arch::kGcn};
  cfg.seeds = {1, 3, 5, 7, 9};
  cfg.variants = {"full"};
  cfg.out_dir = "";
  cfg.jobs = env_jobs();
  const BenchResult r = run_benchmark(cfg);
  std::vector<double> adapted;
  for (const CellResult& c : r.cells)
    if (c.ok) adapted.push_back(c.adapted_macro_f1);
  if (adapted.size() != 5) {
    out.detail = "cells failed";
    return out;
  }
  double mean = 0.0;
  for (double v : adapted) mean += v;
  mean /= adapted.size();
  out.pass = std::abs(mean - 0.928) <= 0.05;
  out.detail = fmt("acmv9->dblpv8 gcn adapted macro-f1 mean %.3f (target 0.928 +/- 0.05), %.0f s",
                   mean, seconds_since(t0));
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 9: the source-free contract. The adaptation pipeline must run
// end-to-end against a label-free target manifest, and the label-free view
// type must not expose labels at all.

template <typename T>
auto probe_labels(int) -> decltype(std::declval<T>().labels, std::true_type{});
template <typename T>
std::false_type probe_labels(...);
static_assert(!decltype(probe_labels<UnlabeledGraph>(0))::value,
              "UnlabeledGraph must not expose label data");

Outcome criterion9() {
  const fs::path dir =
      fs::temp_directory_path() / ("soga_acceptance_c9_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  DomainPairConfig d = task_datagen(1.0);
  d.n_nodes = 300;
  auto [source, target] = gen_pair(d);
  target.labels.clear();  // label-free target dataset on disk
  const std::string src_manifest = write_graph(source, (dir / "source").string());
  const std::string tgt_manifest = write_graph(target, (dir / "target").string());

  BenchConfig cfg;
  cfg.source_manifest = src_manifest;
  cfg.target_manifest = tgt_manifest;
  cfg.archs = {Arch::kGcn};
  cfg.seeds = {1};
  cfg.source_train.hidden_dim = 32;
  cfg.source_train.max_epochs = 30;
  cfg.adapt_cfg.epochs = 25;
  cfg.adapt_cfg.lr = 3e-4;
  cfg.out_dir = (dir / "bench").string();
  cfg.jobs = 1;
  const BenchResult r = run_benchmark(cfg);

  Outcome out;
  out.pass = !r.target_labeled && r.cells.size() == 1 && r.cells[0].ok &&
             r.cells[0].adapted_macro_f1 < 0.0 &&  // evaluation really skipped
             fs::exists(fs::path(cfg.out_dir) / "results.csv");
  out.detail = fmt("label-free manifest: adaptation %s, evaluation skipped, "
                   "no label accessor compiles on the unlabeled view",
                   r.cells.size() == 1 && r.cells[0].ok ? "completed" : "FAILED");
  fs::remove_all(dir);
  return out;
}

using CriterionFn = Outcome (*)();

struct Criterion {
  int number;
  const char* title;
  CriterionFn fn;
};

const Criterion kCriteria[] = {
    {1, "gradient suite vs central finite differences", criterion1},
    {2, "entropy descent converges to 1/eta on the argmax set", criterion2},
    {3, "auc lower-bound jump 0.49 -> 0.70 and grid identity", criterion3},
    {4, "pair mining equals the exact oracle bit-for-bit", criterion4},
    {5, "metric oracles agree on 1000 random instances", criterion5},
    {6, "end-to-end adaptation improves all architectures", criterion6},
    {7, "ablation variants run with stability statistics", criterion7},
    {8, "full-scale citation-network reproduction (optional)", criterion8},
    {9, "source-free contract: no label path into adaptation", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  bool only_skipped = false;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.number != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(t0);
    const char* tag = out.skipped ? "SKIP" : out.pass ? "PASS" : "FAIL";
    std::printf("[%s] criterion %d: %s — %s (%.1f s)\n", tag, c.number, c.title,
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass && !out.skipped) failures++;
    if (only != 0 && out.skipped) only_skipped = true;
  }
  if (only_skipped && failures == 0) return 77;
  return failures == 0 ? 0 : 1;
}
