#include "soga/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>

#include "soga/adam.hpp"
#include "soga/error.hpp"
#include "soga/metrics.hpp"

namespace soga {

namespace {

constexpr char kCheckpointMagic[10] = {'S', 'O', 'G', 'A', '-', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint16_t kCheckpointVersion = 1;
constexpr double kAttentionSlope = 0.2;

std::uint8_t arch_tag(Arch a) { return static_cast<std::uint8_t>(a); }

Arch arch_from_tag(std::uint8_t t) {
  if (t > 2) throw DataError("checkpoint: unknown arch tag " + std::to_string(t));
  return static_cast<Arch>(t);
}

// Neighbors-plus-self edge index used by the attention layers.
std::shared_ptr<EdgeIndex> attention_edges(const UnlabeledGraph& g) {
  auto e = std::make_shared<EdgeIndex>();
  const std::size_t n = g.n_nodes();
  e->offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    e->offsets[i + 1] = e->offsets[i] + g.degree(static_cast<int>(i)) + 1;
  e->src.resize(e->offsets[n]);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = e->offsets[i];
    e->src[k++] = static_cast<int>(i);
    for (int j : g.neighbors(static_cast<int>(i))) e->src[k++] = j;
  }
  return e;
}

std::vector<int> edge_dst_ids(const EdgeIndex& e) {
  std::vector<int> dst(e.n_edges());
  for (std::size_t i = 0; i < e.n_nodes(); ++i)
    for (std::size_t k = e.offsets[i]; k < e.offsets[i + 1]; ++k)
      dst[k] = static_cast<int>(i);
  return dst;
}

struct ForwardCtx {
  Tape& tape;
  const ModelCheckpoint& ckpt;
  const UnlabeledGraph& g;
  Mode mode;
  std::mt19937_64* rng;
  std::vector<Var> params;

  Var drop(Var x) {
    if (mode != Mode::kTrain || ckpt.dropout == 0.0) return x;
    if (!rng) throw ConfigError("train-mode forward requires an RNG for dropout");
    return dropout(x, ckpt.dropout, *rng);
  }
};

Var gcn_forward(ForwardCtx& c) {
  auto norm = std::make_shared<SparseMatrix>(normalized_adjacency(c.g));
  Var x = c.tape.constant(c.g.features());
  Var h = c.drop(x);
  h = relu(add(sparse_dense_matmul(norm, matmul(h, c.params[0])), c.params[1]));
  h = c.drop(h);
  return row_softmax(add(sparse_dense_matmul(norm, matmul(h, c.params[2])), c.params[3]));
}

Var sage_layer(Var h, std::shared_ptr<const SparseMatrix> agg, Var w, Var b) {
  Var combined = concat_cols(h, sparse_dense_matmul(agg, h));
  return add(matmul(combined, w), b);
}

Var sage_forward(ForwardCtx& c) {
  auto agg = std::make_shared<SparseMatrix>(mean_aggregation_matrix(c.g));
  Var h = c.drop(c.tape.constant(c.g.features()));
  h = relu(sage_layer(h, agg, c.params[0], c.params[1]));
  h = c.drop(h);
  return row_softmax(sage_layer(h, agg, c.params[2], c.params[3]));
}

// One attention head: project, score neighbor pairs, softmax over each
// neighborhood (self included), aggregate.
Var gat_head(Var h, std::shared_ptr<const EdgeIndex> edges,
             const std::vector<int>& dst, Var w, Var a_center, Var a_neighbor) {
  Var proj = matmul(h, w);
  Var s_center = matmul(proj, a_center);      // n x 1
  Var s_neighbor = matmul(proj, a_neighbor);  // n x 1
  Var e_scores = add(gather_rows(s_center, dst), gather_rows(s_neighbor, edges->src));
  Var alpha = segment_softmax(leaky_relu(e_scores, kAttentionSlope), edges);
  return segment_weighted_rows(alpha, proj, edges);
}

Var gat_forward(ForwardCtx& c) {
  auto edges = attention_edges(c.g);
  const std::vector<int> dst = edge_dst_ids(*edges);
  const std::size_t heads = c.ckpt.heads;

  Var h = c.drop(c.tape.constant(c.g.features()));
  // Layer 1: heads concatenated. Params: per head (W, a_center, a_neighbor),
  // then the layer bias.
  Var cat;
  for (std::size_t head = 0; head < heads; ++head) {
    Var out = gat_head(h, edges, dst, c.params[3 * head], c.params[3 * head + 1],
                       c.params[3 * head + 2]);
    cat = head == 0 ? out : concat_cols(cat, out);
  }
  Var z = relu(add(cat, c.params[3 * heads]));
  z = c.drop(z);

  // Layer 2: heads averaged.
  const std::size_t base = 3 * heads + 1;
  Var avg;
  for (std::size_t head = 0; head < heads; ++head) {
    Var out = gat_head(z, edges, dst, c.params[base + 3 * head],
                       c.params[base + 3 * head + 1], c.params[base + 3 * head + 2]);
    avg = head == 0 ? out : add(avg, out);
  }
  avg = scale(avg, 1.0 / static_cast<double>(heads));
  return row_softmax(add(avg, c.params[base + 3 * heads]));
}

}  // namespace

std::string arch_name(Arch a) {
  switch (a) {
    case Arch::kGcn: return "gcn";
    case Arch::kGraphSage: return "graphsage";
    case Arch::kGat: return "gat";
  }
  return "?";
}

Arch arch_from_name(const std::string& name) {
  if (name == "gcn") return Arch::kGcn;
  if (name == "graphsage" || name == "sage") return Arch::kGraphSage;
  if (name == "gat") return Arch::kGat;
  throw ConfigError("unknown architecture '" + name + "' (expected gcn|graphsage|gat)");
}

std::vector<std::pair<std::size_t, std::size_t>> param_shapes(Arch arch, std::size_t d,
                                                              std::size_t hidden,
                                                              std::size_t k,
                                                              std::size_t heads) {
  using Shape = std::pair<std::size_t, std::size_t>;
  std::vector<Shape> shapes;
  switch (arch) {
    case Arch::kGcn:
      shapes = {{d, hidden}, {1, hidden}, {hidden, k}, {1, k}};
      break;
    case Arch::kGraphSage:
      shapes = {{2 * d, hidden}, {1, hidden}, {2 * hidden, k}, {1, k}};
      break;
    case Arch::kGat: {
      if (heads == 0 || hidden % heads != 0)
        throw ConfigError("gat: hidden_dim " + std::to_string(hidden) +
                          " not divisible by heads " + std::to_string(heads));
      const std::size_t per_head = hidden / heads;
      for (std::size_t h = 0; h < heads; ++h) {
        shapes.push_back({d, per_head});
        shapes.push_back({per_head, 1});
        shapes.push_back({per_head, 1});
      }
      shapes.push_back({1, hidden});
      for (std::size_t h = 0; h < heads; ++h) {
        shapes.push_back({hidden, k});
        shapes.push_back({k, 1});
        shapes.push_back({k, 1});
      }
      shapes.push_back({1, k});
      break;
    }
  }
  return shapes;
}

ModelCheckpoint init_model(Arch arch, std::size_t feature_dim, std::size_t hidden_dim,
                           std::size_t n_classes, std::size_t heads, double dropout,
                           std::mt19937_64& rng) {
  ModelCheckpoint ckpt;
  ckpt.arch = arch;
  ckpt.feature_dim = feature_dim;
  ckpt.hidden_dim = hidden_dim;
  ckpt.n_classes = n_classes;
  ckpt.heads = arch == Arch::kGat ? heads : 1;
  ckpt.dropout = dropout;
  for (auto [r, c] : param_shapes(arch, feature_dim, hidden_dim, n_classes, ckpt.heads)) {
    if (r == 1)  // biases start at zero
      ckpt.params.emplace_back(r, c, 0.0);
    else
      ckpt.params.push_back(glorot_uniform(r, c, rng));
  }
  return ckpt;
}

Var forward(Tape& tape, const ModelCheckpoint& ckpt, const UnlabeledGraph& g, Mode mode,
            std::mt19937_64* rng, std::vector<Var>* param_vars) {
  if (g.feature_dim() != ckpt.feature_dim)
    throw ShapeError("forward: graph feature dim " + std::to_string(g.feature_dim()) +
                     " != checkpoint feature dim " + std::to_string(ckpt.feature_dim));
  const auto shapes =
      param_shapes(ckpt.arch, ckpt.feature_dim, ckpt.hidden_dim, ckpt.n_classes, ckpt.heads);
  if (shapes.size() != ckpt.params.size())
    throw DataError("forward: checkpoint has " + std::to_string(ckpt.params.size()) +
                    " params, expected " + std::to_string(shapes.size()));

  ForwardCtx ctx{tape, ckpt, g, mode, rng, {}};
  ctx.params.reserve(ckpt.params.size());
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    if (ckpt.params[i].rows != shapes[i].first || ckpt.params[i].cols != shapes[i].second)
      throw DataError("forward: param " + std::to_string(i) + " has shape " +
                      shape_string(ckpt.params[i]));
    ctx.params.push_back(tape.leaf(ckpt.params[i], true));
  }
  if (param_vars) *param_vars = ctx.params;

  switch (ckpt.arch) {
    case Arch::kGcn: return gcn_forward(ctx);
    case Arch::kGraphSage: return sage_forward(ctx);
    case Arch::kGat: return gat_forward(ctx);
  }
  throw ConfigError("forward: unknown architecture tag");
}

Tensor predict(const ModelCheckpoint& ckpt, const UnlabeledGraph& g) {
  Tape tape;
  Var pred = forward(tape, ckpt, g, Mode::kEval);
  return tape.value(pred);
}

Var cross_entropy_loss(Tape& tape, Var pred, const std::vector<int>& labels,
                       const std::vector<int>& idx) {
  if (idx.empty()) throw DataError("cross_entropy_loss: empty index set");
  const Tensor& pv = tape.value(pred);
  Tensor mask(pv.rows, pv.cols, 0.0);
  for (int i : idx) {
    if (i < 0 || static_cast<std::size_t>(i) >= pv.rows)
      throw DataError("cross_entropy_loss: index " + std::to_string(i) + " out of range");
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= pv.cols)
      throw DataError("cross_entropy_loss: label " + std::to_string(y) + " out of range");
    mask.at(i, y) = 1.0;
  }
  Var picked = mul(log_guarded(pred), tape.constant(std::move(mask)));
  return scale(sum(picked), -1.0 / static_cast<double>(idx.size()));
}

ModelCheckpoint train_source(const Graph& g, const SplitAssignment& split,
                             const SourceTrainConfig& cfg) {
  if (!g.has_labels()) throw DataError("train_source: graph has no labels");
  if (split.train_idx.empty()) throw DataError("train_source: no labeled nodes in split");
  if (cfg.max_epochs < 0 || cfg.patience < 0 || cfg.lr <= 0.0)
    throw ConfigError("train_source: lr, max_epochs, patience must be positive");

  std::mt19937_64 rng(cfg.seed);
  ModelCheckpoint model = init_model(cfg.arch, g.feature_dim(), cfg.hidden_dim,
                                     g.n_classes, cfg.heads, cfg.dropout, rng);
  const UnlabeledGraph view(g);

  ModelCheckpoint best = model;
  double best_f1 = -1.0;
  int best_epoch = 0;
  int since_best = 0;
  AdamState adam;
  adam.lr = cfg.lr;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Tape tape;
    std::vector<Var> pvars;
    Var pred = forward(tape, model, view, Mode::kTrain, &rng, &pvars);
    Var loss = cross_entropy_loss(tape, pred, g.labels, split.train_idx);
    const double loss_value = tape.value(loss).scalar_value();
    if (!std::isfinite(loss_value))
      throw NumericError("train_source: non-finite loss at epoch " + std::to_string(epoch));
    tape.backward(loss);

    std::vector<Tensor> grads;
    grads.reserve(pvars.size());
    for (std::size_t i = 0; i < pvars.size(); ++i) {
      Tensor grad = tape.grad(pvars[i]);
      if (cfg.weight_decay != 0.0)
        for (std::size_t j = 0; j < grad.size(); ++j)
          grad.data[j] += cfg.weight_decay * model.params[i].data[j];
      grads.push_back(std::move(grad));
    }
    adam_step(model.params, grads, adam);

    if (!split.val_idx.empty()) {
      const Tensor val_pred = predict(model, view);
      std::vector<int> pred_labels = argmax_rows(val_pred);
      std::vector<int> pv, tv;
      for (int i : split.val_idx) {
        pv.push_back(pred_labels[i]);
        tv.push_back(g.labels[i]);
      }
      const double f1 = macro_f1(pv, tv, g.n_classes);
      if (f1 > best_f1) {
        best_f1 = f1;
        best = model;
        best_epoch = epoch;
        since_best = 0;
      } else if (++since_best > cfg.patience) {
        break;
      }
    } else {
      best = model;
      best_epoch = epoch;
    }
  }

  best.metadata = {
      {"seed", cfg.seed},
      {"epochs", best_epoch},
      {"best_val_macro_f1", best_f1 < 0.0 ? nlohmann::json(nullptr) : nlohmann::json(best_f1)},
      {"arch", arch_name(cfg.arch)},
  };
  return best;
}

namespace {

void put_u16(std::ostream& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint16_t get_u16(std::istream& in) {
  unsigned char b[2];
  if (!in.read(reinterpret_cast<char*>(b), 2)) throw DataError("checkpoint: truncated file");
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw DataError("checkpoint: truncated file");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open checkpoint file for writing: " + path);
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u16(out, kCheckpointVersion);
  out.put(static_cast<char>(arch_tag(ckpt.arch)));
  put_u32(out, static_cast<std::uint32_t>(ckpt.feature_dim));
  put_u32(out, static_cast<std::uint32_t>(ckpt.hidden_dim));
  put_u32(out, static_cast<std::uint32_t>(ckpt.n_classes));
  put_u32(out, static_cast<std::uint32_t>(ckpt.heads));
  for (const Tensor& p : ckpt.params) {
    put_u32(out, static_cast<std::uint32_t>(p.rows));
    put_u32(out, static_cast<std::uint32_t>(p.cols));
    for (double v : p.data) put_f64(out, v);
  }
  nlohmann::json trailer = ckpt.metadata;
  trailer["dropout"] = ckpt.dropout;
  out << trailer.dump();
  if (!out) throw DataError("checkpoint write failed: " + path);
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing checkpoint file: " + path);
  char magic[sizeof kCheckpointMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw DataError("checkpoint: bad magic in " + path);
  const std::uint16_t version = get_u16(in);
  if (version != kCheckpointVersion)
    throw DataError("checkpoint: unsupported version " + std::to_string(version));

  ModelCheckpoint ckpt;
  int tag = in.get();
  if (tag == EOF) throw DataError("checkpoint: truncated file");
  ckpt.arch = arch_from_tag(static_cast<std::uint8_t>(tag));
  ckpt.feature_dim = get_u32(in);
  ckpt.hidden_dim = get_u32(in);
  ckpt.n_classes = get_u32(in);
  ckpt.heads = get_u32(in);

  const auto shapes =
      param_shapes(ckpt.arch, ckpt.feature_dim, ckpt.hidden_dim, ckpt.n_classes, ckpt.heads);
  for (auto [r, c] : shapes) {
    const std::uint32_t rows = get_u32(in);
    const std::uint32_t cols = get_u32(in);
    if (rows != r || cols != c)
      throw DataError("checkpoint: param shape header (" + std::to_string(rows) + "x" +
                      std::to_string(cols) + ") inconsistent with (" + std::to_string(r) +
                      "x" + std::to_string(c) + ")");
    Tensor p(rows, cols);
    for (double& v : p.data) v = get_f64(in);
    ckpt.params.push_back(std::move(p));
  }

  std::string trailer((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!trailer.empty()) {
    try {
      ckpt.metadata = nlohmann::json::parse(trailer);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("checkpoint: bad metadata trailer: " + std::string(e.what()));
    }
    if (ckpt.metadata.contains("dropout")) ckpt.dropout = ckpt.metadata["dropout"];
  }
  return ckpt;
}

}  // namespace soga
