#include "soga/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "soga/error.hpp"

namespace soga {

namespace {

void check_same_tape(Var a, Var b) {
  if (a.tape != b.tape) throw std::logic_error("operands live on different tapes");
}

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_string(a) +
                   " and " + shape_string(b));
}

}  // namespace

Var Tape::leaf(Tensor value, bool requires_grad) {
  return record(std::move(value), requires_grad, nullptr);
}

Var Tape::record(Tensor value, bool requires_grad, std::function<void(Tape&)> pull) {
  Node n;
  n.grad = Tensor(value.rows, value.cols, 0.0);
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.pull = std::move(pull);
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

void Tape::backward(Var loss) {
  if (backward_run_)
    throw std::logic_error("backward already run on this tape; call clear_grads first");
  const Tensor& lv = nodes_[loss.id].value;
  if (!(lv.rows == 1 && lv.cols == 1))
    throw ShapeError("backward requires a scalar loss, got " + shape_string(lv));
  backward_run_ = true;
  nodes_[loss.id].grad.data[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.pull) n.pull(*this);
  }
}

void Tape::clear_grads() {
  for (Node& n : nodes_) std::fill(n.grad.data.begin(), n.grad.data.end(), 0.0);
  backward_run_ = false;
}

Var add(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  enum class Mode { kSame, kRowVec, kScalar };
  Mode mode;
  if (av.same_shape(bv))
    mode = Mode::kSame;
  else if (bv.rows == 1 && bv.cols == av.cols)
    mode = Mode::kRowVec;
  else if (bv.is_scalar())
    mode = Mode::kScalar;
  else
    shape_fail("add", av, bv);

  Tensor out = av;
  switch (mode) {
    case Mode::kSame:
      for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += bv.data[i];
      break;
    case Mode::kRowVec:
      for (std::size_t r = 0; r < out.rows; ++r)
        for (std::size_t c = 0; c < out.cols; ++c) out.at(r, c) += bv.data[c];
      break;
    case Mode::kScalar:
      for (double& v : out.data) v += bv.data[0];
      break;
  }

  const bool rg = t.requires_grad(a) || t.requires_grad(b);
  const std::size_t ai = a.id, bi = b.id, oi = t.size();
  return t.record(std::move(out), rg, [ai, bi, oi, mode](Tape& tp) {
    const Tensor& g = tp.grad_buffer(oi);
    if (tp.requires_grad(Var{&tp, ai})) {
      Tensor& ga = tp.grad_buffer(ai);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
    }
    if (tp.requires_grad(Var{&tp, bi})) {
      Tensor& gb = tp.grad_buffer(bi);
      switch (mode) {
        case Mode::kSame:
          for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i];
          break;
        case Mode::kRowVec:
          for (std::size_t r = 0; r < g.rows; ++r)
            for (std::size_t c = 0; c < g.cols; ++c) gb.data[c] += g.at(r, c);
          break;
        case Mode::kScalar:
          for (double v : g.data) gb.data[0] += v;
          break;
      }
    }
  });
}

Var sub(Var a, Var b) { return add(a, scale(b, -1.0)); }

Var mul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  if (!av.same_shape(bv)) shape_fail("mul", av, bv);

  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= bv.data[i];

  const bool rg = t.requires_grad(a) || t.requires_grad(b);
  const std::size_t ai = a.id, bi = b.id, oi = t.size();
  return t.record(std::move(out), rg, [ai, bi, oi](Tape& tp) {
    const Tensor& g = tp.grad_buffer(oi);
    const Tensor& av2 = tp.value(Var{&tp, ai});
    const Tensor& bv2 = tp.value(Var{&tp, bi});
    if (tp.requires_grad(Var{&tp, ai})) {
      Tensor& ga = tp.grad_buffer(ai);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * bv2.data[i];
    }
    if (tp.requires_grad(Var{&tp, bi})) {
      Tensor& gb = tp.grad_buffer(bi);
      for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i] * av2.data[i];
    }
  });
}

Var scale(Var a, double s) {
  Tape& t = *a.tape;
  Tensor out = t.value(a);
  for (double& v : out.data) v *= s;
  const std::size_t ai = a.id, oi = t.size();
  return t.record(std::move(out), t.requires_grad(a), [ai, oi, s](Tape& tp) {
    const Tensor& g = tp.grad_buffer(oi);
    if (!tp.requires_grad(Var{&tp, ai})) return;
    Tensor& ga = tp.grad_buffer(ai);
    for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += s * g.data[i];
  });
}

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  if (av.cols != bv.rows) shape_fail("matmul", av, bv);

  Tensor out(av.rows, bv.cols, 0.0);
  for (std::size_t r = 0; r < av.rows; ++r) {
    for (std::size_t k = 0; k < av.cols; ++k) {
      const double arow = av.at(r, k);
      if (arow == 0.0) continue;
      const double* brow = &bv.data[k * bv.cols];
      double* orow = &out.data[r * out.cols];
      for (std::size_t c = 0; c < bv.cols; ++c) orow[c] += arow * brow[c];
    }
  }

  const bool rg = t.requires_grad(a) || t.requires_grad(b);
  const std::size_t ai = a.id, bi = b.id, oi = t.size();
  return t.record(std::move(out), rg, [ai, bi, oi](Tape& tp) {
    const Tensor& g = tp.grad_buffer(oi);
    const Tensor& av2 = tp.value(Var{&tp, ai});
    const Tensor& bv2 = tp.value(Var{&tp, bi});
    if (tp.requires_grad(Var{&tp, ai})) {
      // dA = g * B^T
      Tensor& ga = tp.grad_buffer(ai);
      for (std::size_t r = 0; r < ga.rows; ++r)
        for (std::size_t k = 0; k < ga.cols; ++k) {
          double acc = 0.0;
          const double* grow = &g.data[r * g.cols];
          const double* brow = &bv2.data[k * bv2.cols];
          for (std::size_t c = 0; c < g.cols; ++c) acc += grow[c] * brow[c];
          ga.data[r * ga.cols + k] += acc;
        }
    }
    if (tp.requires_grad(Var{&tp, bi})) {
      // dB = A^T * g
      Tensor& gb = tp.grad_buffer(bi);
      for (std::size_t k = 0; k < av2.rows; ++k) {
        const double* arow = &av2.data[k * av2.cols];
        const double* grow = &g.data[k * g.cols];
        for (std::size_t r = 0; r < gb.rows; ++r) {
          const double w = arow[r];
          if (w == 0.0) continue;
          double* gbrow = &gb.data[r * gb.cols];
          for (std::size_t c = 0; c < gb.cols; ++c) gbrow[c] += w * grow[c];
        }
      }
    }
  });
}

Var sparse_dense_matmul(std::shared_ptr<const SparseMatrix> s, Var x) {
  Tape& t = *x.tape;
  const Tensor& xv = t.value(x);
  if (s->cols != xv.rows)
    throw ShapeError("sparse_dense_matmul: sparse (" + std::to_string(s->rows) + "x" +
                     std::to_string(s->cols) + ") vs dense " + shape_string(xv));

  Tensor out(s->rows, xv.cols, 0.0);
  for (std::size_t r = 0; r < s->rows; ++r) {
    double* orow = &out.data[r * out.cols];
    for (std::size_t k = s->row_ptr[r]; k < s->row_ptr[r + 1]; ++k) {
      const double w = s->val[k];
      const double* xrow = &xv.data[static_cast<std::size_t>(s->col[k]) * xv.cols];
      for (std::size_t c = 0; c < out.cols; ++c) orow[c] += w * xrow[c];
    }
  }

  auto st = std::make_shared<SparseMatrix>(s->transpose());
  const std::size_t xi = x.id, oi = t.size();
  return t.record(std::move(out), t.requires_grad(x), [st, xi, oi](Tape& tp) {
    if (!tp.requires_grad(Var{&tp, xi})) return;
    const Tensor& g = tp.grad_buffer(oi);
    Tensor& gx = tp.grad_buffer(xi);
    for (std::size_t r = 0; r < st->rows; ++r) {
      double* grow = &gx.data[r * gx.cols];
      for (std::size_t k = st->row_ptr[r]; k < st->row_ptr[r + 1]; ++k) {
        const double w = st->val[k];
        const double* orow = &g.data[static_cast<std::size_t>(st->col[k]) * g.cols];
        for (std::size_t c = 0; c < gx.cols; ++c) grow[c] += w * orow[c];
      }
    }
  });
}

Var row_softmax(Var a) {
  Tape& t = *a.tape;
  const Tensor& av = t.value(a);
  Tensor out(av.rows, av.cols);
  for (std::size_t r = 0; r < av.rows; ++r) {
    const double* x = &av.data[r * av.cols];
    double* y = &out.data[r * av.cols];
    double mx = x[0];
    for (std::size_t c = 1; c < av.cols; ++c) mx = std::max(mx, x[c]);
    double denom = 0.0;
    for (std::size_t c = 0; c < av.cols; ++c) {
      y[c] = std::exp(x[c] - mx);
      denom += y[c];
    }
    for (std::size_t c = 0; c < av.cols; ++c) y[c] /= denom;
  }
  const std::size_t ai = a.id, oi = t.size();
  return t.record(std::move(out), t.requires_grad(a), [ai, oi](Tape& tp) {
    if (!tp.requires_grad(Var{&tp, ai})) return;
    const Tensor& g = tp.grad_buffer(oi);
    const Tensor& y = tp.value(Var{&tp, oi});
    Tensor& ga = tp.grad_buffer(ai);
    for (std::size_t r = 0; r < y.rows; ++r) {
      const double* yr = &y.data[r * y.cols];
      const double* gr = &g.data[r * g.cols];
      double dot = 0.0;
      for (std::size_t c = 0; c < y.cols; ++c) dot += yr[c] * gr[c];
      double* gar = &ga.data[r * y.cols];
      for (std::size_t c = 0; c < y.cols; ++c) gar[c] += yr[c] * (gr[c] - dot);
    }
  });
}

namespace {

template <typename Fwd, typename Drv>
Var unary_elementwise(Var a, Fwd fwd, Drv drv) {
  Tape& t = *a.tape;
  Tensor out = t.value(a);
  for (double& v : out.data) v = fwd(v);
  const std::size_t ai = a.id, oi = t.size();
  return t.record(std::move(out), t.requires_grad(a), [ai, oi, drv](Tape& tp) {
    if (!tp.requires_grad(Var{&tp, ai})) return;
    const Tensor& g = tp.grad_buffer(oi);
    const Tensor& x = tp.value(Var{&tp, ai});
    const Tensor& y = tp.value(Var{&tp, oi});
    Tensor& ga = tp.grad_buffer(ai);
    for (std::size_t i = 0; i < g.size(); ++i)
      ga.data[i] += g.data[i] * drv(x.data[i], y.data[i]);
  });
}

}  // namespace

Var relu(Var a) {
  return unary_elementwise(
      a, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(Var a, double negative_slope) {
  return unary_elementwise(
      a, [negative_slope](double v) { return v > 0.0 ? v : negative_slope * v; },
      [negative_slope](double x, double) { return x > 0.0 ? 1.0 : negative_slope; });
}

Var sigmoid(Var a) {
  return unary_elementwise(
      a,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var log_guarded(Var a) {
  return unary_elementwise(
      a, [](double v) { return std::log(std::max(v, kLogGuard)); },
      [](double x, double) { return x > kLogGuard ? 1.0 / x : 0.0; });
}

Var sum(Var a) {
  Tape& t = *a.tape;
  const Tensor& av = t.value(a);
  double acc = 0.0;
  for (double v : av.data) acc += v;
  const std::size_t ai = a.id, oi = t.size();
  return t.record(Tensor::scalar(acc), t.requires_grad(a), [ai, oi](Tape& tp) {
    if (!tp.requires_grad(Var{&tp, ai})) return;
    const double g = tp.grad_buffer(oi).data[0];
    Tensor& ga = tp.grad_buffer(ai);
    for (double& v : ga.data) v += g;
  });
}

Var mean(Var a) {
  const std::size_t n = a.tape->value(a).size();
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var row_inner_product(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  if (!av.same_shape(bv)) shape_fail("row_inner_product", av, bv);

  Tensor out(av.rows, 1, 0.0);
  for (std::size_t r = 0; r < av.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < av.cols; ++c) acc += av.at(r, c) * bv.at(r, c);
    out.data[r] = acc;
  }

  const bool rg = t.requires_grad(a) || t.requires_grad(b);
  const std::size_t ai = a.id, bi = b.id, oi = t.size();
  return t.record(std::move(out), rg, [ai, bi, oi](Tape& tp) {
    const Tensor& g = tp.grad_buffer(oi);
    const Tensor& av2 = tp.value(Var{&tp, ai});
    const Tensor& bv2 = tp.value(Var{&tp, bi});
    if (tp.requires_grad(Var{&tp, ai})) {
      Tensor& ga = tp.grad_buffer(ai);
      for (std::size_t r = 0; r < av2.rows; ++r)
        for (std::size_t c = 0; c < av2.cols; ++c)
          ga.at(r, c) += g.data[r] * bv2.at(r, c);
    }
    if (tp.requires_grad(Var{&tp, bi})) {
      Tensor& gb = tp.grad_buffer(bi);
      for (std::size_t r = 0; r < av2.rows; ++r)
        for (std::size_t c = 0; c < av2.cols; ++c)
          gb.at(r, c) += g.data[r] * av2.at(r, c);
    }
  });
}

Var gather_rows(Var a, std::vector<int> rows) {
  Tape& t = *a.tape;
  const Tensor& av = t.value(a);
  Tensor out(rows.size(), av.cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int src = rows[r];
    if (src < 0 || static_cast<std::size_t>(src) >= av.rows)
      throw ShapeError("gather_rows: row index " + std::to_string(src) +
                       " out of range for " + shape_string(av));
    std::copy_n(&av.data[static_cast<std::size_t>(src) * av.cols], av.cols,
                &out.data[r * av.cols]);
  }
  auto idx = std::make_shared<std::vector<int>>(std::move(rows));
  const std::size_t ai = a.id, oi = t.size();
  return t.record(std::move(out), t.requires_grad(a), [ai, oi, idx](Tape& tp) {
    if (!tp.requires_grad(Var{&tp, ai})) return;
    const Tensor& g = tp.grad_buffer(oi);
    Tensor& ga = tp.grad_buffer(ai);
    for (std::size_t r = 0; r < idx->size(); ++r) {
      double* dst = &ga.data[static_cast<std::size_t>((*idx)[r]) * ga.cols];
      const double* src = &g.data[r * g.cols];
      for (std::size_t c = 0; c < g.cols; ++c) dst[c] += src[c];
    }
  });
}

Var concat_cols(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  if (av.rows != bv.rows) shape_fail("concat_cols", av, bv);

  Tensor out(av.rows, av.cols + bv.cols);
  for (std::size_t r = 0; r < av.rows; ++r) {
    std::copy_n(&av.data[r * av.cols], av.cols, &out.data[r * out.cols]);
    std::copy_n(&bv.data[r * bv.cols], bv.cols, &out.data[r * out.cols + av.cols]);
  }

  const bool rg = t.requires_grad(a) || t.requires_grad(b);
  const std::size_t ai = a.id, bi = b.id, oi = t.size();
  const std::size_t acols = av.cols, bcols = bv.cols;
  return t.record(std::move(out), rg, [ai, bi, oi, acols, bcols](Tape& tp) {
    const Tensor& g = tp.grad_buffer(oi);
    if (tp.requires_grad(Var{&tp, ai})) {
      Tensor& ga = tp.grad_buffer(ai);
      for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = 0; c < acols; ++c) ga.at(r, c) += g.at(r, c);
    }
    if (tp.requires_grad(Var{&tp, bi})) {
      Tensor& gb = tp.grad_buffer(bi);
      for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = 0; c < bcols; ++c) gb.at(r, c) += g.at(r, c + acols);
    }
  });
}

Var dropout(Var a, double rate, std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0)
    throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  if (rate == 0.0) return a;
  Tape& t = *a.tape;
  const Tensor& av = t.value(a);
  auto mask = std::make_shared<Tensor>(av.rows, av.cols);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& m : mask->data) m = unit(rng) >= rate ? keep_scale : 0.0;

  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= mask->data[i];

  const std::size_t ai = a.id, oi = t.size();
  return t.record(std::move(out), t.requires_grad(a), [ai, oi, mask](Tape& tp) {
    if (!tp.requires_grad(Var{&tp, ai})) return;
    const Tensor& g = tp.grad_buffer(oi);
    Tensor& ga = tp.grad_buffer(ai);
    for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * mask->data[i];
  });
}

Var segment_softmax(Var scores, std::shared_ptr<const EdgeIndex> edges) {
  Tape& t = *scores.tape;
  const Tensor& sv = t.value(scores);
  if (sv.cols != 1 || sv.rows != edges->n_edges())
    throw ShapeError("segment_softmax: scores " + shape_string(sv) + " vs " +
                     std::to_string(edges->n_edges()) + " edges");

  Tensor out(sv.rows, 1);
  for (std::size_t i = 0; i < edges->n_nodes(); ++i) {
    const std::size_t lo = edges->offsets[i], hi = edges->offsets[i + 1];
    if (lo == hi) continue;
    double mx = sv.data[lo];
    for (std::size_t e = lo + 1; e < hi; ++e) mx = std::max(mx, sv.data[e]);
    double denom = 0.0;
    for (std::size_t e = lo; e < hi; ++e) {
      out.data[e] = std::exp(sv.data[e] - mx);
      denom += out.data[e];
    }
    for (std::size_t e = lo; e < hi; ++e) out.data[e] /= denom;
  }

  const std::size_t si = scores.id, oi = t.size();
  return t.record(std::move(out), t.requires_grad(scores), [si, oi, edges](Tape& tp) {
    if (!tp.requires_grad(Var{&tp, si})) return;
    const Tensor& g = tp.grad_buffer(oi);
    const Tensor& y = tp.value(Var{&tp, oi});
    Tensor& gs = tp.grad_buffer(si);
    for (std::size_t i = 0; i < edges->n_nodes(); ++i) {
      const std::size_t lo = edges->offsets[i], hi = edges->offsets[i + 1];
      double dot = 0.0;
      for (std::size_t e = lo; e < hi; ++e) dot += y.data[e] * g.data[e];
      for (std::size_t e = lo; e < hi; ++e)
        gs.data[e] += y.data[e] * (g.data[e] - dot);
    }
  });
}

Var segment_weighted_rows(Var weights, Var feats, std::shared_ptr<const EdgeIndex> edges) {
  check_same_tape(weights, feats);
  Tape& t = *weights.tape;
  const Tensor& wv = t.value(weights);
  const Tensor& fv = t.value(feats);
  if (wv.cols != 1 || wv.rows != edges->n_edges())
    throw ShapeError("segment_weighted_rows: weights " + shape_string(wv) + " vs " +
                     std::to_string(edges->n_edges()) + " edges");

  Tensor out(edges->n_nodes(), fv.cols, 0.0);
  for (std::size_t i = 0; i < edges->n_nodes(); ++i) {
    double* orow = &out.data[i * out.cols];
    for (std::size_t e = edges->offsets[i]; e < edges->offsets[i + 1]; ++e) {
      const double w = wv.data[e];
      const double* frow = &fv.data[static_cast<std::size_t>(edges->src[e]) * fv.cols];
      for (std::size_t c = 0; c < out.cols; ++c) orow[c] += w * frow[c];
    }
  }

  const bool rg = t.requires_grad(weights) || t.requires_grad(feats);
  const std::size_t wi = weights.id, fi = feats.id, oi = t.size();
  return t.record(std::move(out), rg, [wi, fi, oi, edges](Tape& tp) {
    const Tensor& g = tp.grad_buffer(oi);
    const Tensor& wv2 = tp.value(Var{&tp, wi});
    const Tensor& fv2 = tp.value(Var{&tp, fi});
    const bool need_w = tp.requires_grad(Var{&tp, wi});
    const bool need_f = tp.requires_grad(Var{&tp, fi});
    Tensor* gw = need_w ? &tp.grad_buffer(wi) : nullptr;
    Tensor* gf = need_f ? &tp.grad_buffer(fi) : nullptr;
    for (std::size_t i = 0; i < edges->n_nodes(); ++i) {
      const double* grow = &g.data[i * g.cols];
      for (std::size_t e = edges->offsets[i]; e < edges->offsets[i + 1]; ++e) {
        const std::size_t s = static_cast<std::size_t>(edges->src[e]);
        const double* frow = &fv2.data[s * fv2.cols];
        if (need_w) {
          double acc = 0.0;
          for (std::size_t c = 0; c < g.cols; ++c) acc += grow[c] * frow[c];
          gw->data[e] += acc;
        }
        if (need_f) {
          double* gfrow = &gf->data[s * fv2.cols];
          const double w = wv2.data[e];
          for (std::size_t c = 0; c < g.cols; ++c) gfrow[c] += w * grow[c];
        }
      }
    }
  });
}

double grad_check(const std::function<Var(Tape&, Var)>& f, const Tensor& x,
                  double step) {
  Tensor analytic;
  {
    Tape tape;
    Var xv = tape.leaf(x, true);
    Var loss = f(tape, xv);
    tape.backward(loss);
    analytic = tape.grad(xv);
  }
  auto eval = [&](const Tensor& point) {
    Tape tape;
    Var xv = tape.leaf(point, false);
    return tape.value(f(tape, xv)).scalar_value();
  };
  double worst = 0.0;
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = probe.data[i];
    probe.data[i] = keep + step;
    const double up = eval(probe);
    probe.data[i] = keep - step;
    const double down = eval(probe);
    probe.data[i] = keep;
    const double fd = (up - down) / (2.0 * step);
    const double a = analytic.data[i];
    const double rel = std::abs(a - fd) / std::max(1.0, std::abs(a));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace soga
