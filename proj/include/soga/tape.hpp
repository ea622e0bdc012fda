#pragma once

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "soga/tensor.hpp"

namespace soga {

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid as long as the tape lives.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;
};

// Directed edges grouped by destination node: edges for node i live in
// [offsets[i], offsets[i+1]) and src[e] is the source endpoint of edge e.
struct EdgeIndex {
  std::vector<std::size_t> offsets;
  std::vector<int> src;
  std::size_t n_edges() const { return src.size(); }
  std::size_t n_nodes() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

// Records primitive operations in topological order and replays them in
// reverse for exact gradients. One tape per forward/backward pass.
class Tape {
 public:
  Var leaf(Tensor value, bool requires_grad = true);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  // Reverse pass from a scalar loss. Populates grad() for every node that
  // requires grad. Throws if called twice without clear_grads().
  void backward(Var loss);
  void clear_grads();

  std::size_t size() const { return nodes_.size(); }

  // Used by the op implementations; not part of the user-facing surface.
  Var record(Tensor value, bool requires_grad, std::function<void(Tape&)> pull);
  Tensor& grad_buffer(std::size_t id) { return nodes_[id].grad; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::function<void(Tape&)> pull;
  };
  std::vector<Node> nodes_;
  bool backward_run_ = false;
};

// Elementwise and linear-algebra primitives. Inputs must share a tape.
// add() accepts equal shapes, a 1xC row vector broadcast against NxC, or a
// 1x1 scalar broadcast against anything.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var matmul(Var a, Var b);
Var sparse_dense_matmul(std::shared_ptr<const SparseMatrix> s, Var x);
Var row_softmax(Var a);
Var relu(Var a);
Var leaky_relu(Var a, double negative_slope);
Var sigmoid(Var a);
// log(max(x, 1e-12)); zero gradient inside the clamp region.
Var log_guarded(Var a);
Var sum(Var a);
Var mean(Var a);
// Row-wise inner products of two NxC tensors -> Nx1.
Var row_inner_product(Var a, Var b);
Var gather_rows(Var a, std::vector<int> rows);
Var concat_cols(Var a, Var b);
// Inverted dropout; identity when rate == 0.
Var dropout(Var a, double rate, std::mt19937_64& rng);
// Softmax over each destination segment of an Ex1 score vector.
Var segment_softmax(Var scores, std::shared_ptr<const EdgeIndex> edges);
// out[i] = sum over edges e of node i of weights[e] * feats[src[e], :].
Var segment_weighted_rows(Var weights, Var feats, std::shared_ptr<const EdgeIndex> edges);

constexpr double kLogGuard = 1e-12;

// Max over entries of |analytic - central difference| / max(1, |analytic|)
// for a scalar-valued function of one tensor input.
double grad_check(const std::function<Var(Tape&, Var)>& f, const Tensor& x,
                  double step);

}  // namespace soga
