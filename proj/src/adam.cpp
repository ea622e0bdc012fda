#include "soga/adam.hpp"

#include <cmath>

#include "soga/error.hpp"

namespace soga {

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
               AdamState& state) {
  if (params.size() != grads.size())
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " params vs " +
                     std::to_string(grads.size()) + " grads");
  if (state.m.empty()) {
    for (const Tensor& p : params) {
      state.m.emplace_back(p.rows, p.cols, 0.0);
      state.v.emplace_back(p.rows, p.cols, 0.0);
    }
  }
  state.step_count++;
  const double bc1 = 1.0 - std::pow(state.beta1, state.step_count);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step_count);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    const Tensor& g = grads[i];
    if (!p.same_shape(g))
      throw ShapeError("adam_step: param " + shape_string(p) + " vs grad " +
                       shape_string(g));
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m.data[j] = state.beta1 * m.data[j] + (1.0 - state.beta1) * g.data[j];
      v.data[j] = state.beta2 * v.data[j] + (1.0 - state.beta2) * g.data[j] * g.data[j];
      const double mhat = m.data[j] / bc1;
      const double vhat = v.data[j] / bc2;
      p.data[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

}  // namespace soga
