#pragma once

#include <vector>

#include "soga/tensor.hpp"

namespace soga {

// Bias-corrected adaptive moment estimation over a fixed list of parameter
// tensors. Moments are allocated on the first step.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
               AdamState& state);

}  // namespace soga
