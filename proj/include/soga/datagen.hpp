#pragma once

#include <cstdint>
#include <utility>

#include "soga/graph.hpp"

namespace soga {

// Stochastic-block-model pair with Gaussian class-mean features. The target
// shares the source's label-conditional structure up to the density ratio
// rho and shares class means up to a per-class random translation of norm
// delta. Both graphs come out fully labeled; target labels are meant for
// evaluation only.
struct DomainPairConfig {
  std::size_t n_nodes = 1000;  // per domain
  std::size_t n_classes = 4;
  std::size_t feature_dim = 32;
  double p_in = 0.02;    // within-class edge probability (source)
  double p_out = 0.002;  // between-class edge probability (source)
  double density_ratio = 1.0;   // rho: target edge probabilities = source * rho
  double feature_shift = 0.0;   // delta: class-mean translation magnitude in target
  double feature_noise = 1.0;   // sigma_f
  std::uint64_t seed = 1;
};

std::pair<Graph, Graph> gen_pair(const DomainPairConfig& cfg);

}  // namespace soga
