#pragma once

// Independent reference computations used to freeze expected values.
// Everything here is deliberately written from first principles, separate
// from the library's own code paths.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "moesim/types.hpp"

namespace oracle {

// Per-GPU attention FLOPs by explicit per-position summation.
inline double attention_flops(const moesim::ModelConfig& m,
                              const moesim::WorkloadConfig& w, int gpu_count) {
  const double d = m.hidden_dim;
  const double dh = m.hidden_dim / static_cast<double>(m.num_heads);
  const auto ceil_div = [](int a, int b) { return (a + b - 1) / b; };
  const double qh = ceil_div(m.num_heads, gpu_count);
  const double kvh = ceil_div(m.num_kv_heads, gpu_count);
  const double n = static_cast<double>(w.batch_size) * w.seq_len;

  double ctx = 0.0;
  for (int i = 0; i < w.seq_len; ++i) {
    int c = i + 1;
    if (m.sliding_window && c > *m.sliding_window) c = *m.sliding_window;
    ctx += c;
  }

  double flops = 0.0;
  flops += 2.0 * n * (qh * dh) * d;        // Q
  flops += 2.0 * 2.0 * n * (kvh * dh) * d; // K, V
  flops += 2.0 * n * d * (qh * dh);        // out
  flops += 2.0 * 2.0 * w.batch_size * qh * dh * ctx;  // scores + values
  return flops;
}

// FFN FLOPs per token for one expert.
inline double ffn_flops_per_token(const moesim::ModelConfig& m) {
  const double gemms = m.activation == moesim::Activation::swiglu ? 3.0 : 2.0;
  return gemms * 2.0 * m.hidden_dim * m.ffn_dim;
}

// Routed-assignment counts straight off a trace layer.
inline std::vector<std::int64_t> count_assignments(
    const moesim::LayerRouting& layer, int num_experts) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_experts), 0);
  for (const auto& token : layer.experts)
    for (int e : token) counts[static_cast<std::size_t>(e)]++;
  return counts;
}

inline double skew_of_counts(const std::vector<std::int64_t>& counts) {
  std::int64_t total = 0, max = 0;
  for (auto c : counts) {
    total += c;
    max = std::max(max, c);
  }
  return static_cast<double>(max) /
         (static_cast<double>(total) / static_cast<double>(counts.size()));
}

// Random routing layer for property tests; every expert id in [0, E).
inline moesim::LayerRouting random_layer(std::mt19937& rng, int tokens,
                                         int num_experts, double hot_bias) {
  moesim::LayerRouting layer;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, num_experts - 1);
  for (int t = 0; t < tokens; ++t) {
    const int e = u(rng) < hot_bias ? 0 : pick(rng);
    layer.experts.push_back({e});
  }
  return layer;
}

}  // namespace oracle
