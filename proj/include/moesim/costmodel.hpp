#pragma once

#include <cstdint>

#include "moesim/types.hpp"

namespace moesim {

// Per-component latency of one simulated layer (seconds).
struct LatencyBreakdown {
  double attention = 0.0;
  double allreduce = 0.0;
  double scatter = 0.0;
  double ffn = 0.0;
  double gather = 0.0;
  double prediction_overhead = 0.0;
  double placement_residual = 0.0;
  double total = 0.0;

  double component_sum() const {
    return attention + allreduce + scatter + ffn + gather +
           prediction_overhead + placement_residual;
  }
  void finalize() { total = component_sum(); }
};

// max(compute-limited, bandwidth-limited) time.
double roofline_time(double flops, double bytes, const HardwareConfig& hw);

// Dense m x n x k GEMM: 2mnk FLOPs against (mk + kn + mn) operand bytes.
double gemm_time(std::int64_t m, std::int64_t n, std::int64_t k,
                 const HardwareConfig& hw, int bytes_per_param = 2);

// Fractional-m variant; expected token loads are generally non-integral.
double gemm_time_tokens(double m, std::int64_t n, std::int64_t k,
                        const HardwareConfig& hw, int bytes_per_param);

// Tensor-parallel attention for one layer: QKV projections (KV shrunk by
// the grouped-query ratio), causal score/value stages with per-query
// context min(position+1, W) when a sliding window is set, and the output
// projection.  Head-dimension work splits across gpu_count; when
// gpu_count exceeds a head count the heads are conceptually padded.
double attention_time(const ModelConfig& model, const WorkloadConfig& workload,
                      const HardwareConfig& hw,
                      double softmax_epsilon_per_token = 0.0);

// Total score + value FLOPs per GPU, exposed for accounting.
double attention_score_flops(const ModelConfig& model,
                             const WorkloadConfig& workload,
                             const HardwareConfig& hw);

// 2(G-1)/G * bytes / link_bandwidth + 2(G-1) * link_latency.
double ring_allreduce_time(double bytes, const HardwareConfig& hw);

// Fraction of all token bytes crossing into the bottleneck GPU during the
// post-all-reduce scatter (and the post-FFN all-to-all): (G-1)*skew/G^2.
double scatter_bottleneck_fraction(int gpu_count, double skew);

double scatter_time(double token_bytes_total, double skew,
                    const HardwareConfig& hw);

// Expert FFN on the bottleneck GPU: three GEMMs (gate, up, down) for
// swiglu, two for relu, at m = tokens.
double ffn_time(double tokens_on_bottleneck, const ModelConfig& model,
                const HardwareConfig& hw);

// full_weights counts every expert matrix (3 for swiglu, 2 for relu);
// two_matrix is the coarser gate+up-only accounting some weight-size
// estimates use.
enum class TransferAccounting { full_weights, two_matrix };

double expert_weight_bytes(const ModelConfig& model,
                           TransferAccounting accounting =
                               TransferAccounting::full_weights);

double expert_transfer_time(const ModelConfig& model, const HardwareConfig& hw,
                            double experts_moved,
                            TransferAccounting accounting =
                                TransferAccounting::full_weights);

}  // namespace moesim
