#include "moesim/costmodel.hpp"

#include <algorithm>
#include <cmath>

namespace moesim {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Sum over query positions of the causal context length, windowed to W.
double causal_context_sum(std::int64_t seq_len, std::int64_t window) {
  if (window >= seq_len)
    return 0.5 * static_cast<double>(seq_len) * static_cast<double>(seq_len + 1);
  const double w = static_cast<double>(window);
  return 0.5 * w * (w + 1.0) + static_cast<double>(seq_len - window) * w;
}

}  // namespace

double roofline_time(double flops, double bytes, const HardwareConfig& hw) {
  const double compute = flops / (hw.peak_flops * hw.compute_efficiency);
  const double memory = bytes / hw.mem_bandwidth;
  return std::max(compute, memory);
}

double gemm_time(std::int64_t m, std::int64_t n, std::int64_t k,
                 const HardwareConfig& hw, int bytes_per_param) {
  if (m < 1 || n < 1 || k < 1)
    throw std::invalid_argument("gemm_time: m, n, k must be >= 1");
  return gemm_time_tokens(static_cast<double>(m), n, k, hw, bytes_per_param);
}

double gemm_time_tokens(double m, std::int64_t n, std::int64_t k,
                        const HardwareConfig& hw, int bytes_per_param) {
  if (m < 0.0 || n < 1 || k < 1)
    throw std::invalid_argument("gemm_time_tokens: invalid shape");
  if (m == 0.0) return 0.0;
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  const double flops = 2.0 * m * dn * dk;
  const double bytes = (m * dk + dk * dn + m * dn) * bytes_per_param;
  return roofline_time(flops, bytes, hw);
}

double attention_score_flops(const ModelConfig& model,
                             const WorkloadConfig& workload,
                             const HardwareConfig& hw) {
  const std::int64_t window =
      model.sliding_window ? *model.sliding_window : workload.seq_len;
  const double ctx = causal_context_sum(workload.seq_len, window);
  const std::int64_t q_heads = ceil_div(model.num_heads, hw.gpu_count);
  // QK^T and attn*V each cost 2 * dh FLOPs per (query, key) pair per head.
  return 2.0 * 2.0 * workload.batch_size * static_cast<double>(q_heads) *
         model.head_dim() * ctx;
}

double attention_time(const ModelConfig& model, const WorkloadConfig& workload,
                      const HardwareConfig& hw,
                      double softmax_epsilon_per_token) {
  model.validate();
  workload.validate();
  hw.validate();

  const std::int64_t n_tok = workload.token_count();
  const std::int64_t d = model.hidden_dim;
  const std::int64_t dh = model.head_dim();
  const std::int64_t q_heads = ceil_div(model.num_heads, hw.gpu_count);
  const std::int64_t kv_heads = ceil_div(model.num_kv_heads, hw.gpu_count);
  const int bpp = model.bytes_per_param;

  double t = 0.0;
  t += gemm_time(n_tok, q_heads * dh, d, hw, bpp);       // Q projection
  t += 2.0 * gemm_time(n_tok, kv_heads * dh, d, hw, bpp);  // K, V projections
  t += gemm_time(n_tok, d, q_heads * dh, hw, bpp);       // output projection

  const std::int64_t window =
      model.sliding_window ? *model.sliding_window : workload.seq_len;
  const double ctx = causal_context_sum(workload.seq_len, window);
  const double score_flops = attention_score_flops(model, workload, hw);
  // Q read, K/V reads, score matrix traffic (write + softmax + value read),
  // context output write.
  const double score_bytes =
      (static_cast<double>(n_tok) * q_heads * dh +
       2.0 * static_cast<double>(n_tok) * kv_heads * dh +
       3.0 * workload.batch_size * static_cast<double>(q_heads) * ctx +
       static_cast<double>(n_tok) * q_heads * dh) *
      bpp;
  t += roofline_time(score_flops, score_bytes, hw);

  t += softmax_epsilon_per_token * static_cast<double>(n_tok);
  return t;
}

double ring_allreduce_time(double bytes, const HardwareConfig& hw) {
  if (bytes < 0.0)
    throw std::invalid_argument("ring_allreduce_time: bytes must be >= 0");
  const double g = static_cast<double>(hw.gpu_count);
  return 2.0 * (g - 1.0) / g * bytes / hw.link_bandwidth +
         2.0 * (g - 1.0) * hw.link_latency;
}

double scatter_bottleneck_fraction(int gpu_count, double skew) {
  if (skew < 1.0)
    throw std::invalid_argument("scatter: skew must be >= 1");
  const double g = static_cast<double>(gpu_count);
  return (g - 1.0) * skew / (g * g);
}

double scatter_time(double token_bytes_total, double skew,
                    const HardwareConfig& hw) {
  if (token_bytes_total < 0.0)
    throw std::invalid_argument("scatter_time: bytes must be >= 0");
  const double bottleneck_bytes =
      token_bytes_total * scatter_bottleneck_fraction(hw.gpu_count, skew);
  return bottleneck_bytes / hw.link_bandwidth + hw.link_latency;
}

double ffn_time(double tokens_on_bottleneck, const ModelConfig& model,
                const HardwareConfig& hw) {
  if (tokens_on_bottleneck < 0.0)
    throw std::invalid_argument("ffn_time: tokens must be >= 0");
  if (tokens_on_bottleneck == 0.0) return 0.0;
  const std::int64_t d = model.hidden_dim;
  const std::int64_t f = model.ffn_dim;
  const int bpp = model.bytes_per_param;
  double t = gemm_time_tokens(tokens_on_bottleneck, f, d, hw, bpp);  // up
  t += gemm_time_tokens(tokens_on_bottleneck, d, f, hw, bpp);        // down
  if (model.activation == Activation::swiglu)
    t += gemm_time_tokens(tokens_on_bottleneck, f, d, hw, bpp);      // gate
  return t;
}

double expert_weight_bytes(const ModelConfig& model,
                           TransferAccounting accounting) {
  const double matrix =
      static_cast<double>(model.hidden_dim) * model.ffn_dim * model.bytes_per_param;
  if (accounting == TransferAccounting::two_matrix) return 2.0 * matrix;
  return (model.activation == Activation::swiglu ? 3.0 : 2.0) * matrix;
}

double expert_transfer_time(const ModelConfig& model, const HardwareConfig& hw,
                            double experts_moved,
                            TransferAccounting accounting) {
  if (experts_moved < 0.0)
    throw std::invalid_argument("expert_transfer_time: experts_moved must be >= 0");
  return experts_moved * expert_weight_bytes(model, accounting) /
         hw.link_bandwidth;
}

}  // namespace moesim
