#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace moesim {

// Thrown for filesystem problems; callers map it to a distinct exit code.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Topology { fully_connected };
enum class Activation { swiglu, relu };
enum class StrategyKind { none, distribution_only, token_to_expert };
enum class ErrorScenario { optimistic, typical, pessimistic };

std::string to_string(Topology t);
std::string to_string(Activation a);
std::string to_string(StrategyKind k);
std::string to_string(ErrorScenario s);
StrategyKind strategy_from_string(const std::string& s);
ErrorScenario scenario_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);

// Per-GPU rates defining the roofline, plus the pairwise interconnect.
struct HardwareConfig {
  int gpu_count = 2;
  double peak_flops = 0.0;          // FLOP/s per GPU
  double compute_efficiency = 1.0;  // achievable fraction of peak, (0,1]
  double mem_bandwidth = 0.0;       // bytes/s per GPU
  double link_bandwidth = 0.0;      // bytes/s per GPU pair
  double link_latency = 0.0;        // seconds
  Topology topology = Topology::fully_connected;

  void validate() const;
};

struct ModelConfig {
  int hidden_dim = 0;
  int ffn_dim = 0;
  int num_heads = 1;
  int num_kv_heads = 1;
  int num_experts = 2;
  int top_k = 1;
  std::optional<int> sliding_window;
  Activation activation = Activation::swiglu;
  int bytes_per_param = 2;
  int num_layers = 1;

  int head_dim() const { return hidden_dim / num_heads; }
  void validate() const;
};

// Per-layer expert-selection probabilities. p[layer][expert].
struct TokenDistribution {
  std::vector<std::vector<double>> probs;

  std::size_t num_layers() const { return probs.size(); }
  void validate() const;
};

struct WorkloadConfig {
  int batch_size = 1;
  int seq_len = 1;
  std::optional<double> skewness;            // s in [1, E]
  std::optional<TokenDistribution> distribution;

  std::int64_t token_count() const {
    return static_cast<std::int64_t>(batch_size) * seq_len;
  }
  void validate() const;
};

// Routed expert ids for one layer; experts[token] has top_k entries.
struct LayerRouting {
  std::vector<std::vector<int>> experts;
};

// Ground-truth or synthetic token->expert routing for every layer.
// token_ids (vocabulary identities) are optional; conditional predictors
// keyed on token identity require them.
struct ExpertTrace {
  int num_experts = 0;
  int top_k = 1;
  int seq_len = 0;  // 0 = unknown; positions then fall back to token index
  std::vector<LayerRouting> layers;
  std::vector<int> token_ids;

  std::size_t token_count() const {
    return layers.empty() ? 0 : layers.front().experts.size();
  }
  bool has_token_ids() const { return !token_ids.empty(); }
  // Routed-assignment counts (token x top_k events) for one layer.
  std::vector<std::int64_t> assignment_counts(std::size_t layer) const;
  void validate() const;
};

}  // namespace moesim
