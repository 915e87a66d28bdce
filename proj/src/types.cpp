#include "moesim/types.hpp"

#include <cmath>
#include <numeric>

namespace moesim {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::fully_connected: return "fully_connected";
  }
  return "?";
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::swiglu: return "swiglu";
    case Activation::relu: return "relu";
  }
  return "?";
}

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::none: return "none";
    case StrategyKind::distribution_only: return "distribution_only";
    case StrategyKind::token_to_expert: return "token_to_expert";
  }
  return "?";
}

std::string to_string(ErrorScenario s) {
  switch (s) {
    case ErrorScenario::optimistic: return "optimistic";
    case ErrorScenario::typical: return "typical";
    case ErrorScenario::pessimistic: return "pessimistic";
  }
  return "?";
}

StrategyKind strategy_from_string(const std::string& s) {
  if (s == "none") return StrategyKind::none;
  if (s == "distribution_only") return StrategyKind::distribution_only;
  if (s == "token_to_expert") return StrategyKind::token_to_expert;
  throw std::invalid_argument("unknown strategy kind: " + s);
}

ErrorScenario scenario_from_string(const std::string& s) {
  if (s == "optimistic") return ErrorScenario::optimistic;
  if (s == "typical") return ErrorScenario::typical;
  if (s == "pessimistic") return ErrorScenario::pessimistic;
  throw std::invalid_argument("unknown error scenario: " + s);
}

Activation activation_from_string(const std::string& s) {
  if (s == "swiglu") return Activation::swiglu;
  if (s == "relu") return Activation::relu;
  throw std::invalid_argument("unknown activation: " + s);
}

void HardwareConfig::validate() const {
  if (gpu_count < 2)
    throw std::invalid_argument("hardware: gpu_count must be >= 2");
  if (peak_flops <= 0 || mem_bandwidth <= 0 || link_bandwidth <= 0)
    throw std::invalid_argument("hardware: all rates must be > 0");
  if (compute_efficiency <= 0 || compute_efficiency > 1)
    throw std::invalid_argument("hardware: compute_efficiency must be in (0,1]");
  if (link_latency < 0)
    throw std::invalid_argument("hardware: link_latency must be >= 0");
}

void ModelConfig::validate() const {
  if (hidden_dim < 1 || ffn_dim < 1)
    throw std::invalid_argument("model: dimensions must be >= 1");
  if (num_heads < 1 || num_kv_heads < 1)
    throw std::invalid_argument("model: head counts must be >= 1");
  if (num_heads % num_kv_heads != 0)
    throw std::invalid_argument("model: num_heads must be divisible by num_kv_heads");
  if (hidden_dim % num_heads != 0)
    throw std::invalid_argument("model: hidden_dim must be divisible by num_heads");
  if (num_experts < 2)
    throw std::invalid_argument("model: num_experts must be >= 2");
  if (top_k < 1 || top_k > num_experts)
    throw std::invalid_argument("model: top_k must be in [1, num_experts]");
  if (sliding_window && *sliding_window < 1)
    throw std::invalid_argument("model: sliding_window must be >= 1");
  if (bytes_per_param < 1)
    throw std::invalid_argument("model: bytes_per_param must be >= 1");
  if (num_layers < 1)
    throw std::invalid_argument("model: num_layers must be >= 1");
}

void TokenDistribution::validate() const {
  if (probs.empty())
    throw std::invalid_argument("distribution: at least one layer required");
  for (const auto& layer : probs) {
    if (layer.empty())
      throw std::invalid_argument("distribution: empty layer");
    double sum = 0.0;
    for (double p : layer) {
      if (p < 0.0)
        throw std::invalid_argument("distribution: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("distribution: layer does not sum to 1");
  }
}

void WorkloadConfig::validate() const {
  if (batch_size < 1 || seq_len < 1)
    throw std::invalid_argument("workload: batch_size and seq_len must be >= 1");
  if (skewness && *skewness < 1.0)
    throw std::invalid_argument("workload: skewness must be >= 1");
  if (distribution) distribution->validate();
}

std::vector<std::int64_t> ExpertTrace::assignment_counts(std::size_t layer) const {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_experts), 0);
  for (const auto& token : layers.at(layer).experts)
    for (int e : token) counts.at(static_cast<std::size_t>(e))++;
  return counts;
}

void ExpertTrace::validate() const {
  if (num_experts < 1) throw std::invalid_argument("trace: num_experts must be >= 1");
  if (layers.empty()) throw std::invalid_argument("trace: no layers");
  const std::size_t n_tok = layers.front().experts.size();
  for (const auto& layer : layers) {
    if (layer.experts.size() != n_tok)
      throw std::invalid_argument("trace: inconsistent token counts across layers");
    for (const auto& token : layer.experts) {
      if (static_cast<int>(token.size()) != top_k)
        throw std::invalid_argument("trace: token must carry exactly top_k assignments");
      for (int e : token)
        if (e < 0 || e >= num_experts)
          throw std::invalid_argument("trace: expert id out of range");
    }
  }
  if (!token_ids.empty() && token_ids.size() != n_tok)
    throw std::invalid_argument("trace: token_ids length mismatch");
}

}  // namespace moesim
