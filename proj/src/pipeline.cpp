#include "moesim/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "moesim/errormodel.hpp"
#include "moesim/trace.hpp"

namespace moesim {

void SimOptions::validate() const {
  if (placement_every_n_batches < 1.0)
    throw std::invalid_argument("options: placement_every_n_batches must be >= 1");
  if (experts_moved_per_gpu < 0.0)
    throw std::invalid_argument("options: experts_moved_per_gpu must be >= 0");
  if (softmax_epsilon_per_token < 0.0)
    throw std::invalid_argument("options: softmax_epsilon_per_token must be >= 0");
}

double workload_skewness(const WorkloadConfig& workload) {
  if (workload.skewness) return *workload.skewness;
  if (workload.distribution) {
    const auto& probs = workload.distribution->probs;
    double sum = 0.0;
    for (const auto& layer : probs) sum += distribution_skewness(layer);
    return sum / static_cast<double>(probs.size());
  }
  throw std::invalid_argument(
      "workload carries neither a skewness nor a distribution");
}

LatencyBreakdown simulate_layer(const PredictorSpec& strategy,
                                const ModelConfig& model,
                                const WorkloadConfig& workload,
                                const HardwareConfig& hw,
                                const OverheadCurve& curve,
                                const SimOptions& options) {
  strategy.validate();
  model.validate();
  workload.validate();
  hw.validate();
  options.validate();

  const double skew = workload_skewness(workload);
  if (skew < 1.0 || skew > static_cast<double>(model.num_experts))
    throw std::invalid_argument("skewness must lie in [1, num_experts]");

  const double n_tok = static_cast<double>(workload.token_count());
  const double token_bytes = n_tok * model.hidden_dim * model.bytes_per_param;
  const double routed_bytes = token_bytes * model.top_k;
  const double avg_routed = n_tok * model.top_k / hw.gpu_count;

  LatencyBreakdown lb;
  lb.attention =
      attention_time(model, workload, hw, options.softmax_epsilon_per_token);
  lb.allreduce = ring_allreduce_time(token_bytes, hw);

  const double transfer = expert_transfer_time(
      model, hw, options.experts_moved_per_gpu, options.transfer_accounting);
  const double residual = std::max(0.0, transfer - lb.attention) /
                          options.placement_every_n_batches;

  switch (strategy.kind) {
    case StrategyKind::none: {
      lb.scatter = scatter_time(routed_bytes, skew, hw);
      lb.ffn = ffn_time(skew * avg_routed, model, hw);
      lb.gather = lb.scatter;
      break;
    }
    case StrategyKind::distribution_only: {
      if (strategy.error_rate > 1.0)
        throw std::invalid_argument("distribution_only error_rate must be <= 1");
      // Compute balances via duplication; scatter stays random so the
      // communication pattern is unchanged from the baseline.
      lb.scatter = scatter_time(routed_bytes, skew, hw);
      lb.gather = options.balanced_gather_after_duplication
                      ? scatter_time(routed_bytes, 1.0, hw)
                      : lb.scatter;
      lb.ffn = ffn_time(bottleneck_tokens(avg_routed, strategy.error_rate,
                                          ErrorScenario::typical, hw.gpu_count),
                        model, hw);
      lb.placement_residual = residual;
      break;
    }
    case StrategyKind::token_to_expert: {
      const double eps = 1.0 - strategy.accuracy;
      const double balanced_scatter = scatter_time(routed_bytes, 1.0, hw);
      // Direct routing skips the scatter; only misroutes move again.
      lb.scatter = comm_error_penalty(eps, balanced_scatter);
      lb.gather = balanced_scatter;
      lb.ffn = ffn_time(
          bottleneck_tokens(avg_routed, eps, strategy.scenario, hw.gpu_count),
          model, hw);
      lb.placement_residual = residual;
      const double base = lb.attention + lb.allreduce + lb.scatter + lb.ffn +
                          lb.gather + lb.placement_residual;
      lb.prediction_overhead =
          overhead_fraction(curve, strategy.accuracy, skew) * base /
          options.placement_every_n_batches;
      break;
    }
  }

  lb.finalize();
  return lb;
}

LatencyBreakdown simulate_prefill(const PredictorSpec& strategy,
                                  const ModelConfig& model,
                                  const WorkloadConfig& workload,
                                  const HardwareConfig& hw,
                                  const OverheadCurve& curve,
                                  const SimOptions& options) {
  LatencyBreakdown lb = simulate_layer(strategy, model, workload, hw, curve, options);
  const double n = static_cast<double>(model.num_layers);
  lb.attention *= n;
  lb.allreduce *= n;
  lb.scatter *= n;
  lb.ffn *= n;
  lb.gather *= n;
  lb.prediction_overhead *= n;
  lb.placement_residual *= n;
  lb.finalize();
  return lb;
}

}  // namespace moesim
