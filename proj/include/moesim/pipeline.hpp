#pragma once

#include "moesim/costmodel.hpp"
#include "moesim/predictors.hpp"
#include "moesim/types.hpp"

namespace moesim {

struct SimOptions {
  // Whether the post-FFN all-to-all runs at skew 1 once duplication has
  // balanced per-GPU loads.  Off by default: communication volume is
  // unchanged by distribution-only balancing.
  bool balanced_gather_after_duplication = false;
  // Prediction + expert movement happen once per this many batches; the
  // overhead and placement residual are averaged accordingly.
  double placement_every_n_batches = 1.0;
  // Experts sent (and received) per GPU per placement.
  double experts_moved_per_gpu = 1.0;
  TransferAccounting transfer_accounting = TransferAccounting::full_weights;
  double softmax_epsilon_per_token = 0.0;

  void validate() const;
};

// Workload skewness, resolved from the explicit value or the attached
// distribution.
double workload_skewness(const WorkloadConfig& workload);

// One transformer layer's prefill latency under the given strategy.
// curve may be empty for strategies other than token_to_expert.
LatencyBreakdown simulate_layer(const PredictorSpec& strategy,
                                const ModelConfig& model,
                                const WorkloadConfig& workload,
                                const HardwareConfig& hw,
                                const OverheadCurve& curve,
                                const SimOptions& options = {});

// All num_layers layers; each component scales linearly.
LatencyBreakdown simulate_prefill(const PredictorSpec& strategy,
                                  const ModelConfig& model,
                                  const WorkloadConfig& workload,
                                  const HardwareConfig& hw,
                                  const OverheadCurve& curve,
                                  const SimOptions& options = {});

}  // namespace moesim
