#pragma once

#include <cstdint>
#include <vector>

#include "moesim/types.hpp"

namespace moesim {

// Per-layer estimated expert-selection probabilities with the observation
// counts they came from.
struct DistributionEstimate {
  std::vector<std::vector<double>> probs;          // [layer][expert]
  std::vector<std::vector<std::int64_t>> counts;   // [layer][expert]

  std::size_t num_layers() const { return probs.size(); }
  void validate() const;
};

enum class AverageMode { cumulative, exponential };

// p_hat[l][i] = n_i / N over routed assignments.  Zero-count experts get
// exactly 0 unless Laplace smoothing (add-one) is requested.
DistributionEstimate mle_estimate(const ExpertTrace& trace,
                                  bool laplace_smoothing = false);

DistributionEstimate mle_from_counts(
    const std::vector<std::vector<std::int64_t>>& counts,
    bool laplace_smoothing = false);

// cumulative pools counts (identical to a single MLE over the union);
// exponential blends p_hat <- (1-lambda) * p_hat + lambda * batch MLE and
// renormalizes.
DistributionEstimate update_moving_average(
    const DistributionEstimate& prev,
    const std::vector<std::vector<std::int64_t>>& batch_counts,
    AverageMode mode, double lambda = 0.0);

// Mean over layers of (mean over experts |p_hat - p|) / (1/E).
double error_rate(const DistributionEstimate& estimate,
                  const TokenDistribution& truth);
double error_rate(const std::vector<std::vector<double>>& estimate,
                  const std::vector<std::vector<double>>& truth);

}  // namespace moesim
