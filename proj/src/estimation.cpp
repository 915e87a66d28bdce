#include "moesim/estimation.hpp"

#include <cmath>
#include <numeric>

namespace moesim {

void DistributionEstimate::validate() const {
  if (probs.empty())
    throw std::invalid_argument("estimate: no layers");
  for (std::size_t l = 0; l < probs.size(); ++l) {
    double sum = 0.0;
    for (double p : probs[l]) {
      if (p < 0.0) throw std::invalid_argument("estimate: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("estimate: layer does not sum to 1");
  }
}

DistributionEstimate mle_from_counts(
    const std::vector<std::vector<std::int64_t>>& counts,
    bool laplace_smoothing) {
  if (counts.empty())
    throw std::invalid_argument("mle: no layers");
  DistributionEstimate est;
  est.counts = counts;
  est.probs.resize(counts.size());
  for (std::size_t l = 0; l < counts.size(); ++l) {
    const auto& layer = counts[l];
    if (layer.empty())
      throw std::invalid_argument("mle: empty layer");
    std::int64_t total = 0;
    for (std::int64_t n : layer) {
      if (n < 0) throw std::invalid_argument("mle: negative count");
      total += n;
    }
    if (total == 0 && !laplace_smoothing)
      throw std::invalid_argument("mle: layer has no observations");
    const double add = laplace_smoothing ? 1.0 : 0.0;
    const double denom =
        static_cast<double>(total) + add * static_cast<double>(layer.size());
    est.probs[l].resize(layer.size());
    for (std::size_t i = 0; i < layer.size(); ++i)
      est.probs[l][i] = (static_cast<double>(layer[i]) + add) / denom;
  }
  return est;
}

DistributionEstimate mle_estimate(const ExpertTrace& trace,
                                  bool laplace_smoothing) {
  if (trace.layers.empty() || trace.token_count() == 0)
    throw std::invalid_argument("mle_estimate: trace has no tokens");
  std::vector<std::vector<std::int64_t>> counts;
  counts.reserve(trace.layers.size());
  for (std::size_t l = 0; l < trace.layers.size(); ++l)
    counts.push_back(trace.assignment_counts(l));
  return mle_from_counts(counts, laplace_smoothing);
}

DistributionEstimate update_moving_average(
    const DistributionEstimate& prev,
    const std::vector<std::vector<std::int64_t>>& batch_counts,
    AverageMode mode, double lambda) {
  if (batch_counts.size() != prev.counts.size())
    throw std::invalid_argument("update: layer count mismatch");
  for (std::size_t l = 0; l < batch_counts.size(); ++l)
    if (batch_counts[l].size() != prev.counts[l].size())
      throw std::invalid_argument("update: expert count mismatch");

  if (mode == AverageMode::cumulative) {
    auto pooled = prev.counts;
    for (std::size_t l = 0; l < pooled.size(); ++l)
      for (std::size_t i = 0; i < pooled[l].size(); ++i)
        pooled[l][i] += batch_counts[l][i];
    return mle_from_counts(pooled);
  }

  if (lambda <= 0.0 || lambda > 1.0)
    throw std::invalid_argument("update: lambda must be in (0,1]");
  const DistributionEstimate batch = mle_from_counts(batch_counts);
  DistributionEstimate est;
  est.counts = prev.counts;
  est.probs.resize(prev.probs.size());
  for (std::size_t l = 0; l < prev.probs.size(); ++l) {
    est.probs[l].resize(prev.probs[l].size());
    double sum = 0.0;
    for (std::size_t i = 0; i < prev.probs[l].size(); ++i) {
      est.probs[l][i] =
          (1.0 - lambda) * prev.probs[l][i] + lambda * batch.probs[l][i];
      sum += est.probs[l][i];
    }
    for (double& p : est.probs[l]) p /= sum;
    for (std::size_t i = 0; i < est.counts[l].size(); ++i)
      est.counts[l][i] += batch_counts[l][i];
  }
  return est;
}

double error_rate(const std::vector<std::vector<double>>& estimate,
                  const std::vector<std::vector<double>>& truth) {
  if (estimate.size() != truth.size() || estimate.empty())
    throw std::invalid_argument("error_rate: shape mismatch");
  double layer_sum = 0.0;
  for (std::size_t l = 0; l < estimate.size(); ++l) {
    if (estimate[l].size() != truth[l].size() || estimate[l].empty())
      throw std::invalid_argument("error_rate: shape mismatch");
    const double e = static_cast<double>(estimate[l].size());
    double dev = 0.0;
    for (std::size_t i = 0; i < estimate[l].size(); ++i)
      dev += std::abs(estimate[l][i] - truth[l][i]);
    layer_sum += (dev / e) / (1.0 / e);  // mean deviation over uniform share
  }
  return layer_sum / static_cast<double>(estimate.size());
}

double error_rate(const DistributionEstimate& estimate,
                  const TokenDistribution& truth) {
  return error_rate(estimate.probs, truth.probs);
}

}  // namespace moesim
