#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "moesim/pipeline.hpp"

namespace moesim {

struct HardwarePoint {
  std::string id;
  HardwareConfig hw;
};

struct SweepGrid {
  std::vector<HardwarePoint> hardware;
  std::vector<double> skewness;
  std::vector<double> accuracies;          // empty -> default grid
  std::vector<StrategyKind> strategies;    // empty -> all three
};

// Everything a sweep point needs besides the grid coordinates.
struct SweepInputs {
  ModelConfig model;
  WorkloadConfig workload;   // skewness is overridden per grid point
  OverheadCurve curve;
  SimOptions options;
  ErrorScenario scenario = ErrorScenario::typical;
  // Distribution-only estimation error.  Negative means: estimate it by
  // sampling a synthetic trace at each skewness and scoring the MLE
  // against the true distribution.
  double dist_error_rate = -1.0;
  std::uint64_t seed = 0;
  std::int64_t calibration_tokens = 0;  // 0 -> workload token count
};

struct SweepRecord {
  std::string hardware_id;
  double link_bandwidth = 0.0;
  double skewness = 1.0;
  StrategyKind strategy = StrategyKind::none;
  double accuracy = -1.0;  // token_to_expert rows only
  LatencyBreakdown lat;
};

std::vector<double> default_accuracy_grid();

double resolve_dist_error_rate(const SweepInputs& inputs, double skewness);

// One record per (hardware, skewness, strategy[, accuracy]) point, sorted
// by exactly that tuple.
std::vector<SweepRecord> run_sweep(const SweepGrid& grid,
                                   const SweepInputs& inputs);

// Lowest-latency token_to_expert record; ties go to the lower (cheaper)
// accuracy.
const SweepRecord& best_token_to_expert(std::span<const SweepRecord> records);

struct SavingsComparison {
  double baseline_total = 0.0;
  double dist_only_total = 0.0;
  double best_t2e_total = 0.0;
  double best_t2e_accuracy = -1.0;
  double difference_s = 0.0;     // best_t2e - dist_only; > 0 means
                                 // distribution-only wins
  double difference_frac = 0.0;  // difference_s / baseline_total
};

SavingsComparison savings_difference(const SweepRecord& baseline,
                                     const SweepRecord& dist_only,
                                     const SweepRecord& best_t2e);

struct Recommendation {
  StrategyKind strategy = StrategyKind::none;
  double total_s = 0.0;
  double dist_error_rate = 0.0;
  double best_t2e_accuracy = -1.0;
  bool has_token_to_expert = false;
  double savings_difference_s = 0.0;
  double savings_difference_frac = 0.0;
  LatencyBreakdown baseline;
  LatencyBreakdown dist_only;
  LatencyBreakdown best_t2e;
  std::vector<std::string> warnings;
};

Recommendation recommend(const SweepInputs& inputs, const HardwarePoint& hw,
                         double skewness,
                         const std::vector<double>& accuracy_grid = {});

// hardware_id, link_bandwidth, skewness, strategy, accuracy, attention_s,
// allreduce_s, scatter_s, ffn_s, gather_s, overhead_s, residual_s, total_s
void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records);

}  // namespace moesim
