#include "moesim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "moesim/estimation.hpp"
#include "moesim/trace.hpp"

namespace moesim {

std::vector<double> default_accuracy_grid() {
  return {0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 0.99};
}

double resolve_dist_error_rate(const SweepInputs& inputs, double skewness) {
  if (inputs.dist_error_rate >= 0.0) return inputs.dist_error_rate;
  const std::int64_t n = inputs.calibration_tokens > 0
                             ? inputs.calibration_tokens
                             : inputs.workload.token_count();
  TokenDistribution truth;
  truth.probs.push_back(
      distribution_from_skewness(inputs.model.num_experts, skewness));
  WorkloadConfig calib;
  calib.batch_size = 1;
  calib.seq_len = static_cast<int>(n);
  const ExpertTrace trace = sample_trace(truth, calib, 1, inputs.seed);
  return error_rate(mle_estimate(trace), truth);
}

namespace {

WorkloadConfig with_skewness(const WorkloadConfig& workload, double s) {
  WorkloadConfig w = workload;
  w.skewness = s;
  w.distribution.reset();
  return w;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepGrid& grid,
                                   const SweepInputs& inputs) {
  if (grid.hardware.empty() || grid.skewness.empty())
    throw std::invalid_argument("run_sweep: empty grid");
  std::vector<StrategyKind> strategies = grid.strategies;
  if (strategies.empty())
    strategies = {StrategyKind::none, StrategyKind::distribution_only,
                  StrategyKind::token_to_expert};
  std::vector<double> accuracies = grid.accuracies;
  if (accuracies.empty()) accuracies = default_accuracy_grid();

  std::vector<SweepRecord> records;
  for (std::size_t h = 0; h < grid.hardware.size(); ++h) {
    const auto& point = grid.hardware[h];
    for (double s : grid.skewness) {
      const WorkloadConfig workload = with_skewness(inputs.workload, s);
      for (StrategyKind kind : strategies) {
        SweepRecord rec;
        rec.hardware_id = point.id;
        rec.link_bandwidth = point.hw.link_bandwidth;
        rec.skewness = s;
        rec.strategy = kind;
        switch (kind) {
          case StrategyKind::none:
            rec.lat = simulate_layer(PredictorSpec::baseline(), inputs.model,
                                     workload, point.hw, inputs.curve,
                                     inputs.options);
            records.push_back(rec);
            break;
          case StrategyKind::distribution_only:
            rec.lat = simulate_layer(
                PredictorSpec::distribution_only(
                    resolve_dist_error_rate(inputs, s)),
                inputs.model, workload, point.hw, inputs.curve, inputs.options);
            records.push_back(rec);
            break;
          case StrategyKind::token_to_expert:
            for (double a : accuracies) {
              rec.accuracy = a;
              rec.lat = simulate_layer(
                  PredictorSpec::token_to_expert(a, inputs.scenario),
                  inputs.model, workload, point.hw, inputs.curve,
                  inputs.options);
              records.push_back(rec);
            }
            break;
        }
      }
    }
  }

  // Grid points are independent; a fixed sort keeps the table identical no
  // matter how they were produced.
  std::vector<std::string> hw_order;
  for (const auto& point : grid.hardware) hw_order.push_back(point.id);
  auto hw_rank = [&](const std::string& id) {
    return std::find(hw_order.begin(), hw_order.end(), id) - hw_order.begin();
  };
  std::stable_sort(records.begin(), records.end(),
                   [&](const SweepRecord& a, const SweepRecord& b) {
                     const auto ra = hw_rank(a.hardware_id);
                     const auto rb = hw_rank(b.hardware_id);
                     if (ra != rb) return ra < rb;
                     if (a.skewness != b.skewness) return a.skewness < b.skewness;
                     if (a.strategy != b.strategy) return a.strategy < b.strategy;
                     return a.accuracy < b.accuracy;
                   });
  return records;
}

const SweepRecord& best_token_to_expert(std::span<const SweepRecord> records) {
  const SweepRecord* best = nullptr;
  for (const auto& rec : records) {
    if (rec.strategy != StrategyKind::token_to_expert) continue;
    if (!best || rec.lat.total < best->lat.total ||
        (rec.lat.total == best->lat.total && rec.accuracy < best->accuracy))
      best = &rec;
  }
  if (!best)
    throw std::invalid_argument("best_token_to_expert: no token_to_expert records");
  return *best;
}

SavingsComparison savings_difference(const SweepRecord& baseline,
                                     const SweepRecord& dist_only,
                                     const SweepRecord& best_t2e) {
  SavingsComparison cmp;
  cmp.baseline_total = baseline.lat.total;
  cmp.dist_only_total = dist_only.lat.total;
  cmp.best_t2e_total = best_t2e.lat.total;
  cmp.best_t2e_accuracy = best_t2e.accuracy;
  // (baseline - dist_only) - (baseline - best_t2e)
  cmp.difference_s = best_t2e.lat.total - dist_only.lat.total;
  cmp.difference_frac =
      cmp.baseline_total > 0.0 ? cmp.difference_s / cmp.baseline_total : 0.0;
  return cmp;
}

Recommendation recommend(const SweepInputs& inputs, const HardwarePoint& hw,
                         double skewness,
                         const std::vector<double>& accuracy_grid) {
  Recommendation rec;
  SweepGrid grid;
  grid.hardware = {hw};
  grid.skewness = {skewness};
  grid.accuracies = accuracy_grid;
  grid.strategies = {StrategyKind::none, StrategyKind::distribution_only};
  rec.has_token_to_expert = !inputs.curve.empty();
  if (rec.has_token_to_expert)
    grid.strategies.push_back(StrategyKind::token_to_expert);
  else
    rec.warnings.push_back(
        "no overhead calibration supplied; token_to_expert was not evaluated");
  for (const auto& w : inputs.curve.empty()
                           ? std::vector<std::string>{}
                           : inputs.curve.consistency_warnings())
    rec.warnings.push_back(w);

  const auto records = run_sweep(grid, inputs);
  rec.dist_error_rate = resolve_dist_error_rate(inputs, skewness);

  const SweepRecord* baseline = nullptr;
  const SweepRecord* dist_only = nullptr;
  for (const auto& r : records) {
    if (r.strategy == StrategyKind::none) baseline = &r;
    if (r.strategy == StrategyKind::distribution_only) dist_only = &r;
  }
  rec.baseline = baseline->lat;
  rec.dist_only = dist_only->lat;

  rec.strategy = StrategyKind::none;
  rec.total_s = rec.baseline.total;
  if (rec.dist_only.total < rec.total_s) {
    rec.strategy = StrategyKind::distribution_only;
    rec.total_s = rec.dist_only.total;
  }
  if (rec.has_token_to_expert) {
    const SweepRecord& best = best_token_to_expert(records);
    rec.best_t2e = best.lat;
    rec.best_t2e_accuracy = best.accuracy;
    const SavingsComparison cmp = savings_difference(*baseline, *dist_only, best);
    rec.savings_difference_s = cmp.difference_s;
    rec.savings_difference_frac = cmp.difference_frac;
    if (best.lat.total < rec.total_s) {
      rec.strategy = StrategyKind::token_to_expert;
      rec.total_s = best.lat.total;
    }
  }
  return rec;
}

namespace {

std::string fmt_seconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records) {
  out << "hardware_id,link_bandwidth,skewness,strategy,accuracy,attention_s,"
         "allreduce_s,scatter_s,ffn_s,gather_s,overhead_s,residual_s,total_s\n";
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.6g", r.link_bandwidth);
    out << r.hardware_id << ',' << buf << ',';
    std::snprintf(buf, sizeof buf, "%g", r.skewness);
    out << buf << ',' << to_string(r.strategy) << ',';
    if (r.strategy == StrategyKind::token_to_expert) {
      std::snprintf(buf, sizeof buf, "%g", r.accuracy);
      out << buf;
    }
    out << ',' << fmt_seconds(r.lat.attention) << ','
        << fmt_seconds(r.lat.allreduce) << ',' << fmt_seconds(r.lat.scatter)
        << ',' << fmt_seconds(r.lat.ffn) << ',' << fmt_seconds(r.lat.gather)
        << ',' << fmt_seconds(r.lat.prediction_overhead) << ','
        << fmt_seconds(r.lat.placement_residual) << ','
        << fmt_seconds(r.lat.total) << '\n';
  }
}

}  // namespace moesim
