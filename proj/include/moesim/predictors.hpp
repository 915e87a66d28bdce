#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "moesim/types.hpp"

namespace moesim {

// One prediction strategy as the simulator consumes it.  token_to_expert
// carries an accuracy; distribution_only carries an estimation error rate
// instead.
struct PredictorSpec {
  StrategyKind kind = StrategyKind::none;
  double accuracy = -1.0;     // token_to_expert only, in [0,1]
  double error_rate = -1.0;   // distribution_only only, >= 0
  ErrorScenario scenario = ErrorScenario::typical;

  void validate() const;

  static PredictorSpec baseline() { return {}; }
  static PredictorSpec distribution_only(double error_rate);
  static PredictorSpec token_to_expert(double accuracy,
                                       ErrorScenario scenario = ErrorScenario::typical);
};

// Prediction cost as a fraction of layer runtime: alpha * exp(beta * a) at
// each skewness anchor, linear in skewness between anchors, clamped
// outside.
struct OverheadAnchor {
  double skewness = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct OverheadCurve {
  std::vector<OverheadAnchor> anchors;

  bool empty() const { return anchors.empty(); }
  void validate() const;
  // Anchors where extra skewness does not make prediction cheaper are
  // suspicious calibrations; reported as warnings, never errors.
  std::vector<std::string> consistency_warnings() const;
};

double overhead_fraction(const OverheadCurve& curve, double accuracy,
                         double skewness);

enum class ConditionKey { token_id, position };

// Frequency predictor: per layer a global top-k ranking, optionally
// refined per key value (token identity or sequence position).  Unseen
// keys fall back to the global ranking.
struct TokenToExpertPredictor {
  bool conditional = false;
  ConditionKey key = ConditionKey::position;
  int top_k = 1;
  int seq_len = 0;
  std::vector<std::vector<int>> global_ranked;  // [layer][k]
  std::vector<std::unordered_map<int, std::vector<int>>> by_key;  // [layer]

  const std::vector<int>& predict(std::size_t layer, int key_value) const;
};

int key_value_for(const ExpertTrace& trace, ConditionKey key,
                  std::size_t token_index);

TokenToExpertPredictor fit_probability_model(const ExpertTrace& train);
TokenToExpertPredictor fit_conditional_model(const ExpertTrace& train,
                                             ConditionKey key);

// Fraction of routed assignments matched by the prediction, averaged over
// layers.
double evaluate_accuracy(const TokenToExpertPredictor& predictor,
                         const ExpertTrace& test);

}  // namespace moesim
