#include "moesim/predictors.hpp"

#include <algorithm>
#include <cmath>

namespace moesim {

void PredictorSpec::validate() const {
  switch (kind) {
    case StrategyKind::none:
      if (accuracy >= 0.0 || error_rate >= 0.0)
        throw std::invalid_argument(
            "strategy none takes no accuracy or error rate");
      break;
    case StrategyKind::distribution_only:
      if (accuracy >= 0.0)
        throw std::invalid_argument(
            "distribution_only carries an error rate, not an accuracy");
      if (error_rate < 0.0)
        throw std::invalid_argument("distribution_only needs error_rate >= 0");
      break;
    case StrategyKind::token_to_expert:
      if (error_rate >= 0.0)
        throw std::invalid_argument(
            "token_to_expert carries an accuracy, not an error rate");
      if (accuracy < 0.0 || accuracy > 1.0)
        throw std::invalid_argument("token_to_expert needs accuracy in [0,1]");
      break;
  }
}

PredictorSpec PredictorSpec::distribution_only(double error_rate) {
  PredictorSpec s;
  s.kind = StrategyKind::distribution_only;
  s.error_rate = error_rate;
  return s;
}

PredictorSpec PredictorSpec::token_to_expert(double accuracy,
                                             ErrorScenario scenario) {
  PredictorSpec s;
  s.kind = StrategyKind::token_to_expert;
  s.accuracy = accuracy;
  s.scenario = scenario;
  return s;
}

void OverheadCurve::validate() const {
  if (anchors.empty())
    throw std::invalid_argument("overhead curve: no anchors");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i].alpha < 0.0)
      throw std::invalid_argument("overhead curve: alpha must be >= 0");
    if (i > 0 && anchors[i].skewness <= anchors[i - 1].skewness)
      throw std::invalid_argument(
          "overhead curve: anchors must have strictly increasing skewness");
  }
}

std::vector<std::string> OverheadCurve::consistency_warnings() const {
  std::vector<std::string> warnings;
  const double ref_accuracy = 0.9;  // comparison point between anchors
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    const double prev = anchors[i - 1].alpha * std::exp(anchors[i - 1].beta * ref_accuracy);
    const double curr = anchors[i].alpha * std::exp(anchors[i].beta * ref_accuracy);
    if (curr > prev)
      warnings.push_back(
          "overhead at skewness " + std::to_string(anchors[i].skewness) +
          " exceeds the lower-skewness anchor at equal accuracy; higher skew "
          "should make prediction cheaper");
  }
  return warnings;
}

double overhead_fraction(const OverheadCurve& curve, double accuracy,
                         double skewness) {
  curve.validate();
  if (accuracy < 0.0 || accuracy > 1.0)
    throw std::invalid_argument("overhead_fraction: accuracy must be in [0,1]");
  const auto& a = curve.anchors;
  double alpha, beta;
  if (skewness <= a.front().skewness) {
    alpha = a.front().alpha;
    beta = a.front().beta;
  } else if (skewness >= a.back().skewness) {
    alpha = a.back().alpha;
    beta = a.back().beta;
  } else {
    std::size_t hi = 1;
    while (a[hi].skewness < skewness) ++hi;
    const auto& lo_a = a[hi - 1];
    const auto& hi_a = a[hi];
    const double t = (skewness - lo_a.skewness) / (hi_a.skewness - lo_a.skewness);
    alpha = lo_a.alpha + t * (hi_a.alpha - lo_a.alpha);
    beta = lo_a.beta + t * (hi_a.beta - lo_a.beta);
  }
  return alpha * std::exp(beta * accuracy);
}

namespace {

// Top-k expert ids by count, ties to the lowest id.
std::vector<int> ranked_topk(const std::vector<std::int64_t>& counts, int k) {
  std::vector<int> ids(counts.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
  });
  ids.resize(static_cast<std::size_t>(std::min<std::size_t>(ids.size(),
                                                            static_cast<std::size_t>(k))));
  return ids;
}

}  // namespace

int key_value_for(const ExpertTrace& trace, ConditionKey key,
                  std::size_t token_index) {
  if (key == ConditionKey::token_id) {
    if (!trace.has_token_ids())
      throw std::invalid_argument(
          "conditional prediction keyed on token_id needs a trace with token ids");
    return trace.token_ids[token_index];
  }
  if (trace.seq_len > 0)
    return static_cast<int>(token_index % static_cast<std::size_t>(trace.seq_len));
  return static_cast<int>(token_index);
}

const std::vector<int>& TokenToExpertPredictor::predict(std::size_t layer,
                                                        int key_value) const {
  if (conditional) {
    const auto& table = by_key[layer];
    auto it = table.find(key_value);
    if (it != table.end()) return it->second;
  }
  return global_ranked[layer];
}

TokenToExpertPredictor fit_probability_model(const ExpertTrace& train) {
  if (train.layers.empty() || train.token_count() == 0)
    throw std::invalid_argument("fit_probability_model: empty trace");
  TokenToExpertPredictor pred;
  pred.top_k = train.top_k;
  pred.seq_len = train.seq_len;
  pred.global_ranked.reserve(train.layers.size());
  for (std::size_t l = 0; l < train.layers.size(); ++l)
    pred.global_ranked.push_back(
        ranked_topk(train.assignment_counts(l), train.top_k));
  return pred;
}

TokenToExpertPredictor fit_conditional_model(const ExpertTrace& train,
                                             ConditionKey key) {
  TokenToExpertPredictor pred = fit_probability_model(train);
  pred.conditional = true;
  pred.key = key;
  pred.by_key.resize(train.layers.size());
  const std::size_t n_tok = train.token_count();
  for (std::size_t l = 0; l < train.layers.size(); ++l) {
    std::unordered_map<int, std::vector<std::int64_t>> counts;
    for (std::size_t t = 0; t < n_tok; ++t) {
      auto& per_key = counts[key_value_for(train, key, t)];
      if (per_key.empty())
        per_key.assign(static_cast<std::size_t>(train.num_experts), 0);
      for (int e : train.layers[l].experts[t])
        per_key[static_cast<std::size_t>(e)]++;
    }
    for (auto& [k, c] : counts)
      pred.by_key[l].emplace(k, ranked_topk(c, train.top_k));
  }
  return pred;
}

double evaluate_accuracy(const TokenToExpertPredictor& predictor,
                         const ExpertTrace& test) {
  if (test.layers.empty() || test.token_count() == 0)
    throw std::invalid_argument("evaluate_accuracy: empty trace");
  if (predictor.global_ranked.size() != test.layers.size())
    throw std::invalid_argument("evaluate_accuracy: layer count mismatch");
  const std::size_t n_tok = test.token_count();
  double layer_acc_sum = 0.0;
  for (std::size_t l = 0; l < test.layers.size(); ++l) {
    std::int64_t matched = 0, total = 0;
    for (std::size_t t = 0; t < n_tok; ++t) {
      const int key_value =
          predictor.conditional ? key_value_for(test, predictor.key, t) : 0;
      const auto& predicted = predictor.predict(l, key_value);
      for (int e : test.layers[l].experts[t]) {
        ++total;
        if (std::find(predicted.begin(), predicted.end(), e) != predicted.end())
          ++matched;
      }
    }
    layer_acc_sum +=
        total > 0 ? static_cast<double>(matched) / static_cast<double>(total) : 0.0;
  }
  return layer_acc_sum / static_cast<double>(test.layers.size());
}

}  // namespace moesim
