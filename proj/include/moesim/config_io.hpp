#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moesim/sweep.hpp"

namespace moesim {

// Everything one tool invocation may need, as a single JSON document.
// Unknown subcommand-irrelevant sections are simply ignored.
struct ToolConfig {
  std::vector<HardwarePoint> hardware;  // simulate/recommend use the first
  ModelConfig model;
  WorkloadConfig workload;
  std::optional<PredictorSpec> strategy;
  OverheadCurve curve;
  SimOptions options;
  ErrorScenario scenario = ErrorScenario::typical;
  double dist_error_rate = -1.0;
  std::uint64_t seed = 0;
  std::int64_t calibration_tokens = 0;
  std::vector<double> sweep_skewness;
  std::vector<double> sweep_accuracies;
  std::vector<StrategyKind> sweep_strategies;

  SweepInputs sweep_inputs() const;
};

ToolConfig load_tool_config(const std::string& path);

// Standalone calibration file: {"anchors": [{"skewness","alpha","beta"}]}
OverheadCurve load_overhead_curve(const std::string& path);

TokenDistribution load_distribution(const std::string& path);
void save_distribution(const std::string& path, const TokenDistribution& dist);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);

// nlohmann hooks.
void from_json(const nlohmann::json& j, HardwareConfig& hw);
void to_json(nlohmann::json& j, const HardwareConfig& hw);
void from_json(const nlohmann::json& j, ModelConfig& m);
void to_json(nlohmann::json& j, const ModelConfig& m);
void from_json(const nlohmann::json& j, WorkloadConfig& w);
void to_json(nlohmann::json& j, const WorkloadConfig& w);
void from_json(const nlohmann::json& j, PredictorSpec& s);
void to_json(nlohmann::json& j, const PredictorSpec& s);
void from_json(const nlohmann::json& j, OverheadCurve& c);
void to_json(nlohmann::json& j, const OverheadCurve& c);
void from_json(const nlohmann::json& j, SimOptions& o);
void to_json(nlohmann::json& j, const SimOptions& o);
void to_json(nlohmann::json& j, const LatencyBreakdown& lb);
void to_json(nlohmann::json& j, const Recommendation& rec);

std::string breakdown_csv(const LatencyBreakdown& lb);

}  // namespace moesim
