#include "moesim/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace moesim {

using nlohmann::json;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error("failed writing file: " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out << text;
  if (!out) throw io_error("failed writing file: " + path);
}

void from_json(const json& j, HardwareConfig& hw) {
  j.at("gpu_count").get_to(hw.gpu_count);
  j.at("peak_flops").get_to(hw.peak_flops);
  hw.compute_efficiency = j.value("compute_efficiency", 1.0);
  j.at("mem_bandwidth").get_to(hw.mem_bandwidth);
  j.at("link_bandwidth").get_to(hw.link_bandwidth);
  hw.link_latency = j.value("link_latency", 0.0);
  if (j.contains("topology") && j["topology"].get<std::string>() != "fully_connected")
    throw std::invalid_argument("only the fully_connected topology is supported");
  hw.validate();
}

void to_json(json& j, const HardwareConfig& hw) {
  j = json{{"gpu_count", hw.gpu_count},
           {"peak_flops", hw.peak_flops},
           {"compute_efficiency", hw.compute_efficiency},
           {"mem_bandwidth", hw.mem_bandwidth},
           {"link_bandwidth", hw.link_bandwidth},
           {"link_latency", hw.link_latency},
           {"topology", to_string(hw.topology)}};
}

void from_json(const json& j, ModelConfig& m) {
  j.at("hidden_dim").get_to(m.hidden_dim);
  j.at("ffn_dim").get_to(m.ffn_dim);
  j.at("num_heads").get_to(m.num_heads);
  m.num_kv_heads = j.value("num_kv_heads", m.num_heads);
  j.at("num_experts").get_to(m.num_experts);
  m.top_k = j.value("top_k", 1);
  if (j.contains("sliding_window") && !j["sliding_window"].is_null())
    m.sliding_window = j["sliding_window"].get<int>();
  m.activation = activation_from_string(j.value("activation", std::string("swiglu")));
  m.bytes_per_param = j.value("bytes_per_param", 2);
  m.num_layers = j.value("num_layers", 1);
  m.validate();
}

void to_json(json& j, const ModelConfig& m) {
  j = json{{"hidden_dim", m.hidden_dim},
           {"ffn_dim", m.ffn_dim},
           {"num_heads", m.num_heads},
           {"num_kv_heads", m.num_kv_heads},
           {"num_experts", m.num_experts},
           {"top_k", m.top_k},
           {"activation", to_string(m.activation)},
           {"bytes_per_param", m.bytes_per_param},
           {"num_layers", m.num_layers}};
  if (m.sliding_window) j["sliding_window"] = *m.sliding_window;
}

void from_json(const json& j, WorkloadConfig& w) {
  j.at("batch_size").get_to(w.batch_size);
  j.at("seq_len").get_to(w.seq_len);
  if (j.contains("skewness") && !j["skewness"].is_null())
    w.skewness = j["skewness"].get<double>();
  if (j.contains("distribution") && !j["distribution"].is_null()) {
    TokenDistribution d;
    d.probs = j["distribution"].get<std::vector<std::vector<double>>>();
    w.distribution = std::move(d);
  }
  w.validate();
}

void to_json(json& j, const WorkloadConfig& w) {
  j = json{{"batch_size", w.batch_size}, {"seq_len", w.seq_len}};
  if (w.skewness) j["skewness"] = *w.skewness;
  if (w.distribution) j["distribution"] = w.distribution->probs;
}

void from_json(const json& j, PredictorSpec& s) {
  s.kind = strategy_from_string(j.at("kind").get<std::string>());
  if (j.contains("accuracy")) s.accuracy = j["accuracy"].get<double>();
  if (j.contains("error_rate")) s.error_rate = j["error_rate"].get<double>();
  if (j.contains("error_scenario"))
    s.scenario = scenario_from_string(j["error_scenario"].get<std::string>());
  // Not validated here: a distribution_only strategy may leave error_rate
  // unset and have it resolved from the workload later.
}

void to_json(json& j, const PredictorSpec& s) {
  j = json{{"kind", to_string(s.kind)}};
  if (s.kind == StrategyKind::token_to_expert) {
    j["accuracy"] = s.accuracy;
    j["error_scenario"] = to_string(s.scenario);
  }
  if (s.kind == StrategyKind::distribution_only) j["error_rate"] = s.error_rate;
}

void from_json(const json& j, OverheadCurve& c) {
  c.anchors.clear();
  for (const auto& a : j.at("anchors")) {
    OverheadAnchor anchor;
    a.at("skewness").get_to(anchor.skewness);
    a.at("alpha").get_to(anchor.alpha);
    a.at("beta").get_to(anchor.beta);
    c.anchors.push_back(anchor);
  }
  c.validate();
}

void to_json(json& j, const OverheadCurve& c) {
  json anchors = json::array();
  for (const auto& a : c.anchors)
    anchors.push_back(
        json{{"skewness", a.skewness}, {"alpha", a.alpha}, {"beta", a.beta}});
  j = json{{"anchors", anchors}};
}

void from_json(const json& j, SimOptions& o) {
  o.balanced_gather_after_duplication =
      j.value("balanced_gather_after_duplication", false);
  o.placement_every_n_batches = j.value("placement_every_n_batches", 1.0);
  o.experts_moved_per_gpu = j.value("experts_moved_per_gpu", 1.0);
  o.transfer_accounting = j.value("two_matrix_transfer_accounting", false)
                              ? TransferAccounting::two_matrix
                              : TransferAccounting::full_weights;
  o.softmax_epsilon_per_token = j.value("softmax_epsilon_per_token", 0.0);
  o.validate();
}

void to_json(json& j, const SimOptions& o) {
  j = json{{"balanced_gather_after_duplication",
            o.balanced_gather_after_duplication},
           {"placement_every_n_batches", o.placement_every_n_batches},
           {"experts_moved_per_gpu", o.experts_moved_per_gpu},
           {"two_matrix_transfer_accounting",
            o.transfer_accounting == TransferAccounting::two_matrix},
           {"softmax_epsilon_per_token", o.softmax_epsilon_per_token}};
}

void to_json(json& j, const LatencyBreakdown& lb) {
  j = json{{"attention_s", lb.attention},
           {"allreduce_s", lb.allreduce},
           {"scatter_s", lb.scatter},
           {"ffn_s", lb.ffn},
           {"gather_s", lb.gather},
           {"overhead_s", lb.prediction_overhead},
           {"residual_s", lb.placement_residual},
           {"total_s", lb.total}};
}

void to_json(json& j, const Recommendation& rec) {
  j = json{{"strategy", to_string(rec.strategy)},
           {"total_s", rec.total_s},
           {"dist_error_rate", rec.dist_error_rate},
           {"baseline", rec.baseline},
           {"distribution_only", rec.dist_only}};
  if (rec.has_token_to_expert) {
    j["token_to_expert_best"] = rec.best_t2e;
    j["token_to_expert_best_accuracy"] = rec.best_t2e_accuracy;
    j["savings_difference_s"] = rec.savings_difference_s;
    j["savings_difference_frac"] = rec.savings_difference_frac;
  }
  if (!rec.warnings.empty()) j["warnings"] = rec.warnings;
}

std::string breakdown_csv(const LatencyBreakdown& lb) {
  std::ostringstream out;
  out << "attention_s,allreduce_s,scatter_s,ffn_s,gather_s,overhead_s,"
         "residual_s,total_s\n";
  char buf[32];
  const double vals[] = {lb.attention, lb.allreduce,           lb.scatter,
                         lb.ffn,       lb.gather,              lb.prediction_overhead,
                         lb.placement_residual, lb.total};
  for (std::size_t i = 0; i < 8; ++i) {
    std::snprintf(buf, sizeof buf, "%.9e", vals[i]);
    out << buf << (i + 1 < 8 ? ',' : '\n');
  }
  return out.str();
}

SweepInputs ToolConfig::sweep_inputs() const {
  SweepInputs in;
  in.model = model;
  in.workload = workload;
  in.curve = curve;
  in.options = options;
  in.scenario = scenario;
  in.dist_error_rate = dist_error_rate;
  in.seed = seed;
  in.calibration_tokens = calibration_tokens;
  return in;
}

ToolConfig load_tool_config(const std::string& path) {
  const json j = read_json_file(path);
  ToolConfig cfg;

  const json& hw = j.at("hardware");
  auto parse_point = [](const json& node, std::size_t index) {
    HardwarePoint point;
    point.id = node.value("id", "hw" + std::to_string(index));
    point.hw = node.get<HardwareConfig>();
    return point;
  };
  if (hw.is_array()) {
    for (std::size_t i = 0; i < hw.size(); ++i)
      cfg.hardware.push_back(parse_point(hw[i], i));
  } else {
    cfg.hardware.push_back(parse_point(hw, 0));
  }
  if (cfg.hardware.empty())
    throw std::invalid_argument("config: at least one hardware entry required");

  cfg.model = j.at("model").get<ModelConfig>();
  cfg.workload = j.at("workload").get<WorkloadConfig>();
  if (j.contains("strategy"))
    cfg.strategy = j["strategy"].get<PredictorSpec>();
  if (j.contains("overhead_curve"))
    cfg.curve = j["overhead_curve"].get<OverheadCurve>();
  if (j.contains("options")) cfg.options = j["options"].get<SimOptions>();
  if (j.contains("error_scenario"))
    cfg.scenario = scenario_from_string(j["error_scenario"].get<std::string>());
  cfg.dist_error_rate = j.value("dist_error_rate", -1.0);
  cfg.seed = j.value("seed", 0ULL);
  cfg.calibration_tokens = j.value("calibration_tokens", 0LL);
  if (j.contains("sweep")) {
    const json& sw = j["sweep"];
    if (sw.contains("skewness"))
      cfg.sweep_skewness = sw["skewness"].get<std::vector<double>>();
    if (sw.contains("accuracies"))
      cfg.sweep_accuracies = sw["accuracies"].get<std::vector<double>>();
    if (sw.contains("strategies"))
      for (const auto& s : sw["strategies"])
        cfg.sweep_strategies.push_back(strategy_from_string(s.get<std::string>()));
  }
  return cfg;
}

OverheadCurve load_overhead_curve(const std::string& path) {
  return read_json_file(path).get<OverheadCurve>();
}

TokenDistribution load_distribution(const std::string& path) {
  const json j = read_json_file(path);
  TokenDistribution d;
  d.probs = j.at("probs").get<std::vector<std::vector<double>>>();
  d.validate();
  return d;
}

void save_distribution(const std::string& path, const TokenDistribution& dist) {
  write_json_file(path, json{{"probs", dist.probs}});
}

}  // namespace moesim
