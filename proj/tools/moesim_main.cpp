// moesim: analytical what-if tool for Mixture-of-Experts prefill latency
// under token-to-expert load imbalance.  Subcommands cover synthetic trace
// generation, trace statistics, distribution estimation, expert
// duplication, single-point simulation, grid sweeps, and strategy
// recommendation.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "moesim/config_io.hpp"
#include "moesim/duplication.hpp"
#include "moesim/estimation.hpp"
#include "moesim/pipeline.hpp"
#include "moesim/sweep.hpp"
#include "moesim/trace.hpp"

namespace {

using nlohmann::json;

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    moesim::write_text_file(out_path, text);
}

void emit_json(const std::string& out_path, const json& j) {
  emit(out_path, j.dump(2) + "\n");
}

struct GenTraceArgs {
  int experts = 0;
  double skew = 1.0;
  int layers = 1;
  int top_k = 1;
  std::int64_t tokens = 0;
  int batch_size = 1;
  int seq_len = 0;
  std::uint64_t seed = 0;
  std::string dist_path;
  std::string out;
};

int run_gen_trace(const GenTraceArgs& args) {
  moesim::TokenDistribution dist;
  if (!args.dist_path.empty()) {
    dist = moesim::load_distribution(args.dist_path);
  } else {
    if (args.experts < 2)
      throw std::invalid_argument("gen-trace: --experts must be >= 2");
    for (int l = 0; l < args.layers; ++l)
      dist.probs.push_back(
          moesim::distribution_from_skewness(args.experts, args.skew));
  }
  moesim::WorkloadConfig workload;
  if (args.seq_len > 0) {
    workload.batch_size = args.batch_size;
    workload.seq_len = args.seq_len;
  } else {
    if (args.tokens < 1)
      throw std::invalid_argument("gen-trace: need --tokens or --seq-len");
    workload.batch_size = 1;
    workload.seq_len = static_cast<int>(args.tokens);
  }
  const moesim::ExpertTrace trace =
      moesim::sample_trace(dist, workload, args.top_k, args.seed);
  std::ostringstream buf;
  moesim::write_trace_jsonl(buf, trace);
  emit(args.out, buf.str());
  return 0;
}

int run_trace_stats(const std::string& trace_path, const std::string& format,
                    const std::string& out) {
  const moesim::ExpertTrace trace = moesim::read_trace_jsonl(trace_path);
  if (format == "csv") {
    std::ostringstream buf;
    buf << "layer,tokens,skewness\n";
    for (std::size_t l = 0; l < trace.layers.size(); ++l)
      buf << l << ',' << trace.token_count() << ','
          << moesim::skewness_of(trace.assignment_counts(l)) << '\n';
    emit(out, buf.str());
    return 0;
  }
  json layers = json::array();
  for (std::size_t l = 0; l < trace.layers.size(); ++l)
    layers.push_back(json{{"layer", l},
                          {"skewness", moesim::skewness_of(trace.assignment_counts(l))},
                          {"counts", trace.assignment_counts(l)}});
  emit_json(out, json{{"num_experts", trace.num_experts},
                      {"top_k", trace.top_k},
                      {"tokens", trace.token_count()},
                      {"layers", layers},
                      {"mean_skewness", moesim::trace_skewness(trace)}});
  return 0;
}

int run_estimate(const std::string& trace_path, const std::string& truth_path,
                 bool laplace, const std::string& out) {
  const moesim::ExpertTrace trace = moesim::read_trace_jsonl(trace_path);
  const moesim::DistributionEstimate est = moesim::mle_estimate(trace, laplace);
  json j{{"probs", est.probs}, {"counts", est.counts}};
  if (!truth_path.empty()) {
    const moesim::TokenDistribution truth = moesim::load_distribution(truth_path);
    j["error_rate"] = moesim::error_rate(est, truth);
  }
  emit_json(out, j);
  return 0;
}

moesim::Placement placement_from_json(const json& j, int num_experts) {
  moesim::Placement p;
  p.gpu_count = j.at("gpu_count").get<int>();
  p.num_experts = num_experts;
  p.max_copies = j.value("max_copies", p.gpu_count);
  if (j.contains("capacities"))
    p.capacities = j["capacities"].get<std::vector<int>>();
  else
    p.capacities.assign(static_cast<std::size_t>(p.gpu_count), num_experts);
  p.hosts.assign(static_cast<std::size_t>(num_experts),
                 std::vector<char>(static_cast<std::size_t>(p.gpu_count), 0));
  const auto hosting = j.at("hosting").get<std::vector<std::vector<int>>>();
  if (static_cast<int>(hosting.size()) != num_experts)
    throw std::invalid_argument("placement: hosting must list every expert");
  for (int e = 0; e < num_experts; ++e)
    for (int g : hosting[static_cast<std::size_t>(e)])
      p.hosts[static_cast<std::size_t>(e)].at(static_cast<std::size_t>(g)) = 1;
  p.validate();
  return p;
}

json placement_to_json(const moesim::Placement& p) {
  std::vector<std::vector<int>> hosting;
  for (int e = 0; e < p.num_experts; ++e) {
    hosting.emplace_back();
    for (int g = 0; g < p.gpu_count; ++g)
      if (p.hosted(e, g)) hosting.back().push_back(g);
  }
  return json{{"gpu_count", p.gpu_count},
              {"max_copies", p.max_copies},
              {"capacities", p.capacities},
              {"hosting", hosting}};
}

int run_duplicate(const std::string& trace_path, int layer,
                  const std::string& placement_path, int gpus,
                  const std::string& out) {
  const moesim::ExpertTrace trace = moesim::read_trace_jsonl(trace_path);
  if (layer < 0 || layer >= static_cast<int>(trace.layers.size()))
    throw std::invalid_argument("duplicate: layer index out of range");
  moesim::Placement placement;
  if (!placement_path.empty())
    placement = placement_from_json(moesim::read_json_file(placement_path),
                                    trace.num_experts);
  else
    placement = moesim::Placement::one_expert_per_gpu(trace.num_experts, gpus);
  const auto& routing = trace.layers[static_cast<std::size_t>(layer)];
  const moesim::BalanceResult result =
      moesim::balance_by_duplication(routing, placement);
  const moesim::BalanceReport report =
      moesim::verify_balance(routing, result.placement, result.dispatch);
  emit_json(out,
            json{{"placement", placement_to_json(result.placement)},
                 {"dispatch",
                  json{{"loads", result.dispatch.loads},
                       {"assignment", result.dispatch.assignment}}},
                 {"report", json{{"spread", report.spread},
                                 {"tokens_conserved", report.tokens_conserved},
                                 {"hosting_valid", report.hosting_valid},
                                 {"balanced", report.balanced},
                                 {"iterations", result.iterations},
                                 {"copies_made", result.copies_made}}}});
  return 0;
}

moesim::PredictorSpec resolve_strategy(const moesim::ToolConfig& cfg) {
  moesim::PredictorSpec strategy =
      cfg.strategy.value_or(moesim::PredictorSpec::baseline());
  if (strategy.kind == moesim::StrategyKind::distribution_only &&
      strategy.error_rate < 0.0)
    strategy.error_rate = moesim::resolve_dist_error_rate(
        cfg.sweep_inputs(), moesim::workload_skewness(cfg.workload));
  return strategy;
}

int run_simulate(const std::string& config_path, const std::string& curve_path,
                 bool prefill, const std::string& format,
                 const std::string& out) {
  moesim::ToolConfig cfg = moesim::load_tool_config(config_path);
  if (!curve_path.empty()) cfg.curve = moesim::load_overhead_curve(curve_path);
  const moesim::PredictorSpec strategy = resolve_strategy(cfg);
  const auto& hw = cfg.hardware.front().hw;
  const moesim::LatencyBreakdown lb =
      prefill ? moesim::simulate_prefill(strategy, cfg.model, cfg.workload, hw,
                                         cfg.curve, cfg.options)
              : moesim::simulate_layer(strategy, cfg.model, cfg.workload, hw,
                                       cfg.curve, cfg.options);
  if (format == "csv")
    emit(out, moesim::breakdown_csv(lb));
  else
    emit_json(out, json(lb));
  return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& curve_path,
                  const std::string& format, const std::string& out) {
  moesim::ToolConfig cfg = moesim::load_tool_config(config_path);
  if (!curve_path.empty()) cfg.curve = moesim::load_overhead_curve(curve_path);
  moesim::SweepGrid grid;
  grid.hardware = cfg.hardware;
  grid.skewness = cfg.sweep_skewness;
  if (grid.skewness.empty() && cfg.workload.skewness)
    grid.skewness = {*cfg.workload.skewness};
  grid.accuracies = cfg.sweep_accuracies;
  grid.strategies = cfg.sweep_strategies;
  const auto records = moesim::run_sweep(grid, cfg.sweep_inputs());
  if (format == "json") {
    json arr = json::array();
    for (const auto& r : records) {
      json rec{{"hardware_id", r.hardware_id},
               {"link_bandwidth", r.link_bandwidth},
               {"skewness", r.skewness},
               {"strategy", moesim::to_string(r.strategy)},
               {"latency", r.lat}};
      if (r.strategy == moesim::StrategyKind::token_to_expert)
        rec["accuracy"] = r.accuracy;
      arr.push_back(rec);
    }
    emit_json(out, arr);
  } else {
    std::ostringstream buf;
    moesim::write_sweep_csv(buf, records);
    emit(out, buf.str());
  }
  return 0;
}

int run_recommend(const std::string& config_path, const std::string& curve_path,
                  const std::string& out) {
  moesim::ToolConfig cfg = moesim::load_tool_config(config_path);
  if (!curve_path.empty()) cfg.curve = moesim::load_overhead_curve(curve_path);
  const double skew = moesim::workload_skewness(cfg.workload);
  const moesim::Recommendation rec = moesim::recommend(
      cfg.sweep_inputs(), cfg.hardware.front(), skew, cfg.sweep_accuracies);
  for (const auto& w : rec.warnings) std::cerr << "warning: " << w << '\n';
  emit_json(out, json(rec));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MoE prefill latency simulator and prediction-strategy advisor"};
  app.require_subcommand(1);

  GenTraceArgs gen;
  auto* gen_cmd = app.add_subcommand(
      "gen-trace", "Sample a synthetic token-to-expert routing trace");
  gen_cmd->add_option("--experts", gen.experts, "number of experts");
  gen_cmd->add_option("--skew", gen.skew, "target skewness");
  gen_cmd->add_option("--layers", gen.layers, "number of layers");
  gen_cmd->add_option("--top-k", gen.top_k, "experts per token");
  gen_cmd->add_option("--tokens", gen.tokens, "token count (batch 1)");
  gen_cmd->add_option("--batch-size", gen.batch_size, "batch size");
  gen_cmd->add_option("--seq-len", gen.seq_len, "sequence length");
  gen_cmd->add_option("--dist", gen.dist_path, "distribution JSON instead of --experts/--skew");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--out", gen.out, "output trace path (JSONL)");

  std::string stats_trace, stats_format = "json", stats_out;
  auto* stats_cmd =
      app.add_subcommand("trace-stats", "Per-layer counts and skewness of a trace");
  stats_cmd->add_option("--trace", stats_trace, "trace path")->required();
  stats_cmd->add_option("--format", stats_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  stats_cmd->add_option("--out", stats_out, "output path");

  std::string est_trace, est_truth, est_out;
  bool est_laplace = false;
  auto* est_cmd = app.add_subcommand(
      "estimate", "Multinomial MLE of the per-layer expert distribution");
  est_cmd->add_option("--trace", est_trace, "trace path")->required();
  est_cmd->add_option("--truth", est_truth, "ground-truth distribution JSON");
  est_cmd->add_flag("--laplace", est_laplace, "add-one smoothing");
  est_cmd->add_option("--out", est_out, "output path");

  std::string dup_trace, dup_placement, dup_out;
  int dup_layer = 0, dup_gpus = 4;
  auto* dup_cmd = app.add_subcommand(
      "duplicate", "Balance one trace layer by duplicating hot experts");
  dup_cmd->add_option("--trace", dup_trace, "trace path")->required();
  dup_cmd->add_option("--layer", dup_layer, "layer index");
  dup_cmd->add_option("--placement", dup_placement, "initial placement JSON");
  dup_cmd->add_option("--gpus", dup_gpus,
                      "GPU count for the default round-robin placement");
  dup_cmd->add_option("--out", dup_out, "output path");

  std::string sim_config, sim_curve, sim_format = "json", sim_out;
  bool sim_prefill = false;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Latency breakdown for one strategy and configuration");
  sim_cmd->add_option("--config", sim_config, "config JSON")->required();
  sim_cmd->add_option("--curve", sim_curve, "overhead calibration JSON");
  sim_cmd->add_flag("--prefill", sim_prefill, "scale to all model layers");
  sim_cmd->add_option("--format", sim_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sim_cmd->add_option("--out", sim_out, "output path");

  std::string sweep_config, sweep_curve, sweep_format = "csv", sweep_out;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Grid sweep over hardware x skewness x strategy x accuracy");
  sweep_cmd->add_option("--config", sweep_config, "config JSON")->required();
  sweep_cmd->add_option("--curve", sweep_curve, "overhead calibration JSON");
  sweep_cmd->add_option("--format", sweep_format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));
  sweep_cmd->add_option("--out", sweep_out, "output path");

  std::string rec_config, rec_curve, rec_out;
  auto* rec_cmd = app.add_subcommand(
      "recommend", "Pick the lowest-latency prediction strategy");
  rec_cmd->add_option("--config", rec_config, "config JSON")->required();
  rec_cmd->add_option("--curve", rec_curve, "overhead calibration JSON");
  rec_cmd->add_option("--out", rec_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen_cmd->parsed()) return run_gen_trace(gen);
    if (stats_cmd->parsed())
      return run_trace_stats(stats_trace, stats_format, stats_out);
    if (est_cmd->parsed())
      return run_estimate(est_trace, est_truth, est_laplace, est_out);
    if (dup_cmd->parsed())
      return run_duplicate(dup_trace, dup_layer, dup_placement, dup_gpus, dup_out);
    if (sim_cmd->parsed())
      return run_simulate(sim_config, sim_curve, sim_prefill, sim_format, sim_out);
    if (sweep_cmd->parsed())
      return run_sweep_cmd(sweep_config, sweep_curve, sweep_format, sweep_out);
    if (rec_cmd->parsed()) return run_recommend(rec_config, rec_curve, rec_out);
  } catch (const moesim::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
