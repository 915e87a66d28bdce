#include "moesim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "moesim/rng.hpp"

namespace moesim {

double skewness_of(std::span<const double> counts) {
  if (counts.empty())
    throw std::invalid_argument("skewness_of: empty counts");
  double total = 0.0, max = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw std::invalid_argument("skewness_of: negative count");
    total += c;
    max = std::max(max, c);
  }
  if (total <= 0.0)
    throw std::invalid_argument("skewness_of: all counts are zero");
  return max / (total / static_cast<double>(counts.size()));
}

double skewness_of(const std::vector<std::int64_t>& counts) {
  std::vector<double> d(counts.begin(), counts.end());
  return skewness_of(std::span<const double>(d));
}

double trace_skewness(const ExpertTrace& trace) {
  if (trace.layers.empty())
    throw std::invalid_argument("trace_skewness: empty trace");
  double sum = 0.0;
  for (std::size_t l = 0; l < trace.layers.size(); ++l)
    sum += skewness_of(trace.assignment_counts(l));
  return sum / static_cast<double>(trace.layers.size());
}

std::vector<double> distribution_from_skewness(int num_experts, double s) {
  if (num_experts < 1)
    throw std::invalid_argument("distribution_from_skewness: need >= 1 expert");
  const double e = static_cast<double>(num_experts);
  if (s < 1.0 || s > e)
    throw std::invalid_argument(
        "distribution_from_skewness: skewness must lie in [1, num_experts]");
  std::vector<double> p(static_cast<std::size_t>(num_experts));
  p[0] = s / e;
  const double tail = num_experts > 1 ? (1.0 - p[0]) / (e - 1.0) : 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) p[i] = tail;
  return p;
}

double distribution_skewness(std::span<const double> probs) {
  return skewness_of(probs);
}

namespace {

// One draw by inverse CDF over the remaining (possibly zeroed-out) mass.
// When the remaining mass vanishes, lowest-id unchosen experts fill in.
int draw_expert(std::vector<double>& mass, double remaining, double u) {
  if (remaining <= 0.0) {
    for (std::size_t i = 0; i < mass.size(); ++i)
      if (mass[i] >= 0.0) return static_cast<int>(i);
    return 0;
  }
  double acc = 0.0;
  int last_valid = -1;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] < 0.0) continue;  // already chosen
    last_valid = static_cast<int>(i);
    acc += mass[i] / remaining;
    if (u < acc) return static_cast<int>(i);
  }
  return last_valid;
}

}  // namespace

ExpertTrace sample_trace(const TokenDistribution& dist,
                         const WorkloadConfig& workload, int top_k,
                         std::uint64_t seed) {
  dist.validate();
  workload.validate();
  const int num_experts = static_cast<int>(dist.probs.front().size());
  if (top_k < 1 || top_k > num_experts)
    throw std::invalid_argument("sample_trace: top_k must be in [1, num_experts]");
  for (const auto& layer : dist.probs)
    if (static_cast<int>(layer.size()) != num_experts)
      throw std::invalid_argument("sample_trace: ragged distribution");

  const std::int64_t n_tok = workload.token_count();
  ExpertTrace trace;
  trace.num_experts = num_experts;
  trace.top_k = top_k;
  trace.seq_len = workload.seq_len;
  trace.layers.resize(dist.probs.size());

  for (std::size_t l = 0; l < dist.probs.size(); ++l) {
    auto& layer = trace.layers[l];
    layer.experts.resize(static_cast<std::size_t>(n_tok));
    for (std::int64_t t = 0; t < n_tok; ++t) {
      auto& routed = layer.experts[static_cast<std::size_t>(t)];
      routed.reserve(static_cast<std::size_t>(top_k));
      std::vector<double> mass = dist.probs[l];
      double remaining = 1.0;
      for (int k = 0; k < top_k; ++k) {
        const double u = counter_uniform(seed, l, static_cast<std::uint64_t>(t),
                                         static_cast<std::uint64_t>(k));
        const int e = draw_expert(mass, remaining, u);
        routed.push_back(e);
        remaining -= mass[static_cast<std::size_t>(e)];
        mass[static_cast<std::size_t>(e)] = -1.0;
      }
    }
  }
  return trace;
}

void write_trace_jsonl(std::ostream& out, const ExpertTrace& trace) {
  for (std::size_t l = 0; l < trace.layers.size(); ++l) {
    nlohmann::ordered_json rec;
    rec["layer"] = l;
    rec["experts"] = trace.layers[l].experts;
    if (l == 0) {
      rec["num_experts"] = trace.num_experts;
      if (trace.seq_len > 0) rec["seq_len"] = trace.seq_len;
      if (trace.has_token_ids()) rec["token_ids"] = trace.token_ids;
    }
    out << rec.dump() << '\n';
  }
}

void write_trace_jsonl(const std::string& path, const ExpertTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open trace file for writing: " + path);
  write_trace_jsonl(out, trace);
  if (!out) throw io_error("failed writing trace file: " + path);
}

ExpertTrace read_trace_jsonl(std::istream& in) {
  ExpertTrace trace;
  trace.num_experts = 0;
  std::string line;
  int max_expert = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("bad trace record: ") + e.what());
    }
    LayerRouting layer;
    layer.experts = rec.at("experts").get<std::vector<std::vector<int>>>();
    for (const auto& token : layer.experts)
      for (int e : token) max_expert = std::max(max_expert, e);
    if (rec.contains("num_experts"))
      trace.num_experts = rec["num_experts"].get<int>();
    if (rec.contains("seq_len")) trace.seq_len = rec["seq_len"].get<int>();
    if (rec.contains("token_ids"))
      trace.token_ids = rec["token_ids"].get<std::vector<int>>();
    trace.layers.push_back(std::move(layer));
  }
  if (trace.layers.empty())
    throw std::invalid_argument("trace file contains no layers");
  if (trace.num_experts == 0) trace.num_experts = max_expert + 1;
  trace.top_k = trace.layers.front().experts.empty()
                    ? 1
                    : static_cast<int>(trace.layers.front().experts.front().size());
  trace.validate();
  return trace;
}

ExpertTrace read_trace_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open trace file: " + path);
  return read_trace_jsonl(in);
}

}  // namespace moesim
