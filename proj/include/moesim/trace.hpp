#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "moesim/types.hpp"

namespace moesim {

// Ratio of the busiest expert's routed assignments to the per-expert mean.
// 1 = perfectly balanced, E = everything on one expert.
double skewness_of(std::span<const double> counts);
double skewness_of(const std::vector<std::int64_t>& counts);

// Mean of per-layer skewness over a whole trace.
double trace_skewness(const ExpertTrace& trace);

// Single hot expert at probability s/E, uniform tail on the rest.  The
// minimal construction reaching any target skewness in [1, E].
std::vector<double> distribution_from_skewness(int num_experts, double s);

// Expected skewness of a distribution (probabilities treated as counts).
double distribution_skewness(std::span<const double> probs);

// i.i.d. multinomial routing per token; top_k > 1 draws without
// replacement proportionally to the remaining mass.
ExpertTrace sample_trace(const TokenDistribution& dist,
                         const WorkloadConfig& workload, int top_k,
                         std::uint64_t seed);

// JSON-lines, one record per layer:
//   {"layer": int, "experts": [[int,...], ...]}
// plus optional "token_ids" and "seq_len" fields when present.
void write_trace_jsonl(std::ostream& out, const ExpertTrace& trace);
void write_trace_jsonl(const std::string& path, const ExpertTrace& trace);
ExpertTrace read_trace_jsonl(std::istream& in);
ExpertTrace read_trace_jsonl(const std::string& path);

}  // namespace moesim
