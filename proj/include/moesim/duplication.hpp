#pragma once

#include <cstdint>
#include <vector>

#include "moesim/types.hpp"

namespace moesim {

// Which experts live on which GPUs, plus the copy budgets.
// capacities[g] is the number of expert slots on GPU g.
struct Placement {
  int gpu_count = 0;
  int num_experts = 0;
  int max_copies = 1;
  std::vector<int> capacities;
  std::vector<std::vector<char>> hosts;  // hosts[expert][gpu]

  static Placement one_expert_per_gpu(int num_experts, int gpu_count);

  bool hosted(int expert, int gpu) const {
    return hosts[static_cast<std::size_t>(expert)][static_cast<std::size_t>(gpu)] != 0;
  }
  int copies(int expert) const;
  int resident(int gpu) const;
  std::vector<int> hosted_experts(int gpu) const;
  void validate() const;
};

// Routed assignments mapped to GPUs. Units are (token, slot) routed
// assignments, so top_k > 1 traces balance uniformly.
struct Dispatch {
  std::vector<int> assignment;        // unit -> gpu
  std::vector<std::int64_t> loads;    // per-gpu unit counts
};

struct BalanceResult {
  Placement placement;
  Dispatch dispatch;
  bool balanced = false;  // max - min <= 1 reached
  int iterations = 0;
  int copies_made = 0;
};

struct BalanceReport {
  std::int64_t spread = 0;  // max load - min load
  bool tokens_conserved = false;
  bool hosting_valid = false;
  bool balanced = false;
};

// Flattened token->expert map for one layer (one entry per routed
// assignment, token-major).
std::vector<int> flatten_layer(const LayerRouting& layer);

// Every unit goes to the lowest-indexed GPU hosting its expert.
Dispatch initial_dispatch(const LayerRouting& layer, const Placement& placement);

// Iteratively copies the hottest GPU's hottest expert toward the coldest
// GPU and shifts ceil((max-min)/2) units, until loads differ by at most
// one unit or the copy budgets block further progress.  A blocked
// hot/cold pair is skipped until loads change again; if every pair is
// blocked (or the iteration cap trips) the best effort so far is returned
// with balanced = false.
BalanceResult balance_by_duplication(const LayerRouting& layer,
                                     const Placement& initial,
                                     int iteration_cap = 1 << 20);

BalanceReport verify_balance(const LayerRouting& layer,
                             const Placement& placement,
                             const Dispatch& dispatch);

}  // namespace moesim
