#include "moesim/duplication.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace moesim {

Placement Placement::one_expert_per_gpu(int num_experts, int gpu_count) {
  Placement p;
  p.gpu_count = gpu_count;
  p.num_experts = num_experts;
  p.max_copies = gpu_count;
  p.capacities.assign(static_cast<std::size_t>(gpu_count), num_experts);
  p.hosts.assign(static_cast<std::size_t>(num_experts),
                 std::vector<char>(static_cast<std::size_t>(gpu_count), 0));
  for (int e = 0; e < num_experts; ++e)
    p.hosts[static_cast<std::size_t>(e)][static_cast<std::size_t>(e % gpu_count)] = 1;
  return p;
}

int Placement::copies(int expert) const {
  const auto& row = hosts[static_cast<std::size_t>(expert)];
  return static_cast<int>(std::count(row.begin(), row.end(), 1));
}

int Placement::resident(int gpu) const {
  int n = 0;
  for (const auto& row : hosts) n += row[static_cast<std::size_t>(gpu)] ? 1 : 0;
  return n;
}

std::vector<int> Placement::hosted_experts(int gpu) const {
  std::vector<int> out;
  for (std::size_t e = 0; e < hosts.size(); ++e)
    if (hosts[e][static_cast<std::size_t>(gpu)]) out.push_back(static_cast<int>(e));
  return out;
}

void Placement::validate() const {
  if (gpu_count < 1 || num_experts < 1)
    throw std::invalid_argument("placement: need >= 1 GPU and expert");
  if (max_copies < 1)
    throw std::invalid_argument("placement: max_copies must be >= 1");
  if (static_cast<int>(capacities.size()) != gpu_count ||
      static_cast<int>(hosts.size()) != num_experts)
    throw std::invalid_argument("placement: shape mismatch");
  for (int e = 0; e < num_experts; ++e) {
    if (static_cast<int>(hosts[static_cast<std::size_t>(e)].size()) != gpu_count)
      throw std::invalid_argument("placement: shape mismatch");
    const int c = copies(e);
    if (c < 1)
      throw std::invalid_argument("placement: every expert needs >= 1 host");
    if (c > max_copies)
      throw std::invalid_argument("placement: expert exceeds max_copies");
  }
  for (int g = 0; g < gpu_count; ++g)
    if (resident(g) > capacities[static_cast<std::size_t>(g)])
      throw std::invalid_argument("placement: GPU over capacity");
}

std::vector<int> flatten_layer(const LayerRouting& layer) {
  std::vector<int> f;
  for (const auto& token : layer.experts)
    for (int e : token) f.push_back(e);
  return f;
}

Dispatch initial_dispatch(const LayerRouting& layer, const Placement& placement) {
  placement.validate();
  const std::vector<int> f = flatten_layer(layer);
  Dispatch d;
  d.assignment.resize(f.size());
  d.loads.assign(static_cast<std::size_t>(placement.gpu_count), 0);
  for (std::size_t t = 0; t < f.size(); ++t) {
    const int e = f[t];
    if (e < 0 || e >= placement.num_experts)
      throw std::invalid_argument("initial_dispatch: expert id out of range");
    int g = -1;
    for (int cand = 0; cand < placement.gpu_count; ++cand)
      if (placement.hosted(e, cand)) { g = cand; break; }
    if (g < 0)
      throw std::invalid_argument("initial_dispatch: expert has no host");
    d.assignment[t] = g;
    d.loads[static_cast<std::size_t>(g)]++;
  }
  return d;
}

namespace {

std::int64_t spread_of(const std::vector<std::int64_t>& loads) {
  const auto [lo, hi] = std::minmax_element(loads.begin(), loads.end());
  return *hi - *lo;
}

// Hottest expert on gpu by dispatched units; ties to the lowest id.
int hottest_expert_on(const std::vector<int>& f, const Dispatch& d, int gpu,
                      int num_experts) {
  std::vector<std::int64_t> per_expert(static_cast<std::size_t>(num_experts), 0);
  for (std::size_t t = 0; t < f.size(); ++t)
    if (d.assignment[t] == gpu) per_expert[static_cast<std::size_t>(f[t])]++;
  int best = -1;
  std::int64_t best_n = 0;
  for (int e = 0; e < num_experts; ++e)
    if (per_expert[static_cast<std::size_t>(e)] > best_n) {
      best_n = per_expert[static_cast<std::size_t>(e)];
      best = e;
    }
  return best;
}

}  // namespace

BalanceResult balance_by_duplication(const LayerRouting& layer,
                                     const Placement& initial,
                                     int iteration_cap) {
  BalanceResult res;
  res.placement = initial;
  res.dispatch = initial_dispatch(layer, initial);
  const std::vector<int> f = flatten_layer(layer);
  Placement& p = res.placement;
  Dispatch& d = res.dispatch;

  // Pairs found unmovable at the current loads; cleared on any progress.
  std::set<std::pair<int, int>> blocked;

  while (res.iterations < iteration_cap && spread_of(d.loads) > 1) {
    ++res.iterations;

    // Hot/cold candidates in load order (ties to the lowest GPU index),
    // skipping pairs already found unmovable at these loads.
    std::vector<int> hot_order(static_cast<std::size_t>(p.gpu_count));
    std::iota(hot_order.begin(), hot_order.end(), 0);
    std::vector<int> cold_order = hot_order;
    std::stable_sort(hot_order.begin(), hot_order.end(), [&](int a, int b) {
      return d.loads[static_cast<std::size_t>(a)] > d.loads[static_cast<std::size_t>(b)];
    });
    std::stable_sort(cold_order.begin(), cold_order.end(), [&](int a, int b) {
      return d.loads[static_cast<std::size_t>(a)] < d.loads[static_cast<std::size_t>(b)];
    });

    int g_hot = -1, g_cold = -1;
    for (int gh : hot_order) {
      for (int gc : cold_order) {
        if (gh == gc) continue;
        if (d.loads[static_cast<std::size_t>(gh)] -
                d.loads[static_cast<std::size_t>(gc)] <= 1)
          break;
        if (!blocked.count({gh, gc})) {
          g_hot = gh;
          g_cold = gc;
          break;
        }
      }
      if (g_hot >= 0) break;
    }
    if (g_hot < 0) break;  // every imbalanced pair is blocked

    const std::int64_t delta =
        (d.loads[static_cast<std::size_t>(g_hot)] -
         d.loads[static_cast<std::size_t>(g_cold)] + 1) / 2;
    const int e_star = hottest_expert_on(f, d, g_hot, p.num_experts);
    if (e_star < 0) {
      blocked.insert({g_hot, g_cold});
      continue;
    }

    if (!p.hosted(e_star, g_cold)) {
      const bool copy_ok =
          p.copies(e_star) < p.max_copies &&
          p.resident(g_cold) < p.capacities[static_cast<std::size_t>(g_cold)];
      if (!copy_ok) {
        // Copy guard failed: skip reassignment rather than dispatch a unit
        // to a GPU that does not host its expert.
        blocked.insert({g_hot, g_cold});
        continue;
      }
      p.hosts[static_cast<std::size_t>(e_star)][static_cast<std::size_t>(g_cold)] = 1;
      ++res.copies_made;
    }

    // Reassign the first min(delta, available) units of e_star, in unit order.
    std::int64_t moved = 0;
    for (std::size_t t = 0; t < f.size() && moved < delta; ++t) {
      if (d.assignment[t] == g_hot && f[t] == e_star) {
        d.assignment[t] = g_cold;
        ++moved;
      }
    }
    d.loads[static_cast<std::size_t>(g_hot)] -= moved;
    d.loads[static_cast<std::size_t>(g_cold)] += moved;
    if (moved > 0)
      blocked.clear();
    else
      blocked.insert({g_hot, g_cold});
  }

  res.balanced = spread_of(d.loads) <= 1;
  return res;
}

BalanceReport verify_balance(const LayerRouting& layer,
                             const Placement& placement,
                             const Dispatch& dispatch) {
  BalanceReport rep;
  const std::vector<int> f = flatten_layer(layer);
  rep.spread = dispatch.loads.empty() ? 0 : spread_of(dispatch.loads);
  const std::int64_t total =
      std::accumulate(dispatch.loads.begin(), dispatch.loads.end(),
                      static_cast<std::int64_t>(0));
  rep.tokens_conserved = total == static_cast<std::int64_t>(f.size()) &&
                         dispatch.assignment.size() == f.size();
  rep.hosting_valid = true;
  for (std::size_t t = 0; t < dispatch.assignment.size() && t < f.size(); ++t) {
    const int g = dispatch.assignment[t];
    if (g < 0 || g >= placement.gpu_count || !placement.hosted(f[t], g)) {
      rep.hosting_valid = false;
      break;
    }
  }
  rep.balanced = rep.spread <= 1;
  return rep;
}

}  // namespace moesim
