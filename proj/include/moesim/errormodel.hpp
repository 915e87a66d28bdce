#pragma once

#include "moesim/types.hpp"

namespace moesim {

// Bottleneck-GPU token load under prediction error rate eps:
//   optimistic  -> avg_tokens            (errors still balance out)
//   typical     -> (1 + eps) * avg_tokens (errors spread evenly)
//   pessimistic -> G * (1 + eps) * avg_tokens (errors pile on one GPU)
// The pessimistic envelope is an upper bound and deliberately does not
// collapse to avg_tokens at eps = 0.
double bottleneck_tokens(double avg_tokens, double eps, ErrorScenario scenario,
                         int gpu_count);

// Extra forward communication from misrouted tokens: eps of the balanced
// scatter cost.  There is no optimistic case for communication; misroutes
// always move data again.
double comm_error_penalty(double eps, double balanced_scatter_time);

}  // namespace moesim
