#include "moesim/errormodel.hpp"

namespace moesim {

double bottleneck_tokens(double avg_tokens, double eps, ErrorScenario scenario,
                         int gpu_count) {
  if (eps < 0.0 || eps > 1.0)
    throw std::invalid_argument("bottleneck_tokens: eps must be in [0,1]");
  if (avg_tokens < 0.0)
    throw std::invalid_argument("bottleneck_tokens: avg_tokens must be >= 0");
  switch (scenario) {
    case ErrorScenario::optimistic:
      return avg_tokens;
    case ErrorScenario::typical:
      return (1.0 + eps) * avg_tokens;
    case ErrorScenario::pessimistic:
      return static_cast<double>(gpu_count) * (1.0 + eps) * avg_tokens;
  }
  return avg_tokens;
}

double comm_error_penalty(double eps, double balanced_scatter_time) {
  if (eps < 0.0 || eps > 1.0)
    throw std::invalid_argument("comm_error_penalty: eps must be in [0,1]");
  if (balanced_scatter_time < 0.0)
    throw std::invalid_argument("comm_error_penalty: time must be >= 0");
  return eps * balanced_scatter_time;
}

}  // namespace moesim
