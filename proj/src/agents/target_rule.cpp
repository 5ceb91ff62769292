#include "tricritic/agents/target_rule.hpp"

#include <algorithm>

#include "tricritic/errors.hpp"

namespace tricritic {

std::string_view rule_name(TargetRule rule) {
  switch (rule) {
    case TargetRule::Single:
      return "single";
    case TargetRule::ClippedDouble:
      return "clipped_double";
    case TargetRule::Triplet:
      return "triplet";
  }
  return "unknown";
}

TargetRule parse_rule(std::string_view name) {
  if (name == "single") return TargetRule::Single;
  if (name == "clipped_double") return TargetRule::ClippedDouble;
  if (name == "triplet") return TargetRule::Triplet;
  throw ConfigError("unknown strategy '" + std::string(name) + "' (expected single, clipped_double or triplet)");
}

double combine_critic_values(TargetRule rule, std::span<const double> q) {
  if (q.size() != critic_count(rule))
    throw UsageError(std::string(rule_name(rule)) + " target needs " + std::to_string(critic_count(rule)) +
                     " critic values, got " + std::to_string(q.size()));
  switch (rule) {
    case TargetRule::Single:
      return q[0];
    case TargetRule::ClippedDouble:
      return std::min(q[0], q[1]);
    case TargetRule::Triplet:
      return std::min(std::max(q[0], q[1]), q[2]);
  }
  return q[0];
}

double td_target(TargetRule rule, std::span<const double> q, double reward, double done_mask, double gamma) {
  const double bootstrap = combine_critic_values(rule, q);
  if (done_mask == 0.0) return reward;
  return reward + gamma * done_mask * bootstrap;
}

}  // namespace tricritic
