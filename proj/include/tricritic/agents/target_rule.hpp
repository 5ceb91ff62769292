#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace tricritic {

// How the target critics are combined into the bootstrap value.
//   Single        Q'1                       (one critic)
//   ClippedDouble min(Q'1, Q'2)              (two critics)
//   Triplet       min(max(Q'1, Q'2), Q'3)   (three critics, order fixed)
enum class TargetRule { Single, ClippedDouble, Triplet };

constexpr std::size_t critic_count(TargetRule rule) {
  switch (rule) {
    case TargetRule::Single:
      return 1;
    case TargetRule::ClippedDouble:
      return 2;
    case TargetRule::Triplet:
      return 3;
  }
  return 0;
}

std::string_view rule_name(TargetRule rule);
// Accepts "single", "clipped_double", "triplet". Throws ConfigError otherwise.
TargetRule parse_rule(std::string_view name);

// Combines one value per critic, in critic order. Throws UsageError when
// q.size() != critic_count(rule).
double combine_critic_values(TargetRule rule, std::span<const double> q);

// y = reward + gamma * done_mask * combine(q)
double td_target(TargetRule rule, std::span<const double> q, double reward, double done_mask, double gamma);

}  // namespace tricritic
