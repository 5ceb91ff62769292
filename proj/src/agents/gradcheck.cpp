#include "tricritic/agents/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tricritic/agents/agent.hpp"
#include "tricritic/rng.hpp"

namespace tricritic {
namespace {

constexpr double kStep = 1e-5;

double rel_error(double a, double n) {
  return std::fabs(a - n) / std::max({std::fabs(a), std::fabs(n), 1e-6});
}

template <class F>
double check(ParamVector& params, const ParamVector& grad, std::size_t coords, Rng& rng, F&& objective) {
  std::uniform_int_distribution<std::size_t> pick(0, params.values.size() - 1);
  double worst = 0.0;
  for (std::size_t c = 0; c < coords; ++c) {
    const std::size_t i = pick(rng);
    const double saved = params.values[i];
    params.values[i] = saved + kStep;
    const double up = objective();
    params.values[i] = saved - kStep;
    const double down = objective();
    params.values[i] = saved;
    worst = std::max(worst, rel_error(grad.values[i], (up - down) / (2 * kStep)));
  }
  return worst;
}

}  // namespace

GradcheckResult run_gradcheck(std::size_t trials, std::uint64_t seed, std::size_t coords_per_trial) {
  GradcheckResult out;
  out.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(derive_seed(seed, "gradcheck", t));
    std::uniform_int_distribution<std::size_t> dim(1, 5), width(2, 12), depth(1, 2), batch_n(1, 8);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    const std::size_t sd = dim(rng);
    const std::size_t ad = std::min<std::size_t>(dim(rng), 3);
    const double bound = 0.5 + std::fabs(unit(rng)) * 2.0;
    std::vector<std::size_t> hidden(depth(rng));
    for (auto& w : hidden) w = width(rng);

    MlpSpec actor_spec{{}, HiddenActivation::Tanh, OutputActivation::tanh_scaled(bound)};
    actor_spec.widths.push_back(sd);
    actor_spec.widths.insert(actor_spec.widths.end(), hidden.begin(), hidden.end());
    actor_spec.widths.push_back(ad);
    MlpSpec critic_spec{{}, HiddenActivation::Tanh, OutputActivation::identity()};
    critic_spec.widths.push_back(sd + ad);
    critic_spec.widths.insert(critic_spec.widths.end(), hidden.begin(), hidden.end());
    critic_spec.widths.push_back(1);

    ParamVector actor = mlp_init(actor_spec, rng());
    ParamVector critic = mlp_init(critic_spec, rng());

    const std::size_t n = batch_n(rng);
    Batch batch;
    batch.states.resize(n, sd);
    batch.actions.resize(n, ad);
    batch.next_states.resize(n, sd);
    std::vector<double> targets(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (auto& v : batch.states.row(r)) v = unit(rng);
      for (auto& v : batch.actions.row(r)) v = bound * unit(rng);
      for (auto& v : batch.next_states.row(r)) v = unit(rng);
      batch.rewards.push_back(unit(rng));
      batch.done_masks.push_back(1.0);
      targets[r] = 2.0 * unit(rng);
    }

    ParamVector cg{std::vector<double>(critic.values.size(), 0.0)};
    critic_loss_and_gradient(critic_spec, critic, batch, targets, &cg);
    out.max_critic_rel_error =
        std::max(out.max_critic_rel_error, check(critic, cg, coords_per_trial, rng, [&] {
                   return critic_loss_and_gradient(critic_spec, critic, batch, targets, nullptr);
                 }));

    ParamVector ag{std::vector<double>(actor.values.size(), 0.0)};
    actor_objective_and_gradient(actor_spec, actor, critic_spec, critic, batch.states, &ag);
    out.max_actor_rel_error = std::max(out.max_actor_rel_error, check(actor, ag, coords_per_trial, rng, [&] {
                                         return actor_objective_and_gradient(actor_spec, actor, critic_spec, critic,
                                                                             batch.states, nullptr);
                                       }));
    out.coordinates += 2 * coords_per_trial;
  }
  return out;
}

}  // namespace tricritic
