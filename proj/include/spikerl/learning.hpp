// TD-error routing rules and the per-episode training loop: every coagent
// ascends its own log-policy gradient scaled by the globally broadcast TD
// error, with population sign reversal and modular credit routing layered
// on top.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikerl/critic.hpp"
#include "spikerl/population.hpp"
#include "spikerl/task.hpp"

namespace spikerl {

struct LearnerConfig {
  double alpha = 0.05;         // actor step size
  double alpha_critic = 0.2;   // critic step size
  double gamma = 0.9;
  double lambda = 0.8;
  int population = 10;
  double tau_act = 1.0;        // readout softmax temperature
  double kappa_scale = 1.0;    // off-module correction = kappa_scale * |delta|
  double delta_clip = 0.0;     // 0 disables clipping
  double momentum = 0.0;
  double alpha_decay = 1.0;    // per-episode multiplier on alpha
  double init_scale = 0.1;
  bool hebbian = false;        // replace policy-gradient updates by Hebbian
  double hebbian_alpha = 1e-3;
};

// Members whose own choice matched the ensemble action receive the TD error
// as-is; the others receive it with the sign reversed.
inline double population_delta(double delta, int member_action, int ensemble_action) {
  return member_action == ensemble_action ? delta : -delta;
}

// Per-module TD errors for a modular network: the chosen action's module
// gets delta; every other module gets a silence-promoting signal, +kappa if
// its output stayed silent and -kappa if it fired.
inline std::vector<double> modular_delta(double delta, int chosen_action,
                                         std::span<const std::uint8_t> output_fired,
                                         double kappa) {
  std::vector<double> out(output_fired.size());
  for (std::size_t m = 0; m < output_fired.size(); ++m) {
    if (static_cast<int>(m) == chosen_action) {
      out[m] = delta;
    } else {
      out[m] = output_fired[m] ? -kappa : kappa;
    }
  }
  return out;
}

// dw = alpha * pre * post.
inline double hebbian_update(double pre, double post, double alpha) {
  return alpha * pre * post;
}

struct EpisodeRecord {
  std::uint64_t seed = 0;
  double episode_return = 0.0;
  int steps = 0;
  bool reached_terminal = false;
  std::vector<double> td_errors;
};

namespace detail {

// Expands per-module deltas into per-coagent deltas (single hidden layer).
inline void fill_modular_deltas(const TopologySpec& topo, std::span<const double> module_deltas,
                                std::vector<double>& per_coagent) {
  const int hidden = topo.hidden_sizes[0];
  for (int h = 0; h < hidden; ++h) {
    per_coagent[static_cast<std::size_t>(h)] =
        module_deltas[static_cast<std::size_t>(topo.module_of(h))];
  }
  for (int o = 0; o < topo.output_size; ++o) {
    per_coagent[static_cast<std::size_t>(hidden + o)] = module_deltas[static_cast<std::size_t>(o)];
  }
}

}  // namespace detail

// One episode of the actor-critic loop: ensemble action, environment step,
// TD error, critic update, then the routed coagent updates.
inline EpisodeRecord run_episode_pgcn(TaskEnv& env, PopulationEnsemble& pop, Critic& critic,
                                      const LearnerConfig& cfg, RngStream& env_rng,
                                      double alpha_override = -1.0) {
  const double alpha = alpha_override >= 0.0 ? alpha_override : cfg.alpha;
  env.reset(env_rng);
  critic.begin_episode();
  EpisodeRecord rec;
  std::vector<double> per_coagent(
      static_cast<std::size_t>(pop.member(0).topology().coagent_count()));
  while (true) {
    const EncodedState enc = env.observe();
    const CriticView before = env.critic_view();
    const EnsembleAct act = pop.act(enc);
    const TaskStep step = env.step(act.action, env_rng);
    const CriticView after = env.critic_view();

    double delta = critic.td_error(before, step.reward, after, step.terminal);
    critic.update(delta, before);
    rec.td_errors.push_back(delta);
    rec.episode_return += step.reward;
    ++rec.steps;

    if (cfg.delta_clip > 0.0) {
      delta = std::clamp(delta, -cfg.delta_clip, cfg.delta_clip);
    }

    const auto& topo = pop.member(0).topology();
    for (int m = 0; m < pop.size(); ++m) {
      auto& net = pop.member(m);
      if (cfg.hebbian) {
        net.hebbian_update(cfg.hebbian_alpha);
        continue;
      }
      const double dm = population_delta(delta, act.member_actions[static_cast<std::size_t>(m)],
                                         act.action);
      if (topo.connectivity == Connectivity::Modular) {
        const auto module_deltas =
            modular_delta(dm, act.action, net.trace_fired(), cfg.kappa_scale * std::abs(dm));
        detail::fill_modular_deltas(topo, module_deltas, per_coagent);
      } else {
        per_coagent.assign(per_coagent.size(), dm);
      }
      net.coagent_update(per_coagent, alpha, cfg.momentum);
    }

    if (step.terminal || step.truncated) {
      rec.reached_terminal = step.terminal;
      break;
    }
  }
  return rec;
}

}  // namespace spikerl
