// Differentiable spiking layers through the Gumbel-softmax relaxation, and
// a shared-trunk advantage actor-critic trained with the tape.
//
// Each stochastic neuron draws a soft categorical sample over the graded
// activity levels; the noise enters as a constant input, so gradients flow
// through the deterministic part of the computation only.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikerl/neuron_ising.hpp"
#include "spikerl/rng.hpp"
#include "spikerl/tape.hpp"

namespace spikerl {

using GradedNoise = std::array<double, 5>;

inline std::vector<GradedNoise> draw_layer_noise(int n_neurons, RngStream& rng) {
  std::vector<GradedNoise> noise(static_cast<std::size_t>(n_neurons));
  for (auto& g : noise) {
    for (double& v : g) v = gumbel_sample(rng);
  }
  return noise;
}

// Soft one-hot sample y = softmax((log_probs + g) / tau); differentiable in
// log_probs, with g held constant.
inline Tape::NodeId gumbel_softmax_layer(Tape& t, Tape::NodeId log_probs,
                                         std::span<const double> g, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("gumbel_softmax_layer: tau must be > 0");
  if (g.size() != t.val(log_probs).size()) {
    throw std::invalid_argument("gumbel_softmax_layer: noise size mismatch");
  }
  const Tape::NodeId noise = t.value({g.begin(), g.end()});
  return t.softmax(t.scale(t.add(log_probs, noise), 1.0 / tau));
}

// Stochastic graded-activity layer on drives u (one per neuron): each neuron
// forms categorical log-probabilities over the activity levels a_k with
// logits a_k * u_i, draws a soft sample via Gumbel-softmax, and emits the
// expected activity sum_k a_k y_k as its differentiable output.
inline Tape::NodeId spiking_policy_layer(Tape& t, Tape::NodeId drives,
                                         std::span<const GradedNoise> noise, double tau) {
  const auto n = static_cast<int>(t.val(drives).size());
  if (static_cast<int>(noise.size()) != n) {
    throw std::invalid_argument("spiking_policy_layer: noise count mismatch");
  }
  const Tape::NodeId levels =
      t.value({kGradedActions.begin(), kGradedActions.end()});
  std::vector<Tape::NodeId> outs;
  outs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Tape::NodeId drive_i = t.gather(drives, i);
    const Tape::NodeId logits = t.mul(t.broadcast(drive_i, 5), levels);
    const Tape::NodeId log_pi = t.log(t.softmax(logits));
    const Tape::NodeId y = gumbel_softmax_layer(t, log_pi, noise[static_cast<std::size_t>(i)], tau);
    outs.push_back(t.dot(levels, y));
  }
  return t.concat(outs);
}

// Shared-trunk actor-critic: one stochastic hidden layer feeding a linear
// policy head and a linear value head.
struct A2CModel {
  int input_dim = 0;
  int hidden = 0;
  int actions = 0;
  double tau = 1.0;
  std::vector<double> w1, b1;  // hidden x input, hidden
  std::vector<double> wa, ba;  // actions x hidden, actions
  std::vector<double> wc, bc;  // hidden, 1

  static A2CModel init(int input_dim, int hidden, int actions, double tau, RngStream& rng,
                       double scale) {
    A2CModel m;
    m.input_dim = input_dim;
    m.hidden = hidden;
    m.actions = actions;
    m.tau = tau;
    auto fill = [&rng, scale](std::vector<double>& v, std::size_t n) {
      v.resize(n);
      for (double& x : v) x = rng.uniform(-scale, scale);
    };
    fill(m.w1, static_cast<std::size_t>(hidden) * input_dim);
    m.b1.assign(static_cast<std::size_t>(hidden), 0.0);
    fill(m.wa, static_cast<std::size_t>(actions) * hidden);
    m.ba.assign(static_cast<std::size_t>(actions), 0.0);
    fill(m.wc, static_cast<std::size_t>(hidden));
    m.bc.assign(1, 0.0);
    return m;
  }
};

struct A2CGraph {
  Tape::NodeId w1, b1, wa, ba, wc, bc;
  Tape::NodeId policy;      // softmax over actions
  Tape::NodeId log_policy;  // log of it
  Tape::NodeId value;       // scalar node
};

inline A2CGraph a2c_graph(Tape& t, const A2CModel& m, std::span<const double> x,
                          std::span<const GradedNoise> noise) {
  A2CGraph g;
  g.w1 = t.value_matrix({m.w1.begin(), m.w1.end()}, m.hidden, m.input_dim);
  g.b1 = t.value({m.b1.begin(), m.b1.end()});
  g.wa = t.value_matrix({m.wa.begin(), m.wa.end()}, m.actions, m.hidden);
  g.ba = t.value({m.ba.begin(), m.ba.end()});
  g.wc = t.value_matrix({m.wc.begin(), m.wc.end()}, 1, m.hidden);
  g.bc = t.value({m.bc.begin(), m.bc.end()});
  const Tape::NodeId input = t.value({x.begin(), x.end()});
  const Tape::NodeId drives = t.add(t.matvec(g.w1, input), g.b1);
  const Tape::NodeId hidden = spiking_policy_layer(t, drives, noise, m.tau);
  const Tape::NodeId logits = t.add(t.matvec(g.wa, hidden), g.ba);
  g.policy = t.softmax(logits);
  g.log_policy = t.log(g.policy);
  g.value = t.gather(t.add(t.matvec(g.wc, hidden), g.bc), 0);
  return g;
}

struct A2CEval {
  std::vector<double> policy;
  double value = 0.0;
  std::vector<GradedNoise> noise;
};

inline A2CEval a2c_eval(const A2CModel& m, std::span<const double> x, RngStream& rng) {
  A2CEval out;
  out.noise = draw_layer_noise(m.hidden, rng);
  Tape t;
  const auto g = a2c_graph(t, m, x, out.noise);
  const auto p = t.val(g.policy);
  out.policy.assign(p.begin(), p.end());
  out.value = t.val(g.value)[0];
  return out;
}

struct Transition {
  std::vector<double> state;
  std::vector<GradedNoise> noise;  // hidden noise used when acting
  int action = 0;
  double reward = 0.0;
  bool terminal = false;
  double bootstrap_value = 0.0;  // V(s') at collection time; 0 when terminal
};

struct A2CLosses {
  double actor = 0.0;
  double critic = 0.0;
};

// One gradient step on the summed batch loss
//   -sum_t A_t log pi(a_t)  +  critic_coef * sum_t (target_t - V(s_t))^2
// with A_t = target_t - V(s_t) held constant in the actor term and the
// noise replayed from acting time, so the replayed policy matches the one
// the actions were drawn from.
inline A2CLosses a2c_step(A2CModel& m, std::span<const Transition> batch, double gamma,
                          double alpha, double critic_coef = 1.0) {
  if (batch.empty()) throw std::invalid_argument("a2c_step: empty batch");
  std::vector<double> gw1(m.w1.size(), 0.0), gb1(m.b1.size(), 0.0);
  std::vector<double> gwa(m.wa.size(), 0.0), gba(m.ba.size(), 0.0);
  std::vector<double> gwc(m.wc.size(), 0.0), gbc(m.bc.size(), 0.0);
  A2CLosses losses;
  for (const auto& tr : batch) {
    Tape t;
    const auto g = a2c_graph(t, m, tr.state, tr.noise);
    const double target = tr.reward + (tr.terminal ? 0.0 : gamma * tr.bootstrap_value);
    const double advantage = target - t.val(g.value)[0];
    const Tape::NodeId err = t.sub(t.scalar(target), g.value);
    const Tape::NodeId critic_loss = t.mul(err, err);
    const Tape::NodeId actor_loss = t.scale(t.gather(g.log_policy, tr.action), -advantage);
    const Tape::NodeId loss = t.add(actor_loss, t.scale(critic_loss, critic_coef));
    t.backward(loss);
    losses.actor += t.val(actor_loss)[0];
    losses.critic += t.val(critic_loss)[0];
    auto acc = [&t](std::vector<double>& dst, Tape::NodeId node) {
      const auto a = t.adjoint(node);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a[i];
    };
    acc(gw1, g.w1);
    acc(gb1, g.b1);
    acc(gwa, g.wa);
    acc(gba, g.ba);
    acc(gwc, g.wc);
    acc(gbc, g.bc);
  }
  auto apply = [alpha](std::vector<double>& p, const std::vector<double>& grad) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= alpha * grad[i];
  };
  apply(m.w1, gw1);
  apply(m.b1, gb1);
  apply(m.wa, gwa);
  apply(m.ba, gba);
  apply(m.wc, gwc);
  apply(m.bc, gbc);
  return losses;
}

}  // namespace spikerl

#include "spikerl/learning.hpp"

namespace spikerl {

struct A2CEpisodeConfig {
  double gamma = 0.99;
  double alpha = 1e-3;
  double critic_coef = 1.0;
  int batch_size = 0;  // 0: one update per episode
};

// Collects an episode with fresh hidden noise per step, then updates from
// the stored transitions with the noise replayed. Bootstrap values come
// from the rollout itself (the next step's value estimate).
inline EpisodeRecord run_episode_a2c(TaskEnv& env, A2CModel& model, const A2CEpisodeConfig& cfg,
                                     RngStream& env_rng, RngStream& model_rng) {
  env.reset(env_rng);
  EpisodeRecord rec;
  std::vector<Transition> batch;
  auto flush = [&](bool force) {
    if (batch.empty()) return;
    if (!force && cfg.batch_size > 0 && static_cast<int>(batch.size()) < cfg.batch_size) return;
    a2c_step(model, batch, cfg.gamma, cfg.alpha, cfg.critic_coef);
    batch.clear();
  };
  std::vector<double> state = env.observe().values;
  A2CEval eval = a2c_eval(model, state, model_rng);
  while (true) {
    const int action = sample_categorical(eval.policy, model_rng);
    const TaskStep step = env.step(action, env_rng);
    Transition tr;
    tr.state = state;
    tr.noise = eval.noise;
    tr.action = action;
    tr.reward = step.reward;
    tr.terminal = step.terminal;
    rec.episode_return += step.reward;
    ++rec.steps;
    double value_before = eval.value;
    if (!step.terminal) {
      state = env.observe().values;
      eval = a2c_eval(model, state, model_rng);
      tr.bootstrap_value = eval.value;
    }
    rec.td_errors.push_back(tr.reward +
                            (tr.terminal ? 0.0 : cfg.gamma * tr.bootstrap_value) - value_before);
    batch.push_back(std::move(tr));
    flush(false);
    if (step.terminal || step.truncated) {
      rec.reached_terminal = step.terminal;
      break;
    }
  }
  flush(true);
  return rec;
}

}  // namespace spikerl
