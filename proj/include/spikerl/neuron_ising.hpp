// Memoryless stochastic binary neuron with a Boltzmann firing policy.
//
// With drive u = b + sum_j w_j x_j, the fire probability is
// e^u / (e^u + e^-u), which equals sigmoid(2u). A graded variant spreads
// the drive over five activity levels {-2,-1,0,1,2} through a softmax.

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikerl/numeric.hpp"
#include "spikerl/rng.hpp"

namespace spikerl {

struct IsingParams {
  double bias = 0.0;
  std::vector<double> weights;

  int param_count() const { return 1 + static_cast<int>(weights.size()); }
};

// Graded activity levels, lowest to highest.
inline constexpr std::array<double, 5> kGradedActions{-2.0, -1.0, 0.0, 1.0, 2.0};

inline double ising_drive(const IsingParams& p, std::span<const double> inputs) {
  if (inputs.size() != p.weights.size()) {
    throw std::invalid_argument("ising: input size does not match fan-in");
  }
  double u = p.bias;
  for (std::size_t j = 0; j < inputs.size(); ++j) u += p.weights[j] * inputs[j];
  return u;
}

inline double ising_fire_prob(const IsingParams& p, std::span<const double> inputs) {
  return sigmoid(2.0 * ising_drive(p, inputs));
}

inline int ising_sample(const IsingParams& p, std::span<const double> inputs, RngStream& rng) {
  return sample_bernoulli(ising_fire_prob(p, inputs), rng);
}

// d ln pi / d(bias, weights) for action in {-1, +1}. grad layout: [bias, w...].
inline void ising_logpolicy_grad(const IsingParams& p, std::span<const double> inputs,
                                 int action, std::span<double> grad) {
  if (grad.size() != static_cast<std::size_t>(p.param_count())) {
    throw std::invalid_argument("ising_logpolicy_grad: bad gradient buffer");
  }
  const double u = ising_drive(p, inputs);
  // +2(1-p) when firing, -2p when silent, with p = sigmoid(2u).
  const double coef = (action > 0) ? 2.0 * sigmoid(-2.0 * u) : -2.0 * sigmoid(2.0 * u);
  grad[0] = coef;
  for (std::size_t j = 0; j < inputs.size(); ++j) grad[j + 1] = coef * inputs[j];
}

// pi(a_k) = exp(a_k u) / sum_i exp(a_i u) over the graded action set.
inline std::array<double, 5> ising_graded_policy(const IsingParams& p,
                                                 std::span<const double> inputs) {
  const double u = ising_drive(p, inputs);
  std::array<double, 5> logits;
  for (std::size_t k = 0; k < logits.size(); ++k) logits[k] = kGradedActions[k] * u;
  const auto probs = softmax(logits);
  std::array<double, 5> out;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = probs[k];
  return out;
}

inline int ising_graded_sample(const IsingParams& p, std::span<const double> inputs,
                               RngStream& rng) {
  const auto probs = ising_graded_policy(p, inputs);
  return sample_categorical(probs, rng);
}

// d ln pi(a_k) / d(bias, weights) = (a_k - E_pi[a]) * d u / d theta.
inline void ising_graded_logpolicy_grad(const IsingParams& p, std::span<const double> inputs,
                                        int action_index, std::span<double> grad) {
  if (action_index < 0 || action_index >= static_cast<int>(kGradedActions.size())) {
    throw std::invalid_argument("ising_graded_logpolicy_grad: bad action index");
  }
  if (grad.size() != static_cast<std::size_t>(p.param_count())) {
    throw std::invalid_argument("ising_graded_logpolicy_grad: bad gradient buffer");
  }
  const auto probs = ising_graded_policy(p, inputs);
  double mean_action = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) mean_action += probs[k] * kGradedActions[k];
  const double coef = kGradedActions[static_cast<std::size_t>(action_index)] - mean_action;
  grad[0] = coef;
  for (std::size_t j = 0; j < inputs.size(); ++j) grad[j + 1] = coef * inputs[j];
}

}  // namespace spikerl
