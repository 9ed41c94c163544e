// Stochastic leaky integrate-and-fire neuron.
//
// The membrane potential sums exponentially decaying post-synaptic
// potentials, u(t) = b + sum_k W_k sum_i exp(-(t - t_i)/tau_m), and the
// fire probability at time t is sigmoid(u(t) - threshold).

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikerl/numeric.hpp"
#include "spikerl/rng.hpp"

namespace spikerl {

struct LifParams {
  double bias = 0.0;
  std::vector<double> weights;
  double tau_m = 1.0;
  double threshold = 0.0;
};

// Post-synaptic potential of a spike aged `age`; zero before the spike.
inline double lif_psp(double age, double tau_m) {
  if (!(tau_m > 0.0)) throw std::invalid_argument("lif_psp: tau_m must be > 0");
  if (age < 0.0) return 0.0;
  return std::exp(-age / tau_m);
}

// Per-input sums of PSPs at time t: psp_k = sum_i z(t - t_i).
inline std::vector<double> lif_psp_sums(const LifParams& p,
                                        std::span<const std::vector<double>> spike_times,
                                        double t) {
  if (spike_times.size() != p.weights.size()) {
    throw std::invalid_argument("lif_psp_sums: spike train count does not match fan-in");
  }
  std::vector<double> sums(spike_times.size(), 0.0);
  for (std::size_t k = 0; k < spike_times.size(); ++k) {
    for (double ti : spike_times[k]) sums[k] += lif_psp(t - ti, p.tau_m);
  }
  return sums;
}

inline double lif_membrane(const LifParams& p,
                           std::span<const std::vector<double>> spike_times, double t) {
  const auto sums = lif_psp_sums(p, spike_times, t);
  double u = p.bias;
  for (std::size_t k = 0; k < sums.size(); ++k) u += p.weights[k] * sums[k];
  return u;
}

inline double lif_fire_prob(const LifParams& p, double u) {
  return sigmoid(u - p.threshold);
}

// d ln pi / dW_k at membrane potential u for the fire (1) / silent (0)
// action. Exactly saturated probabilities yield a zero gradient.
inline void lif_fire_grad(const LifParams& p, double u, int action,
                          std::span<const double> psp_sums, std::span<double> grad) {
  if (psp_sums.size() != p.weights.size() || grad.size() != p.weights.size()) {
    throw std::invalid_argument("lif_fire_grad: buffer size mismatch");
  }
  const double s = sigmoid(u - p.threshold);
  double coef = 0.0;
  if (action == 1) {
    coef = (s == 0.0 || s == 1.0) ? 0.0 : (1.0 - s);  // sigma'/sigma
  } else if (action == 0) {
    coef = (s == 0.0 || s == 1.0) ? 0.0 : -s;  // -sigma'/(1-sigma)
  } else {
    throw std::invalid_argument("lif_fire_grad: action must be 0 or 1");
  }
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] = coef * psp_sums[k];
}

// First-to-spike race between laterally inhibited agents sharing one
// stimulus: at each discrete time every agent draws fire/silent from its
// membrane policy, and the first spike (lowest index on a tie) ends the
// episode for all of them.
struct RaceResult {
  int winner = -1;     // -1: nobody spiked before t_max
  int spike_time = -1;
  std::vector<double> final_membranes;
};

inline RaceResult lif_first_spike_race(std::span<const LifParams> agents,
                                       std::span<const std::vector<double>> spike_times,
                                       int t_max, RngStream& rng) {
  RaceResult res;
  for (int t = 0; t < t_max; ++t) {
    res.final_membranes.clear();
    int winner = -1;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const double u = lif_membrane(agents[i], spike_times, static_cast<double>(t));
      res.final_membranes.push_back(u);
      const int a = sample_bernoulli(lif_fire_prob(agents[i], u), rng);
      if (a > 0 && winner < 0) winner = static_cast<int>(i);
    }
    if (winner >= 0) {
      res.winner = winner;
      res.spike_time = t;
      return res;
    }
  }
  return res;
}

}  // namespace spikerl
