// Spike-train coagent with a generalized-linear firing policy.
//
// The fire probability at bin t is a sigmoid of the summed causal filter
// responses: stimulus kernels over the presynaptic trains, an optional
// post-spike kernel over the neuron's own realized history, optional
// coupling kernels over lateral activity (entering with a one-bin delay),
// plus a baseline. A step's action is the whole spike train, generated
// autoregressively bin by bin.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikerl/numeric.hpp"
#include "spikerl/rng.hpp"

namespace spikerl {

struct GlmParams {
  std::vector<Kernel1D> stim_kernels;    // one kernel per presynaptic input
  Kernel1D post_kernel;                  // empty = history term disabled
  std::vector<Kernel1D> lateral_kernels; // empty = coupling disabled
  double baseline = 0.0;
  int train_len = 1;

  int param_count() const {
    std::size_t n = 1;  // baseline
    for (const auto& k : stim_kernels) n += k.size();
    n += post_kernel.size();
    for (const auto& k : lateral_kernels) n += k.size();
    return static_cast<int>(n);
  }
};

// Per-step view of a coagent's MDP state: the presynaptic spike trains, the
// lateral activity of the previous bin, and an alignment offset between the
// neuron's own bin clock and the stimulus clock. With stim_shift = K_in -
// K_own the last own bin reads the end of the stimulus trains; zero gives
// the plain shared-clock causal convolution.
struct CoagentState {
  std::span<const std::vector<double>> stimulus;
  std::span<const std::vector<double>> lateral = {};
  int stim_shift = 0;
};

// Linear drive at own-bin t given the realized own history before t.
inline double glm_drive(const GlmParams& p, const CoagentState& s,
                        std::span<const double> own_history, int t) {
  if (s.stimulus.size() != p.stim_kernels.size()) {
    throw std::invalid_argument("glm_drive: stimulus count does not match kernels");
  }
  double acc = p.baseline;
  const long ts = static_cast<long>(t) + s.stim_shift;
  for (std::size_t i = 0; i < p.stim_kernels.size(); ++i) {
    acc += conv1d_causal_at(s.stimulus[i], p.stim_kernels[i], ts);
  }
  for (std::size_t j = 0; j < p.post_kernel.size(); ++j) {
    const long idx = static_cast<long>(t) - 1 - static_cast<long>(j);
    if (idx < 0 || idx >= static_cast<long>(own_history.size())) continue;
    acc += p.post_kernel[j] * own_history[static_cast<std::size_t>(idx)];
  }
  if (!p.lateral_kernels.empty()) {
    if (s.lateral.size() != p.lateral_kernels.size()) {
      throw std::invalid_argument("glm_drive: lateral count does not match kernels");
    }
    for (std::size_t i = 0; i < p.lateral_kernels.size(); ++i) {
      for (std::size_t j = 0; j < p.lateral_kernels[i].size(); ++j) {
        const long idx = static_cast<long>(t) - 1 - static_cast<long>(j);
        if (idx < 0 || idx >= static_cast<long>(s.lateral[i].size())) continue;
        acc += p.lateral_kernels[i][j] * s.lateral[i][static_cast<std::size_t>(idx)];
      }
    }
  }
  return acc;
}

inline double glm_fire_prob(const GlmParams& p, const CoagentState& s,
                            std::span<const double> own_history, int t) {
  return sigmoid(glm_drive(p, s, own_history, t));
}

// Autoregressive train generation: each bin is Bernoulli on the probability
// conditioned on the bins already drawn this step.
inline std::vector<double> glm_sample_train(const GlmParams& p, const CoagentState& s,
                                            RngStream& rng) {
  std::vector<double> train;
  train.reserve(static_cast<std::size_t>(p.train_len));
  for (int t = 0; t < p.train_len; ++t) {
    const double lam = glm_fire_prob(p, s, train, t);
    train.push_back(static_cast<double>(sample_bernoulli(lam, rng)));
  }
  return train;
}

// Log probability of the whole train, factored over bins and conditioned on
// the realized history. Probabilities are clamped away from {0,1} so a
// contradicting bin stays finite.
inline double glm_spiketrain_logprob(const GlmParams& p, const CoagentState& s,
                                     std::span<const double> train) {
  if (train.size() != static_cast<std::size_t>(p.train_len)) {
    throw std::invalid_argument("glm_spiketrain_logprob: train length mismatch");
  }
  double lp = 0.0;
  for (int t = 0; t < p.train_len; ++t) {
    const double lam =
        clamp_probability(glm_fire_prob(p, s, train.subspan(0, static_cast<std::size_t>(t)), t));
    lp += (train[static_cast<std::size_t>(t)] > 0.0) ? std::log(lam) : std::log(1.0 - lam);
  }
  return lp;
}

namespace detail {

// Walks every (parameter, lagged input) pair of the drive at own-bin t and
// hands the input value plus the flat parameter index to fn.
template <typename Fn>
inline void glm_drive_terms(const GlmParams& p, const CoagentState& s,
                            std::span<const double> own_history, int t, Fn&& fn) {
  int idx = 0;
  const long ts = static_cast<long>(t) + s.stim_shift;
  for (std::size_t i = 0; i < p.stim_kernels.size(); ++i) {
    for (std::size_t j = 0; j < p.stim_kernels[i].size(); ++j, ++idx) {
      const long k = ts - static_cast<long>(j);
      if (k < 0 || k >= static_cast<long>(s.stimulus[i].size())) continue;
      fn(idx, s.stimulus[i][static_cast<std::size_t>(k)]);
    }
  }
  for (std::size_t j = 0; j < p.post_kernel.size(); ++j, ++idx) {
    const long k = static_cast<long>(t) - 1 - static_cast<long>(j);
    if (k < 0 || k >= static_cast<long>(own_history.size())) continue;
    fn(idx, own_history[static_cast<std::size_t>(k)]);
  }
  for (std::size_t i = 0; i < p.lateral_kernels.size(); ++i) {
    for (std::size_t j = 0; j < p.lateral_kernels[i].size(); ++j, ++idx) {
      const long k = static_cast<long>(t) - 1 - static_cast<long>(j);
      if (k < 0 || k >= static_cast<long>(s.lateral[i].size())) continue;
      fn(idx, s.lateral[i][static_cast<std::size_t>(k)]);
    }
  }
  fn(idx, 1.0);  // baseline
}

}  // namespace detail

// Gradient of glm_spiketrain_logprob over the flattened parameters
// [stim kernels..., post kernel..., lateral kernels..., baseline]:
// spike bins contribute input*(1 - lambda), silent bins input*(-lambda).
inline void glm_logprob_grad(const GlmParams& p, const CoagentState& s,
                             std::span<const double> train, std::span<double> grad) {
  if (train.size() != static_cast<std::size_t>(p.train_len)) {
    throw std::invalid_argument("glm_logprob_grad: train length mismatch");
  }
  if (grad.size() != static_cast<std::size_t>(p.param_count())) {
    throw std::invalid_argument("glm_logprob_grad: bad gradient buffer");
  }
  for (double& g : grad) g = 0.0;
  for (int t = 0; t < p.train_len; ++t) {
    const auto hist = train.subspan(0, static_cast<std::size_t>(t));
    const double lam = clamp_probability(glm_fire_prob(p, s, hist, t));
    const double coef = (train[static_cast<std::size_t>(t)] > 0.0) ? (1.0 - lam) : -lam;
    detail::glm_drive_terms(p, s, hist, t,
                            [&](int idx, double input) { grad[static_cast<std::size_t>(idx)] += coef * input; });
  }
}

}  // namespace spikerl
