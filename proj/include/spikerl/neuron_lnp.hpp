// Linear-nonlinear cascade simplifications of the spike-train coagent:
// a single stimulus filter with Gaussian, Bernoulli, or Poisson output.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikerl/numeric.hpp"
#include "spikerl/rng.hpp"

namespace spikerl {

// Gaussian policy on a continuous action y with mean k.x (identity link).
// Gradient of log N(y; k.x, sigma^2) w.r.t. k is ((y - k.x)/sigma^2) * x.
inline std::vector<double> lnp_gaussian_logpolicy_grad(std::span<const double> k, double sigma,
                                                       std::span<const double> x, double y) {
  if (!(sigma > 0.0)) throw std::invalid_argument("lnp_gaussian_logpolicy_grad: sigma must be > 0");
  const double lambda = dot(k, x);
  const double coef = (y - lambda) / (sigma * sigma);
  std::vector<double> grad(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) grad[j] = coef * x[j];
  return grad;
}

// Single-spike Bernoulli policy with lambda = sigmoid(k.x). The update
// alpha * delta * ((1-lambda) x | -lambda x) is Hebbian in sign: it moves
// k_j along sign(delta * x_j * y).
inline std::vector<double> lnp_bernoulli_update(std::span<const double> k,
                                                std::span<const double> x, int y, double alpha,
                                                double delta) {
  if (y != 1 && y != -1) throw std::invalid_argument("lnp_bernoulli_update: y must be +-1");
  const double lambda = sigmoid(dot(k, x));
  const double coef = alpha * delta * ((y == 1) ? (1.0 - lambda) : -lambda);
  std::vector<double> dk(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) dk[j] = coef * x[j];
  return dk;
}

// Spike-count sampler with the exponential inverse link, rate = exp(k.x).
inline int lnp_poisson_sample(std::span<const double> k, std::span<const double> x,
                              RngStream& rng) {
  return sample_poisson(std::exp(dot(k, x)), rng);
}

}  // namespace spikerl
