// Small numerical kernel shared by the neuron models and learning rules.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace spikerl {

// Coefficients of a finite causal filter; taps[0] applies to the current
// sample, taps[j] to the sample j steps in the past.
using Kernel1D = std::vector<double>;

// Logistic function, branch form so large |x| saturates instead of
// overflowing.
inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// d/dx sigmoid(x) = s(1-s).
inline double sigmoid_deriv(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Max-subtracted softmax with temperature.
inline std::vector<double> softmax(std::span<const double> v, double temperature = 1.0) {
  if (v.empty()) throw std::invalid_argument("softmax: empty logits");
  if (!(temperature > 0.0)) throw std::invalid_argument("softmax: temperature must be > 0");
  const double m = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp((v[i] - m) / temperature);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

// Causal finite convolution; samples before the start of the signal are
// treated as zero, so out[t] depends on signal[0..t] only.
inline std::vector<double> conv1d_causal(std::span<const double> signal,
                                         std::span<const double> kernel) {
  if (kernel.empty()) throw std::invalid_argument("conv1d_causal: empty kernel");
  std::vector<double> out(signal.size(), 0.0);
  for (std::size_t t = 0; t < signal.size(); ++t) {
    double acc = 0.0;
    const std::size_t jmax = std::min(kernel.size() - 1, t);
    for (std::size_t j = 0; j <= jmax; ++j) acc += kernel[j] * signal[t - j];
    out[t] = acc;
  }
  return out;
}

// Single causal-convolution sample at time t; t may point past the end of
// the signal (later taps then read zero-padded history), negative t gives 0.
inline double conv1d_causal_at(std::span<const double> signal,
                               std::span<const double> kernel, long t) {
  if (kernel.empty()) throw std::invalid_argument("conv1d_causal_at: empty kernel");
  double acc = 0.0;
  for (std::size_t j = 0; j < kernel.size(); ++j) {
    const long idx = t - static_cast<long>(j);
    if (idx < 0 || idx >= static_cast<long>(signal.size())) continue;
    acc += kernel[j] * signal[static_cast<std::size_t>(idx)];
  }
  return acc;
}

inline double clamp_probability(double p) {
  return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

}  // namespace spikerl
