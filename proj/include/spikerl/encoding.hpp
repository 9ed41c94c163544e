// State-to-spike encoders: binary, spatio-temporal, and binned-continuous
// codes, all emitting +1 (firing) / -1 (silent) values.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace spikerl {

// S input neurons by K time bins, row-major. Binary encodings hold +-1
// entries; continuous encodings (K = 1) hold raw real values.
struct EncodedState {
  int spatial = 0;
  int temporal = 1;
  std::vector<double> values;

  double at(int s, int t) const { return values[static_cast<std::size_t>(s) * temporal + t]; }

  // Train of neuron s over all K bins.
  std::span<const double> train(int s) const {
    return {values.data() + static_cast<std::size_t>(s) * temporal,
            static_cast<std::size_t>(temporal)};
  }
};

inline EncodedState make_continuous(std::vector<double> vals) {
  EncodedState e;
  e.spatial = static_cast<int>(vals.size());
  e.temporal = 1;
  e.values = std::move(vals);
  return e;
}

// Big-endian binary expansion of state_index over n_neurons bits,
// 1 -> +1 and 0 -> -1.
inline EncodedState encode_binary(std::uint64_t state_index, int n_neurons) {
  if (n_neurons < 1 || n_neurons > 63) throw std::invalid_argument("encode_binary: bad width");
  if (state_index >> n_neurons) throw std::invalid_argument("encode_binary: index overflows width");
  EncodedState e;
  e.spatial = n_neurons;
  e.temporal = 1;
  e.values.resize(static_cast<std::size_t>(n_neurons));
  for (int b = 0; b < n_neurons; ++b) {
    const int bit = static_cast<int>((state_index >> (n_neurons - 1 - b)) & 1u);
    e.values[static_cast<std::size_t>(b)] = bit ? +1.0 : -1.0;
  }
  return e;
}

// S*K-bit big-endian expansion reshaped row-major into S trains of K bins.
inline EncodedState encode_spatiotemporal(std::uint64_t state_index, int s_neurons, int k_bins) {
  if (s_neurons < 1 || k_bins < 1 || s_neurons * k_bins > 63) {
    throw std::invalid_argument("encode_spatiotemporal: bad shape");
  }
  EncodedState e = encode_binary(state_index, s_neurons * k_bins);
  e.spatial = s_neurons;
  e.temporal = k_bins;
  return e;
}

// Clamp value into [low, high], discretize into 2^n_neurons uniform bins,
// binary-encode the bin index.
inline EncodedState encode_continuous_binned(double value, double low, double high,
                                             int n_neurons) {
  if (!(low < high)) throw std::invalid_argument("encode_continuous_binned: low >= high");
  if (n_neurons < 1 || n_neurons > 63) {
    throw std::invalid_argument("encode_continuous_binned: bad width");
  }
  const double v = std::clamp(value, low, high);
  const std::uint64_t n_bins = 1ULL << n_neurons;
  auto bin = static_cast<std::uint64_t>((v - low) / (high - low) * static_cast<double>(n_bins));
  if (bin >= n_bins) bin = n_bins - 1;  // value == high lands in the last bin
  return encode_binary(bin, n_neurons);
}

// Inverse of encode_binary / encode_spatiotemporal on +-1 values.
inline std::uint64_t decode_binary(const EncodedState& e) {
  std::uint64_t idx = 0;
  for (double v : e.values) idx = (idx << 1) | (v > 0.0 ? 1u : 0u);
  return idx;
}

// Concatenation of two encodings along the spatial axis (K must match).
inline EncodedState concat_spatial(const EncodedState& a, const EncodedState& b) {
  if (a.temporal != b.temporal) throw std::invalid_argument("concat_spatial: K mismatch");
  EncodedState e;
  e.spatial = a.spatial + b.spatial;
  e.temporal = a.temporal;
  e.values = a.values;
  e.values.insert(e.values.end(), b.values.begin(), b.values.end());
  return e;
}

}  // namespace spikerl
