// Layered assembly of spiking coagents.
//
// A network is a stack of hidden layers plus an output layer, one coagent
// per unit. Each coagent owns its parameters and its own RNG stream, so a
// forward pass samples every unit independently and repeatably. The forward
// trace keeps the sampled trains and each coagent's log-policy gradient for
// the learning step that follows.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spikerl/encoding.hpp"
#include "spikerl/neuron_glm.hpp"
#include "spikerl/neuron_ising.hpp"
#include "spikerl/rng.hpp"

namespace spikerl {

enum class Connectivity { FullyConnected, Modular };
enum class NeuronKind { Ising, Glm };

struct TopologySpec {
  int input_size = 0;
  int input_train_len = 1;
  std::vector<int> hidden_sizes;
  std::vector<int> hidden_train_lens;  // parallel to hidden_sizes
  int output_size = 0;
  int output_train_len = 1;
  NeuronKind kind = NeuronKind::Ising;
  Connectivity connectivity = Connectivity::FullyConnected;
  int kernel_len = 3;  // stimulus kernel taps for Glm coagents

  void validate() const {
    if (input_size < 1 || output_size < 1) throw std::invalid_argument("topology: empty layer");
    if (hidden_sizes.size() != hidden_train_lens.size()) {
      throw std::invalid_argument("topology: hidden train lengths do not match layers");
    }
    for (int h : hidden_sizes) {
      if (h < 1) throw std::invalid_argument("topology: empty hidden layer");
    }
    if (connectivity == Connectivity::Modular && hidden_sizes.size() != 1) {
      throw std::invalid_argument("topology: modular wiring expects one hidden layer");
    }
    if (kind == NeuronKind::Glm && kernel_len < 1) {
      throw std::invalid_argument("topology: kernel length must be >= 1");
    }
  }

  // Hidden block feeding output o: [lo, hi). Blocks partition the hidden
  // layer proportionally, larger blocks first (5 hidden / 4 outputs gives
  // 2,1,1,1).
  std::pair<int, int> module_range(int output_index) const {
    const int h = hidden_sizes.empty() ? 0 : hidden_sizes[0];
    const int o = output_size;
    auto lo = static_cast<int>((static_cast<long>(output_index) * h + o - 1) / o);
    auto hi = static_cast<int>((static_cast<long>(output_index + 1) * h + o - 1) / o);
    return {lo, hi};
  }

  // Output module owning hidden unit h; total and deterministic.
  int module_of(int hidden_index) const {
    if (connectivity != Connectivity::Modular) {
      throw std::logic_error("module_of: topology is not modular");
    }
    const int h = hidden_sizes[0];
    if (hidden_index < 0 || hidden_index >= h) {
      throw std::out_of_range("module_of: hidden index out of range");
    }
    return static_cast<int>(static_cast<long>(hidden_index) * output_size / h);
  }

  int hidden_count() const {
    int n = 0;
    for (int h : hidden_sizes) n += h;
    return n;
  }
  int coagent_count() const { return hidden_count() + output_size; }
};

class NetworkInstance {
 public:
  struct Forward {
    std::vector<double> rates;        // per output: fraction of +1 bins
    std::vector<std::uint8_t> fired;  // per output: fired in any bin
  };

  NetworkInstance(TopologySpec topo, const RngStream& base_stream, double init_scale)
      : topo_(std::move(topo)) {
    topo_.validate();
    const int n = topo_.coagent_count();
    rng_.reserve(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) rng_.push_back(base_stream.split(static_cast<std::uint64_t>(c)));
    if (topo_.kind == NeuronKind::Ising) {
      init_ising(init_scale);
    } else {
      init_glm(init_scale);
    }
  }

  const TopologySpec& topology() const { return topo_; }
  int coagent_count() const { return topo_.coagent_count(); }
  int layer_count() const { return static_cast<int>(topo_.hidden_sizes.size()) + 1; }

  int layer_size(int layer) const {
    return layer < static_cast<int>(topo_.hidden_sizes.size())
               ? topo_.hidden_sizes[static_cast<std::size_t>(layer)]
               : topo_.output_size;
  }

  // Flat coagent index: hidden layers in order, then outputs.
  int coagent_index(int layer, int unit) const {
    int base = 0;
    for (int l = 0; l < layer; ++l) base += layer_size(l);
    return base + unit;
  }

  const IsingParams& ising_unit(int layer, int unit) const {
    return ising_layers_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(unit)];
  }
  IsingParams& mutable_ising_unit(int layer, int unit) {
    return ising_layers_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(unit)];
  }
  const GlmParams& glm_unit(int layer, int unit) const {
    return glm_layers_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(unit)];
  }
  GlmParams& mutable_glm_unit(int layer, int unit) {
    return glm_layers_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(unit)];
  }

  int param_count(int coagent) const {
    const auto [layer, unit] = locate(coagent);
    return topo_.kind == NeuronKind::Ising ? ising_unit(layer, unit).param_count()
                                           : glm_unit(layer, unit).param_count();
  }

  // Walks coagent c's parameters in the same flat order its log-policy
  // gradient uses.
  template <typename Fn>
  void visit_params(int coagent, Fn&& fn) {
    const auto [layer, unit] = locate(coagent);
    if (topo_.kind == NeuronKind::Ising) {
      auto& p = mutable_ising_unit(layer, unit);
      int idx = 0;
      fn(idx++, p.bias);
      for (double& w : p.weights) fn(idx++, w);
    } else {
      auto& p = mutable_glm_unit(layer, unit);
      int idx = 0;
      for (auto& kern : p.stim_kernels) {
        for (double& w : kern) fn(idx++, w);
      }
      for (double& w : p.post_kernel) fn(idx++, w);
      for (auto& kern : p.lateral_kernels) {
        for (double& w : kern) fn(idx++, w);
      }
      fn(idx, p.baseline);
    }
  }

  double get_param(int coagent, int index) {
    double out = 0.0;
    visit_params(coagent, [&](int idx, double& value) {
      if (idx == index) out = value;
    });
    return out;
  }

  void nudge_param(int coagent, int index, double amount) {
    visit_params(coagent, [&](int idx, double& value) {
      if (idx == index) value += amount;
    });
  }

  // Samples every coagent layer by layer and records the forward trace.
  // Parameters are left untouched.
  Forward forward_sample(const EncodedState& input) {
    if (input.spatial != topo_.input_size || input.temporal != topo_.input_train_len) {
      throw std::invalid_argument("forward_sample: input shape does not match topology");
    }
    trace_.input = input;
    trace_.layer_trains.assign(static_cast<std::size_t>(layer_count()), {});
    trace_.grads.assign(static_cast<std::size_t>(coagent_count()), {});
    Forward out;
    if (topo_.kind == NeuronKind::Ising) {
      forward_ising(input, out);
    } else {
      forward_glm(input, out);
    }
    trace_.rates = out.rates;
    trace_.fired = out.fired;
    trace_.valid = true;
    return out;
  }

  bool has_trace() const { return trace_.valid; }
  const std::vector<double>& trace_rates() const { return trace_.rates; }
  const std::vector<std::uint8_t>& trace_fired() const { return trace_.fired; }
  std::span<const double> trace_grad(int coagent) const {
    return trace_.grads[static_cast<std::size_t>(coagent)];
  }
  const std::vector<double>& trace_train(int layer, int unit) const {
    return trace_.layer_trains[static_cast<std::size_t>(layer)][static_cast<std::size_t>(unit)];
  }

  // theta_c += alpha * delta_c * grad ln pi_c, then the trace is cleared.
  // With momentum > 0 a velocity buffer smooths the update direction.
  void coagent_update(std::span<const double> delta_per_coagent, double alpha,
                      double momentum = 0.0) {
    if (!trace_.valid) throw std::logic_error("coagent_update: no forward trace");
    if (delta_per_coagent.size() != static_cast<std::size_t>(coagent_count())) {
      throw std::invalid_argument("coagent_update: wrong delta count");
    }
    if (momentum > 0.0 && velocity_.empty()) {
      velocity_.resize(trace_.grads.size());
      for (std::size_t c = 0; c < velocity_.size(); ++c) {
        velocity_[c].assign(trace_.grads[c].size(), 0.0);
      }
    }
    for (int c = 0; c < coagent_count(); ++c) {
      const auto& g = trace_.grads[static_cast<std::size_t>(c)];
      const double d = delta_per_coagent[static_cast<std::size_t>(c)];
      if (momentum > 0.0) {
        auto& v = velocity_[static_cast<std::size_t>(c)];
        visit_params(c, [&](int idx, double& value) {
          v[static_cast<std::size_t>(idx)] =
              momentum * v[static_cast<std::size_t>(idx)] + d * g[static_cast<std::size_t>(idx)];
          value += alpha * v[static_cast<std::size_t>(idx)];
        });
      } else {
        visit_params(c, [&](int idx, double& value) {
          value += alpha * d * g[static_cast<std::size_t>(idx)];
        });
      }
    }
    clear_trace();
  }

  // Correlation update dw = alpha * pre * post on every synapse (bias uses
  // pre = 1). Defined for memoryless units.
  void hebbian_update(double alpha) {
    if (topo_.kind != NeuronKind::Ising) {
      throw std::logic_error("hebbian_update: defined for memoryless units only");
    }
    if (!trace_.valid) throw std::logic_error("hebbian_update: no forward trace");
    std::vector<double> inputs = trace_.input.values;
    for (int layer = 0; layer < layer_count(); ++layer) {
      std::vector<double> spikes(static_cast<std::size_t>(layer_size(layer)));
      for (int u = 0; u < layer_size(layer); ++u) {
        spikes[static_cast<std::size_t>(u)] =
            trace_.layer_trains[static_cast<std::size_t>(layer)][static_cast<std::size_t>(u)][0];
      }
      for (int u = 0; u < layer_size(layer); ++u) {
        auto& params = ising_layers_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(u)];
        const double post = spikes[static_cast<std::size_t>(u)];
        const auto [lo, hi] = fan_in_range(layer, u, static_cast<int>(inputs.size()));
        for (int j = lo; j < hi; ++j) {
          params.weights[static_cast<std::size_t>(j - lo)] +=
              alpha * inputs[static_cast<std::size_t>(j)] * post;
        }
        params.bias += alpha * post;
      }
      inputs = std::move(spikes);
    }
    clear_trace();
  }

  void clear_trace() { trace_.valid = false; }

  // ln pi_c of the trace's sampled action under the current parameters.
  double trace_logprob(int coagent) const {
    if (!trace_.valid) throw std::logic_error("trace_logprob: no forward trace");
    const auto [layer, unit] = locate(coagent);
    const auto& train =
        trace_.layer_trains[static_cast<std::size_t>(layer)][static_cast<std::size_t>(unit)];
    if (topo_.kind == NeuronKind::Ising) {
      const std::vector<double> inputs = layer_inputs_ising(layer, unit);
      const double prob = clamp_probability(ising_fire_prob(ising_unit(layer, unit), inputs));
      return train[0] > 0.0 ? std::log(prob) : std::log(1.0 - prob);
    }
    const std::vector<std::vector<double>> stim = layer_inputs_glm(layer, unit);
    CoagentState state;
    state.stimulus = {stim.data(), stim.size()};
    state.stim_shift = glm_shift(layer, static_cast<int>(stim.empty() ? 1 : stim[0].size()));
    return glm_spiketrain_logprob(glm_unit(layer, unit), state, train);
  }

 private:
  struct Trace {
    bool valid = false;
    EncodedState input;
    std::vector<std::vector<std::vector<double>>> layer_trains;  // layer -> unit -> train
    std::vector<std::vector<double>> grads;                      // flat coagent -> d ln pi
    std::vector<double> rates;
    std::vector<std::uint8_t> fired;
  };

  std::pair<int, int> locate(int coagent) const {
    int layer = 0;
    while (coagent >= layer_size(layer)) {
      coagent -= layer_size(layer);
      ++layer;
    }
    return {layer, coagent};
  }

  // Fan-in of unit u in `layer` over an input vector of length n: the module
  // slice for modular output units, the whole vector otherwise.
  std::pair<int, int> fan_in_range(int layer, int unit, int n) const {
    const bool output_layer = layer == layer_count() - 1;
    if (output_layer && topo_.connectivity == Connectivity::Modular) {
      return topo_.module_range(unit);
    }
    return {0, n};
  }

  int own_train_len(int layer) const {
    const bool output_layer = layer == layer_count() - 1;
    return output_layer ? topo_.output_train_len
                        : topo_.hidden_train_lens[static_cast<std::size_t>(layer)];
  }

  // Stimulus-clock offset: the last own bin reads the end of the stimulus.
  int glm_shift(int layer, int k_in) const { return k_in - own_train_len(layer); }

  void init_ising(double scale) {
    ising_layers_.resize(static_cast<std::size_t>(layer_count()));
    int prev = topo_.input_size;
    for (int layer = 0; layer < layer_count(); ++layer) {
      auto& units = ising_layers_[static_cast<std::size_t>(layer)];
      units.resize(static_cast<std::size_t>(layer_size(layer)));
      for (int u = 0; u < layer_size(layer); ++u) {
        const auto [lo, hi] = fan_in_range(layer, u, prev);
        auto& params = units[static_cast<std::size_t>(u)];
        params.bias = 0.0;
        params.weights.resize(static_cast<std::size_t>(hi - lo));
        auto& rng = rng_[static_cast<std::size_t>(coagent_index(layer, u))];
        for (double& w : params.weights) w = rng.uniform(-scale, scale);
      }
      prev = layer_size(layer);
    }
  }

  void init_glm(double scale) {
    glm_layers_.resize(static_cast<std::size_t>(layer_count()));
    int prev_units = topo_.input_size;
    for (int layer = 0; layer < layer_count(); ++layer) {
      auto& units = glm_layers_[static_cast<std::size_t>(layer)];
      units.resize(static_cast<std::size_t>(layer_size(layer)));
      for (int u = 0; u < layer_size(layer); ++u) {
        const auto [lo, hi] = fan_in_range(layer, u, prev_units);
        auto& params = units[static_cast<std::size_t>(u)];
        params.train_len = own_train_len(layer);
        params.baseline = 0.0;
        params.stim_kernels.assign(static_cast<std::size_t>(hi - lo),
                                   Kernel1D(static_cast<std::size_t>(topo_.kernel_len), 0.0));
        auto& rng = rng_[static_cast<std::size_t>(coagent_index(layer, u))];
        for (auto& kern : params.stim_kernels) {
          for (double& w : kern) w = rng.uniform(-scale, scale);
        }
      }
      prev_units = layer_size(layer);
    }
  }

  void forward_ising(const EncodedState& input, Forward& out) {
    if (topo_.input_train_len != 1) {
      throw std::invalid_argument("forward_sample: memoryless units expect K = 1 input");
    }
    std::vector<double> values = input.values;
    for (int layer = 0; layer < layer_count(); ++layer) {
      auto& trains = trace_.layer_trains[static_cast<std::size_t>(layer)];
      trains.assign(static_cast<std::size_t>(layer_size(layer)), {});
      std::vector<double> spikes(static_cast<std::size_t>(layer_size(layer)));
      for (int u = 0; u < layer_size(layer); ++u) {
        const auto [lo, hi] = fan_in_range(layer, u, static_cast<int>(values.size()));
        const std::span<const double> in(values.data() + lo, static_cast<std::size_t>(hi - lo));
        const int c = coagent_index(layer, u);
        const auto& params =
            ising_layers_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(u)];
        const int a = ising_sample(params, in, rng_[static_cast<std::size_t>(c)]);
        auto& grad = trace_.grads[static_cast<std::size_t>(c)];
        grad.resize(static_cast<std::size_t>(params.param_count()));
        ising_logpolicy_grad(params, in, a, grad);
        spikes[static_cast<std::size_t>(u)] = static_cast<double>(a);
        trains[static_cast<std::size_t>(u)] = {static_cast<double>(a)};
      }
      values = std::move(spikes);
    }
    out.rates.resize(static_cast<std::size_t>(topo_.output_size));
    out.fired.resize(static_cast<std::size_t>(topo_.output_size));
    for (int u = 0; u < topo_.output_size; ++u) {
      const double spike = values[static_cast<std::size_t>(u)];
      out.rates[static_cast<std::size_t>(u)] = spike > 0.0 ? 1.0 : 0.0;
      out.fired[static_cast<std::size_t>(u)] = spike > 0.0 ? 1 : 0;
    }
  }

  void forward_glm(const EncodedState& input, Forward& out) {
    std::vector<std::vector<double>> trains_in(static_cast<std::size_t>(input.spatial));
    for (int s = 0; s < input.spatial; ++s) {
      const auto tr = input.train(s);
      trains_in[static_cast<std::size_t>(s)].assign(tr.begin(), tr.end());
    }
    int k_in = input.temporal;
    for (int layer = 0; layer < layer_count(); ++layer) {
      const int k_own = own_train_len(layer);
      auto& trains = trace_.layer_trains[static_cast<std::size_t>(layer)];
      trains.assign(static_cast<std::size_t>(layer_size(layer)), {});
      std::vector<std::vector<double>> next(static_cast<std::size_t>(layer_size(layer)));
      for (int u = 0; u < layer_size(layer); ++u) {
        const auto [lo, hi] = fan_in_range(layer, u, static_cast<int>(trains_in.size()));
        CoagentState state;
        state.stimulus = {trains_in.data() + lo, static_cast<std::size_t>(hi - lo)};
        state.stim_shift = k_in - k_own;
        const int c = coagent_index(layer, u);
        const auto& params =
            glm_layers_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(u)];
        auto train = glm_sample_train(params, state, rng_[static_cast<std::size_t>(c)]);
        auto& grad = trace_.grads[static_cast<std::size_t>(c)];
        grad.resize(static_cast<std::size_t>(params.param_count()));
        glm_logprob_grad(params, state, train, grad);
        trains[static_cast<std::size_t>(u)] = train;
        next[static_cast<std::size_t>(u)] = std::move(train);
      }
      trains_in = std::move(next);
      k_in = k_own;
    }
    out.rates.resize(static_cast<std::size_t>(topo_.output_size));
    out.fired.resize(static_cast<std::size_t>(topo_.output_size));
    for (int u = 0; u < topo_.output_size; ++u) {
      const auto& train = trains_in[static_cast<std::size_t>(u)];
      int plus = 0;
      for (double y : train) plus += y > 0.0 ? 1 : 0;
      out.rates[static_cast<std::size_t>(u)] = static_cast<double>(plus) / train.size();
      out.fired[static_cast<std::size_t>(u)] = plus > 0 ? 1 : 0;
    }
  }

  // Inputs seen by unit (layer, unit) on the traced forward pass.
  std::vector<double> layer_inputs_ising(int layer, int unit) const {
    std::vector<double> values;
    if (layer == 0) {
      values = trace_.input.values;
    } else {
      const auto& prev = trace_.layer_trains[static_cast<std::size_t>(layer - 1)];
      values.reserve(prev.size());
      for (const auto& tr : prev) values.push_back(tr[0]);
    }
    const auto [lo, hi] = fan_in_range(layer, unit, static_cast<int>(values.size()));
    return {values.begin() + lo, values.begin() + hi};
  }

  std::vector<std::vector<double>> layer_inputs_glm(int layer, int unit) const {
    std::vector<std::vector<double>> trains;
    if (layer == 0) {
      trains.resize(static_cast<std::size_t>(trace_.input.spatial));
      for (int s = 0; s < trace_.input.spatial; ++s) {
        const auto tr = trace_.input.train(s);
        trains[static_cast<std::size_t>(s)].assign(tr.begin(), tr.end());
      }
    } else {
      trains = trace_.layer_trains[static_cast<std::size_t>(layer - 1)];
    }
    const auto [lo, hi] = fan_in_range(layer, unit, static_cast<int>(trains.size()));
    return {trains.begin() + lo, trains.begin() + hi};
  }

  TopologySpec topo_;
  std::vector<std::vector<IsingParams>> ising_layers_;
  std::vector<std::vector<GlmParams>> glm_layers_;
  std::vector<RngStream> rng_;
  Trace trace_;
  std::vector<std::vector<double>> velocity_;
};

}  // namespace spikerl
