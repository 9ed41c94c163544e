// Executable checks of the learning rule's first and second moments on a
// fixed-state bandit: Monte-Carlo expected coagent updates, the exact
// enumeration of the same expectation, and the gradient of the equivalent
// deterministic network where sampling is replaced by probability
// pass-through.

#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikerl/network.hpp"
#include "spikerl/numeric.hpp"
#include "spikerl/rng.hpp"
#include "spikerl/tape.hpp"

namespace spikerl {

// Bandit with a fixed input state and known expected TD error per action;
// all remaining stochasticity comes from the network itself.
struct BanditOracle {
  enum class Readout {
    SoftmaxRates,  // action sampled from softmax(rates / tau)
    OutputSpike    // single output; its spike is the action (silent=0, fire=1)
  };

  EncodedState state;
  std::vector<double> expected_delta;
  double tau_act = 1.0;
  Readout readout = Readout::SoftmaxRates;
};

struct UpdateStats {
  std::vector<std::vector<double>> mean;      // coagent -> parameter
  std::vector<std::vector<double>> variance;  // sample variance
  std::vector<std::vector<double>> se;        // standard error of the mean
  int n_samples = 0;
};

namespace detail {

inline int oracle_action(const BanditOracle& oracle, const NetworkInstance::Forward& fwd,
                         RngStream& readout_rng) {
  if (oracle.readout == BanditOracle::Readout::OutputSpike) {
    return fwd.rates[0] > 0.0 ? 1 : 0;
  }
  const auto probs = softmax(fwd.rates, oracle.tau_act);
  return sample_categorical(probs, readout_rng);
}

}  // namespace detail

// Empirical mean, variance, and standard error of the per-parameter update
// direction delta(a) * grad ln pi over repeated forward samples.
inline UpdateStats expected_coagent_update_mc(NetworkInstance& net, const BanditOracle& oracle,
                                              int n_samples, RngStream& readout_rng) {
  if (n_samples < 2) throw std::invalid_argument("expected_coagent_update_mc: too few samples");
  const int n = net.coagent_count();
  std::vector<std::vector<double>> sum(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> sumsq(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    sum[static_cast<std::size_t>(c)].assign(static_cast<std::size_t>(net.param_count(c)), 0.0);
    sumsq[static_cast<std::size_t>(c)].assign(static_cast<std::size_t>(net.param_count(c)), 0.0);
  }
  for (int s = 0; s < n_samples; ++s) {
    const auto fwd = net.forward_sample(oracle.state);
    const int action = detail::oracle_action(oracle, fwd, readout_rng);
    const double delta = oracle.expected_delta[static_cast<std::size_t>(action)];
    for (int c = 0; c < n; ++c) {
      const auto g = net.trace_grad(c);
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = delta * g[j];
        sum[static_cast<std::size_t>(c)][j] += x;
        sumsq[static_cast<std::size_t>(c)][j] += x * x;
      }
    }
    net.clear_trace();
  }
  UpdateStats out;
  out.n_samples = n_samples;
  out.mean.resize(static_cast<std::size_t>(n));
  out.variance.resize(static_cast<std::size_t>(n));
  out.se.resize(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    const auto& s1 = sum[static_cast<std::size_t>(c)];
    const auto& s2 = sumsq[static_cast<std::size_t>(c)];
    auto& mean = out.mean[static_cast<std::size_t>(c)];
    auto& var = out.variance[static_cast<std::size_t>(c)];
    auto& se = out.se[static_cast<std::size_t>(c)];
    mean.resize(s1.size());
    var.resize(s1.size());
    se.resize(s1.size());
    for (std::size_t j = 0; j < s1.size(); ++j) {
      mean[j] = s1[j] / n_samples;
      var[j] = std::max(0.0, (s2[j] - n_samples * mean[j] * mean[j]) / (n_samples - 1));
      se[j] = std::sqrt(var[j] / n_samples);
    }
  }
  return out;
}

// Exact expectation of the update direction by brute-force enumeration of
// every joint spike configuration. Requires a memoryless network with at
// most 20 coagents.
inline std::vector<std::vector<double>> expected_update_analytic(const NetworkInstance& net,
                                                                 const BanditOracle& oracle) {
  if (net.topology().kind != NeuronKind::Ising) {
    throw std::invalid_argument("expected_update_analytic: memoryless networks only");
  }
  const int n = net.coagent_count();
  if (n > 20) throw std::runtime_error("expected_update_analytic: enumeration cap exceeded");
  const auto& topo = net.topology();
  const int n_layers = static_cast<int>(topo.hidden_sizes.size()) + 1;

  std::vector<std::vector<double>> acc(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    acc[static_cast<std::size_t>(c)].assign(static_cast<std::size_t>(net.param_count(c)), 0.0);
  }

  std::vector<double> grad_buf;
  std::vector<double> inputs, spikes;
  std::vector<std::vector<double>> grads(static_cast<std::size_t>(n));

  const std::uint64_t n_configs = 1ULL << n;
  for (std::uint64_t mask = 0; mask < n_configs; ++mask) {
    double prob = 1.0;
    inputs = oracle.state.values;
    int flat = 0;
    std::vector<double> rates(static_cast<std::size_t>(topo.output_size));
    for (int layer = 0; layer < n_layers; ++layer) {
      const bool output_layer = layer == n_layers - 1;
      const int size = output_layer ? topo.output_size
                                    : topo.hidden_sizes[static_cast<std::size_t>(layer)];
      spikes.assign(static_cast<std::size_t>(size), 0.0);
      for (int u = 0; u < size; ++u, ++flat) {
        const auto& params = net.ising_unit(layer, u);
        int lo = 0, hi = static_cast<int>(inputs.size());
        if (output_layer && topo.connectivity == Connectivity::Modular) {
          std::tie(lo, hi) = topo.module_range(u);
        }
        const std::span<const double> in(inputs.data() + lo, static_cast<std::size_t>(hi - lo));
        const int spike = (mask >> flat) & 1u ? +1 : -1;
        const double p_fire = ising_fire_prob(params, in);
        prob *= spike > 0 ? p_fire : 1.0 - p_fire;
        grad_buf.assign(static_cast<std::size_t>(params.param_count()), 0.0);
        ising_logpolicy_grad(params, in, spike, grad_buf);
        grads[static_cast<std::size_t>(flat)] = grad_buf;
        spikes[static_cast<std::size_t>(u)] = static_cast<double>(spike);
        if (output_layer) rates[static_cast<std::size_t>(u)] = spike > 0 ? 1.0 : 0.0;
      }
      inputs = spikes;
    }
    if (prob == 0.0) continue;

    // Expected delta under the action-selection distribution for this
    // configuration.
    double weighted_delta = 0.0;
    if (oracle.readout == BanditOracle::Readout::OutputSpike) {
      const int action = rates[0] > 0.0 ? 1 : 0;
      weighted_delta = oracle.expected_delta[static_cast<std::size_t>(action)];
    } else {
      const auto probs = softmax(rates, oracle.tau_act);
      for (std::size_t a = 0; a < probs.size(); ++a) {
        weighted_delta += probs[a] * oracle.expected_delta[a];
      }
    }
    for (int c = 0; c < n; ++c) {
      const auto& g = grads[static_cast<std::size_t>(c)];
      auto& dst = acc[static_cast<std::size_t>(c)];
      for (std::size_t j = 0; j < g.size(); ++j) dst[j] += prob * weighted_delta * g[j];
    }
  }
  return acc;
}

// Gradient of the expected delta in the equivalent deterministic network:
// every sampled spike is replaced by its fire probability, which then feeds
// the next layer directly. Computed with the reverse-mode tape.
struct PassThroughGrad {
  std::vector<std::vector<double>> grads;  // coagent -> [bias, weights...]
  double objective = 0.0;
};

inline PassThroughGrad backprop_equivalent_grad(const NetworkInstance& net,
                                                const BanditOracle& oracle) {
  if (net.topology().kind != NeuronKind::Ising) {
    throw std::invalid_argument("backprop_equivalent_grad: memoryless networks only");
  }
  const auto& topo = net.topology();
  const int n_layers = static_cast<int>(topo.hidden_sizes.size()) + 1;
  Tape t;
  Tape::NodeId inputs = t.value(oracle.state.values);
  std::vector<Tape::NodeId> weight_nodes, bias_nodes;
  int prev = topo.input_size;
  for (int layer = 0; layer < n_layers; ++layer) {
    const bool output_layer = layer == n_layers - 1;
    const int size = output_layer ? topo.output_size
                                  : topo.hidden_sizes[static_cast<std::size_t>(layer)];
    std::vector<Tape::NodeId> lambdas;
    lambdas.reserve(static_cast<std::size_t>(size));
    for (int u = 0; u < size; ++u) {
      const auto& params = net.ising_unit(layer, u);
      int lo = 0, hi = prev;
      if (output_layer && topo.connectivity == Connectivity::Modular) {
        std::tie(lo, hi) = topo.module_range(u);
      }
      const Tape::NodeId w =
          t.value_matrix({params.weights.begin(), params.weights.end()}, 1, hi - lo);
      const Tape::NodeId b = t.value({params.bias});
      weight_nodes.push_back(w);
      bias_nodes.push_back(b);
      // slice the input vector for modular output units
      Tape::NodeId in = inputs;
      if (lo != 0 || hi != prev) {
        std::vector<Tape::NodeId> gathered;
        gathered.reserve(static_cast<std::size_t>(hi - lo));
        for (int j = lo; j < hi; ++j) gathered.push_back(t.gather(inputs, j));
        in = t.concat(gathered);
      }
      const Tape::NodeId drive = t.add(t.matvec(w, in), b);
      lambdas.push_back(t.sigmoid(t.scale(drive, 2.0)));
    }
    inputs = t.concat(lambdas);
    prev = size;
  }
  Tape::NodeId objective;
  if (oracle.readout == BanditOracle::Readout::OutputSpike) {
    // J = delta0 + lambda * (delta1 - delta0)
    objective = t.add(t.scalar(oracle.expected_delta[0]),
                      t.scale(inputs, oracle.expected_delta[1] - oracle.expected_delta[0]));
  } else {
    const Tape::NodeId probs = t.softmax(t.scale(inputs, 1.0 / oracle.tau_act));
    objective = t.dot(probs, t.value(oracle.expected_delta));
  }
  t.backward(objective);
  PassThroughGrad out;
  out.objective = t.val(objective)[0];
  out.grads.resize(weight_nodes.size());
  for (std::size_t c = 0; c < weight_nodes.size(); ++c) {
    const auto wadj = t.adjoint(weight_nodes[c]);
    const auto badj = t.adjoint(bias_nodes[c]);
    auto& g = out.grads[c];
    g.reserve(wadj.size() + 1);
    g.push_back(badj[0]);
    g.insert(g.end(), wadj.begin(), wadj.end());
  }
  return out;
}

// Variance (mean over parameters) of the update averaged across n_members
// independent samples; shrinks like 1/N.
inline double ensemble_update_variance(NetworkInstance& net, const BanditOracle& oracle,
                                       int n_members, int trials, RngStream& readout_rng) {
  const int n = net.coagent_count();
  std::vector<std::vector<double>> sum(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> sumsq(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> trial_acc(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    const auto np = static_cast<std::size_t>(net.param_count(c));
    sum[static_cast<std::size_t>(c)].assign(np, 0.0);
    sumsq[static_cast<std::size_t>(c)].assign(np, 0.0);
    trial_acc[static_cast<std::size_t>(c)].assign(np, 0.0);
  }
  for (int trial = 0; trial < trials; ++trial) {
    for (int c = 0; c < n; ++c) {
      trial_acc[static_cast<std::size_t>(c)].assign(trial_acc[static_cast<std::size_t>(c)].size(),
                                                    0.0);
    }
    for (int m = 0; m < n_members; ++m) {
      const auto fwd = net.forward_sample(oracle.state);
      const int action = detail::oracle_action(oracle, fwd, readout_rng);
      const double delta = oracle.expected_delta[static_cast<std::size_t>(action)];
      for (int c = 0; c < n; ++c) {
        const auto g = net.trace_grad(c);
        for (std::size_t j = 0; j < g.size(); ++j) {
          trial_acc[static_cast<std::size_t>(c)][j] += delta * g[j];
        }
      }
      net.clear_trace();
    }
    for (int c = 0; c < n; ++c) {
      for (std::size_t j = 0; j < trial_acc[static_cast<std::size_t>(c)].size(); ++j) {
        const double x = trial_acc[static_cast<std::size_t>(c)][j] / n_members;
        sum[static_cast<std::size_t>(c)][j] += x;
        sumsq[static_cast<std::size_t>(c)][j] += x * x;
      }
    }
  }
  double total = 0.0;
  int count = 0;
  for (int c = 0; c < n; ++c) {
    for (std::size_t j = 0; j < sum[static_cast<std::size_t>(c)].size(); ++j) {
      const double mean = sum[static_cast<std::size_t>(c)][j] / trials;
      total += std::max(0.0, (sumsq[static_cast<std::size_t>(c)][j] - trials * mean * mean) /
                                 (trials - 1));
      ++count;
    }
  }
  return total / count;
}

// Side-by-side moments of the sampled updates against the deterministic
// pass-through gradient, as a plain-text table.
struct VarianceReport {
  UpdateStats stats;
  PassThroughGrad backprop;

  std::string to_text() const {
    std::ostringstream os;
    os << "coagent,param,mc_mean,mc_variance,mc_se,backprop_grad\n";
    for (std::size_t c = 0; c < stats.mean.size(); ++c) {
      for (std::size_t j = 0; j < stats.mean[c].size(); ++j) {
        os << c << ',' << j << ',' << stats.mean[c][j] << ',' << stats.variance[c][j] << ','
           << stats.se[c][j] << ',' << backprop.grads[c][j] << '\n';
      }
    }
    return os.str();
  }
};

inline VarianceReport update_variance_report(NetworkInstance& net, const BanditOracle& oracle,
                                             int n_samples, RngStream& readout_rng) {
  VarianceReport rep;
  rep.stats = expected_coagent_update_mc(net, oracle, n_samples, readout_rng);
  rep.backprop = backprop_equivalent_grad(net, oracle);
  return rep;
}

}  // namespace spikerl
