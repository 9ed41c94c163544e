// Population coding: an ensemble of identically shaped networks whose
// output rates are averaged before action selection.

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spikerl/network.hpp"
#include "spikerl/numeric.hpp"
#include "spikerl/rng.hpp"

namespace spikerl {

struct EnsembleAct {
  int action = 0;
  std::vector<int> member_actions;  // per member: argmax of its own rates
  std::vector<double> mean_rates;
};

class PopulationEnsemble {
 public:
  // Member streams and the readout stream are disjoint splits of the master
  // seed; member m uses key m, the readout uses key N.
  PopulationEnsemble(const TopologySpec& topo, int n_members, std::uint64_t master_seed,
                     double action_temperature, double init_scale)
      : tau_act_(action_temperature) {
    if (n_members < 1) throw std::invalid_argument("PopulationEnsemble: empty population");
    const RngStream master(master_seed);
    members_.reserve(static_cast<std::size_t>(n_members));
    for (int m = 0; m < n_members; ++m) {
      members_.emplace_back(topo, master.split(static_cast<std::uint64_t>(m)), init_scale);
    }
    readout_rng_ = master.split(static_cast<std::uint64_t>(n_members));
  }

  int size() const { return static_cast<int>(members_.size()); }
  NetworkInstance& member(int m) { return members_[static_cast<std::size_t>(m)]; }
  const NetworkInstance& member(int m) const { return members_[static_cast<std::size_t>(m)]; }
  double action_temperature() const { return tau_act_; }

  // Forward-samples every member, averages the output rates, and draws the
  // ensemble action from softmax(mean rates / tau). Each member's own action
  // is the argmax of its own rates, ties to the lowest index.
  EnsembleAct act(const EncodedState& input) {
    const int n_actions = members_.front().topology().output_size;
    EnsembleAct out;
    out.mean_rates.assign(static_cast<std::size_t>(n_actions), 0.0);
    out.member_actions.resize(members_.size());
    for (std::size_t m = 0; m < members_.size(); ++m) {
      const auto fwd = members_[m].forward_sample(input);
      int best = 0;
      for (int a = 1; a < n_actions; ++a) {
        if (fwd.rates[static_cast<std::size_t>(a)] > fwd.rates[static_cast<std::size_t>(best)]) {
          best = a;
        }
      }
      out.member_actions[m] = best;
      for (int a = 0; a < n_actions; ++a) {
        out.mean_rates[static_cast<std::size_t>(a)] += fwd.rates[static_cast<std::size_t>(a)];
      }
    }
    for (double& r : out.mean_rates) r /= static_cast<double>(members_.size());
    const auto probs = softmax(out.mean_rates, tau_act_);
    out.action = sample_categorical(probs, readout_rng_);
    return out;
  }

 private:
  std::vector<NetworkInstance> members_;
  RngStream readout_rng_;
  double tau_act_ = 1.0;
};

}  // namespace spikerl
