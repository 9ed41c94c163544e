// Experiment configuration: flat key = value documents with dotted section
// keys, applied over per-experiment defaults. Unknown keys fail closed.

#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikerl/critic.hpp"
#include "spikerl/network.hpp"

namespace spikerl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  int episodes = 0;
  std::vector<std::uint64_t> seeds;
  std::string output = "curves.csv";
  bool svg = false;
  int population = 10;

  // topology
  int input_neurons = 0;
  int input_train_len = 1;
  int hidden = 0;
  int hidden_train_len = 1;
  int output_neurons = 0;
  int output_train_len = 1;
  int kernel_len = 3;
  double init_scale = 0.1;
  NeuronKind kind = NeuronKind::Ising;
  Connectivity connectivity = Connectivity::FullyConnected;

  // learner
  double alpha = 0.05;
  double alpha_critic = 0.2;
  double gamma = 0.9;
  double lambda = 0.8;
  double tau_act = 0.2;
  double kappa_scale = 1.0;
  double delta_clip = 0.0;
  double momentum = 0.0;
  double alpha_decay = 1.0;
  double hebbian_alpha = 1e-3;
  bool hebbian = false;
  Critic::Mode critic_mode = Critic::Mode::Tabular;
  bool critic_encoded = true;  // linear critics: encoded features vs raw state

  // environment
  int step_cap = 1000;
  double goal_reward = 10.0;
  double water_reward = -10.0;
  std::vector<int> obstacle_cells{12, 17};
  int water_cell = 22;
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double pole_half_length = 0.5;
  double force_mag = 10.0;
  double dt = 0.02;
  double x_limit = 2.4;
  double theta_limit_deg = 12.0;

  // reparameterized actor-critic
  int a2c_hidden = 32;
  double a2c_tau = 1.0;
  double a2c_alpha = 2e-3;
  double a2c_gamma = 0.99;
  int a2c_batch = 0;  // 0: one update per episode
  double a2c_critic_coef = 0.5;
  double a2c_init_scale = 0.5;

  // population sweep arms
  std::vector<int> sweep_populations{1, 5, 10, 20};
};

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "gridworld5-ising",    "gridworld10-glm",        "mountaincar-ising",
      "cartpole-ising",      "cartpole-hebbian",       "cartpole-modular-vs-full",
      "cartpole-population-sweep", "cartpole-reparam-a2c",
  };
  return ids;
}

inline ExperimentConfig defaults_for(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "gridworld5-ising") {
    c.input_neurons = 7;
    c.hidden = 10;
    c.output_neurons = 4;
    c.kind = NeuronKind::Ising;
    c.connectivity = Connectivity::FullyConnected;
    c.population = 10;
    c.episodes = 400;
    c.seeds = {1, 2, 3, 4, 5};
    c.alpha = 0.05;
    c.alpha_critic = 0.2;
    c.gamma = 0.9;
    c.lambda = 0.8;
    c.tau_act = 0.2;
    c.critic_mode = Critic::Mode::Tabular;
    c.step_cap = 1000;
  } else if (experiment == "gridworld10-glm") {
    c.input_neurons = 3;
    c.input_train_len = 5;
    c.hidden = 5;
    c.hidden_train_len = 3;
    c.output_neurons = 4;
    c.output_train_len = 1;
    c.kernel_len = 3;
    c.kind = NeuronKind::Glm;
    c.connectivity = Connectivity::Modular;
    c.population = 10;
    c.episodes = 300;
    c.seeds = {1, 2, 3};
    c.alpha = 0.05;
    c.alpha_critic = 0.2;
    c.gamma = 0.9;
    c.lambda = 0.8;
    c.tau_act = 0.2;
    c.critic_mode = Critic::Mode::Tabular;
    c.step_cap = 1000;
  } else if (experiment == "mountaincar-ising") {
    c.input_neurons = 20;
    c.hidden = 50;
    c.output_neurons = 3;
    c.kind = NeuronKind::Ising;
    c.connectivity = Connectivity::FullyConnected;
    c.population = 10;
    c.episodes = 150;
    c.seeds = {1, 2, 3};
    c.alpha = 0.01;
    c.alpha_critic = 0.05;
    c.gamma = 1.0;
    c.lambda = 0.9;
    c.tau_act = 0.2;
    c.critic_mode = Critic::Mode::Linear;
    c.step_cap = 5000;
  } else if (experiment == "cartpole-ising" || experiment == "cartpole-hebbian" ||
             experiment == "cartpole-modular-vs-full" ||
             experiment == "cartpole-population-sweep") {
    c.input_neurons = 4;
    c.hidden = 200;
    c.output_neurons = 2;
    c.kind = NeuronKind::Ising;
    c.connectivity = Connectivity::Modular;
    c.population = 10;
    c.episodes = 1500;
    c.seeds = {1, 2, 3, 4, 5};
    c.alpha = 0.01;
    c.alpha_critic = 0.05;
    c.gamma = 1.0;
    c.lambda = 0.8;
    c.tau_act = 0.2;
    c.delta_clip = 10.0;
    c.critic_mode = Critic::Mode::Linear;
    c.step_cap = 200;
    c.hebbian = experiment == "cartpole-hebbian";
  } else if (experiment == "cartpole-reparam-a2c") {
    c.episodes = 2000;
    c.seeds = {1, 2, 3, 4, 5};
    c.step_cap = 200;
    c.critic_mode = Critic::Mode::Linear;
  } else {
    std::string msg = "unknown experiment '" + experiment + "'; expected one of:";
    for (const auto& id : experiment_ids()) msg += " " + id;
    throw ConfigError(msg);
  }
  return c;
}

namespace detail {

class KeyValueDoc {
 public:
  static KeyValueDoc parse(const std::string& text) {
    KeyValueDoc doc;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      }
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      doc.values_[key] = value;
    }
    return doc;
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool take(const std::string& key, std::string& out) {
    auto it = values_.find(key);
    if (it == values_.end()) return false;
    out = it->second;
    consumed_.push_back(key);
    values_.erase(it);
    return true;
  }

  void expect_empty() const {
    if (values_.empty()) return;
    std::string msg = "unknown config key(s):";
    for (const auto& [k, v] : values_) msg += " '" + k + "'";
    throw ConfigError(msg);
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> consumed_;
};

inline int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
  }
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected boolean, got '" + v + "'");
}

template <typename T, typename Fn>
inline std::vector<T> to_list(const std::string& key, const std::string& v, Fn&& conv) {
  std::vector<T> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(conv(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

inline void apply_doc(ExperimentConfig& c, KeyValueDoc& doc) {
  std::string v;
  if (doc.take("episodes", v)) c.episodes = to_int("episodes", v);
  if (doc.take("seeds", v)) {
    c.seeds = to_list<std::uint64_t>("seeds", v, [](const std::string& k, const std::string& s) {
      try {
        return static_cast<std::uint64_t>(std::stoull(s));
      } catch (const std::exception&) {
        throw ConfigError("config key '" + k + "': expected seed list, got '" + s + "'");
      }
    });
  }
  if (doc.take("output", v)) c.output = v;
  if (doc.take("svg", v)) c.svg = to_bool("svg", v);
  if (doc.take("population", v)) c.population = to_int("population", v);

  if (doc.take("topology.connectivity", v)) {
    if (v == "modular") {
      c.connectivity = Connectivity::Modular;
    } else if (v == "full") {
      c.connectivity = Connectivity::FullyConnected;
    } else {
      throw ConfigError("config key 'topology.connectivity': expected modular|full, got '" + v +
                        "'");
    }
  }
  if (doc.take("topology.input_neurons", v)) c.input_neurons = to_int("topology.input_neurons", v);
  if (doc.take("topology.input_train_len", v)) {
    c.input_train_len = to_int("topology.input_train_len", v);
  }
  if (doc.take("topology.hidden", v)) c.hidden = to_int("topology.hidden", v);
  if (doc.take("topology.hidden_train_len", v)) {
    c.hidden_train_len = to_int("topology.hidden_train_len", v);
  }
  if (doc.take("topology.output_train_len", v)) {
    c.output_train_len = to_int("topology.output_train_len", v);
  }
  if (doc.take("topology.kernel_len", v)) c.kernel_len = to_int("topology.kernel_len", v);
  if (doc.take("topology.init_scale", v)) c.init_scale = to_double("topology.init_scale", v);

  if (doc.take("learner.alpha", v)) c.alpha = to_double("learner.alpha", v);
  if (doc.take("learner.alpha_critic", v)) c.alpha_critic = to_double("learner.alpha_critic", v);
  if (doc.take("learner.gamma", v)) c.gamma = to_double("learner.gamma", v);
  if (doc.take("learner.lambda", v)) c.lambda = to_double("learner.lambda", v);
  if (doc.take("learner.tau_act", v)) c.tau_act = to_double("learner.tau_act", v);
  if (doc.take("learner.kappa_scale", v)) c.kappa_scale = to_double("learner.kappa_scale", v);
  if (doc.take("learner.delta_clip", v)) c.delta_clip = to_double("learner.delta_clip", v);
  if (doc.take("learner.momentum", v)) c.momentum = to_double("learner.momentum", v);
  if (doc.take("learner.alpha_decay", v)) c.alpha_decay = to_double("learner.alpha_decay", v);
  if (doc.take("learner.hebbian_alpha", v)) c.hebbian_alpha = to_double("learner.hebbian_alpha", v);
  if (doc.take("critic.mode", v)) {
    if (v == "tabular") {
      c.critic_mode = Critic::Mode::Tabular;
    } else if (v == "linear") {
      c.critic_mode = Critic::Mode::Linear;
    } else {
      throw ConfigError("config key 'critic.mode': expected tabular|linear, got '" + v + "'");
    }
  }
  if (doc.take("critic.features", v)) {
    if (v == "encoded") {
      c.critic_encoded = true;
    } else if (v == "raw") {
      c.critic_encoded = false;
    } else {
      throw ConfigError("config key 'critic.features': expected encoded|raw, got '" + v + "'");
    }
  }

  if (doc.take("env.step_cap", v)) c.step_cap = to_int("env.step_cap", v);
  if (doc.take("env.goal_reward", v)) c.goal_reward = to_double("env.goal_reward", v);
  if (doc.take("env.water_reward", v)) c.water_reward = to_double("env.water_reward", v);
  if (doc.take("env.obstacle_cells", v)) {
    c.obstacle_cells = to_list<int>("env.obstacle_cells", v, to_int);
  }
  if (doc.take("env.water_cell", v)) c.water_cell = to_int("env.water_cell", v);
  if (doc.take("env.gravity", v)) c.gravity = to_double("env.gravity", v);
  if (doc.take("env.cart_mass", v)) c.cart_mass = to_double("env.cart_mass", v);
  if (doc.take("env.pole_mass", v)) c.pole_mass = to_double("env.pole_mass", v);
  if (doc.take("env.pole_half_length", v)) {
    c.pole_half_length = to_double("env.pole_half_length", v);
  }
  if (doc.take("env.force_mag", v)) c.force_mag = to_double("env.force_mag", v);
  if (doc.take("env.dt", v)) c.dt = to_double("env.dt", v);
  if (doc.take("env.x_limit", v)) c.x_limit = to_double("env.x_limit", v);
  if (doc.take("env.theta_limit_deg", v)) c.theta_limit_deg = to_double("env.theta_limit_deg", v);

  if (doc.take("a2c.hidden", v)) c.a2c_hidden = to_int("a2c.hidden", v);
  if (doc.take("a2c.tau", v)) c.a2c_tau = to_double("a2c.tau", v);
  if (doc.take("a2c.alpha", v)) c.a2c_alpha = to_double("a2c.alpha", v);
  if (doc.take("a2c.gamma", v)) c.a2c_gamma = to_double("a2c.gamma", v);
  if (doc.take("a2c.batch", v)) c.a2c_batch = to_int("a2c.batch", v);
  if (doc.take("a2c.critic_coef", v)) c.a2c_critic_coef = to_double("a2c.critic_coef", v);
  if (doc.take("a2c.init_scale", v)) c.a2c_init_scale = to_double("a2c.init_scale", v);

  if (doc.take("sweep.populations", v)) {
    c.sweep_populations = to_list<int>("sweep.populations", v, to_int);
  }

  doc.expect_empty();
  if (c.episodes < 1) throw ConfigError("config: episodes must be >= 1");
  if (c.seeds.empty()) throw ConfigError("config: seed list is empty");
  if (c.population < 1) throw ConfigError("config: population must be >= 1");
}

}  // namespace detail

// Parses a config document; the `experiment` key selects the defaults, the
// remaining keys override them. Unknown or misspelled keys raise ConfigError
// naming the key.
inline ExperimentConfig parse_config(const std::string& text,
                                     const std::vector<std::string>& overrides = {}) {
  auto doc = detail::KeyValueDoc::parse(text);
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override '" + ov + "': expected key=value");
    }
    doc.set(ov.substr(0, eq), ov.substr(eq + 1));
  }
  std::string experiment;
  if (!doc.take("experiment", experiment)) {
    throw ConfigError("config: missing required key 'experiment'");
  }
  ExperimentConfig c = defaults_for(experiment);
  detail::apply_doc(c, doc);
  return c;
}

}  // namespace spikerl
