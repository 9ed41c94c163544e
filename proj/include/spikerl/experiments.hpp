// Experiment orchestration: builds the task, the network topology, and the
// per-seed training loops for each named experiment, streaming learning
// curves to CSV as episodes finish.

#pragma once

#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikerl/config.hpp"
#include "spikerl/curve.hpp"
#include "spikerl/learning.hpp"
#include "spikerl/reparam.hpp"
#include "spikerl/svg.hpp"
#include "spikerl/task.hpp"

namespace spikerl {

struct ExperimentArm {
  std::string name;         // empty for single-arm experiments
  std::string output_path;  // csv actually written; empty if none
  CurveFile curve;
};

inline CriticFeatures critic_features_for(const ExperimentConfig& cfg) {
  if (cfg.critic_mode == Critic::Mode::Tabular) return CriticFeatures::Table;
  return cfg.critic_encoded ? CriticFeatures::Encoded : CriticFeatures::Raw;
}

inline std::unique_ptr<TaskEnv> make_task(const ExperimentConfig& cfg) {
  const CriticFeatures critic = critic_features_for(cfg);
  if (cfg.experiment == "gridworld5-ising") {
    Gridworld5::Config e;
    e.obstacle_cells = cfg.obstacle_cells;
    e.water_cell = cfg.water_cell;
    e.goal_reward = cfg.goal_reward;
    e.water_reward = cfg.water_reward;
    e.step_cap = cfg.step_cap;
    return std::make_unique<Gridworld5Task>(e, cfg.input_neurons, critic);
  }
  if (cfg.experiment == "gridworld10-glm") {
    Gridworld10::Config e;
    e.goal_reward = cfg.goal_reward;
    e.step_cap = cfg.step_cap;
    return std::make_unique<Gridworld10Task>(e, cfg.input_neurons, cfg.input_train_len, critic);
  }
  if (cfg.experiment == "mountaincar-ising") {
    MountainCar::Config e;
    e.step_cap = cfg.step_cap;
    return std::make_unique<MountainCarTask>(e, cfg.input_neurons / 2, critic);
  }
  // cartpole family
  CartPole::Config e;
  e.gravity = cfg.gravity;
  e.cart_mass = cfg.cart_mass;
  e.pole_mass = cfg.pole_mass;
  e.pole_half_length = cfg.pole_half_length;
  e.force_mag = cfg.force_mag;
  e.dt = cfg.dt;
  e.x_limit = cfg.x_limit;
  e.theta_limit = cfg.theta_limit_deg * 3.14159265358979323846 / 180.0;
  e.step_cap = cfg.step_cap;
  return std::make_unique<CartPoleTask>(e, critic);
}

inline TopologySpec make_topology(const ExperimentConfig& cfg) {
  TopologySpec t;
  t.input_size = cfg.input_neurons;
  t.input_train_len = cfg.input_train_len;
  if (cfg.hidden > 0) {
    t.hidden_sizes = {cfg.hidden};
    t.hidden_train_lens = {cfg.hidden_train_len};
  }
  t.output_size = cfg.output_neurons;
  t.output_train_len = cfg.output_train_len;
  t.kind = cfg.kind;
  t.connectivity = cfg.connectivity;
  t.kernel_len = cfg.kernel_len;
  t.validate();
  return t;
}

inline LearnerConfig make_learner(const ExperimentConfig& cfg) {
  LearnerConfig l;
  l.alpha = cfg.alpha;
  l.alpha_critic = cfg.alpha_critic;
  l.gamma = cfg.gamma;
  l.lambda = cfg.lambda;
  l.population = cfg.population;
  l.tau_act = cfg.tau_act;
  l.kappa_scale = cfg.kappa_scale;
  l.delta_clip = cfg.delta_clip;
  l.momentum = cfg.momentum;
  l.alpha_decay = cfg.alpha_decay;
  l.init_scale = cfg.init_scale;
  l.hebbian = cfg.hebbian;
  l.hebbian_alpha = cfg.hebbian_alpha;
  return l;
}

inline std::string arm_output_path(const std::string& base, const std::string& arm) {
  if (base.empty() || arm.empty()) return base;
  const auto dot = base.find_last_of('.');
  if (dot == std::string::npos) return base + "." + arm;
  return base.substr(0, dot) + "." + arm + base.substr(dot);
}

namespace detail {

// Streams rows to disk as they are produced; writes a truncation marker and
// rethrows if the run dies midway.
class CurveWriter {
 public:
  CurveWriter(const std::string& path, CurveFile& sink) : sink_(sink) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
      file_ << kCurveHeader << '\n';
      file_.flush();
    }
  }

  void push(const CurveRow& row) {
    sink_.rows.push_back(row);
    if (file_.is_open()) file_ << CurveFile::row_csv(row);
  }

  void mark_truncated(const std::string& reason) {
    if (file_.is_open()) {
      file_ << "# truncated: " << reason << '\n';
      file_.flush();
    }
  }

  void finish() {
    if (file_.is_open()) file_.flush();
  }

 private:
  CurveFile& sink_;
  std::ofstream file_;
};

// Fixed split keys of the per-seed master stream.
inline constexpr std::uint64_t kEnsembleKey = 1;
inline constexpr std::uint64_t kEnvKey = 2;
inline constexpr std::uint64_t kModelKey = 3;
inline constexpr std::uint64_t kNoiseKey = 4;

inline void run_pgcn_arm(const ExperimentConfig& cfg, ExperimentArm& arm) {
  const TopologySpec topo = make_topology(cfg);
  const LearnerConfig learner = make_learner(cfg);
  CurveWriter writer(arm.output_path, arm.curve);
  try {
    for (const auto seed : cfg.seeds) {
      const RngStream master(seed);
      PopulationEnsemble pop(topo, cfg.population, master.split(kEnsembleKey).seed(), cfg.tau_act,
                             cfg.init_scale);
      auto task = make_task(cfg);
      Critic critic(task->critic_mode(), task->critic_size(), cfg.alpha_critic, cfg.gamma,
                    cfg.lambda);
      RngStream env_rng = master.split(kEnvKey);
      MovingAverage ma(100);
      double alpha = cfg.alpha;
      for (int episode = 1; episode <= cfg.episodes; ++episode) {
        EpisodeRecord rec = run_episode_pgcn(*task, pop, critic, learner, env_rng, alpha);
        alpha *= cfg.alpha_decay;
        CurveRow row;
        row.seed = seed;
        row.episode = episode;
        row.episode_return = rec.episode_return;
        row.steps = rec.steps;
        row.moving_avg = ma.push(rec.episode_return);
        writer.push(row);
      }
      ma.reset();
    }
  } catch (const std::exception& e) {
    writer.mark_truncated(e.what());
    throw;
  }
  writer.finish();
}

inline void run_a2c_arm(const ExperimentConfig& cfg, ExperimentArm& arm) {
  CurveWriter writer(arm.output_path, arm.curve);
  try {
    for (const auto seed : cfg.seeds) {
      const RngStream master(seed);
      auto task = make_task(cfg);
      RngStream env_rng = master.split(kEnvKey);
      RngStream model_init = master.split(kModelKey);
      RngStream model_rng = master.split(kNoiseKey);
      const int input_dim = static_cast<int>(task->observe().values.size());
      A2CModel model = A2CModel::init(input_dim, cfg.a2c_hidden, task->action_count(), cfg.a2c_tau,
                                      model_init, cfg.a2c_init_scale);
      A2CEpisodeConfig ec;
      ec.gamma = cfg.a2c_gamma;
      ec.alpha = cfg.a2c_alpha;
      ec.critic_coef = cfg.a2c_critic_coef;
      ec.batch_size = cfg.a2c_batch;
      MovingAverage ma(100);
      for (int episode = 1; episode <= cfg.episodes; ++episode) {
        EpisodeRecord rec = run_episode_a2c(*task, model, ec, env_rng, model_rng);
        CurveRow row;
        row.seed = seed;
        row.episode = episode;
        row.episode_return = rec.episode_return;
        row.steps = rec.steps;
        row.moving_avg = ma.push(rec.episode_return);
        writer.push(row);
      }
      ma.reset();
    }
  } catch (const std::exception& e) {
    writer.mark_truncated(e.what());
    throw;
  }
  writer.finish();
}

}  // namespace detail

// Runs every arm of the configured experiment. Single-arm experiments write
// cfg.output as-is; multi-arm experiments insert the arm name before the
// extension (curves.csv -> curves.modular.csv).
inline std::vector<ExperimentArm> run_experiment(const ExperimentConfig& cfg) {
  std::vector<ExperimentArm> arms;
  auto add_arm = [&arms, &cfg](const std::string& name, const ExperimentConfig& arm_cfg) {
    ExperimentArm arm;
    arm.name = name;
    arm.output_path = arm_output_path(cfg.output, name);
    if (arm_cfg.experiment == "cartpole-reparam-a2c") {
      detail::run_a2c_arm(arm_cfg, arm);
    } else {
      detail::run_pgcn_arm(arm_cfg, arm);
    }
    if (cfg.svg && !arm.output_path.empty()) {
      std::ofstream svg(arm.output_path + ".svg", std::ios::binary | std::ios::trunc);
      svg << svg_render(arm.curve, cfg.experiment + (name.empty() ? "" : " " + name));
    }
    arms.push_back(std::move(arm));
  };

  if (cfg.experiment == "cartpole-modular-vs-full") {
    ExperimentConfig modular = cfg;
    modular.connectivity = Connectivity::Modular;
    add_arm("modular", modular);
    ExperimentConfig full = cfg;
    full.connectivity = Connectivity::FullyConnected;
    add_arm("full", full);
  } else if (cfg.experiment == "cartpole-population-sweep") {
    for (const int n : cfg.sweep_populations) {
      ExperimentConfig arm_cfg = cfg;
      arm_cfg.population = n;
      add_arm("n" + std::to_string(n), arm_cfg);
    }
  } else {
    add_arm("", cfg);
  }
  return arms;
}

}  // namespace spikerl
