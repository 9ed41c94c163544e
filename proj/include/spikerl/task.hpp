// Uniform task interface binding an environment to its state encoder and
// the critic's view of the state, so the learning loops stay agnostic of
// the concrete domain.

#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "spikerl/critic.hpp"
#include "spikerl/encoding.hpp"
#include "spikerl/env_cartpole.hpp"
#include "spikerl/env_gridworld.hpp"
#include "spikerl/env_mountain_car.hpp"
#include "spikerl/rng.hpp"

namespace spikerl {

struct TaskStep {
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;
};

// How the critic sees the state: a table over discrete states, a linear
// function of the actor's encoded features, or a linear function of the raw
// state variables. Linear views carry a trailing constant bias feature.
enum class CriticFeatures { Table, Encoded, Raw };

class TaskEnv {
 public:
  virtual ~TaskEnv() = default;
  virtual int action_count() const = 0;
  virtual void reset(RngStream& rng) = 0;
  virtual EncodedState observe() const = 0;
  virtual CriticView critic_view() const = 0;
  virtual int critic_size() const = 0;  // table size or feature dimension
  virtual Critic::Mode critic_mode() const = 0;
  virtual TaskStep step(int action, RngStream& rng) = 0;
};

namespace detail {

inline CriticView encoded_features_view(const EncodedState& e) {
  auto f = e.values;
  f.push_back(1.0);
  return critic_features(std::move(f));
}

}  // namespace detail

// 5x5 maze; actor sees the state id in n-bit binary code.
class Gridworld5Task final : public TaskEnv {
 public:
  explicit Gridworld5Task(Gridworld5::Config cfg = {}, int input_neurons = 7,
                          CriticFeatures critic = CriticFeatures::Table)
      : env_(cfg), bits_(input_neurons), critic_(critic) {}

  int action_count() const override { return kGridActionCount; }
  void reset(RngStream&) override { env_.reset(); }
  EncodedState observe() const override {
    return encode_binary(static_cast<std::uint64_t>(env_.state()), bits_);
  }
  CriticView critic_view() const override {
    if (critic_ == CriticFeatures::Table) return critic_index(env_.state() - 1);
    return detail::encoded_features_view(observe());
  }
  int critic_size() const override {
    return critic_ == CriticFeatures::Table ? env_.state_count() : bits_ + 1;
  }
  Critic::Mode critic_mode() const override {
    return critic_ == CriticFeatures::Table ? Critic::Mode::Tabular : Critic::Mode::Linear;
  }
  TaskStep step(int action, RngStream& rng) override {
    const auto s = env_.step(static_cast<GridAction>(action), rng);
    return {s.reward, s.terminal, s.truncated};
  }
  const Gridworld5& env() const { return env_; }

 private:
  Gridworld5 env_;
  int bits_;
  CriticFeatures critic_;
};

// 10x10 grid; actor sees the state index as an S x K spike pattern.
class Gridworld10Task final : public TaskEnv {
 public:
  explicit Gridworld10Task(Gridworld10::Config cfg = {}, int s_neurons = 3, int k_bins = 5,
                           CriticFeatures critic = CriticFeatures::Table)
      : env_(cfg), s_neurons_(s_neurons), k_bins_(k_bins), critic_(critic) {}

  int action_count() const override { return kGridActionCount; }
  void reset(RngStream&) override { env_.reset(); }
  EncodedState observe() const override {
    return encode_spatiotemporal(static_cast<std::uint64_t>(env_.state()), s_neurons_, k_bins_);
  }
  CriticView critic_view() const override {
    if (critic_ == CriticFeatures::Table) return critic_index(env_.state());
    return detail::encoded_features_view(observe());
  }
  int critic_size() const override {
    return critic_ == CriticFeatures::Table ? env_.state_count() : s_neurons_ * k_bins_ + 1;
  }
  Critic::Mode critic_mode() const override {
    return critic_ == CriticFeatures::Table ? Critic::Mode::Tabular : Critic::Mode::Linear;
  }
  TaskStep step(int action, RngStream& rng) override {
    const auto s = env_.step(static_cast<GridAction>(action), rng);
    return {s.reward, s.terminal, s.truncated};
  }
  const Gridworld10& env() const { return env_; }

 private:
  Gridworld10 env_;
  int s_neurons_;
  int k_bins_;
  CriticFeatures critic_;
};

// Cart-pole with the four state variables fed in continuous form, scaled to
// roughly [-1, 1] by the failure limits.
class CartPoleTask final : public TaskEnv {
 public:
  explicit CartPoleTask(CartPole::Config cfg = {},
                        CriticFeatures critic = CriticFeatures::Encoded)
      : env_(cfg), critic_(critic) {}

  int action_count() const override { return 2; }
  void reset(RngStream& rng) override { env_.reset(rng); }

  std::vector<double> features() const {
    const auto& s = env_.state();
    const auto& c = env_.config();
    return {s.x / c.x_limit, s.v / 3.0, s.theta / c.theta_limit, s.omega / 3.0};
  }

  EncodedState observe() const override { return make_continuous(features()); }
  CriticView critic_view() const override {
    if (critic_ == CriticFeatures::Raw) {
      const auto& s = env_.state();
      return critic_features({s.x, s.v, s.theta, s.omega, 1.0});
    }
    return detail::encoded_features_view(observe());
  }
  int critic_size() const override { return 5; }
  Critic::Mode critic_mode() const override { return Critic::Mode::Linear; }
  TaskStep step(int action, RngStream&) override {
    const auto s = env_.step(static_cast<CartAction>(action));
    return {s.reward, s.terminal, s.truncated};
  }
  const CartPole& env() const { return env_; }

 private:
  CartPole env_;
  CriticFeatures critic_;
};

// Mountain car; position and velocity are each binned into 2^n codes of n
// input neurons.
class MountainCarTask final : public TaskEnv {
 public:
  explicit MountainCarTask(MountainCar::Config cfg = {}, int bits_per_variable = 10,
                           CriticFeatures critic = CriticFeatures::Encoded)
      : env_(cfg), bits_(bits_per_variable), critic_(critic) {}

  int action_count() const override { return 3; }
  void reset(RngStream& rng) override { env_.reset(rng); }

  EncodedState observe() const override {
    const auto& s = env_.state();
    const auto& c = env_.config();
    const auto pos = encode_continuous_binned(s.position, c.position_min, c.position_max, bits_);
    const auto vel = encode_continuous_binned(s.velocity, -c.velocity_max, c.velocity_max, bits_);
    return concat_spatial(pos, vel);
  }
  CriticView critic_view() const override {
    if (critic_ == CriticFeatures::Raw) {
      const auto& s = env_.state();
      return critic_features({s.position, s.velocity, 1.0});
    }
    return detail::encoded_features_view(observe());
  }
  int critic_size() const override { return critic_ == CriticFeatures::Raw ? 3 : 2 * bits_ + 1; }
  Critic::Mode critic_mode() const override { return Critic::Mode::Linear; }
  TaskStep step(int action, RngStream&) override {
    const auto s = env_.step(static_cast<CarAction>(action));
    return {s.reward, s.terminal, s.truncated};
  }
  const MountainCar& env() const { return env_; }

 private:
  MountainCar env_;
  int bits_;
  CriticFeatures critic_;
};

}  // namespace spikerl
