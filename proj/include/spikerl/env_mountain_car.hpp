// Mountain car: drive an underpowered car out of a valley. Reward is -1
// per step until the goal position is reached.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spikerl/rng.hpp"

namespace spikerl {

enum class CarAction : int { Reverse = 0, Neutral = 1, Forward = 2 };

struct MountainCarState {
  double position = -0.5;
  double velocity = 0.0;
};

struct CarStep {
  MountainCarState next;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;
};

class MountainCar {
 public:
  struct Config {
    double position_min = -1.2;
    double position_max = 0.6;
    double velocity_max = 0.07;
    double goal_position = 0.5;
    int step_cap = 5000;
  };

  MountainCar() : MountainCar(Config{}) {}
  explicit MountainCar(Config cfg) : cfg_(cfg) {}

  const Config& config() const { return cfg_; }
  const MountainCarState& state() const { return state_; }
  int steps_taken() const { return steps_; }

  void reset(RngStream& rng) {
    state_.position = rng.uniform(-0.6, -0.4);
    state_.velocity = 0.0;
    steps_ = 0;
  }

  // v += 0.001*a - 0.0025*cos(3x), a in {-1, 0, +1}; velocity and position
  // clamped to their bounds, velocity zeroed at the left wall.
  MountainCarState integrate(const MountainCarState& s, CarAction action) const {
    const double a = static_cast<double>(static_cast<int>(action)) - 1.0;
    MountainCarState n;
    n.velocity = s.velocity + 0.001 * a - 0.0025 * std::cos(3.0 * s.position);
    n.velocity = std::clamp(n.velocity, -cfg_.velocity_max, cfg_.velocity_max);
    n.position = s.position + n.velocity;
    if (n.position < cfg_.position_min) {
      n.position = cfg_.position_min;
      n.velocity = 0.0;
    }
    n.position = std::min(n.position, cfg_.position_max);
    return n;
  }

  CarStep step(CarAction action) {
    if (state_.position >= cfg_.goal_position) {
      throw std::logic_error("MountainCar: step from terminal state");
    }
    state_ = integrate(state_, action);
    ++steps_;
    CarStep out;
    out.next = state_;
    out.reward = -1.0;
    out.terminal = state_.position >= cfg_.goal_position;
    out.truncated = !out.terminal && steps_ >= cfg_.step_cap;
    return out;
  }

 private:
  Config cfg_;
  MountainCarState state_;
  int steps_ = 0;
};

}  // namespace spikerl
