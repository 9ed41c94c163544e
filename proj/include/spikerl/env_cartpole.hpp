// Classic cart-pole balancing task, Euler-integrated.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "spikerl/rng.hpp"

namespace spikerl {

enum class CartAction : int { Left = 0, Right = 1 };

struct CartPoleState {
  double x = 0.0;      // cart position, m
  double v = 0.0;      // cart velocity, m/s
  double theta = 0.0;  // pole angle, rad
  double omega = 0.0;  // pole angular velocity, rad/s
};

struct CartStep {
  CartPoleState next;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;
};

class CartPole {
 public:
  struct Config {
    double gravity = 9.8;
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double pole_half_length = 0.5;
    double force_mag = 10.0;
    double dt = 0.02;
    double x_limit = 2.4;
    double theta_limit = 12.0 * 3.14159265358979323846 / 180.0;
    int step_cap = 200;
  };

  CartPole() : CartPole(Config{}) {}
  explicit CartPole(Config cfg) : cfg_(cfg) {}

  const Config& config() const { return cfg_; }
  const CartPoleState& state() const { return state_; }
  int steps_taken() const { return steps_; }

  void reset(RngStream& rng) {
    state_.x = rng.uniform(-0.05, 0.05);
    state_.v = rng.uniform(-0.05, 0.05);
    state_.theta = rng.uniform(-0.05, 0.05);
    state_.omega = rng.uniform(-0.05, 0.05);
    steps_ = 0;
  }

  bool failed(const CartPoleState& s) const {
    return std::abs(s.x) > cfg_.x_limit || std::abs(s.theta) > cfg_.theta_limit;
  }

  // One Euler step of the standard dynamics; pure in (state, action).
  CartPoleState integrate(const CartPoleState& s, CartAction action) const {
    const double force = (action == CartAction::Right) ? cfg_.force_mag : -cfg_.force_mag;
    const double total_mass = cfg_.cart_mass + cfg_.pole_mass;
    const double pml = cfg_.pole_mass * cfg_.pole_half_length;
    const double cos_t = std::cos(s.theta);
    const double sin_t = std::sin(s.theta);
    const double temp = (force + pml * s.omega * s.omega * sin_t) / total_mass;
    const double theta_acc =
        (cfg_.gravity * sin_t - cos_t * temp) /
        (cfg_.pole_half_length * (4.0 / 3.0 - cfg_.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pml * theta_acc * cos_t / total_mass;
    CartPoleState n;
    n.x = s.x + cfg_.dt * s.v;
    n.v = s.v + cfg_.dt * x_acc;
    n.theta = s.theta + cfg_.dt * s.omega;
    n.omega = s.omega + cfg_.dt * theta_acc;
    return n;
  }

  CartStep step(CartAction action) {
    if (failed(state_)) throw std::logic_error("CartPole: step from failed state");
    state_ = integrate(state_, action);
    ++steps_;
    CartStep out;
    out.next = state_;
    out.reward = 1.0;
    out.terminal = failed(state_);
    out.truncated = !out.terminal && steps_ >= cfg_.step_cap;
    return out;
  }

 private:
  Config cfg_;
  CartPoleState state_;
  int steps_ = 0;
};

}  // namespace spikerl
