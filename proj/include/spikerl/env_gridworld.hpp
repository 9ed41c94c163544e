// Stochastic gridworld navigation tasks.
//
// Shared action model: the intended move happens with probability 0.8, the
// agent veers to the right of it with 0.05, to the left with 0.05, and stays
// put with 0.1. Moves into a wall or an obstacle leave the state unchanged.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spikerl/rng.hpp"

namespace spikerl {

enum class GridAction : int { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr int kGridActionCount = 4;

struct GridStep {
  int next_state = 0;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;
};

namespace detail {

// Row/col deltas indexed by GridAction.
inline constexpr int kDr[4] = {-1, +1, 0, 0};
inline constexpr int kDc[4] = {0, 0, -1, +1};

// Clockwise rotation: Up -> Right -> Down -> Left -> Up.
inline int rotate_cw(int a) {
  static constexpr int tbl[4] = {3, 2, 0, 1};  // Up->Right, Down->Left, Left->Up, Right->Down
  return tbl[a];
}
inline int rotate_ccw(int a) {
  static constexpr int tbl[4] = {2, 3, 1, 0};  // Up->Left, Down->Right, Left->Down, Right->Up
  return tbl[a];
}

}  // namespace detail

// 5x5 maze with two obstacle cells, one penalty ("water") cell, and a goal.
// Non-obstacle cells are numbered row-major 1..23; episodes start in state 1
// and terminate in state 23. The cell layout is configurable; the defaults
// put the obstacles at raw cells 12 and 17 and the water at raw cell 22
// (raw cell = 5*row + col).
class Gridworld5 {
 public:
  struct Config {
    std::vector<int> obstacle_cells{12, 17};
    int water_cell = 22;
    double goal_reward = 10.0;
    double water_reward = -10.0;
    int step_cap = 1000;
  };

  Gridworld5() : Gridworld5(Config{}) {}
  explicit Gridworld5(Config cfg) : cfg_(std::move(cfg)) {
    state_of_cell_.assign(25, 0);
    int next_id = 1;
    for (int cell = 0; cell < 25; ++cell) {
      if (is_obstacle(cell)) continue;
      state_of_cell_[cell] = next_id;
      cell_of_state_.push_back(cell);
      ++next_id;
    }
    n_states_ = next_id - 1;
    if (n_states_ < 2) throw std::invalid_argument("Gridworld5: too many obstacles");
    reset();
  }

  int state_count() const { return n_states_; }
  int start_state() const { return 1; }
  int goal_state() const { return n_states_; }
  int water_state() const { return state_of_cell_[cfg_.water_cell]; }
  int state() const { return state_; }
  int steps_taken() const { return steps_; }

  void reset() {
    state_ = start_state();
    steps_ = 0;
  }

  // Aggregated next-state distribution for (state, action). Terminal state
  // self-loops with probability 1.
  std::vector<std::pair<int, double>> transition_probs(int state, GridAction action) const {
    check_state(state);
    if (state == goal_state()) return {{state, 1.0}};
    std::vector<std::pair<int, double>> agg;
    auto add = [&agg](int s, double p) {
      for (auto& [st, pr] : agg) {
        if (st == s) {
          pr += p;
          return;
        }
      }
      agg.emplace_back(s, p);
    };
    const int a = static_cast<int>(action);
    add(move_from(state, a), 0.8);
    add(move_from(state, detail::rotate_cw(a)), 0.05);
    add(move_from(state, detail::rotate_ccw(a)), 0.05);
    add(state, 0.1);
    return agg;
  }

  GridStep step(GridAction action, RngStream& rng) {
    if (state_ == goal_state()) throw std::logic_error("Gridworld5: step from terminal state");
    const int a = static_cast<int>(action);
    if (a < 0 || a >= kGridActionCount) throw std::invalid_argument("Gridworld5: bad action");
    const double u = rng.uniform01();
    int next;
    if (u < 0.8) {
      next = move_from(state_, a);
    } else if (u < 0.85) {
      next = move_from(state_, detail::rotate_cw(a));
    } else if (u < 0.9) {
      next = move_from(state_, detail::rotate_ccw(a));
    } else {
      next = state_;
    }
    ++steps_;
    GridStep out;
    out.next_state = next;
    out.terminal = (next == goal_state());
    if (out.terminal) {
      out.reward = cfg_.goal_reward;
    } else if (next == water_state()) {
      out.reward = cfg_.water_reward;
    }
    out.truncated = !out.terminal && steps_ >= cfg_.step_cap;
    state_ = next;
    return out;
  }

 private:
  bool is_obstacle(int cell) const {
    for (int o : cfg_.obstacle_cells) {
      if (o == cell) return true;
    }
    return false;
  }

  void check_state(int s) const {
    if (s < 1 || s > n_states_) throw std::out_of_range("Gridworld5: state out of range");
  }

  // Attempted move in direction a; blocked moves stay in place.
  int move_from(int state, int a) const {
    const int cell = cell_of_state_[static_cast<std::size_t>(state - 1)];
    const int r = cell / 5 + detail::kDr[a];
    const int c = cell % 5 + detail::kDc[a];
    if (r < 0 || r > 4 || c < 0 || c > 4) return state;
    const int target = r * 5 + c;
    if (is_obstacle(target)) return state;
    return state_of_cell_[target];
  }

  Config cfg_;
  std::vector<int> state_of_cell_;
  std::vector<int> cell_of_state_;
  int n_states_ = 0;
  int state_ = 1;
  int steps_ = 0;
};

// 10x10 open grid. States are (row, col) in 1..10 each, exposed as the index
// (row-1)*10 + (col-1) in 0..99. Reaching (10,10) pays 10 and terminates;
// every other transition pays 0.
class Gridworld10 {
 public:
  struct Config {
    double goal_reward = 10.0;
    int step_cap = 1000;
  };

  Gridworld10() : Gridworld10(Config{}) {}
  explicit Gridworld10(Config cfg) : cfg_(cfg) { reset(); }

  static constexpr int kSide = 10;
  int state_count() const { return kSide * kSide; }
  int goal_state() const { return kSide * kSide - 1; }
  int state() const { return state_; }
  int steps_taken() const { return steps_; }

  void reset() {
    state_ = 0;
    steps_ = 0;
  }

  std::vector<std::pair<int, double>> transition_probs(int state, GridAction action) const {
    if (state < 0 || state >= state_count()) throw std::out_of_range("Gridworld10: bad state");
    if (state == goal_state()) return {{state, 1.0}};
    std::vector<std::pair<int, double>> agg;
    auto add = [&agg](int s, double p) {
      for (auto& [st, pr] : agg) {
        if (st == s) {
          pr += p;
          return;
        }
      }
      agg.emplace_back(s, p);
    };
    const int a = static_cast<int>(action);
    add(move_from(state, a), 0.8);
    add(move_from(state, detail::rotate_cw(a)), 0.05);
    add(move_from(state, detail::rotate_ccw(a)), 0.05);
    add(state, 0.1);
    return agg;
  }

  GridStep step(GridAction action, RngStream& rng) {
    if (state_ == goal_state()) throw std::logic_error("Gridworld10: step from terminal state");
    const int a = static_cast<int>(action);
    if (a < 0 || a >= kGridActionCount) throw std::invalid_argument("Gridworld10: bad action");
    const double u = rng.uniform01();
    int next;
    if (u < 0.8) {
      next = move_from(state_, a);
    } else if (u < 0.85) {
      next = move_from(state_, detail::rotate_cw(a));
    } else if (u < 0.9) {
      next = move_from(state_, detail::rotate_ccw(a));
    } else {
      next = state_;
    }
    ++steps_;
    GridStep out;
    out.next_state = next;
    out.terminal = (next == goal_state());
    out.reward = out.terminal ? cfg_.goal_reward : 0.0;
    out.truncated = !out.terminal && steps_ >= cfg_.step_cap;
    state_ = next;
    return out;
  }

 private:
  int move_from(int state, int a) const {
    const int r = state / kSide + detail::kDr[a];
    const int c = state % kSide + detail::kDc[a];
    if (r < 0 || r >= kSide || c < 0 || c >= kSide) return state;
    return r * kSide + c;
  }

  Config cfg_;
  int state_ = 0;
  int steps_ = 0;
};

}  // namespace spikerl
