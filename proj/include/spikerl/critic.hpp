// Global state-value critic trained by TD(lambda) with accumulating
// eligibility traces. Tabular over discrete states or linear over a
// feature vector.

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace spikerl {

// What the critic sees of a state: a table index or a feature vector.
struct CriticView {
  bool discrete = true;
  int index = 0;
  std::vector<double> features;
};

inline CriticView critic_index(int index) {
  CriticView v;
  v.discrete = true;
  v.index = index;
  return v;
}

inline CriticView critic_features(std::vector<double> f) {
  CriticView v;
  v.discrete = false;
  v.features = std::move(f);
  return v;
}

class Critic {
 public:
  enum class Mode { Tabular, Linear };

  Critic(Mode mode, int size, double alpha, double gamma, double lambda)
      : mode_(mode), alpha_(alpha), gamma_(gamma), lambda_(lambda) {
    if (size < 1) throw std::invalid_argument("Critic: empty parameterization");
    theta_.assign(static_cast<std::size_t>(size), 0.0);
    trace_.assign(static_cast<std::size_t>(size), 0.0);
  }

  Mode mode() const { return mode_; }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  void set_alpha(double a) { alpha_ = a; }
  double alpha() const { return alpha_; }
  std::span<const double> values() const { return theta_; }

  void begin_episode() { trace_.assign(trace_.size(), 0.0); }

  double value(const CriticView& s) const {
    if (mode_ == Mode::Tabular) {
      check_index(s);
      return theta_[static_cast<std::size_t>(s.index)];
    }
    check_features(s);
    double v = 0.0;
    for (std::size_t j = 0; j < theta_.size(); ++j) v += theta_[j] * s.features[j];
    return v;
  }

  // delta = r + gamma * V(s') * [not terminal] - V(s).
  double td_error(const CriticView& s, double reward, const CriticView& s_next,
                  bool terminal) const {
    const double bootstrap = terminal ? 0.0 : gamma_ * value(s_next);
    return reward + bootstrap - value(s);
  }

  // e <- gamma*lambda*e + dV/dtheta at s, then theta += alpha * delta * e.
  void update(double delta, const CriticView& s) {
    const double decay = gamma_ * lambda_;
    for (double& e : trace_) e *= decay;
    if (mode_ == Mode::Tabular) {
      check_index(s);
      trace_[static_cast<std::size_t>(s.index)] += 1.0;
    } else {
      check_features(s);
      for (std::size_t j = 0; j < trace_.size(); ++j) trace_[j] += s.features[j];
    }
    for (std::size_t j = 0; j < theta_.size(); ++j) theta_[j] += alpha_ * delta * trace_[j];
  }

 private:
  void check_index(const CriticView& s) const {
    if (!s.discrete) throw std::invalid_argument("Critic: tabular critic got features");
    if (s.index < 0 || s.index >= static_cast<int>(theta_.size())) {
      throw std::out_of_range("Critic: unknown tabular state");
    }
  }
  void check_features(const CriticView& s) const {
    if (s.discrete) throw std::invalid_argument("Critic: linear critic got a table index");
    if (s.features.size() != theta_.size()) {
      throw std::invalid_argument("Critic: feature size does not match weights");
    }
  }

  Mode mode_;
  std::vector<double> theta_;
  std::vector<double> trace_;
  double alpha_;
  double gamma_;
  double lambda_;
};

}  // namespace spikerl
