#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "spikerl/reparam.hpp"
#include "spikerl/rng.hpp"
#include "spikerl/task.hpp"

using namespace spikerl;

namespace {

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("gumbel softmax with zero noise reproduces the softmax") {
  Tape t;
  const std::vector<double> pi{0.2, 0.5, 0.3};
  std::vector<double> logp(3);
  for (int i = 0; i < 3; ++i) logp[i] = std::log(pi[i]);
  const auto lp = t.value({logp.begin(), logp.end()});
  const std::vector<double> zero(3, 0.0);
  const auto y = gumbel_softmax_layer(t, lp, zero, 1.0);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(t.val(y)[i] == Catch::Approx(pi[i]).epsilon(1e-12));
  }
}

TEST_CASE("gumbel softmax output is a simplex point") {
  RngStream rng(80);
  for (int trial = 0; trial < 200; ++trial) {
    Tape t;
    std::vector<double> logp(4), g(4);
    for (double& v : logp) v = rng.uniform(-3, 3);
    for (double& v : g) v = gumbel_sample(rng);
    const auto y = gumbel_softmax_layer(t, t.value({logp.begin(), logp.end()}), g,
                                        rng.uniform(0.1, 2.0));
    double sum = 0.0;
    for (double v : t.val(y)) {
      REQUIRE(v >= 0.0);
      sum += v;
    }
    REQUIRE(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("gumbel softmax invariant under constant shifts of log probs") {
  RngStream rng(81);
  std::vector<double> logp{0.3, -0.7, 1.2};
  std::vector<double> g{gumbel_sample(rng), gumbel_sample(rng), gumbel_sample(rng)};
  Tape t1, t2;
  const auto y1 = gumbel_softmax_layer(t1, t1.value({logp.begin(), logp.end()}), g, 0.7);
  std::vector<double> shifted = logp;
  for (double& v : shifted) v += 11.0;
  const auto y2 = gumbel_softmax_layer(t2, t2.value({shifted.begin(), shifted.end()}), g, 0.7);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(t1.val(y1)[i] == Catch::Approx(t2.val(y2)[i]).margin(1e-12));
  }
}

TEST_CASE("gumbel softmax rejects bad arguments") {
  Tape t;
  const auto lp = t.value({0.0, 0.0});
  const std::vector<double> g{0.0, 0.0};
  REQUIRE_THROWS_AS(gumbel_softmax_layer(t, lp, g, 0.0), std::invalid_argument);
  const std::vector<double> short_g{0.0};
  REQUIRE_THROWS_AS(gumbel_softmax_layer(t, lp, short_g, 1.0), std::invalid_argument);
}

TEST_CASE("sharp-temperature argmax frequencies follow the categorical") {
  RngStream rng(82);
  const std::vector<double> pi{0.6, 0.3, 0.1};
  std::vector<double> logp(3);
  for (int i = 0; i < 3; ++i) logp[i] = std::log(pi[i]);
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int s = 0; s < n; ++s) {
    std::vector<double> g(3);
    for (double& v : g) v = gumbel_sample(rng);
    Tape t;
    const auto y = gumbel_softmax_layer(t, t.value({logp.begin(), logp.end()}), g, 0.1);
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (t.val(y)[i] > t.val(y)[best]) best = i;
    }
    counts[best]++;
  }
  double tv = 0.0;
  for (int i = 0; i < 3; ++i) tv += std::abs(double(counts[i]) / n - pi[i]);
  REQUIRE(tv / 2.0 <= 0.01);
}

TEST_CASE("spiking layer: symmetric levels at zero drive give zero output") {
  Tape t;
  const auto drives = t.value({0.0, 0.0});
  std::vector<GradedNoise> zero_noise(2);
  for (auto& g : zero_noise) g.fill(0.0);
  const auto out = spiking_policy_layer(t, drives, zero_noise, 1.0);
  REQUIRE(t.val(out)[0] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(t.val(out)[1] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("spiking layer: temperature to zero hardens to one level") {
  RngStream rng(83);
  Tape t;
  const auto drives = t.value({0.4});
  std::vector<GradedNoise> noise(1);
  for (double& v : noise[0]) v = gumbel_sample(rng);
  const auto out = spiking_policy_layer(t, drives, noise, 1e-4);
  // with tau -> 0 the soft sample collapses onto argmax(log pi + g)
  const double drive = 0.4;
  int best = 0;
  double best_v = -1e300;
  for (int k = 0; k < 5; ++k) {
    std::vector<double> logits(5);
    for (int i = 0; i < 5; ++i) logits[i] = kGradedActions[i] * drive;
    const auto pi = softmax(logits);
    const double v = std::log(pi[k]) + noise[0][k];
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  REQUIRE(t.val(out)[0] == Catch::Approx(kGradedActions[best]).margin(1e-6));
}

TEST_CASE("spiking layer gradient with frozen noise matches central differences") {
  RngStream rng(84);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const int n_in = 2, width = 3;
    std::vector<double> w(width * n_in), b(width), x(n_in);
    for (double& v : w) v = rng.uniform(-1, 1);
    for (double& v : b) v = rng.uniform(-1, 1);
    for (double& v : x) v = rng.uniform(-1, 1);
    std::vector<GradedNoise> noise(width);
    for (auto& g : noise) {
      for (double& v : g) v = gumbel_sample(rng);
    }
    auto build = [&](Tape& t, const std::vector<double>& wv, const std::vector<double>& bv) {
      const auto wn = t.value_matrix({wv.begin(), wv.end()}, width, n_in);
      const auto bn = t.value({bv.begin(), bv.end()});
      const auto xn = t.value({x.begin(), x.end()});
      const auto drives = t.add(t.matvec(wn, xn), bn);
      const auto out = spiking_policy_layer(t, drives, noise, 0.8);
      const auto loss = t.sum(t.mul(out, out));
      return std::tuple{wn, bn, loss};
    };
    Tape t;
    const auto [wn, bn, loss] = build(t, w, b);
    t.backward(loss);
    auto eval = [&](const std::vector<double>& wv, const std::vector<double>& bv) {
      Tape t2;
      const auto [a_, b_, l] = build(t2, wv, bv);
      (void)a_;
      (void)b_;
      return t2.val(l)[0];
    };
    for (std::size_t j = 0; j < w.size(); ++j) {
      auto up = w, dn = w;
      up[j] += h;
      dn[j] -= h;
      REQUIRE(rel_err(t.adjoint(wn)[j], (eval(up, b) - eval(dn, b)) / (2 * h)) < 1e-5);
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto up = b, dn = b;
      up[j] += h;
      dn[j] -= h;
      REQUIRE(rel_err(t.adjoint(bn)[j], (eval(w, up) - eval(w, dn)) / (2 * h)) < 1e-5);
    }
  }
}

TEST_CASE("frozen noise makes forward and backward deterministic") {
  RngStream rng(85);
  A2CModel m = A2CModel::init(4, 8, 2, 1.0, rng, 0.5);
  std::vector<double> x{0.1, -0.2, 0.3, 0.05};
  const auto noise = draw_layer_noise(8, rng);
  Tape t1, t2;
  const auto g1 = a2c_graph(t1, m, x, noise);
  const auto g2 = a2c_graph(t2, m, x, noise);
  t1.backward(t1.gather(g1.log_policy, 0));
  t2.backward(t2.gather(g2.log_policy, 0));
  REQUIRE(t1.val(g1.policy)[0] == t2.val(g2.policy)[0]);
  REQUIRE(t1.val(g1.value)[0] == t2.val(g2.value)[0]);
  for (std::size_t j = 0; j < m.w1.size(); ++j) {
    REQUIRE(t1.adjoint(g1.w1)[j] == t2.adjoint(g2.w1)[j]);
  }
}

// Reparameterized gradient is unbiased for the noise-average of a linear
// downstream function: Monte-Carlo mean of tape gradients vs a quadrature
// oracle over the Gumbel-difference (logistic) noise.
TEST_CASE("reparameterized gradient estimator is unbiased at desk scale") {
  const double tau = 1.0;
  const std::vector<double> theta{0.4, -0.3};  // two-category logits
  const std::vector<double> coef{1.3, -0.7};   // linear downstream f = coef . y

  // E[f] = coef0 E[y0] + coef1 (1 - E[y0]) with y0 = sigmoid((eta + L)/tau),
  // eta = theta0 - theta1 and L ~ Logistic(0,1) (difference of two Gumbels).
  // Quadrature of dE[f]/d eta over the logistic noise; by the softmax chain
  // d/dtheta0 = -d/dtheta1 = dE/d eta.
  const double eta = theta[0] - theta[1];
  auto integrand = [&](double x) {
    const double s = sigmoid((eta + x) / tau);
    const double ds = s * (1.0 - s) / tau;  // d y0 / d eta
    const double pdf_e = std::exp(-x);
    const double pdf = pdf_e / ((1.0 + pdf_e) * (1.0 + pdf_e));  // logistic pdf
    return (coef[0] - coef[1]) * ds * pdf;
  };
  const int n_quad = 200000;
  const double lo = -40.0, hi = 40.0;
  const double step = (hi - lo) / n_quad;
  double d_eta = 0.0;
  for (int i = 0; i <= n_quad; ++i) {
    const double w = (i == 0 || i == n_quad) ? 0.5 : 1.0;
    d_eta += w * integrand(lo + i * step);
  }
  d_eta *= step;
  const std::vector<double> analytic{d_eta, -d_eta};  // chain through eta

  RngStream rng(86);
  const int n_mc = 100000;
  std::vector<double> sum(2, 0.0), sumsq(2, 0.0);
  for (int s = 0; s < n_mc; ++s) {
    Tape t;
    const auto th = t.value({theta.begin(), theta.end()});
    const auto logp = t.log(t.softmax(th));
    std::vector<double> g{gumbel_sample(rng), gumbel_sample(rng)};
    const auto y = gumbel_softmax_layer(t, logp, g, tau);
    const auto f = t.dot(t.value({coef.begin(), coef.end()}), y);
    t.backward(f);
    for (int j = 0; j < 2; ++j) {
      const double gj = t.adjoint(th)[j];
      sum[j] += gj;
      sumsq[j] += gj * gj;
    }
  }
  for (int j = 0; j < 2; ++j) {
    const double mean = sum[j] / n_mc;
    const double var = (sumsq[j] - n_mc * mean * mean) / (n_mc - 1);
    const double se = std::sqrt(var / n_mc);
    REQUIRE(std::abs(mean - analytic[j]) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("a2c step with zero advantage leaves the actor unchanged") {
  RngStream rng(87);
  A2CModel m = A2CModel::init(4, 6, 2, 1.0, rng, 0.3);
  // force the value head to match the target exactly: value weights zero,
  // bias zero, and target = 0 via reward 0, terminal transition
  m.wc.assign(m.wc.size(), 0.0);
  m.bc[0] = 0.0;
  Transition tr;
  tr.state = {0.1, 0.2, -0.1, 0.0};
  tr.noise = draw_layer_noise(6, rng);
  tr.action = 1;
  tr.reward = 0.0;
  tr.terminal = true;
  tr.bootstrap_value = 0.0;
  const auto wa_before = m.wa;
  const auto w1_before = m.w1;
  std::vector<Transition> batch{tr};
  a2c_step(m, batch, 0.99, 0.05);
  REQUIRE(m.wa == wa_before);  // actor loss scaled by A = 0
  REQUIRE(m.w1 == w1_before);  // critic loss gradient is also 0 here
}

TEST_CASE("a2c step on a 1-2-1 model matches the hand chain rule") {
  // 1 input, 2 hidden neurons, 2 actions; single transition.
  RngStream rng(88);
  A2CModel m = A2CModel::init(1, 2, 2, 0.9, rng, 0.4);
  const std::vector<double> x{0.7};
  const auto noise = draw_layer_noise(2, rng);
  const int action = 1;
  const double reward = 1.0;
  const double gamma = 0.99;
  const double boot = 0.3;

  // forward by hand
  auto softmax5 = [](const std::array<double, 5>& v) {
    std::array<double, 5> out;
    double mx = v[0];
    for (double a : v) mx = std::max(mx, a);
    double z = 0;
    for (int i = 0; i < 5; ++i) {
      out[i] = std::exp(v[i] - mx);
      z += out[i];
    }
    for (double& a : out) a /= z;
    return out;
  };
  std::array<double, 2> drive{}, e{};
  std::array<std::array<double, 5>, 2> y{}, pi5{};
  for (int i = 0; i < 2; ++i) {
    drive[i] = m.w1[i] * x[0] + m.b1[i];
    std::array<double, 5> logits;
    for (int k = 0; k < 5; ++k) logits[k] = kGradedActions[k] * drive[i];
    pi5[i] = softmax5(logits);
    std::array<double, 5> relaxed;
    for (int k = 0; k < 5; ++k) relaxed[k] = (std::log(pi5[i][k]) + noise[i][k]) / m.tau;
    y[i] = softmax5(relaxed);
    e[i] = 0;
    for (int k = 0; k < 5; ++k) e[i] += kGradedActions[k] * y[i][k];
  }
  std::array<double, 2> logits{};
  for (int a = 0; a < 2; ++a) logits[a] = m.wa[a * 2] * e[0] + m.wa[a * 2 + 1] * e[1] + m.ba[a];
  const double mx = std::max(logits[0], logits[1]);
  const double z = std::exp(logits[0] - mx) + std::exp(logits[1] - mx);
  std::array<double, 2> pi{std::exp(logits[0] - mx) / z, std::exp(logits[1] - mx) / z};
  const double v = m.wc[0] * e[0] + m.wc[1] * e[1] + m.bc[0];
  const double target = reward + gamma * boot;
  const double adv = target - v;

  // d loss / d logits = A * (pi - onehot(action)); critic: d/dv = -2(target - v)
  std::array<double, 2> dlogits{adv * pi[0], adv * pi[1]};
  dlogits[action] -= adv;
  const double dv = -2.0 * (target - v) * 1.0;  // critic_coef = 1

  std::array<double, 2> de{};
  for (int i = 0; i < 2; ++i) {
    de[i] = dlogits[0] * m.wa[0 * 2 + i] + dlogits[1] * m.wa[1 * 2 + i] + dv * m.wc[i];
  }
  // de/d drive via the relaxed softmax chain
  std::array<double, 2> ddrive{};
  for (int i = 0; i < 2; ++i) {
    // dy_k/d logpi_j = y_k (delta_kj - y_j)/tau; dlogpi_j/d drive = a_j - E_pi[a]
    double mean_pi_a = 0;
    for (int k = 0; k < 5; ++k) mean_pi_a += pi5[i][k] * kGradedActions[k];
    double acc = 0;
    for (int k = 0; k < 5; ++k) {
      double dyk = 0;
      for (int j = 0; j < 5; ++j) {
        const double d_kj = k == j ? 1.0 : 0.0;
        dyk += y[i][k] * (d_kj - y[i][j]) / m.tau * (kGradedActions[j] - mean_pi_a);
      }
      acc += kGradedActions[k] * dyk;
    }
    ddrive[i] = de[i] * acc;
  }
  std::array<double, 2> dw1{ddrive[0] * x[0], ddrive[1] * x[0]};
  std::array<double, 4> dwa{dlogits[0] * e[0], dlogits[0] * e[1], dlogits[1] * e[0],
                            dlogits[1] * e[1]};
  std::array<double, 2> dwc{dv * e[0], dv * e[1]};

  // run the library step and compare the applied update per parameter
  A2CModel before = m;
  Transition tr;
  tr.state = x;
  tr.noise = noise;
  tr.action = action;
  tr.reward = reward;
  tr.terminal = false;
  tr.bootstrap_value = boot;
  std::vector<Transition> batch{tr};
  const double alpha = 0.01;
  a2c_step(m, batch, gamma, alpha, 1.0);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(m.w1[i] == Catch::Approx(before.w1[i] - alpha * dw1[i]).margin(1e-10));
    REQUIRE(m.wc[i] == Catch::Approx(before.wc[i] - alpha * dwc[i]).margin(1e-10));
    REQUIRE(m.b1[i] == Catch::Approx(before.b1[i] - alpha * ddrive[i]).margin(1e-10));
  }
  for (int i = 0; i < 4; ++i) {
    REQUIRE(m.wa[i] == Catch::Approx(before.wa[i] - alpha * dwa[i]).margin(1e-10));
  }
  REQUIRE(m.bc[0] == Catch::Approx(before.bc[0] - alpha * dv).margin(1e-10));
  REQUIRE(m.ba[action] ==
          Catch::Approx(before.ba[action] - alpha * (dlogits[action])).margin(1e-10));
}

TEST_CASE("a2c learns to hold the pole longer") {
  RngStream master(90);
  CartPoleTask task;
  RngStream env_rng = master.split(1);
  RngStream init = master.split(2);
  RngStream model_rng = master.split(3);
  A2CModel model = A2CModel::init(4, 16, 2, 1.0, init, 0.5);
  A2CEpisodeConfig cfg;
  cfg.gamma = 0.99;
  cfg.alpha = 2e-3;
  double early = 0.0, late = 0.0;
  const int episodes = 400;
  for (int e = 0; e < episodes; ++e) {
    const auto rec = run_episode_a2c(task, model, cfg, env_rng, model_rng);
    if (e < 50) early += rec.steps;
    if (e >= episodes - 50) late += rec.steps;
  }
  REQUIRE(late > early);
}
