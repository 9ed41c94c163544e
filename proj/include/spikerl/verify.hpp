// Built-in oracle suite behind the CLI `verify` subcommand: finite-difference
// gradient checks for every neuron model and the tape, the sampled-versus-
// enumerated update comparison, critic convergence on a known chain, and
// Gumbel sampling fidelity. Each check reports its observed value and the
// tolerance it was held to.

#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "spikerl/analysis.hpp"
#include "spikerl/neuron_glm.hpp"
#include "spikerl/neuron_ising.hpp"
#include "spikerl/neuron_lif.hpp"
#include "spikerl/neuron_lnp.hpp"
#include "spikerl/network.hpp"
#include "spikerl/rng.hpp"
#include "spikerl/tape.hpp"

namespace spikerl {

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  int fd_cases = 20;
  double fd_step = 1e-6;
  double fd_tol = 1e-5;
  int mc_samples = 20000;
  int gumbel_draws = 100000;
  std::uint64_t seed = 2024;
};

namespace verify_detail {

inline double rel_err(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

// max that treats NaN as a failure instead of silently dropping it
inline void fold_worst(double& worst, double err) {
  if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
  worst = std::max(worst, err);
}

// Central finite difference of f along parameter index j.
inline double central_diff(const std::function<double(int, double)>& nudge_eval, int j, double h) {
  const double up = nudge_eval(j, h);
  const double dn = nudge_eval(j, -h);
  return (up - dn) / (2.0 * h);
}

inline CheckResult fd_check(const std::string& name, double worst, double tol) {
  CheckResult r;
  r.name = name;
  r.observed = worst;
  r.tolerance = tol;
  r.pass = worst <= tol;  // NaN fails
  return r;
}

}  // namespace verify_detail

// Worst relative error of the memoryless-unit log-policy gradient against
// central differences over random cases.
inline CheckResult check_ising_gradient(const VerifyOptions& opt) {
  RngStream rng(opt.seed);
  double worst = 0.0;
  for (int t = 0; t < opt.fd_cases; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform01() * 6);
    IsingParams p;
    p.bias = rng.uniform(-1.0, 1.0);
    p.weights.resize(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      p.weights[static_cast<std::size_t>(j)] = rng.uniform(-1.0, 1.0);
      x[static_cast<std::size_t>(j)] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    }
    const int action = rng.uniform01() < 0.5 ? -1 : 1;
    std::vector<double> grad(static_cast<std::size_t>(p.param_count()));
    ising_logpolicy_grad(p, x, action, grad);
    auto logpi = [&](const IsingParams& q) {
      const double prob = ising_fire_prob(q, x);
      return action > 0 ? std::log(prob) : std::log(1.0 - prob);
    };
    for (int j = 0; j < p.param_count(); ++j) {
      IsingParams up = p, dn = p;
      double& pu = j == 0 ? up.bias : up.weights[static_cast<std::size_t>(j - 1)];
      double& pd = j == 0 ? dn.bias : dn.weights[static_cast<std::size_t>(j - 1)];
      pu += opt.fd_step;
      pd -= opt.fd_step;
      const double fd = (logpi(up) - logpi(dn)) / (2.0 * opt.fd_step);
      verify_detail::fold_worst(worst, verify_detail::rel_err(grad[static_cast<std::size_t>(j)], fd));
    }
  }
  return verify_detail::fd_check("gradient: memoryless fire policy", worst, opt.fd_tol);
}

inline CheckResult check_graded_gradient(const VerifyOptions& opt) {
  RngStream rng(opt.seed + 1);
  double worst = 0.0;
  for (int t = 0; t < opt.fd_cases; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform01() * 5);
    IsingParams p;
    p.bias = rng.uniform(-1.0, 1.0);
    p.weights.resize(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      p.weights[static_cast<std::size_t>(j)] = rng.uniform(-0.7, 0.7);
      x[static_cast<std::size_t>(j)] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    }
    const int action = static_cast<int>(rng.uniform01() * 5.0);
    std::vector<double> grad(static_cast<std::size_t>(p.param_count()));
    ising_graded_logpolicy_grad(p, x, action, grad);
    auto logpi = [&](const IsingParams& q) {
      return std::log(ising_graded_policy(q, x)[static_cast<std::size_t>(action)]);
    };
    for (int j = 0; j < p.param_count(); ++j) {
      IsingParams up = p, dn = p;
      double& pu = j == 0 ? up.bias : up.weights[static_cast<std::size_t>(j - 1)];
      double& pd = j == 0 ? dn.bias : dn.weights[static_cast<std::size_t>(j - 1)];
      pu += opt.fd_step;
      pd -= opt.fd_step;
      const double fd = (logpi(up) - logpi(dn)) / (2.0 * opt.fd_step);
      verify_detail::fold_worst(worst, verify_detail::rel_err(grad[static_cast<std::size_t>(j)], fd));
    }
  }
  return verify_detail::fd_check("gradient: graded activity policy", worst, opt.fd_tol);
}

inline CheckResult check_lif_gradient(const VerifyOptions& opt) {
  RngStream rng(opt.seed + 2);
  double worst = 0.0;
  for (int t = 0; t < opt.fd_cases; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform01() * 4);
    LifParams p;
    p.bias = rng.uniform(-0.5, 0.5);
    p.tau_m = rng.uniform(0.5, 3.0);
    p.threshold = rng.uniform(-0.5, 0.5);
    p.weights.resize(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> spikes(static_cast<std::size_t>(n));
    const double now = 5.0;
    for (int j = 0; j < n; ++j) {
      p.weights[static_cast<std::size_t>(j)] = rng.uniform(-1.0, 1.0);
      const int m = static_cast<int>(rng.uniform01() * 3.0);
      for (int i = 0; i < m; ++i) {
        spikes[static_cast<std::size_t>(j)].push_back(rng.uniform(0.0, now));
      }
    }
    const int action = rng.uniform01() < 0.5 ? 0 : 1;
    const auto sums = lif_psp_sums(p, spikes, now);
    std::vector<double> grad(static_cast<std::size_t>(n));
    lif_fire_grad(p, lif_membrane(p, spikes, now), action, sums, grad);
    auto logpi = [&](const LifParams& q) {
      const double s = lif_fire_prob(q, lif_membrane(q, spikes, now));
      return action == 1 ? std::log(s) : std::log(1.0 - s);
    };
    for (int j = 0; j < n; ++j) {
      LifParams up = p, dn = p;
      up.weights[static_cast<std::size_t>(j)] += opt.fd_step;
      dn.weights[static_cast<std::size_t>(j)] -= opt.fd_step;
      const double fd = (logpi(up) - logpi(dn)) / (2.0 * opt.fd_step);
      verify_detail::fold_worst(worst, verify_detail::rel_err(grad[static_cast<std::size_t>(j)], fd));
    }
  }
  return verify_detail::fd_check("gradient: integrate-and-fire policy", worst, opt.fd_tol);
}

namespace verify_detail {

inline GlmParams random_glm(RngStream& rng, int n_inputs, int kernel_len, int train_len,
                            bool with_post) {
  GlmParams p;
  p.train_len = train_len;
  p.baseline = rng.uniform(-0.5, 0.5);
  p.stim_kernels.assign(static_cast<std::size_t>(n_inputs),
                        Kernel1D(static_cast<std::size_t>(kernel_len), 0.0));
  for (auto& k : p.stim_kernels) {
    for (double& w : k) w = rng.uniform(-1.0, 1.0);
  }
  if (with_post) {
    p.post_kernel.assign(2, 0.0);
    for (double& w : p.post_kernel) w = rng.uniform(-1.0, 1.0);
  }
  return p;
}

inline std::vector<std::vector<double>> random_trains(RngStream& rng, int n, int len) {
  std::vector<std::vector<double>> t(static_cast<std::size_t>(n));
  for (auto& tr : t) {
    tr.resize(static_cast<std::size_t>(len));
    for (double& v : tr) v = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  }
  return t;
}

}  // namespace verify_detail

inline CheckResult check_glm_gradient(const VerifyOptions& opt) {
  RngStream rng(opt.seed + 3);
  double worst = 0.0;
  for (int t = 0; t < opt.fd_cases; ++t) {
    const int n_inputs = 1 + static_cast<int>(rng.uniform01() * 3);
    const int k_in = 3 + static_cast<int>(rng.uniform01() * 3);
    const int train_len = 1 + static_cast<int>(rng.uniform01() * 3);
    GlmParams p = verify_detail::random_glm(rng, n_inputs, 3, train_len, rng.uniform01() < 0.5);
    const auto stim = verify_detail::random_trains(rng, n_inputs, k_in);
    CoagentState state;
    state.stimulus = {stim.data(), stim.size()};
    state.stim_shift = k_in - train_len;
    std::vector<double> y(static_cast<std::size_t>(train_len));
    for (double& v : y) v = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    std::vector<double> grad(static_cast<std::size_t>(p.param_count()));
    glm_logprob_grad(p, state, y, grad);
    for (int j = 0; j < p.param_count(); ++j) {
      auto nudged = [&](double h) {
        GlmParams q = p;
        int idx = 0;
        for (auto& k : q.stim_kernels) {
          for (double& w : k) {
            if (idx++ == j) w += h;
          }
        }
        for (double& w : q.post_kernel) {
          if (idx++ == j) w += h;
        }
        if (idx == j) q.baseline += h;
        return glm_spiketrain_logprob(q, state, y);
      };
      const double fd = (nudged(opt.fd_step) - nudged(-opt.fd_step)) / (2.0 * opt.fd_step);
      verify_detail::fold_worst(worst, verify_detail::rel_err(grad[static_cast<std::size_t>(j)], fd));
    }
  }
  return verify_detail::fd_check("gradient: spike-train policy", worst, opt.fd_tol);
}

inline CheckResult check_lnp_gradient(const VerifyOptions& opt) {
  RngStream rng(opt.seed + 4);
  double worst = 0.0;
  for (int t = 0; t < opt.fd_cases; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 4);
    std::vector<double> k(static_cast<std::size_t>(n)), x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      k[static_cast<std::size_t>(j)] = rng.uniform(-1.0, 1.0);
      x[static_cast<std::size_t>(j)] = rng.uniform(-1.0, 1.0);
    }
    const double sigma = rng.uniform(0.3, 2.0);
    const double y = rng.uniform(-2.0, 2.0);
    const auto grad = lnp_gaussian_logpolicy_grad(k, sigma, x, y);
    auto logpi = [&](const std::vector<double>& kk) {
      const double lam = dot(kk, x);
      return -(y - lam) * (y - lam) / (2.0 * sigma * sigma);
    };
    for (int j = 0; j < n; ++j) {
      auto up = k, dn = k;
      up[static_cast<std::size_t>(j)] += opt.fd_step;
      dn[static_cast<std::size_t>(j)] -= opt.fd_step;
      const double fd = (logpi(up) - logpi(dn)) / (2.0 * opt.fd_step);
      verify_detail::fold_worst(worst, verify_detail::rel_err(grad[static_cast<std::size_t>(j)], fd));
    }
    // Bernoulli variant: update with alpha=delta=1 equals d log pi / dk.
    const int yb = rng.uniform01() < 0.5 ? -1 : 1;
    const auto upd = lnp_bernoulli_update(k, x, yb, 1.0, 1.0);
    auto logpb = [&](const std::vector<double>& kk) {
      const double lam = sigmoid(dot(kk, x));
      return yb == 1 ? std::log(lam) : std::log(1.0 - lam);
    };
    for (int j = 0; j < n; ++j) {
      auto up = k, dn = k;
      up[static_cast<std::size_t>(j)] += opt.fd_step;
      dn[static_cast<std::size_t>(j)] -= opt.fd_step;
      const double fd = (logpb(up) - logpb(dn)) / (2.0 * opt.fd_step);
      verify_detail::fold_worst(worst, verify_detail::rel_err(upd[static_cast<std::size_t>(j)], fd));
    }
  }
  return verify_detail::fd_check("gradient: linear-nonlinear policies", worst, opt.fd_tol);
}

// Composite tape graph exercising every primitive, checked against central
// differences of the scalar output w.r.t. the leaf inputs.
inline CheckResult check_tape_gradient(const VerifyOptions& opt) {
  RngStream rng(opt.seed + 5);
  double worst = 0.0;
  for (int t = 0; t < opt.fd_cases; ++t) {
    std::vector<double> w(6), x(3), b(2);
    for (double& v : w) v = rng.uniform(-1.0, 1.0);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    for (double& v : b) v = rng.uniform(-1.0, 1.0);
    auto eval = [&](const std::vector<double>& wv, const std::vector<double>& xv,
                    const std::vector<double>& bv) {
      Tape t2;
      const auto wn = t2.value_matrix({wv.begin(), wv.end()}, 2, 3);
      const auto xn = t2.value({xv.begin(), xv.end()});
      const auto bn = t2.value({bv.begin(), bv.end()});
      const auto h = t2.sigmoid(t2.add(t2.matvec(wn, xn), bn));
      const auto e = t2.exp(t2.scale(h, 0.5));
      const auto sm = t2.softmax(e);
      const auto lg = t2.log(sm);
      const auto g = t2.gather(lg, 0);
      const auto bc = t2.broadcast(g, 2);
      const auto m = t2.mul(bc, t2.sub(h, e));
      std::vector<Tape::NodeId> parts{m, sm};
      const auto out = t2.sum(t2.concat(parts));
      return t2.val(out)[0];
    };
    {
      Tape t3;
      const auto wn = t3.value_matrix({w.begin(), w.end()}, 2, 3);
      const auto xn = t3.value({x.begin(), x.end()});
      const auto bn = t3.value({b.begin(), b.end()});
      const auto h = t3.sigmoid(t3.add(t3.matvec(wn, xn), bn));
      const auto e = t3.exp(t3.scale(h, 0.5));
      const auto sm = t3.softmax(e);
      const auto lg = t3.log(sm);
      const auto g = t3.gather(lg, 0);
      const auto bc = t3.broadcast(g, 2);
      const auto m = t3.mul(bc, t3.sub(h, e));
      std::vector<Tape::NodeId> parts{m, sm};
      const auto out = t3.sum(t3.concat(parts));
      t3.backward(out);
      auto check_leaf = [&](Tape::NodeId leaf, std::vector<double> base, int which) {
        const auto adj = t3.adjoint(leaf);
        for (std::size_t j = 0; j < base.size(); ++j) {
          auto up = base, dn = base;
          up[j] += opt.fd_step;
          dn[j] -= opt.fd_step;
          double fu, fd_;
          if (which == 0) {
            fu = eval(up, x, b);
            fd_ = eval(dn, x, b);
          } else if (which == 1) {
            fu = eval(w, up, b);
            fd_ = eval(w, dn, b);
          } else {
            fu = eval(w, x, up);
            fd_ = eval(w, x, dn);
          }
          const double fd = (fu - fd_) / (2.0 * opt.fd_step);
          verify_detail::fold_worst(worst, verify_detail::rel_err(adj[j], fd));
        }
      };
      check_leaf(wn, w, 0);
      check_leaf(xn, x, 1);
      check_leaf(bn, b, 2);
    }
  }
  return verify_detail::fd_check("gradient: tape primitives", worst, opt.fd_tol);
}

// Sampled expected update vs exact enumeration on a small fixed-state bandit,
// reported as the worst deviation in standard-error units.
inline CheckResult check_mc_vs_enumeration(const VerifyOptions& opt) {
  const RngStream master(opt.seed + 6);
  TopologySpec topo;
  topo.input_size = 2;
  topo.hidden_sizes = {4};
  topo.hidden_train_lens = {1};
  topo.output_size = 2;
  NetworkInstance net(topo, master.split(0), 0.5);
  BanditOracle oracle;
  oracle.state = encode_binary(1, 2);
  oracle.expected_delta = {1.0, -0.5};
  oracle.tau_act = 0.5;
  RngStream readout = master.split(1);
  const auto analytic = expected_update_analytic(net, oracle);
  const auto mc = expected_coagent_update_mc(net, oracle, opt.mc_samples, readout);
  double worst = 0.0;
  for (std::size_t c = 0; c < analytic.size(); ++c) {
    for (std::size_t j = 0; j < analytic[c].size(); ++j) {
      const double se = std::max(mc.se[c][j], 1e-12);
      worst = std::max(worst, std::abs(mc.mean[c][j] - analytic[c][j]) / se);
    }
  }
  CheckResult r;
  r.name = "oracle: sampled vs enumerated updates";
  r.observed = worst;
  r.tolerance = 4.0;  // standard errors
  r.pass = worst <= r.tolerance;
  r.detail = "worst deviation in SE units over all parameters";
  return r;
}

// Tabular TD(lambda) on the five-state symmetric random walk against the
// closed-form values k/6.
inline CheckResult check_random_walk(const VerifyOptions& opt) {
  RngStream rng(opt.seed + 7);
  std::vector<double> v(5, 0.0);
  std::vector<double> trace(5, 0.0);
  const double lambda = 0.8;
  for (int episode = 0; episode < 10000; ++episode) {
    const double alpha = 0.5 / (1.0 + 0.5 * episode);
    int s = 2;
    trace.assign(5, 0.0);
    while (true) {
      const int next = rng.uniform01() < 0.5 ? s - 1 : s + 1;
      const double reward = next == 5 ? 1.0 : 0.0;
      const bool terminal = next < 0 || next == 5;
      const double delta = reward + (terminal ? 0.0 : v[static_cast<std::size_t>(next)]) -
                           v[static_cast<std::size_t>(s)];
      for (double& e : trace) e *= lambda;
      trace[static_cast<std::size_t>(s)] += 1.0;
      for (int i = 0; i < 5; ++i) {
        v[static_cast<std::size_t>(i)] += alpha * delta * trace[static_cast<std::size_t>(i)];
      }
      if (terminal) break;
      s = next;
    }
  }
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    worst = std::max(worst, std::abs(v[static_cast<std::size_t>(i)] - (i + 1) / 6.0));
  }
  CheckResult r;
  r.name = "critic: random-walk state values";
  r.observed = worst;
  r.tolerance = 1e-2;
  r.pass = worst <= r.tolerance;
  return r;
}

// argmax(log pi + g) frequencies vs pi in total-variation distance.
inline CheckResult check_gumbel_argmax(const VerifyOptions& opt) {
  RngStream rng(opt.seed + 8);
  const std::vector<std::vector<double>> logit_sets = {
      {0.0, 0.0, 0.0}, {1.0, 0.0, -1.0}, {2.0, 0.5, 0.5}};
  double worst = 0.0;
  for (const auto& logits : logit_sets) {
    const auto pi = softmax(logits);
    std::vector<int> counts(logits.size(), 0);
    for (int s = 0; s < opt.gumbel_draws; ++s) {
      int best = 0;
      double best_v = -1e300;
      for (std::size_t i = 0; i < logits.size(); ++i) {
        const double v = std::log(pi[i]) + gumbel_sample(rng);
        if (v > best_v) {
          best_v = v;
          best = static_cast<int>(i);
        }
      }
      counts[static_cast<std::size_t>(best)]++;
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      tv += std::abs(static_cast<double>(counts[i]) / opt.gumbel_draws - pi[i]);
    }
    worst = std::max(worst, tv / 2.0);
  }
  CheckResult r;
  r.name = "sampling: gumbel argmax fidelity";
  r.observed = worst;
  r.tolerance = 0.01;
  r.pass = worst <= r.tolerance;
  return r;
}

inline std::vector<CheckResult> run_verify(const VerifyOptions& opt = {}) {
  std::vector<CheckResult> out;
  out.push_back(check_ising_gradient(opt));
  out.push_back(check_graded_gradient(opt));
  out.push_back(check_lif_gradient(opt));
  out.push_back(check_glm_gradient(opt));
  out.push_back(check_lnp_gradient(opt));
  out.push_back(check_tape_gradient(opt));
  out.push_back(check_mc_vs_enumeration(opt));
  out.push_back(check_random_walk(opt));
  out.push_back(check_gumbel_argmax(opt));
  return out;
}

inline bool print_verify(const std::vector<CheckResult>& results, std::ostream& os) {
  bool all = true;
  for (const auto& r : results) {
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (observed " << r.observed
       << ", tolerance " << r.tolerance << ")";
    if (!r.detail.empty()) os << " - " << r.detail;
    os << '\n';
    all = all && r.pass;
  }
  os << (all ? "verification passed" : "verification FAILED") << '\n';
  return all;
}

}  // namespace spikerl
