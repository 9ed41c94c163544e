#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "spikerl/numeric.hpp"
#include "spikerl/rng.hpp"

using namespace spikerl;

TEST_CASE("sigmoid identities and saturation") {
  REQUIRE(sigmoid(0.0) == Catch::Approx(0.5));
  REQUIRE(sigmoid(std::log(3.0)) == Catch::Approx(0.75).epsilon(1e-12));
  const double low = sigmoid(-50.0);
  REQUIRE(low > 0.0);
  REQUIRE(low < 1e-20);
  // no overflow deep into the tails
  REQUIRE(sigmoid(700.0) == 1.0);
  REQUIRE(sigmoid(-700.0) >= 0.0);
  REQUIRE(std::isfinite(sigmoid(700.0)));
  REQUIRE(std::isfinite(sigmoid(-700.0)));
}

TEST_CASE("softmax basics") {
  const std::vector<double> flat{1.7, 1.7, 1.7};
  const auto u = softmax(flat);
  for (double p : u) REQUIRE(p == Catch::Approx(1.0 / 3.0).epsilon(1e-12));

  const std::vector<double> two{std::log(2.0), 0.0};
  const auto p2 = softmax(two);
  REQUIRE(p2[0] == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  REQUIRE(p2[1] == Catch::Approx(1.0 / 3.0).epsilon(1e-12));

  // sharp temperature approaches argmax
  const std::vector<double> v{5.0, 1.0, 1.0};
  const auto sharp = softmax(v, 1e-3);
  REQUIRE(sharp[0] == Catch::Approx(1.0).margin(1e-9));

  REQUIRE_THROWS_WITH(softmax(std::vector<double>{}), Catch::Matchers::ContainsSubstring("empty logits"));
  REQUIRE_THROWS_AS(softmax(flat, 0.0), std::invalid_argument);
}

TEST_CASE("softmax simplex property on random inputs") {
  RngStream rng(10);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + int(rng.uniform01() * 8);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-30.0, 30.0);
    const auto p = softmax(v, rng.uniform(0.05, 2.0));
    double sum = 0.0;
    for (double x : p) {
      REQUIRE(x >= 0.0);
      REQUIRE(x <= 1.0);
      sum += x;
    }
    REQUIRE(std::abs(sum - 1.0) <= 1e-12);
    // invariance under constant shift
    std::vector<double> shifted = v;
    for (double& x : shifted) x += 13.7;
    const auto q = softmax(shifted);
    const auto p1 = softmax(v);
    for (int i = 0; i < n; ++i) REQUIRE(q[i] == Catch::Approx(p1[i]).margin(1e-12));
  }
}

TEST_CASE("causal convolution identities") {
  const std::vector<double> sig{1.0, -1.0, 1.0};
  const std::vector<double> ident{1.0};
  REQUIRE(conv1d_causal(sig, ident) == sig);

  const std::vector<double> impulse{1.0, 0.0, 0.0};
  const std::vector<double> kern{0.5, 0.25};
  const auto out = conv1d_causal(impulse, kern);
  REQUIRE(out[0] == Catch::Approx(0.5));
  REQUIRE(out[1] == Catch::Approx(0.25));
  REQUIRE(out[2] == Catch::Approx(0.0));

  REQUIRE_THROWS_AS(conv1d_causal(sig, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("causal convolution equals the brute-force double loop") {
  RngStream rng(11);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + int(rng.uniform01() * 10);
    const int k = 1 + int(rng.uniform01() * 4);
    std::vector<double> sig(n), kern(k);
    for (double& x : sig) x = rng.uniform(-2.0, 2.0);
    for (double& x : kern) x = rng.uniform(-2.0, 2.0);
    const auto fast = conv1d_causal(sig, kern);
    for (int i = 0; i < n; ++i) {
      double brute = 0.0;
      for (int j = 0; j < k; ++j) {
        const int idx = i - j;
        if (idx >= 0) brute += kern[j] * sig[idx];
      }
      REQUIRE(fast[i] == Catch::Approx(brute).margin(1e-12));
      REQUIRE(conv1d_causal_at(sig, kern, i) == Catch::Approx(brute).margin(1e-12));
    }
    REQUIRE(conv1d_causal_at(sig, kern, -1) == 0.0);
  }
}
