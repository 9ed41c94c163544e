#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "spikerl/rng.hpp"

using namespace spikerl;

TEST_CASE("same seed reproduces the exact sample sequence") {
  RngStream a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(a.next_u64() == b.next_u64());
  }
  RngStream c(12345), d(54321);
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) any_diff = any_diff || c.next_u64() != d.next_u64();
  REQUIRE(any_diff);
}

TEST_CASE("split streams are independent of parent draw position") {
  RngStream parent(7);
  RngStream child_before = parent.split(3);
  parent.uniform01();
  parent.uniform01();
  RngStream child_after = parent.split(3);
  for (int i = 0; i < 100; ++i) {
    REQUIRE(child_before.next_u64() == child_after.next_u64());
  }
  // distinct keys give distinct sequences
  RngStream c0 = parent.split(0);
  RngStream c1 = parent.split(1);
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) any_diff = any_diff || c0.next_u64() != c1.next_u64();
  REQUIRE(any_diff);
}

TEST_CASE("uniform01 stays in [0,1)") {
  RngStream rng(99);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("gumbel transform identities") {
  REQUIRE(gumbel_from_uniform(std::exp(-1.0)) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(gumbel_from_uniform(std::exp(-std::exp(1.0))) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("gumbel sample mean approaches the Euler-Mascheroni constant") {
  RngStream rng(2718);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += gumbel_sample(rng);
  REQUIRE(sum / n == Catch::Approx(0.57721566).margin(0.01));
}

TEST_CASE("gumbel argmax matches softmax within TV 0.01") {
  RngStream rng(31);
  const std::vector<double> logits{0.4, -0.3, 1.1};
  std::vector<double> pi(3);
  double z = 0.0;
  for (double l : logits) z += std::exp(l);
  for (int i = 0; i < 3; ++i) pi[i] = std::exp(logits[i]) / z;
  const int n = 100000;
  std::vector<int> counts(3, 0);
  for (int s = 0; s < n; ++s) {
    int best = 0;
    double best_v = -1e300;
    for (int i = 0; i < 3; ++i) {
      const double v = logits[i] + gumbel_sample(rng);
      if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    counts[best]++;
  }
  double tv = 0.0;
  for (int i = 0; i < 3; ++i) tv += std::abs(double(counts[i]) / n - pi[i]);
  REQUIRE(tv / 2.0 <= 0.01);
}

TEST_CASE("bernoulli sampler") {
  RngStream rng(5);
  REQUIRE(sample_bernoulli(1.0, rng) == 1);
  REQUIRE(sample_bernoulli(0.0, rng) == -1);
  REQUIRE_THROWS_AS(sample_bernoulli(1.5, rng), std::invalid_argument);
  REQUIRE_THROWS_AS(sample_bernoulli(-0.1, rng), std::invalid_argument);
  int plus = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) plus += sample_bernoulli(0.3, rng) == 1 ? 1 : 0;
  REQUIRE(double(plus) / n == Catch::Approx(0.3).margin(0.005));
}

TEST_CASE("categorical sampler validates and converges") {
  RngStream rng(6);
  std::vector<double> probs{0.2, 0.5, 0.3};
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) counts[sample_categorical(probs, rng)]++;
  for (int i = 0; i < 3; ++i) {
    REQUIRE(double(counts[i]) / n == Catch::Approx(probs[i]).margin(0.01));
  }
  std::vector<double> bad{0.2, 0.2};
  REQUIRE_THROWS_AS(sample_categorical(bad, rng), std::invalid_argument);
}

TEST_CASE("gaussian sampler moments") {
  RngStream rng(7);
  REQUIRE_THROWS_AS(sample_gaussian(0.0, 0.0, rng), std::invalid_argument);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_gaussian(2.0, 1.5, rng);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  REQUIRE(mean == Catch::Approx(2.0).margin(0.02));
  REQUIRE(var == Catch::Approx(2.25).margin(0.05));
}

TEST_CASE("poisson sampler mean") {
  RngStream rng(8);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_poisson(3.5, rng);
  REQUIRE(sum / n == Catch::Approx(3.5).margin(0.05));
}
