#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "ccm/rng.hpp"

using ccm::Rng;

TEST_CASE("derive_seed is deterministic and collision-free over a run") {
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 10000; ++k) seen.insert(ccm::derive_seed(42, k));
  REQUIRE(seen.size() == 10000);
  REQUIRE(ccm::derive_seed(42, 7) == ccm::derive_seed(42, 7));
  REQUIRE(ccm::derive_seed(42, 7) != ccm::derive_seed(43, 7));
  REQUIRE(ccm::derive_seed(42, 7) != ccm::derive_seed(42, 8));
}

TEST_CASE("same seed gives identical streams") {
  Rng a(123), b(123);
  for (int i = 0; i < 200; ++i) {
    REQUIRE(a.bits() == b.bits());
    REQUIRE(a.uniform01() == b.uniform01());
    REQUIRE(a.normal() == b.normal());
    REQUIRE(a.gamma(2.5, 1.5) == b.gamma(2.5, 1.5));
  }
}

TEST_CASE("uniform01 stays in [0,1) with correct mean") {
  Rng r(7);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
  }
  REQUIRE(std::fabs(s / n - 0.5) < 0.005);
}

TEST_CASE("below covers its range uniformly") {
  Rng r(11);
  std::vector<int> counts(5, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.below(5);
    REQUIRE(v < 5);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int c : counts) REQUIRE(std::fabs(c - n / 5.0) < 5.0 * std::sqrt(n * 0.2 * 0.8));
  REQUIRE_THROWS(r.below(0));
}

TEST_CASE("bernoulli matches its rate") {
  Rng r(13);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += r.bernoulli(0.3) ? 1 : 0;
  REQUIRE(std::fabs(hits / static_cast<double>(n) - 0.3) < 0.01);
}

TEST_CASE("normal moments") {
  Rng r(17);
  const int n = 200000;
  std::vector<double> x(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = r.normal();
    s += x[static_cast<std::size_t>(i)];
  }
  const double mean = s / n;
  double v = 0.0;
  for (double xi : x) v += (xi - mean) * (xi - mean);
  v /= n - 1;
  REQUIRE(std::fabs(mean) < 0.02);
  REQUIRE(std::fabs(v - 1.0) < 0.03);
}

TEST_CASE("gamma moments for both shape regimes") {
  Rng r(19);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    s1 += r.gamma(3.0, 2.0);
    s2 += r.gamma(0.3, 1.0);
  }
  REQUIRE(std::fabs(s1 / n - 1.5) < 0.02);
  REQUIRE(std::fabs(s2 / n - 0.3) < 0.01);
  REQUIRE_THROWS(r.gamma(0.0, 1.0));
  REQUIRE_THROWS(r.gamma(1.0, 0.0));
}

TEST_CASE("log_gamma_draw matches gamma in expectation and stays finite") {
  Rng r(23);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double lg = r.log_gamma_draw(0.05);
    REQUIRE(std::isfinite(lg));
    s += std::exp(lg);
  }
  REQUIRE(std::fabs(s / n - 0.05) < 0.005);
}

TEST_CASE("dirichlet draws are simplex points with the right mean") {
  Rng r(29);
  const std::vector<double> alpha = {2.0, 3.0, 5.0};
  std::vector<double> x(3), m(3, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    r.dirichlet(alpha, x);
    double s = 0.0;
    for (double xi : x) {
      REQUIRE(xi >= 0.0);
      REQUIRE(xi <= 1.0);
      s += xi;
    }
    REQUIRE(std::fabs(s - 1.0) < 1e-12);
    for (int k = 0; k < 3; ++k) m[static_cast<std::size_t>(k)] += x[static_cast<std::size_t>(k)];
  }
  REQUIRE(std::fabs(m[0] / n - 0.2) < 0.005);
  REQUIRE(std::fabs(m[1] / n - 0.3) < 0.005);
  REQUIRE(std::fabs(m[2] / n - 0.5) < 0.005);
}

TEST_CASE("dirichlet survives tiny concentrations") {
  Rng r(31);
  const std::vector<double> alpha = {1e-4, 1e-4, 1e-4};
  std::vector<double> x(3);
  for (int i = 0; i < 1000; ++i) {
    r.dirichlet(alpha, x);
    double s = 0.0;
    for (double xi : x) {
      REQUIRE(std::isfinite(xi));
      s += xi;
    }
    REQUIRE(std::fabs(s - 1.0) < 1e-9);
  }
}

TEST_CASE("categorical respects cumulative weights") {
  Rng r(37);
  const std::vector<double> cdf = {0.2, 0.5, 1.0};
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const std::size_t k = r.categorical(cdf);
    REQUIRE(k < 3);
    ++counts[k];
  }
  REQUIRE(std::fabs(counts[0] / static_cast<double>(n) - 0.2) < 0.01);
  REQUIRE(std::fabs(counts[1] / static_cast<double>(n) - 0.3) < 0.01);
  REQUIRE(std::fabs(counts[2] / static_cast<double>(n) - 0.5) < 0.01);
}

TEST_CASE("state save and restore replays the stream") {
  Rng r(41);
  for (int i = 0; i < 17; ++i) r.bits();
  const std::string snap = r.save_state();
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 50; ++i) first.push_back(r.bits());
  r.restore_state(snap);
  for (int i = 0; i < 50; ++i) REQUIRE(r.bits() == first[static_cast<std::size_t>(i)]);
  REQUIRE_THROWS(r.restore_state("not a state"));
}
