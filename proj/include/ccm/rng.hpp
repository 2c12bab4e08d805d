#pragma once

#include <cmath>
#include <bit>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccm {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-mode seed splitting: replication k of a run seeded with `master`
// gets an independent stream without any sequential draw coupling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

// All variate transforms are written out explicitly so that streams are
// reproducible across standard-library versions, not just across runs.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform on [0,1), 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection keeps the draw exactly uniform.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Marsaglia polar method; one spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Gamma(shape, rate) via Marsaglia-Tsang; shape < 1 uses the boost trick.
  double gamma(double shape, double rate = 1.0) {
    if (!(shape > 0.0) || !(rate > 0.0))
      throw std::invalid_argument("Rng::gamma: shape and rate must be positive");
    if (shape < 1.0) {
      const double u = uniform01();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  // log of a Gamma(shape, 1) draw. Stays finite for shapes as small as 1e-8,
  // where the linear-space draw would underflow to zero.
  double log_gamma_draw(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("Rng::log_gamma_draw: shape must be positive");
    if (shape >= 1.0) return std::log(gamma(shape, 1.0));
    const double u = uniform01();
    return std::log(gamma(shape + 1.0, 1.0)) + std::log(u) / shape;
  }

  // Dirichlet draw, normalized in log space so tiny concentrations survive.
  void dirichlet(std::span<const double> alpha, std::span<double> out) {
    if (alpha.size() != out.size())
      throw std::invalid_argument("Rng::dirichlet: size mismatch");
    const std::size_t k = alpha.size();
    std::vector<double> lg(k);
    double mx = -INFINITY;
    for (std::size_t i = 0; i < k; ++i) {
      lg[i] = log_gamma_draw(alpha[i]);
      if (lg[i] > mx) mx = lg[i];
    }
    if (!std::isfinite(mx)) throw std::runtime_error("Rng::dirichlet: degenerate draw");
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::exp(lg[i] - mx);
    const double lse = mx + std::log(s);
    for (std::size_t i = 0; i < k; ++i) out[i] = std::exp(lg[i] - lse);
  }

  // Index draw from a categorical law given its cumulative weights
  // (cdf.back() need not be exactly 1; draws scale by the total).
  std::size_t categorical(std::span<const double> cdf) {
    if (cdf.empty()) throw std::invalid_argument("Rng::categorical: empty cdf");
    const double u = uniform01() * cdf.back();
    std::size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cdf[mid] <= u) lo = mid + 1; else hi = mid;
    }
    return lo;
  }

  std::string save_state() const {
    std::ostringstream os;
    os << eng_ << ' ' << (has_spare_ ? 1 : 0) << ' ' << std::bit_cast<std::uint64_t>(spare_);
    return os.str();
  }

  void restore_state(const std::string& s) {
    std::istringstream is(s);
    int flag = 0;
    std::uint64_t bits = 0;
    is >> eng_ >> flag >> bits;
    if (is.fail()) throw std::runtime_error("Rng::restore_state: malformed state");
    has_spare_ = flag != 0;
    spare_ = std::bit_cast<double>(bits);
  }

private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace ccm
