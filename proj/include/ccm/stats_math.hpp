#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace ccm {

inline double log_factorial(std::int64_t k) {
  return std::lgamma(static_cast<double>(k) + 1.0);
}

inline double lchoose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -INFINITY;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

// Numerically stable sum of exp(values) in log space.
inline double logsumexp(std::span<const double> v) {
  double mx = -INFINITY;
  for (double x : v)
    if (x > mx) mx = x;
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Streaming variant for long accumulations.
class LogSumExp {
public:
  void add(double x) {
    if (x == -INFINITY) return;
    if (x <= mx_) {
      s_ += std::exp(x - mx_);
    } else {
      s_ = s_ * std::exp(mx_ - x) + 1.0;
      mx_ = x;
    }
  }
  double value() const { return s_ > 0.0 ? mx_ + std::log(s_) : -INFINITY; }

private:
  double mx_ = -INFINITY;
  double s_ = 0.0;
};

inline double poisson_logpmf(std::int64_t k, double lambda) {
  if (k < 0) return -INFINITY;
  if (!(lambda > 0.0)) return k == 0 && lambda == 0.0 ? 0.0 : -INFINITY;
  return static_cast<double>(k) * std::log(lambda) - lambda - log_factorial(k);
}

// Negative binomial with size r and mean mu.
inline double negbin_logpmf(std::int64_t k, double size, double mu) {
  if (k < 0) return -INFINITY;
  const double r = size;
  const double p = r / (r + mu); // success prob
  return std::lgamma(k + r) - std::lgamma(r) - log_factorial(k) + r * std::log(p) +
         static_cast<double>(k) * std::log1p(-p);
}

// Negative-binomial pmf over {0, ..., len-1}, renormalized to sum to 1.
// Used to build degree-probability vectors with a target mean and dispersion.
inline std::vector<double> nb_truncated_pmf(double size, double mu, int len) {
  if (!(size > 0.0) || !(mu > 0.0))
    throw std::invalid_argument("nb_truncated_pmf: size and mu must be positive");
  if (len <= 0) throw std::invalid_argument("nb_truncated_pmf: len must be positive");
  std::vector<double> p(static_cast<std::size_t>(len));
  double z = 0.0;
  for (int k = 0; k < len; ++k) {
    p[static_cast<std::size_t>(k)] = std::exp(negbin_logpmf(k, size, mu));
    z += p[static_cast<std::size_t>(k)];
  }
  for (double& v : p) v /= z;
  return p;
}

// Multinomial log-pmf; counts with zero probability cells give -inf, and
// 0*log(0) is treated as zero.
inline double multinomial_logpmf(std::span<const std::int64_t> counts,
                                 std::span<const double> prob) {
  if (counts.size() != prob.size())
    throw std::invalid_argument("multinomial_logpmf: size mismatch");
  std::int64_t total = 0;
  double lp = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::int64_t c = counts[i];
    if (c < 0) throw std::invalid_argument("multinomial_logpmf: negative count");
    total += c;
    if (c == 0) continue;
    if (!(prob[i] > 0.0)) return -INFINITY;
    lp += static_cast<double>(c) * std::log(prob[i]) - log_factorial(c);
  }
  return lp + log_factorial(total);
}

inline double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double variance_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Linear-interpolation quantile on a copy of the data (R type 7).
inline double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile_of: empty data");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile_of: q outside [0,1]");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz).
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-15;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

} // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double betai(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const double front = std::exp(lbeta + a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::betacf(a, b, x) / a;
  return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Two-sided p-value for a Student-t statistic.
inline double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_two_sided_p: df must be positive");
  const double x = df / (df + t * t);
  return betai(df / 2.0, 0.5, x);
}

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Welch two-sample test from summary statistics; n1/n2 may be effective
// (autocorrelation-adjusted) sample sizes.
inline WelchResult welch_t_test(double m1, double v1, double n1, double m2, double v2,
                                double n2) {
  WelchResult r;
  const double a = v1 / n1, b = v2 / n2;
  const double se2 = a + b;
  if (se2 <= 0.0) {
    r.t = (m1 == m2) ? 0.0 : INFINITY;
    r.df = 1.0;
    r.p = (m1 == m2) ? 1.0 : 0.0;
    return r;
  }
  r.t = (m1 - m2) / std::sqrt(se2);
  r.df = se2 * se2 / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0));
  if (!(r.df > 0.0) || !std::isfinite(r.df)) r.df = 1.0;
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

} // namespace ccm
