#pragma once
// MCMC chain diagnostics: Geweke convergence z-score with spectral variance
// estimates, effective sample size via initial-positive-sequence truncation,
// Hellinger distance between discrete distributions, and a report writer that
// renders trace plots and a per-parameter diagnostics CSV.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccm/csv.hpp"
#include "ccm/errors.hpp"
#include "ccm/stats_math.hpp"
#include "ccm/svg.hpp"

namespace ccm {

struct GewekeOptions {
  double first_frac = 0.1;   // leading window fraction
  double last_frac = 0.5;    // trailing window fraction
  double min_variance = 1e-12;  // below this a window counts as degenerate
};

namespace detail {

// Biased (1/n) autocovariance at lag k.
inline double autocovariance(std::span<const double> x, double mean, std::size_t k) {
  double s = 0.0;
  for (std::size_t i = 0; i + k < x.size(); ++i) {
    s += (x[i] - mean) * (x[i + k] - mean);
  }
  return s / static_cast<double>(x.size());
}

inline double population_variance(std::span<const double> x) {
  return autocovariance(x, mean_of(x), 0);
}

// Spectral density at frequency zero, estimated with a Bartlett window of
// bandwidth floor(sqrt(len)). Equals the plain variance for bandwidth <= 1.
inline double spectral_variance_at_zero(std::span<const double> x) {
  const double m = mean_of(x);
  const auto b = static_cast<std::size_t>(
      std::floor(std::sqrt(static_cast<double>(x.size()))));
  double s = autocovariance(x, m, 0);
  for (std::size_t k = 1; k < b && k < x.size(); ++k) {
    const double w = 1.0 - static_cast<double>(k) / static_cast<double>(b);
    s += 2.0 * w * autocovariance(x, m, k);
  }
  // The windowed sum can dip below zero on pathological inputs; the variance
  // it estimates cannot.
  return std::max(s, 0.0);
}

}  // namespace detail

// Geweke convergence diagnostic: compares the mean of the leading window
// against the mean of the trailing window, standardized by spectral variance
// estimates of each window. Returns std::nullopt when either window has too
// little variability for the variance estimate to be meaningful.
inline std::optional<double> geweke_z(std::span<const double> chain,
                                      const GewekeOptions& opt = {}) {
  if (chain.size() < 20) {
    throw DataError("geweke_z: chain needs at least 20 samples, got " +
                    std::to_string(chain.size()));
  }
  if (!(opt.first_frac > 0.0) || !(opt.last_frac > 0.0) ||
      opt.first_frac + opt.last_frac > 1.0) {
    throw DataError("geweke_z: window fractions must be positive and sum to at most 1");
  }
  const auto n = chain.size();
  const auto n1 = static_cast<std::size_t>(std::floor(opt.first_frac * static_cast<double>(n)));
  const auto n2 = static_cast<std::size_t>(std::floor(opt.last_frac * static_cast<double>(n)));
  if (n1 < 2 || n2 < 2) {
    throw DataError("geweke_z: window fractions leave fewer than 2 samples in a window");
  }
  const auto first = chain.subspan(0, n1);
  const auto last = chain.subspan(n - n2, n2);
  if (detail::population_variance(first) < opt.min_variance ||
      detail::population_variance(last) < opt.min_variance) {
    return std::nullopt;  // not computable: no or minimal variability
  }
  const double s1 = std::max(detail::spectral_variance_at_zero(first), 1e-300);
  const double s2 = std::max(detail::spectral_variance_at_zero(last), 1e-300);
  const double se = std::sqrt(s1 / static_cast<double>(n1) + s2 / static_cast<double>(n2));
  return (mean_of(first) - mean_of(last)) / se;
}

// Effective sample size: n / (1 + 2 * sum of autocorrelations), where the sum
// runs over consecutive lag pairs (gamma_{2m} + gamma_{2m+1}) and truncates at
// the first non-positive pair. Negative lag-1 autocorrelation legitimately
// yields ESS > n (super-efficient, e.g. antithetic chains).
inline double ess(std::span<const double> chain) {
  if (chain.size() < 20) {
    throw DataError("ess: chain needs at least 20 samples, got " +
                    std::to_string(chain.size()));
  }
  const auto n = chain.size();
  const double m = mean_of(chain);
  const double g0 = detail::autocovariance(chain, m, 0);
  if (g0 < 1e-300) throw DataError("ess: chain is constant");
  double pair_sum = 0.0;
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    const double pair = detail::autocovariance(chain, m, k) +
                        detail::autocovariance(chain, m, k + 1);
    if (pair <= 0.0) break;
    pair_sum += pair;
  }
  double tau = 2.0 * pair_sum / g0 - 1.0;
  // Strong antithetic structure can drive the truncated sum to a non-positive
  // integrated time; cap super-efficiency at tau = 2/n (ESS <= n^2/2).
  tau = std::max(tau, 2.0 / static_cast<double>(n));
  return static_cast<double>(n) / tau;
}

// Hellinger distance between two probability vectors of equal length:
// H = sqrt(sum (sqrt(p_i) - sqrt(q_i))^2) / sqrt(2), in [0, 1].
inline double hellinger(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DataError("hellinger: length mismatch (" + std::to_string(p.size()) +
                    " vs " + std::to_string(q.size()) + ")");
  }
  double sp = 0.0, sq = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw DataError("hellinger: negative or NaN entry in first vector");
    sp += v;
  }
  for (double v : q) {
    if (!(v >= 0.0)) throw DataError("hellinger: negative or NaN entry in second vector");
    sq += v;
  }
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9) {
    throw DataError(
        "hellinger: inputs must each sum to 1 within 1e-9 "
        "(use hellinger_from_counts for raw counts)");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    s += d * d;
  }
  return std::min(1.0, std::sqrt(0.5 * s));
}

// Hellinger distance between two count histograms; each is normalized by its
// total first. A zero-total histogram is an error rather than a silent NaN.
inline double hellinger_from_counts(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DataError("hellinger_from_counts: length mismatch (" + std::to_string(p.size()) +
                    " vs " + std::to_string(q.size()) + ")");
  }
  double sp = 0.0, sq = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw DataError("hellinger_from_counts: negative or NaN count");
    sp += v;
  }
  for (double v : q) {
    if (!(v >= 0.0)) throw DataError("hellinger_from_counts: negative or NaN count");
    sq += v;
  }
  if (sp <= 0.0 || sq <= 0.0) throw DataError("hellinger_from_counts: zero-total counts");
  std::vector<double> pn(p.size()), qn(q.size());
  for (std::size_t i = 0; i < p.size(); ++i) pn[i] = p[i] / sp;
  for (std::size_t i = 0; i < q.size(); ++i) qn[i] = q[i] / sq;
  return hellinger(pn, qn);
}

// One monitored scalar chain for trace_report.
struct TraceSeries {
  std::string param_id;
  std::vector<double> values;
  // Reference value drawn as a dashed line in the trace plot; NaN = no line.
  double truth = std::numeric_limits<double>::quiet_NaN();
};

// Per-chain diagnostic row, mirroring one line of the report CSV.
struct TraceDiagnostic {
  std::string param_id;
  std::size_t n_iter = 0;
  bool computable = false;             // geweke_z produced a value
  std::optional<double> geweke;        // empty when not computable
  std::optional<double> ess_value;     // empty for constant/short chains
};

// Writes one trace SVG per series plus a diagnostics CSV with columns
// param_id,n_iter,computable,geweke_z,ess. Returns the rows it wrote.
// Pure given its inputs: no randomness, deterministic output bytes.
inline std::vector<TraceDiagnostic> trace_report(std::span<const TraceSeries> chains,
                                                 const std::string& out_dir,
                                                 const std::string& prefix = "trace") {
  const std::string base = out_dir.empty() ? std::string{} : out_dir + "/";
  std::vector<TraceDiagnostic> rows;
  rows.reserve(chains.size());
  CsvWriter csv(base + prefix + "_diagnostics.csv");
  const std::vector<std::string> header = {"param_id", "n_iter", "computable",
                                           "geweke_z", "ess"};
  csv.header(header);
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& series : chains) {
    svg_trace(base + prefix + "_" + series.param_id + ".svg", series.values,
              series.param_id, series.truth);
    TraceDiagnostic d;
    d.param_id = series.param_id;
    d.n_iter = series.values.size();
    try {
      d.geweke = geweke_z(series.values);
    } catch (const DataError&) {
      d.geweke = std::nullopt;  // chain too short
    }
    d.computable = d.geweke.has_value();
    try {
      d.ess_value = ess(series.values);
    } catch (const DataError&) {
      d.ess_value = std::nullopt;  // constant or too short
    }
    csv.row(d.param_id, d.n_iter, d.computable ? 1 : 0,
            d.geweke.value_or(kNan), d.ess_value.value_or(kNan));
    rows.push_back(std::move(d));
  }
  csv.flush();
  return rows;
}

}  // namespace ccm
