#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ccm/csv.hpp"
#include "ccm/graph.hpp"
#include "ccm/model.hpp"
#include "ccm/rng.hpp"
#include "ccm/sampler.hpp"
#include "ccm/stats_math.hpp"

namespace ccm {

struct GibbsConfig {
  std::int64_t outer_iterations = 1000;
  std::int64_t outer_burn_in = 100;
  // Inner MH proposals per outer iteration = factor x number of unknown dyads.
  double inner_sweep_factor = 1.0;
  std::uint64_t seed = 1;
  double tnt_edge_prob = 0.5;
  bool paper_faithful_acceptance = false;
  // Optional normalizing-weight correction: log W of the flat parameter
  // vector (theta cells for the degree model; lambda then alpha cells for the
  // mixing model). When set, parameter updates become an independence MH step
  // with the conjugate draw as proposal; when empty, W is treated as constant.
  std::function<double(std::span<const double>)> log_w;
};

inline void validate_config(const GibbsConfig& cfg) {
  if (cfg.outer_iterations <= 0) throw DataError("gibbs: outer_iterations must be positive");
  if (cfg.outer_burn_in < 0 || cfg.outer_burn_in >= cfg.outer_iterations)
    throw DataError("gibbs: need 0 <= outer_burn_in < outer_iterations");
  if (!(cfg.inner_sweep_factor > 0.0)) throw DataError("gibbs: inner_sweep_factor must be > 0");
}

struct PosteriorSample {
  std::int64_t iteration = 0;
  std::vector<double> theta;           // degree: theta cells; mixing: lambda, alpha cells
  std::vector<std::int64_t> statistic; // phi(g_c) cells
};

// Prior cell weights, broadcast from empty (default 1e-4 per cell) or a
// single value; all entries must be strictly positive so conjugate updates
// keep every cell's posterior mass positive.
inline std::vector<double> resolved_alpha0(const PriorSpec& prior, std::size_t cells) {
  std::vector<double> a;
  if (prior.dirichlet_alpha0.empty())
    a.assign(cells, 1e-4);
  else if (prior.dirichlet_alpha0.size() == 1)
    a.assign(cells, prior.dirichlet_alpha0[0]);
  else if (prior.dirichlet_alpha0.size() == cells)
    a = prior.dirichlet_alpha0;
  else
    throw DataError("prior: dirichlet_alpha0 must be empty, scalar, or one weight per cell");
  for (double v : a)
    if (!(v > 0.0)) throw DataError("prior: dirichlet_alpha0 entries must be positive");
  if (!(prior.gamma_shape > 0.0) || !(prior.gamma_rate > 0.0))
    throw DataError("prior: gamma_shape and gamma_rate must be positive");
  return a;
}

// Conjugate full conditional: theta ~ Dirichlet(alpha0 + D).
inline std::vector<double> update_theta_degree(const DegreeDistribution& d,
                                               const PriorSpec& prior, Rng& rng) {
  const auto a0 = resolved_alpha0(prior, d.counts.size());
  std::vector<double> alpha(d.counts.size());
  for (std::size_t j = 0; j < alpha.size(); ++j)
    alpha[j] = a0[j] + static_cast<double>(d.counts[j]);
  std::vector<double> theta(alpha.size());
  rng.dirichlet(alpha, theta);
  return theta;
}

// Conjugate full conditionals: lambda ~ Gamma(shape + M, rate + 1) and
// alpha ~ Dirichlet(alpha0 + cells).
inline std::pair<double, std::vector<double>> update_theta_mixing(const MixingMatrix& mm,
                                                                  const PriorSpec& prior,
                                                                  Rng& rng) {
  const auto cells = mm.cells_upper();
  const auto a0 = resolved_alpha0(prior, cells.size());
  const double lambda = rng.gamma(prior.gamma_shape + static_cast<double>(mm.total_edges()),
                                  prior.gamma_rate + 1.0);
  std::vector<double> alpha(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c)
    alpha[c] = a0[c] + static_cast<double>(cells[c]);
  std::vector<double> out(alpha.size());
  rng.dirichlet(alpha, out);
  return {lambda, out};
}

inline std::vector<std::string> parameter_names(const CongruenceMapping& mapping, int n) {
  std::vector<std::string> names;
  if (mapping.kind == MappingKind::kDegreeDistribution) {
    for (int j = 0; j < n; ++j) names.push_back("theta" + std::to_string(j));
  } else {
    names.push_back("lambda");
    const int q = mapping.labels.q();
    for (int k = 0; k < q; ++k)
      for (int l = k; l < q; ++l)
        names.push_back("alpha_" + std::to_string(k) + "_" + std::to_string(l));
  }
  return names;
}

// Gibbs sampler over (unobserved dyads, parameters): alternates a masked MH
// network sweep at fixed parameters with conjugate parameter draws at the
// current completed network.
class GibbsSampler {
public:
  GibbsSampler(Network g_o, ObservationMask mask, CcmSpec spec, GibbsConfig cfg)
      : g_o_(std::move(g_o)),
        mask_(std::move(mask)),
        spec_(std::move(spec)),
        cfg_(cfg),
        theta_rng_(derive_seed(cfg.seed, 0)) {
    validate_config(cfg_);
    validate_prior();
    if (mask_.n() != g_o_.n()) throw DataError("gibbs: mask size does not match network");
    for (const auto& [i, j] : g_o_.edges())
      if (!mask_.known(i, j))
        throw DataError("gibbs: observed network has an edge on an unknown dyad");

    initialize_theta();
    if (mask_.unknown_dyad_count() == 0) {
      fixed_state_.emplace(g_o_, spec_.mapping);
    } else {
      SamplerConfig inner;
      inner.iterations = 1; // per-step budget is driven explicitly
      inner.tnt_edge_prob = cfg_.tnt_edge_prob;
      inner.paper_faithful_acceptance = cfg_.paper_faithful_acceptance;
      inner.seed = derive_seed(cfg_.seed, 1);
      chain_.emplace(spec_, g_o_, inner, &mask_);
      sweep_ = std::max<std::int64_t>(
          1, std::llround(cfg_.inner_sweep_factor *
                          static_cast<double>(mask_.unknown_dyad_count())));
    }
  }

  // One inner masked MH sweep at the current parameters.
  void update_network() {
    if (!chain_) return;
    for (std::int64_t k = 0; k < sweep_; ++k) chain_->step();
  }

  // Conjugate parameter draw at the current completed network, with an
  // optional independence-MH correction for the normalizing weight.
  void update_parameters() {
    std::vector<double> proposal = draw_conjugate();
    if (cfg_.log_w) {
      const double log_a = cfg_.log_w(theta_) - cfg_.log_w(proposal);
      if (!(log_a >= 0.0) && !(theta_rng_.uniform01() < std::exp(log_a))) return;
    }
    apply_theta(std::move(proposal));
  }

  void step() {
    update_network();
    update_parameters();
    ++iteration_;
  }

  PosteriorSample current() const {
    return {iteration_, theta_, statistic_cells(state().statistic())};
  }

  const CcmState& state() const { return chain_ ? chain_->state() : *fixed_state_; }
  const Network& g_c() const { return state().g(); }
  std::span<const double> theta() const { return theta_; }
  std::int64_t iteration() const { return iteration_; }
  const CcmSpec& spec() const { return spec_; }
  double inner_acceptance_rate() const {
    if (!chain_ || chain_->proposed() == 0) return 0.0;
    return static_cast<double>(chain_->accepted()) / static_cast<double>(chain_->proposed());
  }

  void save_checkpoint(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "ccmnet-checkpoint 1\n";
    out << "iteration " << iteration_ << "\n";
    out << "theta " << theta_.size();
    for (double v : theta_) out << ' ' << format_double(v);
    out << "\n";
    out << "rng_theta " << theta_rng_.save_state() << "\n";
    if (chain_)
      out << "rng_chain " << chain_->rng().save_state() << "\n";
    else
      out << "rng_chain none\n";
    const auto& edges = g_c().edges();
    out << "edges " << edges.size() << "\n";
    for (const auto& [i, j] : edges) out << i << ' ' << j << "\n";
    if (!out) throw DataError("write failed: " + path);
  }

  // Restores iteration counter, parameters, RNG streams, and the completed
  // network saved by save_checkpoint on an identically constructed sampler.
  void restore_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "ccmnet-checkpoint 1")
      throw DataError(path + ": not a version-1 checkpoint");
    std::int64_t iter = 0;
    std::vector<double> theta;
    std::string rng_theta_state, rng_chain_state;
    Network g(g_o_.n());
    {
      std::string tag;
      std::size_t k = 0;
      if (!(in >> tag >> iter) || tag != "iteration")
        throw DataError(path + ": missing iteration");
      if (!(in >> tag >> k) || tag != "theta") throw DataError(path + ": missing theta");
      theta.resize(k);
      for (auto& v : theta)
        if (!(in >> v)) throw DataError(path + ": truncated theta");
      if (!(in >> tag) || tag != "rng_theta") throw DataError(path + ": missing rng_theta");
      std::getline(in, rng_theta_state);
      if (!(in >> tag) || tag != "rng_chain") throw DataError(path + ": missing rng_chain");
      std::getline(in, rng_chain_state);
      std::size_t m = 0;
      if (!(in >> tag >> m) || tag != "edges") throw DataError(path + ": missing edges");
      for (std::size_t e = 0; e < m; ++e) {
        int i = 0, j = 0;
        if (!(in >> i >> j)) throw DataError(path + ": truncated edge list");
        g.add_edge(i, j);
      }
    }
    if (theta.size() != theta_.size()) throw DataError(path + ": parameter size mismatch");
    for (std::int64_t d = 0; d < dyad_count(g.n()); ++d) {
      const auto [i, j] = dyad_from_index(g.n(), d);
      if (mask_.known(i, j) && g.has_edge(i, j) != g_o_.has_edge(i, j))
        throw DataError(path + ": network disagrees with the observed dyads");
    }

    iteration_ = iter;
    apply_theta(std::move(theta));
    theta_rng_.restore_state(trimmed(rng_theta_state));
    if (chain_) {
      if (rng_chain_state.find("none") != std::string::npos)
        throw DataError(path + ": checkpoint lacks the network-chain RNG state");
      SamplerConfig inner;
      inner.iterations = 1;
      inner.tnt_edge_prob = cfg_.tnt_edge_prob;
      inner.paper_faithful_acceptance = cfg_.paper_faithful_acceptance;
      inner.seed = derive_seed(cfg_.seed, 1);
      chain_.emplace(spec_, std::move(g), inner, &mask_);
      chain_->rng().restore_state(trimmed(rng_chain_state));
    }
  }

private:
  void validate_prior() {
    const std::size_t cells =
        spec_.mapping.kind == MappingKind::kDegreeDistribution
            ? static_cast<std::size_t>(g_o_.n())
            : static_cast<std::size_t>(spec_.mapping.labels.q() * (spec_.mapping.labels.q() + 1) / 2);
    resolved_alpha0(spec_.prior, cells);
  }

  // Posterior mean given the observed network: deterministic start.
  void initialize_theta() {
    if (spec_.mapping.kind == MappingKind::kDegreeDistribution) {
      const auto d = degree_distribution(g_o_);
      const auto a0 = resolved_alpha0(spec_.prior, d.counts.size());
      std::vector<double> theta(d.counts.size());
      double total = 0.0;
      for (std::size_t j = 0; j < theta.size(); ++j) {
        theta[j] = a0[j] + static_cast<double>(d.counts[j]);
        total += theta[j];
      }
      for (auto& v : theta) v /= total;
      apply_theta(std::move(theta));
    } else {
      const auto mm = mixing_matrix(g_o_, spec_.mapping.labels);
      const auto cells = mm.cells_upper();
      const auto a0 = resolved_alpha0(spec_.prior, cells.size());
      std::vector<double> theta;
      theta.push_back((spec_.prior.gamma_shape + static_cast<double>(mm.total_edges())) /
                      (spec_.prior.gamma_rate + 1.0));
      double total = 0.0;
      for (std::size_t c = 0; c < cells.size(); ++c) total += a0[c] + static_cast<double>(cells[c]);
      for (std::size_t c = 0; c < cells.size(); ++c)
        theta.push_back((a0[c] + static_cast<double>(cells[c])) / total);
      apply_theta(std::move(theta));
    }
  }

  std::vector<double> draw_conjugate() {
    if (spec_.mapping.kind == MappingKind::kDegreeDistribution) {
      return update_theta_degree(DegreeDistribution{state().degree_counts()}, spec_.prior,
                                 theta_rng_);
    }
    const auto [lambda, alpha] = update_theta_mixing(state().mm(), spec_.prior, theta_rng_);
    std::vector<double> theta{lambda};
    theta.insert(theta.end(), alpha.begin(), alpha.end());
    return theta;
  }

  void apply_theta(std::vector<double> theta) {
    if (spec_.mapping.kind == MappingKind::kDegreeDistribution) {
      spec_.law = MultinomialDegreeLaw(theta);
    } else {
      spec_.law = PoissonMultinomialMixingLaw(
          theta[0], std::vector<double>(theta.begin() + 1, theta.end()));
    }
    if (chain_) chain_->set_law(spec_.law);
    theta_ = std::move(theta);
  }

  static std::string trimmed(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b);
  }

  Network g_o_;
  ObservationMask mask_;
  CcmSpec spec_;
  GibbsConfig cfg_;
  Rng theta_rng_;
  std::optional<MhChain> chain_;
  std::optional<CcmState> fixed_state_;
  std::vector<double> theta_;
  std::int64_t sweep_ = 0;
  std::int64_t iteration_ = 0;
};

struct GibbsResult {
  std::vector<PosteriorSample> samples;
  std::vector<std::string> parameter_names;
  std::vector<std::string> statistic_names;
  double inner_acceptance_rate = 0.0;
};

inline GibbsResult gibbs_run(const Network& g_o, const ObservationMask& mask,
                             const CcmSpec& spec, const GibbsConfig& cfg) {
  GibbsSampler sampler(g_o, mask, spec, cfg);
  GibbsResult out;
  out.samples.reserve(static_cast<std::size_t>(cfg.outer_iterations));
  for (std::int64_t t = 0; t < cfg.outer_iterations; ++t) {
    sampler.step();
    out.samples.push_back(sampler.current());
  }
  const std::size_t cells = out.samples.front().statistic.size();
  out.parameter_names = parameter_names(spec.mapping, g_o.n());
  out.statistic_names = statistic_cell_names(spec.mapping, cells);
  out.inner_acceptance_rate = sampler.inner_acceptance_rate();
  return out;
}

struct SummaryRow {
  std::string name;
  double mean = 0.0;
  double q025 = 0.0;
  double q250 = 0.0;
  double q500 = 0.0;
  double q750 = 0.0;
  double q975 = 0.0;
};

struct PosteriorSummary {
  std::vector<SummaryRow> parameters;
  std::vector<SummaryRow> statistics;
};

namespace detail {

inline SummaryRow summary_row(std::string name, std::vector<double> values) {
  SummaryRow row;
  row.name = std::move(name);
  row.mean = mean_of(values);
  row.q025 = quantile_of(values, 0.025);
  row.q250 = quantile_of(values, 0.25);
  row.q500 = quantile_of(values, 0.5);
  row.q750 = quantile_of(values, 0.75);
  row.q975 = quantile_of(values, 0.975);
  return row;
}

} // namespace detail

inline PosteriorSummary summarize(const GibbsResult& result, std::int64_t burn_in) {
  if (burn_in < 0 || burn_in >= static_cast<std::int64_t>(result.samples.size()))
    throw DataError("summarize: need 0 <= burn_in < sample count");
  PosteriorSummary out;
  const std::size_t first = static_cast<std::size_t>(burn_in);
  const std::size_t kept = result.samples.size() - first;
  for (std::size_t p = 0; p < result.parameter_names.size(); ++p) {
    std::vector<double> v(kept);
    for (std::size_t t = 0; t < kept; ++t) v[t] = result.samples[first + t].theta[p];
    out.parameters.push_back(detail::summary_row(result.parameter_names[p], std::move(v)));
  }
  for (std::size_t c = 0; c < result.statistic_names.size(); ++c) {
    std::vector<double> v(kept);
    for (std::size_t t = 0; t < kept; ++t)
      v[t] = static_cast<double>(result.samples[first + t].statistic[c]);
    out.statistics.push_back(detail::summary_row(result.statistic_names[c], std::move(v)));
  }
  return out;
}

inline void write_posterior_csv(const std::string& path, const GibbsResult& result) {
  CsvWriter w(path);
  std::vector<std::string> head{"iteration"};
  head.insert(head.end(), result.parameter_names.begin(), result.parameter_names.end());
  head.insert(head.end(), result.statistic_names.begin(), result.statistic_names.end());
  w.header(head);
  for (const auto& s : result.samples) {
    std::vector<std::string> cells{format_int(s.iteration)};
    for (double v : s.theta) cells.push_back(format_double(v));
    for (std::int64_t v : s.statistic) cells.push_back(format_int(v));
    w.raw_row(cells);
  }
  w.flush();
}

struct PosteriorCsv {
  std::vector<std::string> names; // all value columns, parameters then statistics
  std::vector<std::int64_t> iteration;
  std::vector<std::vector<double>> rows;
};

inline PosteriorCsv read_posterior_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  PosteriorCsv out;
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty posterior file");
  const auto head = split_csv_line(line);
  if (head.empty() || head[0] != "iteration")
    throw DataError(path + ": posterior header must start with 'iteration'");
  out.names.assign(head.begin() + 1, head.end());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != head.size())
      throw DataError(path + ":" + std::to_string(lineno) + ": wrong column count");
    try {
      out.iteration.push_back(std::stoll(cells[0]));
      std::vector<double> row;
      for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(std::stod(cells[c]));
      out.rows.push_back(std::move(row));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": non-numeric cell");
    }
  }
  return out;
}

} // namespace ccm
