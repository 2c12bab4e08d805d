#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "ccm/csv.hpp"
#include "ccm/graph.hpp"
#include "ccm/model.hpp"
#include "ccm/rng.hpp"

namespace ccm {

struct SamplerConfig {
  std::int64_t iterations = 0;
  std::int64_t burn_in = 0;
  std::int64_t thin = 1;
  double tnt_edge_prob = 0.5;
  std::uint64_t seed = 1;
  // Drops the proposal-ratio term from the acceptance probability, leaving a
  // plain probability ratio. The tie/no-tie proposal is asymmetric, so this
  // mode does not target the model law exactly; it exists for ablation.
  bool paper_faithful_acceptance = false;
  bool keep_networks = false;
};

inline void validate_config(const SamplerConfig& cfg) {
  if (cfg.iterations <= 0) throw DataError("sampler: iterations must be positive");
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.iterations)
    throw DataError("sampler: need 0 <= burn_in < iterations");
  if (cfg.thin < 1) throw DataError("sampler: thin must be >= 1");
  if (!(cfg.tnt_edge_prob >= 0.0 && cfg.tnt_edge_prob <= 1.0))
    throw DataError("sampler: tnt_edge_prob must be in [0,1]");
}

struct SampleStream {
  std::vector<std::int64_t> iteration;
  std::vector<std::vector<std::int64_t>> cells;
  std::vector<Network> networks; // populated only when cfg.keep_networks
  std::int64_t proposed = 0;
  std::int64_t accepted = 0;

  std::size_t size() const { return cells.size(); }
  double acceptance_rate() const {
    return proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  }
};

// Tie/no-tie proposal law: with probability p a uniform toggleable edge,
// otherwise a uniform toggleable dyad; when no toggleable edge exists the
// dyad branch fires with probability 1.
inline double tnt_log_proposal_prob(std::int64_t toggleable_dyads,
                                    std::int64_t toggleable_edges, bool dyad_is_edge,
                                    double p) {
  double q = (toggleable_edges > 0 ? 1.0 - p : 1.0) / static_cast<double>(toggleable_dyads);
  if (dyad_is_edge && toggleable_edges > 0) q += p / static_cast<double>(toggleable_edges);
  return std::log(q);
}

// log q(g|g') - log q(g'|g) for one dyad toggle. The proposal is asymmetric
// (edge branch mass depends on the edge count), so detailed balance against
// the model law needs this term in the acceptance probability.
inline double tnt_log_correction(std::int64_t toggleable_dyads, std::int64_t toggleable_edges,
                                 bool adding, double p) {
  const std::int64_t after = toggleable_edges + (adding ? 1 : -1);
  const double fwd = tnt_log_proposal_prob(toggleable_dyads, toggleable_edges, !adding, p);
  const double rev = tnt_log_proposal_prob(toggleable_dyads, after, adding, p);
  return rev - fwd;
}

// Single Metropolis-Hastings chain over networks. When a mask is given the
// chain moves only on unknown dyads, so every row of the stream agrees with
// the observed portion; its stationary law is the model conditioned on them.
class MhChain {
public:
  MhChain(CcmSpec spec, Network init, SamplerConfig cfg, const ObservationMask* mask = nullptr)
      : spec_(std::move(spec)),
        cfg_(cfg),
        rng_(cfg.seed),
        st_(std::move(init), spec_.mapping) {
    validate_config(cfg_);
    validate_spec(spec_, st_.g().n());
    const int n = st_.g().n();
    if (mask != nullptr) {
      if (mask->n() != n) throw DataError("sampler: mask size does not match network");
      masked_ = true;
      dyad_slot_.assign(static_cast<std::size_t>(dyad_count(n)), -1);
      for (std::int64_t d = 0; d < dyad_count(n); ++d) {
        const auto [i, j] = dyad_from_index(n, d);
        if (!mask->known(i, j)) unknown_dyads_.push_back(d);
      }
      if (unknown_dyads_.empty()) throw DataError("sampler: no toggleable dyads");
      for (const auto& [i, j] : st_.g().edges()) {
        if (!mask->known(i, j)) push_toggleable_edge(dyad_index(n, i, j));
      }
    }
    if (log_q_class(st_.statistic(), spec_.law) == -INFINITY)
      throw DataError("sampler: initial network has zero probability under the class law");
  }

  // One draw from the proposal law; does not change the network.
  std::pair<int, int> propose_dyad() {
    const int n = st_.g().n();
    std::int64_t dyad;
    if (toggleable_edge_count() > 0 && rng_.bernoulli(cfg_.tnt_edge_prob)) {
      if (masked_) {
        dyad = toggleable_edges_[rng_.below(toggleable_edges_.size())];
      } else {
        const auto& e = st_.g().edges()[rng_.below(st_.g().edges().size())];
        dyad = dyad_index(n, e.first, e.second);
      }
    } else if (masked_) {
      dyad = unknown_dyads_[rng_.below(unknown_dyads_.size())];
    } else {
      dyad = static_cast<std::int64_t>(rng_.below(static_cast<std::uint64_t>(dyad_count(n))));
    }
    return dyad_from_index(n, dyad);
  }

  // log Hastings ratio for toggling (i,j) from the current state.
  double log_acceptance_ratio(int i, int j) const {
    const bool adding = !st_.g().has_edge(i, j);
    double log_r = log_network_prob_ratio(st_, spec_.law, i, j, adding);
    if (!cfg_.paper_faithful_acceptance) {
      const std::int64_t dyads =
          masked_ ? static_cast<std::int64_t>(unknown_dyads_.size()) : dyad_count(st_.g().n());
      log_r += tnt_log_correction(dyads, toggleable_edge_count(), adding, cfg_.tnt_edge_prob);
    }
    return log_r;
  }

  bool step() {
    ++proposed_;
    const auto [i, j] = propose_dyad();
    const double log_r = log_acceptance_ratio(i, j);
    const bool accept = log_r >= 0.0 || rng_.uniform01() < std::exp(log_r);
    if (accept) {
      const bool adding = !st_.g().has_edge(i, j);
      st_.toggle(i, j);
      if (masked_) {
        const std::int64_t dyad = dyad_index(st_.g().n(), i, j);
        if (adding)
          push_toggleable_edge(dyad);
        else
          drop_toggleable_edge(dyad);
      }
      ++accepted_;
    }
    return accept;
  }

  // Replaces the class law in place (parameter updates between sweeps); the
  // current network must stay inside the new law's support.
  void set_law(ClassLaw law) {
    spec_.law = std::move(law);
    if (log_q_class(st_.statistic(), spec_.law) == -INFINITY)
      throw DataError("sampler: current network has zero probability under the new law");
  }

  const CcmState& state() const { return st_; }
  std::int64_t proposed() const { return proposed_; }
  std::int64_t accepted() const { return accepted_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

private:
  std::int64_t toggleable_edge_count() const {
    return masked_ ? static_cast<std::int64_t>(toggleable_edges_.size()) : st_.g().edge_count();
  }

  void push_toggleable_edge(std::int64_t dyad) {
    dyad_slot_[static_cast<std::size_t>(dyad)] =
        static_cast<std::int64_t>(toggleable_edges_.size());
    toggleable_edges_.push_back(dyad);
  }

  void drop_toggleable_edge(std::int64_t dyad) {
    const std::int64_t slot = dyad_slot_[static_cast<std::size_t>(dyad)];
    const std::int64_t last = toggleable_edges_.back();
    toggleable_edges_[static_cast<std::size_t>(slot)] = last;
    dyad_slot_[static_cast<std::size_t>(last)] = slot;
    toggleable_edges_.pop_back();
    dyad_slot_[static_cast<std::size_t>(dyad)] = -1;
  }

  CcmSpec spec_;
  SamplerConfig cfg_;
  Rng rng_;
  CcmState st_;
  bool masked_ = false;
  std::vector<std::int64_t> unknown_dyads_;
  std::vector<std::int64_t> toggleable_edges_; // dyad indices of unknown-dyad edges
  std::vector<std::int64_t> dyad_slot_;        // dyad index -> slot in toggleable_edges_
  std::int64_t proposed_ = 0;
  std::int64_t accepted_ = 0;
};

inline SampleStream mh_run(const CcmSpec& spec, const Network& init, const SamplerConfig& cfg,
                           const ObservationMask* mask = nullptr) {
  MhChain chain(spec, init, cfg, mask);
  SampleStream out;
  const std::int64_t keep = (cfg.iterations - cfg.burn_in) / cfg.thin;
  out.iteration.reserve(static_cast<std::size_t>(keep));
  out.cells.reserve(static_cast<std::size_t>(keep));
  for (std::int64_t t = 1; t <= cfg.iterations; ++t) {
    chain.step();
    if (t > cfg.burn_in && (t - cfg.burn_in) % cfg.thin == 0) {
      out.iteration.push_back(t);
      out.cells.push_back(statistic_cells(chain.state().statistic()));
      if (cfg.keep_networks) out.networks.push_back(chain.state().g());
    }
  }
  out.proposed = chain.proposed();
  out.accepted = chain.accepted();
  return out;
}

// Thinned single-chain collection of n_networks statistics, starting from
// init (which must lie in the law's support).
inline SampleStream generate_networks(const CcmSpec& spec, const Network& init,
                                      std::int64_t n_networks, SamplerConfig cfg) {
  if (n_networks <= 0) throw DataError("sampler: n_networks must be positive");
  cfg.iterations = cfg.burn_in + n_networks * cfg.thin;
  return mh_run(spec, init, cfg);
}

inline void write_chain_csv(const std::string& path, const SampleStream& stream,
                            const std::vector<std::string>& cell_names) {
  CsvWriter w(path);
  std::vector<std::string> head{"iteration"};
  head.insert(head.end(), cell_names.begin(), cell_names.end());
  w.header(head);
  for (std::size_t r = 0; r < stream.size(); ++r) {
    if (stream.cells[r].size() != cell_names.size())
      throw DataError("chain csv: row width does not match header");
    std::vector<std::string> cells{format_int(stream.iteration[r])};
    for (std::int64_t v : stream.cells[r]) cells.push_back(format_int(v));
    w.raw_row(cells);
  }
  w.flush();
}

struct ChainCsv {
  std::vector<std::string> cell_names;
  std::vector<std::int64_t> iteration;
  std::vector<std::vector<std::int64_t>> cells;
};

inline ChainCsv read_chain_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  ChainCsv out;
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty chain file");
  const auto head = split_csv_line(line);
  if (head.empty() || head[0] != "iteration")
    throw DataError(path + ": chain header must start with 'iteration'");
  out.cell_names.assign(head.begin() + 1, head.end());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != head.size())
      throw DataError(path + ":" + std::to_string(lineno) + ": wrong column count");
    try {
      out.iteration.push_back(std::stoll(cells[0]));
      std::vector<std::int64_t> row;
      for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(std::stoll(cells[c]));
      out.cells.push_back(std::move(row));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": non-integer cell");
    }
  }
  return out;
}

} // namespace ccm
