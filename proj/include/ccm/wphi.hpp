#pragma once
// Normalizing-mass ratio study. The class law's normalizing mass
// W(theta) = sum over achievable statistics u of Q(u | theta) cannot be
// computed directly (the class space is astronomically large), but the RATIO
// W(theta1)/W(theta2) can be estimated over a shared uniform sample of
// congruence classes: harvest unique statistics from a chain whose stationary
// law is uniform over classes, then compare sum_u Q(u|theta1) against
// sum_u Q(u|theta2) on exactly that set. The unknown class-count factor
// cancels in the ratio.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ccm/csv.hpp"
#include "ccm/errors.hpp"
#include "ccm/graph.hpp"
#include "ccm/model.hpp"
#include "ccm/sampler.hpp"
#include "ccm/stats_math.hpp"

namespace ccm {

// Unique congruence-class statistics harvested from a uniform-law chain,
// in discovery order (exchangeable: the chain visits classes uniformly).
struct ClassSample {
  CongruenceMapping mapping;
  std::vector<Statistic> stats;
  std::size_t draws = 0;  // retained chain draws scanned before deduplication
};

// Rebuilds a statistic object from its flattened cell vector.
inline Statistic statistic_from_cells(const CongruenceMapping& mapping,
                                      std::span<const std::int64_t> cells) {
  if (mapping.kind == MappingKind::kDegreeDistribution) {
    return DegreeDistribution{std::vector<std::int64_t>(cells.begin(), cells.end())};
  }
  const int q = mapping.labels.q();
  if (static_cast<int>(cells.size()) != q * (q + 1) / 2)
    throw DataError("statistic_from_cells: cell count does not match q");
  MixingMatrix mm(q);
  std::size_t idx = 0;
  for (int k = 0; k < q; ++k)
    for (int l = k; l < q; ++l) mm.add(k, l, cells[idx++]);
  return mm;
}

// Runs a chain on n nodes and keeps each distinct statistic once. By default
// the chain's class law is uniform, so congruence classes are visited
// uniformly at random. A non-uniform harvest_law concentrates the harvested
// set where that law has mass instead; the ratio estimator below only needs
// the harvested set to cover the classes that carry the compared laws' mass,
// because any class missing from the set drops out of both sums together.
// Burn-in/thinning/seed come from cfg; cfg.iterations counts proposals.
inline ClassSample harvest_unique_classes(const CongruenceMapping& mapping, int n,
                                          const SamplerConfig& cfg,
                                          ClassLaw harvest_law = UniformLaw{}) {
  if (mapping.kind == MappingKind::kMixingMatrix && mapping.labels.n() != n) {
    throw DataError("harvest_unique_classes: classification covers " +
                    std::to_string(mapping.labels.n()) + " nodes but n = " +
                    std::to_string(n));
  }
  const CcmSpec spec{mapping, std::move(harvest_law), {}};
  const Network init(n);  // empty start; burn-in carries the chain to stationarity
  const SampleStream stream = mh_run(spec, init, cfg);
  ClassSample out{mapping, {}, stream.size()};
  std::unordered_set<std::string> seen;
  for (const auto& cells : stream.cells) {
    Statistic st = statistic_from_cells(mapping, cells);
    if (seen.insert(statistic_key(st)).second) out.stats.push_back(std::move(st));
  }
  return out;
}

// Merges class samples into one deduplicated sample (same mapping required).
// Discovery order is kept within each part, parts in the order given.
inline ClassSample merge_samples(std::span<const ClassSample> parts) {
  if (parts.empty()) throw DataError("merge_samples: no samples to merge");
  ClassSample out{parts.front().mapping, {}, 0};
  std::unordered_set<std::string> seen;
  for (const auto& part : parts) {
    if (part.mapping.kind != out.mapping.kind)
      throw DataError("merge_samples: samples use different congruence mappings");
    out.draws += part.draws;
    for (const auto& st : part.stats)
      if (seen.insert(statistic_key(st)).second) out.stats.push_back(st);
  }
  return out;
}

// log of sum_u Q(u | law) over the sampled classes, accumulated in log space.
inline double log_class_mass(const ClassSample& sample, const ClassLaw& law) {
  if (sample.stats.empty()) throw DataError("log_class_mass: empty class sample");
  std::vector<double> lq(sample.stats.size());
  for (std::size_t i = 0; i < sample.stats.size(); ++i)
    lq[i] = log_q_class(sample.stats[i], law);
  const double lse = logsumexp(lq);
  if (lse == -INFINITY)
    throw DataError("log_class_mass: every sampled class has zero mass under the law");
  return lse;
}

// log of W(law1)/W(law2) estimated over one shared class sample.
inline double log_w_ratio(const ClassSample& sample, const ClassLaw& law1,
                          const ClassLaw& law2) {
  return log_class_mass(sample, law1) - log_class_mass(sample, law2);
}

inline double w_ratio(const ClassSample& sample, const ClassLaw& law1,
                      const ClassLaw& law2) {
  return std::exp(log_w_ratio(sample, law1, law2));
}

// One line of the perturbation study: the parameter mean was moved by
// change_percent; w_ratio estimates W(perturbed)/W(baseline).
struct PerturbationRow {
  double change_percent = 0.0;
  double w_ratio = 1.0;
  double abs_change = 0.0;  // |w_ratio - 1|
};

struct StudyReport {
  std::string study;  // "degree" or "mixing"
  std::size_t unique_classes = 0;
  std::size_t draws = 0;
  std::vector<PerturbationRow> rows;
};

namespace detail {

// Harvests one chain per law (baseline first), merges the deduplicated class
// sets, and scores every perturbation ratio over the shared merged sample.
// Seeds are derived per chain from cfg.seed, so chains can run independently.
template <typename MakeLaw>
inline StudyReport perturbation_report(std::string study, const CongruenceMapping& mapping,
                                       int n, const SamplerConfig& cfg,
                                       const ClassLaw& baseline,
                                       std::span<const double> deltas, MakeLaw&& make_law) {
  std::vector<ClassLaw> laws;
  laws.push_back(baseline);
  for (const double delta : deltas) laws.push_back(make_law(delta));

  std::vector<ClassSample> parts;
  parts.reserve(laws.size());
  for (std::size_t i = 0; i < laws.size(); ++i) {
    SamplerConfig chain_cfg = cfg;
    chain_cfg.seed = derive_seed(cfg.seed, i);
    parts.push_back(harvest_unique_classes(mapping, n, chain_cfg, laws[i]));
  }
  const ClassSample sample = merge_samples(parts);

  StudyReport report;
  report.study = std::move(study);
  report.unique_classes = sample.stats.size();
  report.draws = sample.draws;
  const double base_mass = log_class_mass(sample, baseline);
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    const double ratio = std::exp(log_class_mass(sample, laws[d + 1]) - base_mass);
    report.rows.push_back({deltas[d] * 100.0, ratio, std::abs(ratio - 1.0)});
  }
  return report;
}

}  // namespace detail

// The perturbation studies harvest one chain per compared law (baseline and
// each perturbation) and merge the deduplicated class sets, rather than
// sampling classes uniformly. A uniform class sample is dominated by classes
// with far more edges than any of the compared laws ever place mass on (on 50
// nodes the class-space mean is several hundred edges), so at practical chain
// lengths it almost never visits the classes that actually decide the ratio,
// and the estimate degenerates to noise. Harvesting at each law concentrates
// the merged set exactly where every compared law puts its mass, which is the
// coverage the ratio needs; the sampling density itself is irrelevant because
// only the deduplicated SET enters the sums, and a class absent from the set
// drops out of numerator and denominator together. The six-node tests
// validate this estimator against full enumeration.

// Degree-distribution study: theta cells follow a truncated negative-binomial
// pmf over degrees 0..theta_len-1; the perturbations scale its mean.
// theta_len may exceed n (extra cells are simply never hit by a degree count).
inline StudyReport degree_wphi_study(int n, double nb_size, double nb_mu,
                                     std::span<const double> deltas,
                                     const SamplerConfig& cfg, int theta_len = 100) {
  if (theta_len < n)
    throw DataError("degree_wphi_study: theta_len must cover degrees up to n-1");
  const auto mapping = CongruenceMapping::degree();
  const ClassLaw baseline = MultinomialDegreeLaw(nb_truncated_pmf(nb_size, nb_mu, theta_len));
  return detail::perturbation_report(
      "degree", mapping, n, cfg, baseline, deltas, [&](double delta) -> ClassLaw {
        return MultinomialDegreeLaw(
            nb_truncated_pmf(nb_size, nb_mu * (1.0 + delta), theta_len));
      });
}

// Mixing-matrix study: Poisson(lambda) total edges times multinomial cell
// split alpha; the perturbations scale lambda.
inline StudyReport mixing_wphi_study(const NodeClassification& labels, double lambda,
                                     std::span<const double> alpha,
                                     std::span<const double> deltas,
                                     const SamplerConfig& cfg) {
  const auto mapping = CongruenceMapping::mixing(labels);
  const std::vector<double> a(alpha.begin(), alpha.end());
  const ClassLaw baseline = PoissonMultinomialMixingLaw(lambda, a);
  return detail::perturbation_report(
      "mixing", mapping, labels.n(), cfg, baseline, deltas, [&](double delta) -> ClassLaw {
        return PoissonMultinomialMixingLaw(lambda * (1.0 + delta), a);
      });
}

// CSV shaped like the perturbation tables: one row per delta.
inline void write_study_csv(const StudyReport& report, const std::string& path) {
  CsvWriter csv(path);
  const std::vector<std::string> header = {"change_percent", "w_ratio", "abs_change"};
  csv.header(header);
  for (const auto& row : report.rows)
    csv.row(row.change_percent, row.w_ratio, row.abs_change);
  csv.flush();
}

}  // namespace ccm
