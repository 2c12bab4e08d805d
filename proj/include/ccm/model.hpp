#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ccm/errors.hpp"
#include "ccm/graph.hpp"
#include "ccm/stats_math.hpp"

namespace ccm {

enum class MappingKind { kDegreeDistribution, kMixingMatrix };

// The congruence mapping phi: a network statistic choice, with fixed node
// labels when the statistic is a mixing matrix.
struct CongruenceMapping {
  MappingKind kind = MappingKind::kDegreeDistribution;
  NodeClassification labels; // used only for kMixingMatrix

  static CongruenceMapping degree() { return {MappingKind::kDegreeDistribution, {}}; }
  static CongruenceMapping mixing(NodeClassification c) {
    return {MappingKind::kMixingMatrix, std::move(c)};
  }
};

using Statistic = std::variant<DegreeDistribution, MixingMatrix>;

inline Statistic phi(const Network& g, const CongruenceMapping& m) {
  if (m.kind == MappingKind::kDegreeDistribution) return degree_distribution(g);
  return mixing_matrix(g, m.labels);
}

namespace detail {
inline std::vector<double> normalized_probs(std::vector<double> v, const char* what) {
  double s = 0.0;
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DataError(std::string(what) + ": invalid entry");
    s += x;
  }
  if (!(s > 0.0)) throw DataError(std::string(what) + ": weights sum to zero");
  for (double& x : v) x /= s;
  return v;
}
inline std::vector<double> logs_of(const std::vector<double>& v) {
  std::vector<double> lg(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) lg[i] = v[i] > 0.0 ? std::log(v[i]) : -INFINITY;
  return lg;
}
} // namespace detail

// Multinomial law on degree distributions: theta[j] is the probability of a
// node having degree j. Weights are normalized on construction.
struct MultinomialDegreeLaw {
  std::vector<double> theta;
  std::vector<double> log_theta;

  explicit MultinomialDegreeLaw(std::vector<double> t)
      : theta(detail::normalized_probs(std::move(t), "MultinomialDegreeLaw")),
        log_theta(detail::logs_of(theta)) {}
};

// Poisson total-edge count times multinomial over the q(q+1)/2 unordered
// class-pair cells (upper-triangle order).
struct PoissonMultinomialMixingLaw {
  double lambda;
  std::vector<double> alpha;
  double log_lambda;
  std::vector<double> log_alpha;

  PoissonMultinomialMixingLaw(double lambda_, std::vector<double> a)
      : lambda(lambda_),
        alpha(detail::normalized_probs(std::move(a), "PoissonMultinomialMixingLaw")),
        log_lambda(std::log(lambda_)),
        log_alpha(detail::logs_of(alpha)) {
    if (!(lambda_ > 0.0)) throw DataError("PoissonMultinomialMixingLaw: lambda must be positive");
  }
};

// Q_phi(x) proportional to 1: used to sample congruence classes uniformly.
struct UniformLaw {};

using ClassLaw = std::variant<MultinomialDegreeLaw, PoissonMultinomialMixingLaw, UniformLaw>;

// Conjugate prior hyperparameters: Dirichlet for theta/alpha, Gamma for lambda.
struct PriorSpec {
  std::vector<double> dirichlet_alpha0;
  double gamma_shape = 1.0;
  double gamma_rate = 1.0;
};

struct CcmSpec {
  CongruenceMapping mapping;
  ClassLaw law = UniformLaw{};
  PriorSpec prior;
};

// log of the unnormalized class mass Q_phi(x | theta). For degree laws the
// theta vector may be longer than the count vector (extra cells carry zero
// counts); it must never be shorter.
inline double log_q_class(const Statistic& x, const ClassLaw& law) {
  if (std::holds_alternative<UniformLaw>(law)) return 0.0;
  if (const auto* deg = std::get_if<MultinomialDegreeLaw>(&law)) {
    const auto* d = std::get_if<DegreeDistribution>(&x);
    if (!d) throw DataError("log_q_class: degree law requires a degree distribution");
    if (deg->theta.size() < d->counts.size())
      throw DataError("log_q_class: theta shorter than degree support");
    double lp = 0.0;
    std::int64_t total = 0;
    for (std::size_t j = 0; j < d->counts.size(); ++j) {
      const std::int64_t c = d->counts[j];
      if (c < 0) throw DataError("log_q_class: negative degree count");
      total += c;
      if (c == 0) continue;
      if (!(deg->theta[j] > 0.0)) return -INFINITY;
      lp += static_cast<double>(c) * deg->log_theta[j] - log_factorial(c);
    }
    return lp + log_factorial(total);
  }
  const auto& mix = std::get<PoissonMultinomialMixingLaw>(law);
  const auto* mm = std::get_if<MixingMatrix>(&x);
  if (!mm) throw DataError("log_q_class: mixing law requires a mixing matrix");
  const auto cells = mm->cells_upper();
  if (mix.alpha.size() != cells.size())
    throw DataError("log_q_class: alpha dimension does not match cell count");
  return poisson_logpmf(mm->total_edges(), mix.lambda) +
         multinomial_logpmf(std::span<const std::int64_t>(cells),
                            std::span<const double>(mix.alpha));
}

// Exact log congruence-class size for a mixing matrix given class sizes:
// |c(MM)| = prod over cells of C(N_kl, MM_kl).
inline double log_mixing_class_size(const MixingMatrix& mm, const NodeClassification& c) {
  if (mm.q != c.q()) throw DataError("log_mixing_class_size: dimension mismatch");
  double lp = 0.0;
  for (int k = 0; k < mm.q; ++k)
    for (int l = k; l < mm.q; ++l) lp += lchoose(c.cell_capacity(k, l), mm.at(k, l));
  return lp;
}

// Degree-sequence graph counts switch from exact dynamic programming to the
// asymptotic-enumeration estimate above this node count.
inline constexpr int kExactDegreeCountMaxN = 13;

namespace detail {

// Exact number of labeled graphs realizing a fixed degree sequence. The
// highest-degree vertex is connected to every admissible set of the other
// vertices (grouped by equal residual degree) and the residual problem
// recurses; residual states are memoized. Tractable for n <= ~14.
class DegreeSequenceCounter {
public:
  // counts[j] = number of vertices with residual degree j; each j < 16,
  // each count < 16 (guaranteed by the kExactDegreeCountMaxN cap).
  double count(std::array<int, 16>& counts) {
    int dmax = -1;
    for (int j = 15; j >= 1; --j) {
      if (counts[j] > 0) {
        dmax = j;
        break;
      }
    }
    if (dmax == -1) return 1.0;
    const std::uint64_t key = pack(counts);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    --counts[dmax];
    const double total = descend(counts, 1, dmax, 1.0, dmax);
    ++counts[dmax];
    memo_.emplace(key, total);
    return total;
  }

private:
  static std::uint64_t pack(const std::array<int, 16>& c) {
    std::uint64_t k = 0;
    for (int j = 1; j < 16; ++j)
      k |= static_cast<std::uint64_t>(c[j] & 0xF) << (4 * (j - 1));
    return k; // degree-0 vertices cannot take further edges
  }

  // Chooses how many neighbors of the processed vertex come from each
  // residual-degree group; picked vertices drop to group j-1 < j, so groups
  // processed in increasing j are never picked twice.
  double descend(std::array<int, 16>& counts, int j, int remaining, double ways, int dmax) {
    if (remaining == 0) return ways * count(counts);
    if (j > dmax) return 0.0;
    double total = descend(counts, j + 1, remaining, ways, dmax);
    const int avail = counts[j];
    double w = ways;
    const int top = avail < remaining ? avail : remaining;
    for (int c = 1; c <= top; ++c) {
      w = w * static_cast<double>(avail - c + 1) / static_cast<double>(c);
      counts[j] -= c;
      counts[j - 1] += c;
      total += descend(counts, j + 1, remaining - c, w, dmax);
      counts[j] += c;
      counts[j - 1] -= c;
    }
    return total;
  }

  std::unordered_map<std::uint64_t, double> memo_;
};

// One side of the asymptotic estimate, from the edge count m, the pair sum
// S = sum_i C(d_i,2), and sum_i log d_i!:
//   G(d) ~ (2m)! / (m! 2^m prod_i d_i!) * exp(-lam - lam^2), lam = S/(2m).
inline double asym_side_log_count(std::int64_t m, std::int64_t s, double slogf) {
  if (m == 0) return 0.0;
  const double lam = static_cast<double>(s) / static_cast<double>(2 * m);
  return log_factorial(2 * m) - log_factorial(m) - static_cast<double>(m) * std::log(2.0) -
         slogf - lam - lam * lam;
}

// Symmetrized estimate: complementation is a bijection on graphs with a fixed
// degree sequence, so G(d) = G(n-1-d) exactly; evaluate whichever side is
// sparser (smaller lam), where the formula is accurate.
inline double asym_log_count_symmetrized(int n, std::int64_t m, std::int64_t s, double slogf,
                                         std::int64_t sbar, double slogfbar) {
  const std::int64_t mbar = dyad_count(n) - m;
  if (m == 0 || mbar == 0) return 0.0; // empty or complete: exactly one graph
  const double lam = static_cast<double>(s) / static_cast<double>(2 * m);
  const double lamb = static_cast<double>(sbar) / static_cast<double>(2 * mbar);
  if (lam <= lamb) return asym_side_log_count(m, s, slogf);
  return asym_side_log_count(mbar, sbar, slogfbar);
}

struct DegreeAggregates {
  std::int64_t m2 = 0; // sum of degrees
  std::int64_t s = 0;  // sum C(d_i, 2)
  std::int64_t sbar = 0;
  double slogf = 0.0; // sum log d_i!
  double slogfbar = 0.0;
};

inline DegreeAggregates degree_aggregates(const DegreeDistribution& d) {
  DegreeAggregates a;
  const std::int64_t n = d.node_count();
  for (std::size_t j = 0; j < d.counts.size(); ++j) {
    const std::int64_t c = d.counts[j];
    if (c == 0) continue;
    const std::int64_t jj = static_cast<std::int64_t>(j);
    const std::int64_t jb = n - 1 - jj;
    a.m2 += jj * c;
    a.s += jj * (jj - 1) / 2 * c;
    a.sbar += jb * (jb - 1) / 2 * c;
    a.slogf += static_cast<double>(c) * log_factorial(jj);
    a.slogfbar += static_cast<double>(c) * log_factorial(jb);
  }
  return a;
}

inline std::uint64_t pack_distribution(const DegreeDistribution& d) {
  std::uint64_t k = 0;
  for (std::size_t j = 0; j < d.counts.size() && j < 16; ++j)
    k |= static_cast<std::uint64_t>(d.counts[j] & 0xF) << (4 * j);
  return k;
}

// Cached exact log class size for small n (sequence-count factor included).
inline double exact_log_degree_class_size(const DegreeDistribution& d) {
  thread_local DegreeSequenceCounter counter;
  thread_local std::unordered_map<std::uint64_t, double> size_cache;
  const std::uint64_t key = pack_distribution(d);
  if (auto it = size_cache.find(key); it != size_cache.end()) return it->second;
  std::array<int, 16> counts{};
  double lmult = log_factorial(d.node_count());
  for (std::size_t j = 0; j < d.counts.size(); ++j) {
    counts[j] = static_cast<int>(d.counts[j]);
    lmult -= log_factorial(d.counts[j]);
  }
  const double g = counter.count(counts);
  const double lp = g > 0.0 ? lmult + std::log(g) : -INFINITY;
  size_cache.emplace(key, lp);
  return lp;
}

} // namespace detail

// log of the number of labeled graphs realizing any degree sequence with
// distribution D: exact for n <= kExactDegreeCountMaxN (a distribution no
// simple graph attains gives -infinity), estimated beyond.
inline double log_degree_sequence_graph_count(const DegreeDistribution& d) {
  const std::int64_t n = d.node_count();
  if (n <= kExactDegreeCountMaxN) {
    thread_local detail::DegreeSequenceCounter counter;
    std::array<int, 16> counts{};
    for (std::size_t j = 0; j < d.counts.size(); ++j)
      counts[j] = static_cast<int>(d.counts[j]);
    const double g = counter.count(counts);
    return g > 0.0 ? std::log(g) : -INFINITY;
  }
  const auto a = detail::degree_aggregates(d);
  if (a.m2 % 2 != 0) return -INFINITY;
  return detail::asym_log_count_symmetrized(static_cast<int>(n), a.m2 / 2, a.s, a.slogf,
                                            a.sbar, a.slogfbar);
}

// log congruence-class size for a degree distribution:
// |c(D)| = [n! / prod_j D_j!] * G(d). The first factor counts the degree
// sequences with distribution D and is exact; G(d) is exact or estimated
// per log_degree_sequence_graph_count.
inline double log_degree_class_size(const DegreeDistribution& d) {
  if (d.node_count() <= kExactDegreeCountMaxN) return detail::exact_log_degree_class_size(d);
  double lp = log_factorial(d.node_count());
  for (std::int64_t c : d.counts) lp -= log_factorial(c);
  return lp + log_degree_sequence_graph_count(d);
}

inline double log_class_size(const Statistic& x, const CongruenceMapping& m) {
  if (m.kind == MappingKind::kDegreeDistribution)
    return log_degree_class_size(std::get<DegreeDistribution>(x));
  return log_mixing_class_size(std::get<MixingMatrix>(x), m.labels);
}

// Network plus incrementally maintained summary statistics for one mapping.
// All sampler mutation goes through toggle() so the statistics never drift.
class CcmState {
public:
  CcmState(Network g, CongruenceMapping mapping)
      : g_(std::move(g)), mapping_(std::move(mapping)) {
    if (mapping_.kind == MappingKind::kMixingMatrix) {
      if (mapping_.labels.n() != g_.n())
        throw DataError("CcmState: classification size does not match network");
      mm_ = mixing_matrix(g_, mapping_.labels);
    } else {
      DegreeDistribution d = degree_distribution(g_);
      const auto a = detail::degree_aggregates(d);
      degree_counts_ = std::move(d.counts);
      sum_pairs_ = a.s;
      sum_pairs_bar_ = a.sbar;
      sum_log_dfact_ = a.slogf;
      sum_log_dfact_bar_ = a.slogfbar;
    }
  }

  const Network& g() const { return g_; }
  const CongruenceMapping& mapping() const { return mapping_; }
  const std::vector<std::int64_t>& degree_counts() const { return degree_counts_; }
  std::int64_t sum_degree_pairs() const { return sum_pairs_; }
  std::int64_t sum_degree_pairs_bar() const { return sum_pairs_bar_; }
  double sum_log_degree_fact() const { return sum_log_dfact_; }
  double sum_log_degree_fact_bar() const { return sum_log_dfact_bar_; }
  const MixingMatrix& mm() const { return mm_; }

  Statistic statistic() const {
    if (mapping_.kind == MappingKind::kDegreeDistribution)
      return DegreeDistribution{degree_counts_};
    return mm_;
  }

  double log_graph_count_estimate() const {
    return detail::asym_log_count_symmetrized(g_.n(), g_.edge_count(), sum_pairs_,
                                              sum_log_dfact_, sum_pairs_bar_,
                                              sum_log_dfact_bar_);
  }

  // Flips dyad (i,j) and updates every tracked statistic in O(1).
  bool toggle(int i, int j) {
    const bool adding = !g_.has_edge(i, j);
    if (mapping_.kind == MappingKind::kDegreeDistribution) {
      const int n = g_.n();
      const std::int64_t a = g_.degree(i), b = g_.degree(j);
      if (adding) {
        --degree_counts_[a]; ++degree_counts_[a + 1];
        --degree_counts_[b]; ++degree_counts_[b + 1];
        sum_pairs_ += a + b;
        sum_pairs_bar_ -= (n - 2 - a) + (n - 2 - b);
        sum_log_dfact_ += std::log(static_cast<double>(a + 1)) +
                          std::log(static_cast<double>(b + 1));
        sum_log_dfact_bar_ -= std::log(static_cast<double>(n - 1 - a)) +
                              std::log(static_cast<double>(n - 1 - b));
      } else {
        --degree_counts_[a]; ++degree_counts_[a - 1];
        --degree_counts_[b]; ++degree_counts_[b - 1];
        sum_pairs_ -= (a - 1) + (b - 1);
        sum_pairs_bar_ += (n - 1 - a) + (n - 1 - b);
        sum_log_dfact_ -= std::log(static_cast<double>(a)) + std::log(static_cast<double>(b));
        sum_log_dfact_bar_ += std::log(static_cast<double>(n - a)) +
                              std::log(static_cast<double>(n - b));
      }
    } else {
      mm_.add(mapping_.labels.label(i), mapping_.labels.label(j), adding ? 1 : -1);
    }
    return g_.toggle(i, j);
  }

private:
  Network g_;
  CongruenceMapping mapping_;
  std::vector<std::int64_t> degree_counts_;
  std::int64_t sum_pairs_ = 0;
  std::int64_t sum_pairs_bar_ = 0;
  double sum_log_dfact_ = 0.0;
  double sum_log_dfact_bar_ = 0.0;
  MixingMatrix mm_;
};

namespace detail {

// Degree-multinomial coefficient change for moving one node from degree a to
// degree b, with counts adjusted virtually between the two endpoint moves.
struct VirtualCounts {
  const std::vector<std::int64_t>* base;
  int idx[4];
  std::int64_t delta[4];
  int used = 0;

  explicit VirtualCounts(const std::vector<std::int64_t>& c) : base(&c) {}

  std::int64_t get(int j) const {
    std::int64_t v = (*base)[static_cast<std::size_t>(j)];
    for (int k = 0; k < used; ++k)
      if (idx[k] == j) v += delta[k];
    return v;
  }
  void bump(int j, std::int64_t d) {
    for (int k = 0; k < used; ++k) {
      if (idx[k] == j) {
        delta[k] += d;
        return;
      }
    }
    idx[used] = j;
    delta[used] = d;
    ++used;
  }
  // Returns log of the count ratio for moving one node from a to b.
  double move(int a, int b) {
    const double lr = std::log(static_cast<double>(get(a))) -
                      std::log(static_cast<double>(get(b) + 1));
    bump(a, -1);
    bump(b, +1);
    return lr;
  }
};

inline DegreeDistribution toggled_distribution(const CcmState& st, int i, int j, bool adding) {
  DegreeDistribution d{st.degree_counts()};
  const int a = st.g().degree(i), b = st.g().degree(j);
  const int da = adding ? a + 1 : a - 1;
  const int db = adding ? b + 1 : b - 1;
  --d.counts[a]; ++d.counts[da];
  --d.counts[b]; ++d.counts[db];
  return d;
}

} // namespace detail

// log of |c(phi(g'))| / |c(phi(g))| for g' = g with dyad (i,j) toggled.
// Mixing matrices use the exact binomial-product identity. Degree
// distributions are exact for n <= kExactDegreeCountMaxN; beyond that the
// symmetrized asymptotic estimate is updated from the two affected degrees.
inline double log_class_size_ratio(const CcmState& st, int i, int j, bool adding) {
  if (i == j) throw DataError("log_class_size_ratio: self-loop toggle");
  if (st.mapping().kind == MappingKind::kMixingMatrix) {
    const auto& labels = st.mapping().labels;
    const int k = labels.label(i), l = labels.label(j);
    const std::int64_t cap = labels.cell_capacity(k, l);
    const std::int64_t cur = st.mm().at(k, l);
    if (adding) return std::log(static_cast<double>(cap - cur)) -
                       std::log(static_cast<double>(cur + 1));
    return std::log(static_cast<double>(cur)) - std::log(static_cast<double>(cap - cur + 1));
  }

  const int n = st.g().n();
  if (n <= kExactDegreeCountMaxN) {
    const double before = detail::exact_log_degree_class_size(DegreeDistribution{st.degree_counts()});
    const double after =
        detail::exact_log_degree_class_size(detail::toggled_distribution(st, i, j, adding));
    return after - before;
  }

  const std::int64_t a = st.g().degree(i), b = st.g().degree(j);
  const std::int64_t m = st.g().edge_count();
  detail::VirtualCounts vc(st.degree_counts());
  double lr;
  std::int64_t m_new, s_new, sbar_new;
  double slogf_new, slogfbar_new;
  if (adding) {
    lr = vc.move(static_cast<int>(a), static_cast<int>(a) + 1) +
         vc.move(static_cast<int>(b), static_cast<int>(b) + 1);
    m_new = m + 1;
    s_new = st.sum_degree_pairs() + a + b;
    sbar_new = st.sum_degree_pairs_bar() - (n - 2 - a) - (n - 2 - b);
    slogf_new = st.sum_log_degree_fact() + std::log(static_cast<double>(a + 1)) +
                std::log(static_cast<double>(b + 1));
    slogfbar_new = st.sum_log_degree_fact_bar() - std::log(static_cast<double>(n - 1 - a)) -
                   std::log(static_cast<double>(n - 1 - b));
  } else {
    lr = vc.move(static_cast<int>(a), static_cast<int>(a) - 1) +
         vc.move(static_cast<int>(b), static_cast<int>(b) - 1);
    m_new = m - 1;
    s_new = st.sum_degree_pairs() - (a - 1) - (b - 1);
    sbar_new = st.sum_degree_pairs_bar() + (n - 1 - a) + (n - 1 - b);
    slogf_new = st.sum_log_degree_fact() - std::log(static_cast<double>(a)) -
                std::log(static_cast<double>(b));
    slogfbar_new = st.sum_log_degree_fact_bar() + std::log(static_cast<double>(n - a)) +
                   std::log(static_cast<double>(n - b));
  }
  const double before = st.log_graph_count_estimate();
  const double after = detail::asym_log_count_symmetrized(n, m_new, s_new, slogf_new,
                                                          sbar_new, slogfbar_new);
  return lr + after - before;
}

// log of Q_phi(phi(g') | theta) / Q_phi(phi(g) | theta) across a toggle.
inline double log_q_class_toggle_delta(const CcmState& st, const ClassLaw& law, int i, int j,
                                       bool adding) {
  if (std::holds_alternative<UniformLaw>(law)) return 0.0;
  if (const auto* deg = std::get_if<MultinomialDegreeLaw>(&law)) {
    if (st.mapping().kind != MappingKind::kDegreeDistribution)
      throw DataError("log_q_class_toggle_delta: law does not match mapping");
    const auto& lt = deg->log_theta;
    const int a = st.g().degree(i), b = st.g().degree(j);
    detail::VirtualCounts vc(st.degree_counts());
    double lr;
    if (adding) {
      lr = vc.move(a, a + 1) + vc.move(b, b + 1);
      lr += (lt[a + 1] - lt[a]) + (lt[b + 1] - lt[b]);
    } else {
      lr = vc.move(a, a - 1) + vc.move(b, b - 1);
      lr += (lt[a - 1] - lt[a]) + (lt[b - 1] - lt[b]);
    }
    return lr;
  }
  const auto& mix = std::get<PoissonMultinomialMixingLaw>(law);
  if (st.mapping().kind != MappingKind::kMixingMatrix)
    throw DataError("log_q_class_toggle_delta: law does not match mapping");
  const auto& labels = st.mapping().labels;
  const int cell = labels.cell_index(labels.label(i), labels.label(j));
  const std::int64_t cur = st.mm().at(labels.label(i), labels.label(j));
  if (adding)
    return mix.log_lambda + mix.log_alpha[cell] - std::log(static_cast<double>(cur + 1));
  return std::log(static_cast<double>(cur)) - mix.log_lambda - mix.log_alpha[cell];
}

// log of P(g') / P(g) under the CCM across a toggle; the normalizing mass
// W_phi(theta) cancels by construction.
inline double log_network_prob_ratio(const CcmState& st, const ClassLaw& law, int i, int j,
                                     bool adding) {
  const double dq = log_q_class_toggle_delta(st, law, i, j, adding);
  if (dq == -INFINITY) return -INFINITY;
  return dq - log_class_size_ratio(st, i, j, adding);
}

// Convenience overloads matching the operation contracts on plain networks.
inline double log_class_size_ratio(const Network& g, std::pair<int, int> toggle,
                                   const CongruenceMapping& m) {
  CcmState st(g, m);
  return log_class_size_ratio(st, toggle.first, toggle.second,
                              !g.has_edge(toggle.first, toggle.second));
}

inline double log_network_prob_ratio(const Network& g, std::pair<int, int> toggle,
                                     const CcmSpec& spec) {
  CcmState st(g, spec.mapping);
  return log_network_prob_ratio(st, spec.law, toggle.first, toggle.second,
                                !g.has_edge(toggle.first, toggle.second));
}

// Canonical byte key of a statistic: used for uniqueness sets.
inline std::string statistic_key(const Statistic& x) {
  const std::vector<std::int64_t>* cells = nullptr;
  std::vector<std::int64_t> tmp;
  if (const auto* d = std::get_if<DegreeDistribution>(&x)) {
    cells = &d->counts;
  } else {
    tmp = std::get<MixingMatrix>(x).cells_upper();
    cells = &tmp;
  }
  std::string key;
  key.reserve(cells->size() * sizeof(std::int64_t));
  for (std::int64_t v : *cells)
    key.append(reinterpret_cast<const char*>(&v), sizeof(v));
  return key;
}

// Flattened cells of a statistic plus matching column names ("d0..", "mm_k_l").
inline std::vector<std::int64_t> statistic_cells(const Statistic& x) {
  if (const auto* d = std::get_if<DegreeDistribution>(&x)) return d->counts;
  return std::get<MixingMatrix>(x).cells_upper();
}

inline std::vector<std::string> statistic_cell_names(const CongruenceMapping& m, int n) {
  std::vector<std::string> names;
  if (m.kind == MappingKind::kDegreeDistribution) {
    names.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) names.push_back("d" + std::to_string(j));
  } else {
    const int q = m.labels.q();
    for (int k = 0; k < q; ++k)
      for (int l = k; l < q; ++l)
        names.push_back("mm_" + std::to_string(k) + "_" + std::to_string(l));
  }
  return names;
}

// Dimension checks for a spec about to drive a sampler on n nodes.
inline void validate_spec(const CcmSpec& spec, int n) {
  if (spec.mapping.kind == MappingKind::kMixingMatrix) {
    if (spec.mapping.labels.n() != n) throw DataError("spec: label count does not match n");
    if (const auto* mix = std::get_if<PoissonMultinomialMixingLaw>(&spec.law)) {
      if (static_cast<int>(mix->alpha.size()) != spec.mapping.labels.cell_count())
        throw DataError("spec: alpha dimension does not match class-pair cells");
    } else if (std::holds_alternative<MultinomialDegreeLaw>(spec.law)) {
      throw DataError("spec: degree law paired with mixing mapping");
    }
  } else {
    if (const auto* deg = std::get_if<MultinomialDegreeLaw>(&spec.law)) {
      if (static_cast<int>(deg->theta.size()) < n)
        throw DataError("spec: theta must cover degrees 0..n-1");
    } else if (std::holds_alternative<PoissonMultinomialMixingLaw>(spec.law)) {
      throw DataError("spec: mixing law paired with degree mapping");
    }
  }
}

} // namespace ccm
