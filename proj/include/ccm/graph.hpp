#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccm/errors.hpp"
#include "ccm/rng.hpp"

namespace ccm {

// Unordered node pair packed into one key; i and j must differ.
inline std::uint64_t dyad_key(int i, int j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
         static_cast<std::uint32_t>(j);
}

inline std::int64_t dyad_count(int n) {
  return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

// Linear index of dyad (i<j) in lexicographic row order.
inline std::int64_t dyad_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  const std::int64_t row_start =
      static_cast<std::int64_t>(i) * n - static_cast<std::int64_t>(i) * (i + 1) / 2;
  return row_start + (j - i - 1);
}

// Inverse of dyad_index.
inline std::pair<int, int> dyad_from_index(int n, std::int64_t t) {
  // Solve for the row, then correct for rounding.
  const double nn = static_cast<double>(n);
  int i = static_cast<int>(std::floor(nn - 0.5 - std::sqrt((nn - 0.5) * (nn - 0.5) - 2.0 * static_cast<double>(t))));
  if (i < 0) i = 0;
  auto row_start = [n](int r) {
    return static_cast<std::int64_t>(r) * n - static_cast<std::int64_t>(r) * (r + 1) / 2;
  };
  while (i > 0 && row_start(i) > t) --i;
  while (i + 1 < n && row_start(i + 1) <= t) ++i;
  const int j = static_cast<int>(t - row_start(i)) + i + 1;
  return {i, j};
}

// Labeled undirected simple graph with O(1) edge lookup, O(1) uniform
// edge draws via the global edge list, and a per-node degree cache.
class Network {
public:
  Network() = default;
  explicit Network(int n) : n_(n), adj_(n), degree_(n, 0) {
    if (n < 0) throw DataError("Network: negative node count");
  }

  int n() const { return n_; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(edges_.size()); }
  int degree(int v) const { return degree_[v]; }
  const std::vector<int>& degrees() const { return degree_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }

  bool has_edge(int i, int j) const {
    if (i == j) return false;
    return edge_pos_.find(dyad_key(i, j)) != edge_pos_.end();
  }

  void add_edge(int i, int j) {
    check_pair(i, j);
    if (has_edge(i, j)) throw DataError("Network::add_edge: edge already present");
    toggle(i, j);
  }

  // Flips dyad (i,j); returns true when the edge is now present.
  bool toggle(int i, int j) {
    check_pair(i, j);
    const std::uint64_t key = dyad_key(i, j);
    auto it = edge_pos_.find(key);
    if (it == edge_pos_.end()) {
      edge_pos_.emplace(key, static_cast<int>(edges_.size()));
      edges_.emplace_back(std::min(i, j), std::max(i, j));
      insert_sorted(adj_[i], j);
      insert_sorted(adj_[j], i);
      ++degree_[i];
      ++degree_[j];
      return true;
    }
    const int pos = it->second;
    const int last = static_cast<int>(edges_.size()) - 1;
    if (pos != last) {
      edges_[pos] = edges_[last];
      edge_pos_[dyad_key(edges_[pos].first, edges_[pos].second)] = pos;
    }
    edges_.pop_back();
    edge_pos_.erase(it);
    erase_sorted(adj_[i], j);
    erase_sorted(adj_[j], i);
    --degree_[i];
    --degree_[j];
    return false;
  }

  bool operator==(const Network& o) const {
    if (n_ != o.n_ || edges_.size() != o.edges_.size()) return false;
    for (const auto& [i, j] : edges_)
      if (!o.has_edge(i, j)) return false;
    return true;
  }

private:
  void check_pair(int i, int j) const {
    if (i == j) throw DataError("Network: self-loops are not allowed");
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DataError("Network: node id out of range");
  }
  static void insert_sorted(std::vector<int>& v, int x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  }
  static void erase_sorted(std::vector<int>& v, int x) {
    v.erase(std::lower_bound(v.begin(), v.end(), x));
  }

  int n_ = 0;
  std::vector<std::vector<int>> adj_;
  std::vector<int> degree_;
  std::vector<std::pair<int, int>> edges_;
  std::unordered_map<std::uint64_t, int> edge_pos_;
};

// Dyad-level knowledge indicator derived from a sampled-node set: a dyad is
// known exactly when both endpoints were sampled (induced-subgraph design).
// Extra dyads can be marked known explicitly for non-induced designs.
class ObservationMask {
public:
  ObservationMask() = default;
  ObservationMask(int n, std::vector<std::uint8_t> sampled)
      : n_(n), sampled_(std::move(sampled)) {
    if (static_cast<int>(sampled_.size()) != n)
      throw DataError("ObservationMask: sampled flag size mismatch");
  }

  static ObservationMask from_sampled_ids(int n, std::span<const int> ids) {
    std::vector<std::uint8_t> s(n, 0);
    for (int v : ids) {
      if (v < 0 || v >= n) throw DataError("ObservationMask: sampled id out of range");
      s[v] = 1;
    }
    return ObservationMask(n, std::move(s));
  }

  static ObservationMask all_known(int n) {
    return ObservationMask(n, std::vector<std::uint8_t>(n, 1));
  }
  static ObservationMask none_known(int n) {
    return ObservationMask(n, std::vector<std::uint8_t>(n, 0));
  }

  int n() const { return n_; }
  bool sampled(int v) const { return sampled_[v] != 0; }

  int sampled_count() const {
    return static_cast<int>(std::count(sampled_.begin(), sampled_.end(), std::uint8_t{1}));
  }

  // Dyad-level extension beyond the induced design.
  void mark_known(int i, int j) {
    if (i == j) throw DataError("ObservationMask: diagonal dyad");
    if (extra_known_.empty()) extra_known_.assign(static_cast<std::size_t>(dyad_count(n_)), 0);
    extra_known_[static_cast<std::size_t>(dyad_index(n_, i, j))] = 1;
  }

  bool known(int i, int j) const {
    if (i == j) throw DataError("ObservationMask::known: diagonal dyad");
    if (sampled_[i] && sampled_[j]) return true;
    if (!extra_known_.empty())
      return extra_known_[static_cast<std::size_t>(dyad_index(n_, i, j))] != 0;
    return false;
  }

  std::int64_t known_dyad_count() const {
    if (extra_known_.empty()) {
      const std::int64_t k = sampled_count();
      return k * (k - 1) / 2;
    }
    std::int64_t c = 0;
    for (std::int64_t t = 0; t < dyad_count(n_); ++t) {
      auto [i, j] = dyad_from_index(n_, t);
      if (known(i, j)) ++c;
    }
    return c;
  }

  std::int64_t unknown_dyad_count() const { return dyad_count(n_) - known_dyad_count(); }

  std::vector<int> sampled_ids() const {
    std::vector<int> ids;
    for (int v = 0; v < n_; ++v)
      if (sampled_[v]) ids.push_back(v);
    return ids;
  }

private:
  int n_ = 0;
  std::vector<std::uint8_t> sampled_;
  std::vector<std::uint8_t> extra_known_; // dyad-indexed; allocated on demand
};

// Per-node category labels in 0..q-1 with cached class sizes.
class NodeClassification {
public:
  NodeClassification() = default;
  NodeClassification(int q, std::vector<int> labels) : q_(q), labels_(std::move(labels)) {
    if (q <= 0) throw DataError("NodeClassification: q must be positive");
    sizes_.assign(q, 0);
    for (int m : labels_) {
      if (m < 0 || m >= q) throw DataError("NodeClassification: label out of range");
      ++sizes_[m];
    }
  }

  // Blockwise labels: the first sizes[0] nodes get label 0, and so on.
  static NodeClassification blockwise(std::span<const int> sizes) {
    std::vector<int> labels;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (sizes[k] < 0) throw DataError("NodeClassification: negative class size");
      labels.insert(labels.end(), static_cast<std::size_t>(sizes[k]), static_cast<int>(k));
    }
    return NodeClassification(static_cast<int>(sizes.size()), std::move(labels));
  }

  int q() const { return q_; }
  int n() const { return static_cast<int>(labels_.size()); }
  int label(int v) const { return labels_[v]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& class_sizes() const { return sizes_; }

  int cell_count() const { return q_ * (q_ + 1) / 2; }

  // Flattened upper-triangle index of the unordered cell {k,l}.
  int cell_index(int k, int l) const {
    if (k > l) std::swap(k, l);
    return k * q_ - k * (k - 1) / 2 + (l - k);
  }

  std::pair<int, int> cell_pair(int idx) const {
    for (int k = 0; k < q_; ++k) {
      const int row = q_ - k;
      if (idx < row) return {k, k + idx};
      idx -= row;
    }
    throw DataError("NodeClassification::cell_pair: index out of range");
  }

  // Number of dyads whose endpoints have labels {k,l}.
  std::int64_t cell_capacity(int k, int l) const {
    if (k == l) return static_cast<std::int64_t>(sizes_[k]) * (sizes_[k] - 1) / 2;
    return static_cast<std::int64_t>(sizes_[k]) * sizes_[l];
  }

private:
  int q_ = 0;
  std::vector<int> labels_;
  std::vector<int> sizes_;
};

// Vector counting nodes by degree; counts[j] = #nodes of degree j.
struct DegreeDistribution {
  std::vector<std::int64_t> counts;

  std::int64_t node_count() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  }
  std::int64_t degree_total() const {
    std::int64_t s = 0;
    for (std::size_t j = 0; j < counts.size(); ++j)
      s += static_cast<std::int64_t>(j) * counts[j];
    return s;
  }
  bool operator==(const DegreeDistribution&) const = default;
};

// Symmetric q x q matrix of edge counts by endpoint labels.
struct MixingMatrix {
  int q = 0;
  std::vector<std::int64_t> m; // row-major q*q, kept symmetric

  MixingMatrix() = default;
  explicit MixingMatrix(int q_) : q(q_), m(static_cast<std::size_t>(q_) * q_, 0) {}

  std::int64_t& at(int k, int l) { return m[static_cast<std::size_t>(k) * q + l]; }
  std::int64_t at(int k, int l) const { return m[static_cast<std::size_t>(k) * q + l]; }

  void add(int k, int l, std::int64_t delta) {
    at(k, l) += delta;
    if (k != l) at(l, k) += delta;
  }

  std::int64_t total_edges() const {
    std::int64_t s = 0;
    for (int k = 0; k < q; ++k)
      for (int l = k; l < q; ++l) s += at(k, l);
    return s;
  }

  // Upper-triangle cells in the NodeClassification::cell_index order.
  std::vector<std::int64_t> cells_upper() const {
    std::vector<std::int64_t> c;
    c.reserve(static_cast<std::size_t>(q) * (q + 1) / 2);
    for (int k = 0; k < q; ++k)
      for (int l = k; l < q; ++l) c.push_back(at(k, l));
    return c;
  }

  bool operator==(const MixingMatrix&) const = default;
};

inline DegreeDistribution degree_distribution(const Network& g) {
  DegreeDistribution d;
  d.counts.assign(static_cast<std::size_t>(std::max(g.n(), 1)), 0);
  for (int v = 0; v < g.n(); ++v) ++d.counts[static_cast<std::size_t>(g.degree(v))];
  return d;
}

inline MixingMatrix mixing_matrix(const Network& g, const NodeClassification& c) {
  if (c.n() != g.n()) throw DataError("mixing_matrix: classification size mismatch");
  MixingMatrix mm(c.q());
  for (const auto& [i, j] : g.edges()) mm.add(c.label(i), c.label(j), 1);
  return mm;
}

// Samples round(s*n) nodes uniformly without replacement and returns the
// mask plus the induced observed network.
inline std::pair<ObservationMask, Network> sample_induced_observation(const Network& g,
                                                                      double fraction,
                                                                      Rng& rng) {
  if (fraction < 0.0 || fraction > 1.0)
    throw DataError("sample_induced_observation: fraction outside [0,1]");
  const int n = g.n();
  const int k = static_cast<int>(std::llround(fraction * n));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[i], perm[j]);
  }
  std::vector<std::uint8_t> sampled(n, 0);
  for (int i = 0; i < k; ++i) sampled[static_cast<std::size_t>(perm[i])] = 1;
  ObservationMask mask(n, std::move(sampled));
  Network observed(n);
  for (const auto& [i, j] : g.edges())
    if (mask.sampled(i) && mask.sampled(j)) observed.add_edge(i, j);
  return {std::move(mask), std::move(observed)};
}

} // namespace ccm
