#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccm/graph.hpp"
#include "ccm/rng.hpp"

namespace ccm {

// A classification mixing-matrix target: class sizes plus the symmetric
// cell-count matrix a network should realize.
struct MmTarget {
  std::vector<int> class_sizes;
  MixingMatrix mm;
};

inline MmTarget make_mm_target(std::vector<int> class_sizes,
                               const std::vector<std::vector<std::int64_t>>& m) {
  const std::size_t q = class_sizes.size();
  if (q == 0) throw DataError("mm target: no classes");
  for (int s : class_sizes)
    if (s < 0) throw DataError("mm target: negative class size");
  if (m.size() != q) throw DataError("mm target: matrix row count does not match class count");
  for (const auto& row : m)
    if (row.size() != q) throw DataError("mm target: matrix is not square");
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t l = 0; l < q; ++l) {
      if (m[k][l] < 0) throw DataError("mm target: negative cell count");
      if (m[k][l] != m[l][k]) throw DataError("mm target: matrix is not symmetric");
    }
  MmTarget t;
  t.class_sizes = std::move(class_sizes);
  t.mm = MixingMatrix(static_cast<int>(q));
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t l = k; l < q; ++l) t.mm.add(static_cast<int>(k), static_cast<int>(l), m[k][l]);
  return t;
}

inline std::int64_t cell_capacity_of(const std::vector<int>& sizes, int k, int l) {
  const auto nk = static_cast<std::int64_t>(sizes[static_cast<std::size_t>(k)]);
  const auto nl = static_cast<std::int64_t>(sizes[static_cast<std::size_t>(l)]);
  return k == l ? nk * (nk - 1) / 2 : nk * nl;
}

// A target is graphical exactly when every cell count fits its capacity:
// n_k*n_l dyads across classes, n_k(n_k-1)/2 within.
inline bool is_graphical(const MmTarget& t) {
  const int q = static_cast<int>(t.class_sizes.size());
  if (t.mm.q != q) throw DataError("mm target: matrix size does not match class count");
  for (int k = 0; k < q; ++k)
    for (int l = k; l < q; ++l) {
      if (t.mm.at(k, l) < 0) throw DataError("mm target: negative cell count");
      if (t.mm.at(k, l) > cell_capacity_of(t.class_sizes, k, l)) return false;
    }
  return true;
}

enum class RealizeMode {
  kProofRemoval, // complete graph, then remove lex-smallest edges per over-full cell
  kDirectFill,   // lexicographically first slots per cell
  kSeededRandom, // uniform slots per cell
};

struct Realization {
  Network g;
  NodeClassification labels;
  std::int64_t removals = 0; // proof path only; 0 otherwise
};

namespace detail {

// All dyads of cell (k,l) in lexicographic order, blockwise node layout.
inline std::vector<std::pair<int, int>> cell_slots(const std::vector<int>& sizes,
                                                   const std::vector<int>& offsets, int k,
                                                   int l) {
  std::vector<std::pair<int, int>> slots;
  const int ok = offsets[static_cast<std::size_t>(k)];
  const int ol = offsets[static_cast<std::size_t>(l)];
  const int nk = sizes[static_cast<std::size_t>(k)];
  const int nl = sizes[static_cast<std::size_t>(l)];
  if (k == l) {
    for (int i = 0; i < nk; ++i)
      for (int j = i + 1; j < nk; ++j) slots.emplace_back(ok + i, ok + j);
  } else {
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nl; ++j) slots.emplace_back(ok + i, ol + j);
  }
  return slots;
}

} // namespace detail

inline Realization realize(const MmTarget& t, RealizeMode mode = RealizeMode::kDirectFill,
                           std::uint64_t seed = 0) {
  if (!is_graphical(t)) throw DataError("realize: target violates a cell capacity bound");
  const int q = static_cast<int>(t.class_sizes.size());
  int n = 0;
  std::vector<int> offsets(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) {
    offsets[static_cast<std::size_t>(k)] = n;
    n += t.class_sizes[static_cast<std::size_t>(k)];
  }

  Realization out;
  out.labels = NodeClassification::blockwise(t.class_sizes);
  out.g = Network(n);
  Rng rng(seed);

  for (int k = 0; k < q; ++k) {
    for (int l = k; l < q; ++l) {
      auto slots = detail::cell_slots(t.class_sizes, offsets, k, l);
      const auto want = static_cast<std::size_t>(t.mm.at(k, l));
      switch (mode) {
        case RealizeMode::kProofRemoval: {
          // Start from the complete cell and remove the lexicographically
          // smallest eligible edge until the count fits. Removing never makes
          // an earlier slot eligible again, so one forward pass over the
          // slots is the same sequence the iterative rule would pick.
          for (const auto& [i, j] : slots) out.g.add_edge(i, j);
          std::size_t have = slots.size();
          for (std::size_t s = 0; s < slots.size() && have > want; ++s) {
            out.g.toggle(slots[s].first, slots[s].second);
            --have;
            ++out.removals;
          }
          break;
        }
        case RealizeMode::kDirectFill: {
          for (std::size_t s = 0; s < want; ++s) out.g.add_edge(slots[s].first, slots[s].second);
          break;
        }
        case RealizeMode::kSeededRandom: {
          for (std::size_t s = 0; s < want; ++s) {
            const std::size_t pick = s + static_cast<std::size_t>(rng.below(slots.size() - s));
            std::swap(slots[s], slots[pick]);
            out.g.add_edge(slots[s].first, slots[s].second);
          }
          break;
        }
      }
    }
  }
  return out;
}

} // namespace ccm
