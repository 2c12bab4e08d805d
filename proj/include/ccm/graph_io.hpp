#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccm/errors.hpp"
#include "ccm/graph.hpp"

namespace ccm {

// Edge-list format: one "i j" pair per line, 0-based, whitespace separated;
// lines starting with '#' are ignored.
inline std::vector<std::pair<int, int>> read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list: " + path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    long long i, j;
    if (!(ss >> i >> j))
      throw DataError(path + ":" + std::to_string(lineno) + ": expected two node ids");
    if (i < 0 || j < 0)
      throw DataError(path + ":" + std::to_string(lineno) + ": negative node id");
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  return edges;
}

inline Network network_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Network g(n);
  for (const auto& [i, j] : edges) g.add_edge(i, j);
  return g;
}

inline void write_edge_list(const Network& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write edge list: " + path);
  auto edges = g.edges();
  std::sort(edges.begin(), edges.end());
  out << "# n " << g.n() << "\n";
  for (const auto& [i, j] : edges) out << i << " " << j << "\n";
}

// Mask format: one sampled node id per line.
inline ObservationMask read_mask(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open mask file: " + path);
  std::vector<int> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    long long v;
    if (!(ss >> v)) throw DataError(path + ":" + std::to_string(lineno) + ": expected node id");
    if (v < 0 || v >= n)
      throw DataError(path + ":" + std::to_string(lineno) + ": node id out of range");
    ids.push_back(static_cast<int>(v));
  }
  return ObservationMask::from_sampled_ids(n, ids);
}

inline void write_mask(const ObservationMask& mask, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write mask file: " + path);
  for (int v : mask.sampled_ids()) out << v << "\n";
}

// Node-attribute format: header "node,label", then one row per node.
inline NodeClassification read_labels(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty label file");
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  int max_label = -1;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b))
      throw DataError(path + ":" + std::to_string(lineno) + ": expected node,label");
    const int v = std::stoi(a);
    const int m = std::stoi(b);
    if (v < 0 || v >= n)
      throw DataError(path + ":" + std::to_string(lineno) + ": node id out of range");
    if (m < 0) throw DataError(path + ":" + std::to_string(lineno) + ": negative label");
    if (labels[static_cast<std::size_t>(v)] != -1)
      throw DataError(path + ":" + std::to_string(lineno) + ": duplicate node id");
    labels[static_cast<std::size_t>(v)] = m;
    max_label = std::max(max_label, m);
  }
  for (int v = 0; v < n; ++v)
    if (labels[static_cast<std::size_t>(v)] == -1)
      throw DataError(path + ": missing label for node " + std::to_string(v));
  return NodeClassification(max_label + 1, std::move(labels));
}

inline void write_labels(const NodeClassification& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write label file: " + path);
  out << "node,label\n";
  for (int v = 0; v < c.n(); ++v) out << v << "," << c.label(v) << "\n";
}

} // namespace ccm
