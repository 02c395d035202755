#pragma once

#include "svdgcn/common.hpp"

#include <string>
#include <vector>

namespace svdgcn {

struct Edge {
  int src = 0;
  int dst = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable directed graph. Edges are stored deduplicated in sorted
/// (src, dst) order; self-loops are permitted in the input.
struct DirectedGraph {
  int num_nodes = 0;
  std::vector<Edge> edges;

  /// Validates ids against [0, num_nodes), sorts and deduplicates.
  static DirectedGraph from_edges(int num_nodes, std::vector<Edge> edges);

  int num_edges() const { return static_cast<int>(edges.size()); }
};

/// Reads the tab-separated edge-list format:
///   optional first line "#nodes N", then one "src<TAB>dst" pair per line.
/// Other lines starting with '#' are comments. Without the header the node
/// count is 1 + max id. Duplicate lines collapse to one edge.
DirectedGraph load_edge_list(const std::string& path);

/// Writes the same format, always with the "#nodes N" header.
void save_edge_list(const DirectedGraph& g, const std::string& path);

struct DegreePair {
  Eigen::VectorXi in;   // in[i]  = #edges (* -> i)
  Eigen::VectorXi out;  // out[i] = #edges (i -> *)
};

DegreePair degrees(const DirectedGraph& g);

/// Self-looped, dual-degree normalized adjacency
///   entry(i, j) = (A + I)_ij / sqrt((in(i) + 1) * (out(j) + 1)).
///
/// Convention: A_ij = 1 iff the graph has the edge j -> i (row =
/// destination), so multiplying a signal by the result aggregates each
/// node's in-neighbors. `transpose` flips to the row = source convention,
/// which is exactly the transpose of the default matrix.
///
/// A self-loop present in the input is absorbed by the added identity, so
/// the diagonal of A + I stays at 1.
Matrix normalized_adjacency(const DirectedGraph& g, bool transpose = false);

/// Sparse version of the same matrix; the large-graph path never
/// materializes it densely.
SparseMatrix normalized_adjacency_sparse(const DirectedGraph& g,
                                         bool transpose = false);

}  // namespace svdgcn
