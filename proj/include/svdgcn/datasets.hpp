#pragma once

#include "svdgcn/common.hpp"
#include "svdgcn/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace svdgcn {

struct MaskSet {
  std::vector<char> train;
  std::vector<char> val;
  std::vector<char> test;
};

/// Graph, node features, labels, and disjoint train/val/test masks.
struct NodeDataset {
  DirectedGraph graph;
  Matrix features;          // num_nodes x feat_dim
  std::vector<int> labels;  // class ids in [0, num_classes)
  int num_classes = 0;
  MaskSet masks;

  int num_nodes() const { return graph.num_nodes; }
  int feat_dim() const { return static_cast<int>(features.cols()); }
};

/// Directed stochastic block model. Nodes are labeled in contiguous,
/// as-even-as-possible blocks; each ordered pair (i, j), i != j, gets an
/// edge with probability p_in (same class) or p_out (otherwise). Features
/// are the class unit vector e_(c mod feat_dim) plus feat_noise * N(0, 1).
/// Masks are left empty; call split_masks. Deterministic per seed.
NodeDataset generate_sbm_digraph(int num_nodes, int num_classes, double p_in,
                                 double p_out, int feat_dim, double feat_noise,
                                 std::uint64_t seed);

/// Samples per_class_train nodes from every class for training, then
/// val_size of the remaining nodes for validation; the rest is test.
MaskSet split_masks(const std::vector<int>& labels, int per_class_train,
                    int val_size, std::uint64_t seed);

/// Directory layout: edges.tsv (edge-list format), features.csv (one row of
/// comma-separated reals per node), labels.csv (one class id per node), and
/// optional masks.csv ("train,val,test" 0/1 per node). Floats are written
/// with 17 significant digits so save->load round-trips bit-exactly.
void save_dataset(const NodeDataset& ds, const std::string& dir);
NodeDataset load_dataset(const std::string& dir);

}  // namespace svdgcn
