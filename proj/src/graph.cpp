#include "svdgcn/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string_view>

namespace svdgcn {

namespace {

int parse_node_id(std::string_view token, int line_no) {
  int value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || value < 0) {
    throw ParseError("edge list line " + std::to_string(line_no) +
                     ": expected nonnegative integer id, got '" +
                     std::string(token) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

DirectedGraph DirectedGraph::from_edges(int num_nodes, std::vector<Edge> edges) {
  if (num_nodes <= 0) {
    throw ConfigError("graph must have a positive number of nodes");
  }
  for (const Edge& e : edges) {
    if (e.src < 0 || e.src >= num_nodes || e.dst < 0 || e.dst >= num_nodes) {
      throw ParseError("edge (" + std::to_string(e.src) + ", " +
                       std::to_string(e.dst) + ") out of bounds for " +
                       std::to_string(num_nodes) + " nodes");
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return DirectedGraph{num_nodes, std::move(edges)};
}

DirectedGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list '" + path + "'");

  std::vector<Edge> edges;
  int header_nodes = -1;
  int max_id = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      constexpr std::string_view kHeader = "#nodes";
      if (line_no == 1 && view.substr(0, kHeader.size()) == kHeader) {
        header_nodes = parse_node_id(trim(view.substr(kHeader.size())), line_no);
        if (header_nodes <= 0) {
          throw ParseError("edge list line 1: node count must be positive");
        }
      }
      continue;
    }
    auto tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("edge list line " + std::to_string(line_no) +
                       ": expected 'src<TAB>dst'");
    }
    Edge e{parse_node_id(trim(view.substr(0, tab)), line_no),
           parse_node_id(trim(view.substr(tab + 1)), line_no)};
    if (header_nodes >= 0 && (e.src >= header_nodes || e.dst >= header_nodes)) {
      throw ParseError("edge list line " + std::to_string(line_no) + ": id " +
                       std::to_string(std::max(e.src, e.dst)) +
                       " >= declared node count " +
                       std::to_string(header_nodes));
    }
    max_id = std::max({max_id, e.src, e.dst});
    edges.push_back(e);
  }
  const int num_nodes = header_nodes >= 0 ? header_nodes : max_id + 1;
  if (num_nodes <= 0) {
    throw ParseError("edge list '" + path + "' declares no nodes");
  }
  return DirectedGraph::from_edges(num_nodes, std::move(edges));
}

void save_edge_list(const DirectedGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write edge list '" + path + "'");
  out << "#nodes " << g.num_nodes << "\n";
  for (const Edge& e : g.edges) out << e.src << '\t' << e.dst << '\n';
  if (!out) throw IoError("short write to '" + path + "'");
}

DegreePair degrees(const DirectedGraph& g) {
  DegreePair d;
  d.in = Eigen::VectorXi::Zero(g.num_nodes);
  d.out = Eigen::VectorXi::Zero(g.num_nodes);
  for (const Edge& e : g.edges) {
    d.out[e.src] += 1;
    d.in[e.dst] += 1;
  }
  return d;
}

namespace {

// Row/column scaling factors 1/sqrt(deg + 1) for both conventions.
std::pair<Vector, Vector> normalization_scales(const DirectedGraph& g,
                                               bool transpose) {
  const DegreePair d = degrees(g);
  Vector row(g.num_nodes), col(g.num_nodes);
  for (int i = 0; i < g.num_nodes; ++i) {
    const double in_scale = 1.0 / std::sqrt(static_cast<double>(d.in[i]) + 1.0);
    const double out_scale =
        1.0 / std::sqrt(static_cast<double>(d.out[i]) + 1.0);
    row[i] = transpose ? out_scale : in_scale;
    col[i] = transpose ? in_scale : out_scale;
  }
  return {row, col};
}

}  // namespace

Matrix normalized_adjacency(const DirectedGraph& g, bool transpose) {
  const auto [row, col] = normalization_scales(g, transpose);
  Matrix a = Matrix::Zero(g.num_nodes, g.num_nodes);
  for (const Edge& e : g.edges) {
    const int r = transpose ? e.src : e.dst;
    const int c = transpose ? e.dst : e.src;
    a(r, c) = 1.0;
  }
  for (int i = 0; i < g.num_nodes; ++i) a(i, i) = 1.0;  // A + I, loops capped
  return row.asDiagonal() * a * col.asDiagonal();
}

SparseMatrix normalized_adjacency_sparse(const DirectedGraph& g,
                                         bool transpose) {
  const auto [row, col] = normalization_scales(g, transpose);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.edges.size() + static_cast<std::size_t>(g.num_nodes));
  for (const Edge& e : g.edges) {
    if (e.src == e.dst) continue;  // absorbed by the identity below
    const int r = transpose ? e.src : e.dst;
    const int c = transpose ? e.dst : e.src;
    triplets.emplace_back(r, c, row[r] * col[c]);
  }
  for (int i = 0; i < g.num_nodes; ++i) {
    triplets.emplace_back(i, i, row[i] * col[i]);
  }
  SparseMatrix a(g.num_nodes, g.num_nodes);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

}  // namespace svdgcn
