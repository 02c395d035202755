#include "svdgcn/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string_view>

namespace svdgcn {

namespace {

namespace fs = std::filesystem;

/// Appends edges i -> j for j in [begin, end), j != i, each kept with
/// probability p, by jumping between hits with geometric skips.
void sample_edge_run(int i, int begin, int end, double p,
                     std::mt19937_64& rng, std::vector<Edge>& edges) {
  if (p <= 0.0 || begin >= end) return;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (p >= 1.0) {
    for (int j = begin; j < end; ++j) {
      if (j != i) edges.push_back({i, j});
    }
    return;
  }
  const double log_q = std::log1p(-p);
  int j = begin - 1;
  while (true) {
    const double u = std::max(unit(rng), 1e-300);
    const double skip = std::floor(std::log(u) / log_q);
    if (skip >= static_cast<double>(end)) break;  // jumped past the run
    j += 1 + static_cast<int>(skip);
    if (j >= end) break;
    if (j != i) edges.push_back({i, j});
  }
}

std::vector<int> block_sizes(int num_nodes, int num_classes) {
  std::vector<int> sizes(static_cast<std::size_t>(num_classes),
                         num_nodes / num_classes);
  for (int c = 0; c < num_nodes % num_classes; ++c) {
    sizes[static_cast<std::size_t>(c)] += 1;
  }
  return sizes;
}

}  // namespace

NodeDataset generate_sbm_digraph(int num_nodes, int num_classes, double p_in,
                                 double p_out, int feat_dim, double feat_noise,
                                 std::uint64_t seed) {
  if (num_classes < 1 || num_nodes < num_classes) {
    throw ConfigError("need num_nodes >= num_classes >= 1");
  }
  if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0)) {
    throw ConfigError("need 0 <= p_out <= p_in <= 1");
  }
  if (feat_dim < 1) throw ConfigError("feat_dim must be >= 1");
  if (feat_noise < 0.0) throw ConfigError("feat_noise must be >= 0");

  NodeDataset ds;
  ds.num_classes = num_classes;
  ds.labels.resize(static_cast<std::size_t>(num_nodes));
  const std::vector<int> sizes = block_sizes(num_nodes, num_classes);
  std::vector<int> starts(static_cast<std::size_t>(num_classes) + 1, 0);
  for (int c = 0; c < num_classes; ++c) {
    starts[static_cast<std::size_t>(c) + 1] =
        starts[static_cast<std::size_t>(c)] + sizes[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < num_classes; ++c) {
    for (int i = starts[static_cast<std::size_t>(c)];
         i < starts[static_cast<std::size_t>(c) + 1]; ++i) {
      ds.labels[static_cast<std::size_t>(i)] = c;
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < num_nodes; ++i) {
    const int c = ds.labels[static_cast<std::size_t>(i)];
    const int own_begin = starts[static_cast<std::size_t>(c)];
    const int own_end = starts[static_cast<std::size_t>(c) + 1];
    sample_edge_run(i, 0, own_begin, p_out, rng, edges);
    sample_edge_run(i, own_begin, own_end, p_in, rng, edges);
    sample_edge_run(i, own_end, num_nodes, p_out, rng, edges);
  }
  ds.graph = DirectedGraph::from_edges(num_nodes, std::move(edges));

  std::normal_distribution<double> gauss(0.0, 1.0);
  ds.features = Matrix::Zero(num_nodes, feat_dim);
  for (int i = 0; i < num_nodes; ++i) {
    ds.features(i, ds.labels[static_cast<std::size_t>(i)] % feat_dim) = 1.0;
    for (int j = 0; j < feat_dim; ++j) {
      ds.features(i, j) += feat_noise * gauss(rng);
    }
  }
  return ds;
}

MaskSet split_masks(const std::vector<int>& labels, int per_class_train,
                    int val_size, std::uint64_t seed) {
  const int n = static_cast<int>(labels.size());
  if (per_class_train < 1) throw ConfigError("per_class_train must be >= 1");
  if (val_size < 0) throw ConfigError("val_size must be >= 0");
  const int num_classes =
      labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (num_classes < 1) throw ConfigError("labels are empty");

  std::vector<std::vector<int>> by_class(
      static_cast<std::size_t>(num_classes));
  for (int i = 0; i < n; ++i) {
    by_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]
        .push_back(i);
  }

  std::mt19937_64 rng(seed);
  MaskSet masks;
  masks.train.assign(static_cast<std::size_t>(n), 0);
  masks.val.assign(static_cast<std::size_t>(n), 0);
  masks.test.assign(static_cast<std::size_t>(n), 0);

  for (int c = 0; c < num_classes; ++c) {
    auto& nodes = by_class[static_cast<std::size_t>(c)];
    if (static_cast<int>(nodes.size()) < per_class_train) {
      throw ConfigError("class " + std::to_string(c) + " has only " +
                        std::to_string(nodes.size()) + " nodes, need " +
                        std::to_string(per_class_train) + " for training");
    }
    std::shuffle(nodes.begin(), nodes.end(), rng);
    for (int t = 0; t < per_class_train; ++t) {
      masks.train[static_cast<std::size_t>(nodes[static_cast<std::size_t>(t)])] =
          1;
    }
  }

  std::vector<int> pool;
  for (int i = 0; i < n; ++i) {
    if (!masks.train[static_cast<std::size_t>(i)]) pool.push_back(i);
  }
  if (static_cast<int>(pool.size()) <= val_size) {
    throw ConfigError("not enough nodes left for validation + test: pool " +
                      std::to_string(pool.size()) + ", val " +
                      std::to_string(val_size));
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  for (int i = 0; i < val_size; ++i) {
    masks.val[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)])] = 1;
  }
  for (std::size_t i = static_cast<std::size_t>(val_size); i < pool.size();
       ++i) {
    masks.test[static_cast<std::size_t>(pool[i])] = 1;
  }
  return masks;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

double parse_double(std::string_view token, const std::string& file, int row) {
  // std::from_chars<double> round-trips %.17g exactly.
  double value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() ||
      !std::isfinite(value)) {
    throw ParseError(file + " row " + std::to_string(row) +
                     ": bad real '" + std::string(token) + "'");
  }
  return value;
}

int parse_int(std::string_view token, const std::string& file, int row) {
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(file + " row " + std::to_string(row) +
                     ": bad integer '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

void save_dataset(const NodeDataset& ds, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path base(dir);
  save_edge_list(ds.graph, (base / "edges.tsv").string());

  {
    std::ofstream out(base / "features.csv");
    if (!out) throw IoError("cannot write features.csv");
    for (int i = 0; i < ds.features.rows(); ++i) {
      for (int j = 0; j < ds.features.cols(); ++j) {
        if (j) out << ',';
        out << format_double(ds.features(i, j));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(base / "labels.csv");
    if (!out) throw IoError("cannot write labels.csv");
    for (int label : ds.labels) out << label << '\n';
  }
  if (!ds.masks.train.empty()) {
    std::ofstream out(base / "masks.csv");
    if (!out) throw IoError("cannot write masks.csv");
    for (std::size_t i = 0; i < ds.masks.train.size(); ++i) {
      out << int(ds.masks.train[i]) << ',' << int(ds.masks.val[i]) << ','
          << int(ds.masks.test[i]) << '\n';
    }
  }
}

NodeDataset load_dataset(const std::string& dir) {
  const fs::path base(dir);
  if (!fs::is_directory(base)) {
    throw IoError("dataset directory '" + dir + "' does not exist");
  }
  NodeDataset ds;
  ds.graph = load_edge_list((base / "edges.tsv").string());

  const auto feature_lines = read_lines(base / "features.csv");
  if (static_cast<int>(feature_lines.size()) != ds.graph.num_nodes) {
    throw ParseError("features.csv has " +
                     std::to_string(feature_lines.size()) + " rows, graph has " +
                     std::to_string(ds.graph.num_nodes) + " nodes");
  }
  const auto first_fields = split_csv(feature_lines.front());
  const int feat_dim = static_cast<int>(first_fields.size());
  ds.features = Matrix(ds.graph.num_nodes, feat_dim);
  for (int i = 0; i < ds.graph.num_nodes; ++i) {
    const auto fields = split_csv(feature_lines[static_cast<std::size_t>(i)]);
    if (static_cast<int>(fields.size()) != feat_dim) {
      throw ParseError("features.csv row " + std::to_string(i + 1) +
                       ": expected " + std::to_string(feat_dim) + " fields");
    }
    for (int j = 0; j < feat_dim; ++j) {
      ds.features(i, j) = parse_double(fields[static_cast<std::size_t>(j)],
                                       "features.csv", i + 1);
    }
  }

  const auto label_lines = read_lines(base / "labels.csv");
  if (static_cast<int>(label_lines.size()) != ds.graph.num_nodes) {
    throw ParseError("labels.csv has " + std::to_string(label_lines.size()) +
                     " rows, graph has " + std::to_string(ds.graph.num_nodes) +
                     " nodes");
  }
  ds.labels.resize(static_cast<std::size_t>(ds.graph.num_nodes));
  int max_label = 0;
  for (int i = 0; i < ds.graph.num_nodes; ++i) {
    const int label =
        parse_int(label_lines[static_cast<std::size_t>(i)], "labels.csv", i + 1);
    if (label < 0) {
      throw ParseError("labels.csv row " + std::to_string(i + 1) +
                       ": negative class id");
    }
    ds.labels[static_cast<std::size_t>(i)] = label;
    max_label = std::max(max_label, label);
  }
  ds.num_classes = max_label + 1;

  if (fs::exists(base / "masks.csv")) {
    const auto mask_lines = read_lines(base / "masks.csv");
    if (static_cast<int>(mask_lines.size()) != ds.graph.num_nodes) {
      throw ParseError("masks.csv has " + std::to_string(mask_lines.size()) +
                       " rows, graph has " +
                       std::to_string(ds.graph.num_nodes) + " nodes");
    }
    ds.masks.train.resize(mask_lines.size());
    ds.masks.val.resize(mask_lines.size());
    ds.masks.test.resize(mask_lines.size());
    for (std::size_t i = 0; i < mask_lines.size(); ++i) {
      const auto fields = split_csv(mask_lines[i]);
      if (fields.size() != 3) {
        throw ParseError("masks.csv row " + std::to_string(i + 1) +
                         ": expected train,val,test");
      }
      const int row = static_cast<int>(i) + 1;
      ds.masks.train[i] =
          static_cast<char>(parse_int(fields[0], "masks.csv", row) != 0);
      ds.masks.val[i] =
          static_cast<char>(parse_int(fields[1], "masks.csv", row) != 0);
      ds.masks.test[i] =
          static_cast<char>(parse_int(fields[2], "masks.csv", row) != 0);
      if ((ds.masks.train[i] & ds.masks.val[i]) ||
          (ds.masks.train[i] & ds.masks.test[i]) ||
          (ds.masks.val[i] & ds.masks.test[i])) {
        throw ParseError("masks.csv row " + std::to_string(row) +
                         ": masks overlap");
      }
    }
  }
  return ds;
}

}  // namespace svdgcn
