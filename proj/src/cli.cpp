#include "svdgcn/cli.hpp"

#include "svdgcn/graph.hpp"
#include "svdgcn/operators.hpp"
#include "svdgcn/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace svdgcn {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ModulationSet modulation_from(const TrainConfig& cfg) {
  return cfg.family == Family::Entropy ? ModulationSet::entropy(cfg.alpha)
                                       : ModulationSet::linear();
}

DirectedGraph resolve_graph(const RunConfig& cfg) {
  if (!cfg.graph_path.empty()) return load_edge_list(cfg.graph_path);
  if (!cfg.dataset_dir.empty()) return load_dataset(cfg.dataset_dir).graph;
  return generate_sbm_digraph(cfg.sbm_nodes, cfg.sbm_classes, cfg.sbm_p_in,
                              cfg.sbm_p_out, cfg.sbm_feat_dim,
                              cfg.sbm_feat_noise, cfg.train.seed)
      .graph;
}

void write_history_csv(const std::string& path,
                       const std::vector<EpochStats>& history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "epoch,train_loss,val_acc,test_acc\n";
  for (const EpochStats& s : history) {
    out << s.epoch << ',' << fmt(s.train_loss) << ',' << fmt(s.val_acc) << ','
        << fmt(s.test_acc) << '\n';
  }
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

int resolve_val_size(const RunConfig& cfg, int num_nodes, int num_classes) {
  if (cfg.val_size >= 0) return cfg.val_size;
  const int pool = num_nodes - cfg.per_class_train * num_classes;
  return std::max(0, std::min(500, pool / 4));
}

NodeDataset resolve_dataset(const RunConfig& cfg) {
  NodeDataset ds;
  if (!cfg.dataset_dir.empty()) {
    ds = load_dataset(cfg.dataset_dir);
  } else if (!cfg.graph_path.empty()) {
    throw ConfigError(
        "this command needs features and labels; pass --dataset or use the "
        "SBM generator");
  } else {
    ds = generate_sbm_digraph(cfg.sbm_nodes, cfg.sbm_classes, cfg.sbm_p_in,
                              cfg.sbm_p_out, cfg.sbm_feat_dim,
                              cfg.sbm_feat_noise, cfg.train.seed);
  }
  if (ds.masks.train.empty()) {
    ds.masks = split_masks(ds.labels, cfg.per_class_train,
                           resolve_val_size(cfg, ds.num_nodes(), ds.num_classes),
                           cfg.train.seed);
  }
  return ds;
}

int cmd_verify(const RunConfig& cfg) {
  const DirectedGraph g = resolve_graph(cfg);
  const Matrix a_hat =
      normalized_adjacency(g, cfg.train.transpose_adjacency);
  const SvdFactors svd = compute_svd(a_hat);
  const ModulationSet set = modulation_from(cfg.train);

  FrameletConfig fc;
  fc.levels = cfg.train.levels;
  fc.scale = cfg.train.scale;
  fc.raw_scale = cfg.train.raw_scale;
  const FrameletOperators ops = build_exact_operators(svd, set, fc);

  const double recon_error = verify_theorem1(ops, a_hat);
  const double identity_dev = check_identity(set, 1001);
  std::cout << "nodes=" << g.num_nodes << " edges=" << g.num_edges() << "\n"
            << "lambda_max=" << fmt(svd.lambda.maxCoeff()) << "\n"
            << "bands=" << ops.band_count()
            << " (levels=" << cfg.train.levels << ", scale="
            << fmt(cfg.train.scale) << ", m=" << ops.base_exponent() << ")\n"
            << "reconstruction_error=" << fmt(recon_error) << "\n"
            << "identity_deviation=" << fmt(identity_dev) << std::endl;
  const bool ok = recon_error <= cfg.verify_tolerance && identity_dev <= 1e-12;
  if (!ok) std::cerr << "verification FAILED" << std::endl;
  return ok ? 0 : 1;
}

int cmd_train(const RunConfig& cfg) {
  const NodeDataset ds = resolve_dataset(cfg);
  const TrainResult result = train(ds, cfg.train);

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  write_history_csv((out / "history.csv").string(), result.history);
  save_checkpoint((out / "checkpoint.bin").string(), result.model,
                  checkpoint_meta(cfg.train));
  {
    std::ofstream metrics(out / "metrics.txt");
    if (!metrics) throw IoError("cannot write metrics.txt");
    metrics << "variant=" << variant_name(cfg.train.variant) << '\n'
            << "epochs=" << cfg.train.epochs << '\n'
            << "seed=" << cfg.train.seed << '\n'
            << "best_epoch=" << result.best_epoch << '\n'
            << "best_val_accuracy=" << fmt(result.best_val_acc) << '\n'
            << "test_accuracy=" << fmt(result.test_accuracy) << '\n';
  }
  std::cout << "best_epoch=" << result.best_epoch
            << " val_acc=" << fmt(result.best_val_acc)
            << " test_acc=" << fmt(result.test_accuracy) << std::endl;
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  if (cfg.checkpoint_path.empty()) {
    throw ConfigError("eval needs --checkpoint");
  }
  NodeDataset ds = resolve_dataset(cfg);
  const Checkpoint ck = load_checkpoint(cfg.checkpoint_path);

  TrainConfig tc = cfg.train;
  tc.variant = ck.meta.variant;
  tc.activation = ck.meta.activation;
  tc.family = ck.meta.family;
  tc.alpha = ck.meta.alpha;
  tc.levels = ck.meta.levels;
  tc.scale = ck.meta.scale;
  tc.cheb_degree = ck.meta.cheb_degree;
  tc.raw_scale = ck.meta.raw_scale;
  tc.transpose_adjacency = ck.meta.transpose_adjacency;
  tc.hidden = static_cast<int>(ck.layer.weight.cols());

  SvdGcnModel model = build_model(ds, tc);
  model.layer = ck.layer;
  model.head = ck.head;

  std::cout << "train_accuracy=" << fmt(evaluate(model, ds, ds.masks.train))
            << std::endl;
  if (std::count(ds.masks.val.begin(), ds.masks.val.end(), 1) > 0) {
    std::cout << "val_accuracy=" << fmt(evaluate(model, ds, ds.masks.val))
              << std::endl;
  }
  if (std::count(ds.masks.test.begin(), ds.masks.test.end(), 1) > 0) {
    std::cout << "test_accuracy=" << fmt(evaluate(model, ds, ds.masks.test))
              << std::endl;
  }
  return 0;
}

int cmd_denoise_bench(const RunConfig& cfg) {
  const NodeDataset base = resolve_dataset(cfg);
  if (cfg.bench_seeds < 1) throw ConfigError("need at least one bench seed");

  fs::create_directories(cfg.out_dir);
  std::ofstream csv(fs::path(cfg.out_dir) / "denoise.csv");
  if (!csv) throw IoError("cannot write denoise.csv");
  csv << "sigma,model,mean_accuracy,std_accuracy\n";

  std::cout << "sigma     model      mean    std" << std::endl;
  for (double sigma : cfg.sigmas) {
    std::vector<double> framelet_accs, plain_accs;
    for (int run = 0; run < cfg.bench_seeds; ++run) {
      NodeDataset noisy = base;
      noisy.features = inject_noise(
          base.features, sigma,
          cfg.train.seed + 1000 * static_cast<std::uint64_t>(run) + 17);
      TrainConfig tc = cfg.train;
      tc.seed = cfg.train.seed + static_cast<std::uint64_t>(run);
      framelet_accs.push_back(train(noisy, tc).test_accuracy);
      tc.variant = ModelVariant::PlainConv;
      plain_accs.push_back(train(noisy, tc).test_accuracy);
    }
    const std::string model_name = variant_name(cfg.train.variant);
    csv << fmt(sigma) << ',' << model_name << ',' << fmt(mean_of(framelet_accs))
        << ',' << fmt(std_of(framelet_accs)) << '\n';
    csv << fmt(sigma) << ",plain," << fmt(mean_of(plain_accs)) << ','
        << fmt(std_of(plain_accs)) << '\n';
    std::printf("%-9g %-10s %-7.4f %-7.4f\n", sigma, model_name.c_str(),
                mean_of(framelet_accs), std_of(framelet_accs));
    std::printf("%-9g %-10s %-7.4f %-7.4f\n", sigma, "plain",
                mean_of(plain_accs), std_of(plain_accs));
  }
  return 0;
}

int cmd_cheb_bench(const RunConfig& cfg) {
  const DirectedGraph g = resolve_graph(cfg);
  const ModulationSet set = modulation_from(cfg.train);
  const int degree = cfg.train.cheb_degree;
  const ChebFilter filter = cheb_fit_all(set, degree);

  std::cout << "family=" << family_name(set.family())
            << " degree=" << degree << std::endl;
  for (int k = 0; k < filter.band_count(); ++k) {
    std::cout << "band " << k << " max_fit_error="
              << fmt(cheb_fit_error(filter.bands[static_cast<std::size_t>(k)],
                                    set, k, 10001))
              << std::endl;
  }

  const SparseMatrix a_sparse =
      normalized_adjacency_sparse(g, cfg.train.transpose_adjacency);
  FrameletConfig fc;
  fc.levels = cfg.train.levels;
  fc.scale = cfg.train.scale;
  fc.variant = BankVariant::Chebyshev;
  fc.cheb_degree = degree;
  fc.raw_scale = cfg.train.raw_scale;

  using Clock = std::chrono::steady_clock;
  const auto cheb_start = Clock::now();
  const FrameletOperators cheb = build_cheb_operators(a_sparse, filter, fc);
  const double cheb_seconds =
      std::chrono::duration<double>(Clock::now() - cheb_start).count();
  std::cout << "cheb_bank_seconds=" << fmt(cheb_seconds)
            << " (no SVD, dense=" << (cheb.is_dense() ? "yes" : "no") << ")"
            << std::endl;

  if (g.num_nodes <= 256) {
    const auto svd_start = Clock::now();
    const Matrix a_dense =
        normalized_adjacency(g, cfg.train.transpose_adjacency);
    const SvdFactors svd = compute_svd(a_dense);
    FrameletConfig ref_cfg = fc;
    ref_cfg.variant = BankVariant::Exact;
    const FrameletOperators reference =
        build_lambda2_reference(svd, set, ref_cfg);
    const double svd_seconds =
        std::chrono::duration<double>(Clock::now() - svd_start).count();
    std::cout << "svd_bank_seconds=" << fmt(svd_seconds) << std::endl;

    double worst = 0.0;
    for (int b = 0; b < cheb.band_count(); ++b) {
      const Matrix& exact = reference.decomposition_matrix(b);
      const double denom = std::max(exact.norm(), 1e-300);
      const double err =
          (cheb.decomposition_matrix(b) - exact).norm() / denom;
      worst = std::max(worst, err);
      std::cout << "band (" << cheb.band_id(b).k << "," << cheb.band_id(b).ell
                << ") operator_rel_error=" << fmt(err) << std::endl;
    }
    std::cout << "worst_operator_rel_error=" << fmt(worst) << std::endl;
  } else {
    std::cout << "operator comparison skipped (graph larger than 256 nodes)"
              << std::endl;
  }
  return 0;
}

int cmd_gen_sbm(const RunConfig& cfg) {
  NodeDataset ds = generate_sbm_digraph(cfg.sbm_nodes, cfg.sbm_classes,
                                        cfg.sbm_p_in, cfg.sbm_p_out,
                                        cfg.sbm_feat_dim, cfg.sbm_feat_noise,
                                        cfg.train.seed);
  ds.masks = split_masks(ds.labels, cfg.per_class_train,
                         resolve_val_size(cfg, ds.num_nodes(), ds.num_classes),
                         cfg.train.seed);
  save_dataset(ds, cfg.out_dir);
  std::cout << "nodes=" << ds.num_nodes() << " edges=" << ds.graph.num_edges()
            << " classes=" << ds.num_classes << " feat_dim=" << ds.feat_dim()
            << " -> " << cfg.out_dir << std::endl;
  return 0;
}

}  // namespace svdgcn
