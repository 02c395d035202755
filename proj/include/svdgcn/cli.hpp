#pragma once

#include "svdgcn/common.hpp"
#include "svdgcn/training.hpp"

#include <string>
#include <vector>

namespace svdgcn {

/// Everything the subcommands need; the binary fills this from flags and an
/// optional key=value config file.
struct RunConfig {
  // Dataset source: a saved dataset directory, a bare edge list, or the
  // built-in SBM generator when neither is given.
  std::string dataset_dir;
  std::string graph_path;

  // SBM generator spec.
  int sbm_nodes = 300;
  int sbm_classes = 3;
  double sbm_p_in = 0.1;
  double sbm_p_out = 0.01;
  int sbm_feat_dim = 16;
  double sbm_feat_noise = 0.5;

  // Split protocol. val_size < 0 means auto: min(500, remaining/4).
  int per_class_train = 20;
  int val_size = -1;

  TrainConfig train;

  std::string out_dir = "out";
  std::string checkpoint_path;

  std::vector<double> sigmas = {0.0, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0};
  int bench_seeds = 5;

  double verify_tolerance = 1e-8;
};

int resolve_val_size(const RunConfig& cfg, int num_nodes, int num_classes);

/// Dataset per the configured source; splits masks when absent.
NodeDataset resolve_dataset(const RunConfig& cfg);

/// Builds the exact bank for the configured graph and prints lambda_max,
/// band count, reconstruction error and identity-condition deviation.
/// Returns 0 iff the reconstruction error is within tolerance and the
/// identity deviation within 1e-12.
int cmd_verify(const RunConfig& cfg);

/// Trains, then writes history.csv, metrics.txt and checkpoint.bin under
/// the output directory.
int cmd_train(const RunConfig& cfg);

/// Loads a checkpoint, rebuilds its pipeline and reports accuracies.
int cmd_eval(const RunConfig& cfg);

/// Per noise level: trains the framelet model and the plain-convolution
/// baseline on noise-injected features over several seeds; writes
/// denoise.csv with (sigma, model, mean, std).
int cmd_denoise_bench(const RunConfig& cfg);

/// Reports per-band scalar fit error, operator error against the exact
/// squared-spectrum bank (small graphs), and bank build wall times with and
/// without the SVD route.
int cmd_cheb_bench(const RunConfig& cfg);

/// Generates an SBM dataset with masks and saves it to the output directory.
int cmd_gen_sbm(const RunConfig& cfg);

}  // namespace svdgcn
