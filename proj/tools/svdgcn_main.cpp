#include "svdgcn/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

int dispatch(const CLI::App& app, const svdgcn::RunConfig& cfg) {
  using namespace svdgcn;
  if (app.got_subcommand("verify")) return cmd_verify(cfg);
  if (app.got_subcommand("train")) return cmd_train(cfg);
  if (app.got_subcommand("eval")) return cmd_eval(cfg);
  if (app.got_subcommand("denoise-bench")) return cmd_denoise_bench(cfg);
  if (app.got_subcommand("cheb-bench")) return cmd_cheb_bench(cfg);
  if (app.got_subcommand("gen-sbm")) return cmd_gen_sbm(cfg);
  std::cerr << "no subcommand given" << std::endl;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  svdgcn::RunConfig cfg;
  std::string framelet = "linear";
  std::string variant = "framelet1";
  std::string activation = "relu";

  CLI::App app{
      "SVD framelet transforms and graph convolutions for directed graphs"};
  app.set_config("--config", "", "key=value config file; flags override it");

  app.add_option("--dataset", cfg.dataset_dir,
                 "dataset directory (edges.tsv, features.csv, labels.csv)");
  app.add_option("--graph", cfg.graph_path, "bare edge-list file");
  app.add_option("--out", cfg.out_dir, "output directory")
      ->capture_default_str();

  app.add_option("--framelet", framelet, "modulation family")
      ->check(CLI::IsMember({"linear", "entropy"}))
      ->capture_default_str();
  app.add_option("--alpha", cfg.train.alpha, "entropy family parameter")
      ->capture_default_str();
  app.add_option("--scale", cfg.train.scale, "dilation scale s (> 1)")
      ->capture_default_str();
  app.add_option("--levels", cfg.train.levels, "multiresolution level L")
      ->capture_default_str();
  app.add_option("--cheb-degree", cfg.train.cheb_degree,
                 "Chebyshev fit degree")
      ->capture_default_str();
  app.add_option("--variant", variant, "layer variant")
      ->check(CLI::IsMember({"framelet1", "framelet2", "framelet3", "plain"}))
      ->capture_default_str();
  app.add_flag("--raw-scale", cfg.train.raw_scale,
               "feed the spectrum to the modulation functions unscaled");
  app.add_flag("--transpose-adjacency", cfg.train.transpose_adjacency,
               "use the row = source adjacency convention");

  app.add_option("--hidden", cfg.train.hidden, "hidden units")
      ->capture_default_str();
  app.add_option("--dropout", cfg.train.dropout, "input dropout ratio")
      ->capture_default_str();
  app.add_option("--lr", cfg.train.lr, "learning rate")
      ->capture_default_str();
  app.add_option("--weight-decay", cfg.train.weight_decay, "L2 penalty")
      ->capture_default_str();
  app.add_option("--epochs", cfg.train.epochs, "training epochs")
      ->capture_default_str();
  app.add_option("--seed", cfg.train.seed, "RNG seed")->capture_default_str();
  app.add_option("--activation", activation, "layer activation")
      ->check(CLI::IsMember({"relu", "identity"}))
      ->capture_default_str();
  app.add_option("--dense-threshold", cfg.train.dense_threshold,
                 "largest node count with dense Chebyshev banks")
      ->capture_default_str();

  app.add_option("--nodes", cfg.sbm_nodes, "SBM node count")
      ->capture_default_str();
  app.add_option("--classes", cfg.sbm_classes, "SBM class count")
      ->capture_default_str();
  app.add_option("--p-in", cfg.sbm_p_in, "SBM intra-class edge probability")
      ->capture_default_str();
  app.add_option("--p-out", cfg.sbm_p_out, "SBM inter-class edge probability")
      ->capture_default_str();
  app.add_option("--feat-dim", cfg.sbm_feat_dim, "SBM feature dimension")
      ->capture_default_str();
  app.add_option("--feat-noise", cfg.sbm_feat_noise,
                 "SBM feature noise std")
      ->capture_default_str();

  app.add_option("--per-class-train", cfg.per_class_train,
                 "training nodes per class")
      ->capture_default_str();
  app.add_option("--val-size", cfg.val_size,
                 "validation nodes (-1 = min(500, remaining/4))")
      ->capture_default_str();
  app.add_option("--checkpoint", cfg.checkpoint_path, "checkpoint to load");
  app.add_option("--sigmas", cfg.sigmas, "noise levels for denoise-bench");
  app.add_option("--bench-seeds", cfg.bench_seeds, "runs per noise level")
      ->capture_default_str();
  app.add_option("--tolerance", cfg.verify_tolerance,
                 "verify reconstruction tolerance")
      ->capture_default_str();

  const char* subcommands[][2] = {
      {"verify", "check exact decomposition/reconstruction on a graph"},
      {"train", "train a model and write history, metrics and checkpoint"},
      {"eval", "evaluate a checkpoint on a dataset"},
      {"denoise-bench", "accuracy under feature noise vs the plain baseline"},
      {"cheb-bench", "Chebyshev approximation quality and build timings"},
      {"gen-sbm", "generate and save an SBM dataset"},
  };
  for (const auto& sc : subcommands) {
    app.add_subcommand(sc[0], sc[1])->fallthrough();
  }
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.train.family = svdgcn::family_from_string(framelet);
    cfg.train.variant = svdgcn::variant_from_string(variant);
    cfg.train.activation = activation == "identity"
                               ? svdgcn::Activation::Identity
                               : svdgcn::Activation::ReLU;
    return dispatch(app, cfg);
  } catch (const svdgcn::ParseError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const svdgcn::IoError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const svdgcn::ConfigError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
