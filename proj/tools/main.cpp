#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using dgad::cli::Options;
  CLI::App app{"Temporal graph anomaly detection"};
  app.require_subcommand(1);
  Options opts;
  std::string config, out, checkpoint;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment config (JSON)")->required();
    sub->add_option("--out", out, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "overrides the config seed");
  };
  for (const char* name : {"ingest", "inject", "train"}) common(app.add_subcommand(name));
  auto* sample = app.add_subcommand("sample", "dump ego-graph sequences of test events");
  common(sample);
  sample->add_option("--limit", opts.limit, "number of events to dump")->check(CLI::PositiveNumber);
  auto* eval = app.add_subcommand("eval", "score the test split with a trained checkpoint");
  common(eval);
  eval->add_option("--checkpoint", checkpoint, "checkpoint path (default: the one matching the config)");
  auto* sweep = app.add_subcommand("sweep", "train and evaluate over k and GNN depth in {1,2,3}");
  common(sweep);
  sweep->add_option("--threads", opts.threads, "grid cells run in parallel")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dgad::cli::kConfigError;
  }

  opts.command = app.get_subcommands().front()->get_name();
  opts.config = config;
  if (!out.empty()) opts.out = out;
  if (app.get_subcommands().front()->count("--seed") > 0) opts.seed = seed;
  if (!checkpoint.empty()) opts.checkpoint = checkpoint;
  return dgad::cli::run(opts);
}
