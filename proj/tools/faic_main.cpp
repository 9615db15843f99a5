#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "faic/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> threads;
  bool timing = false;
};

faic::ExperimentConfig load(const Overrides& o) {
  auto cfg = faic::load_config(o.config);
  if (o.seed) {
    cfg.mc.seed = *o.seed;
    cfg.optimizer.seed = *o.seed;
  }
  if (!o.out.empty()) cfg.output = o.out;
  if (o.threads) cfg.mc.threads = *o.threads;
  if (o.timing) cfg.timing = true;
  return cfg;
}

// Runs `body` against the configured output ("-" is stdout).
template <typename Body>
void with_output(const std::string& path, Body body) {
  if (path == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw faic::Error("cannot open output file '" + path + "'");
  body(f);
  if (!f) throw faic::Error("failed writing '" + path + "'");
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "seed for Monte-Carlo draws and initialization");
  cmd->add_option("--out", o.out, "output path ('-' for stdout)");
  cmd->add_option("--threads", o.threads, "worker threads (default: FAIC_THREADS or 1)");
  cmd->add_flag("--timing", o.timing, "record wall-clock time in CSV output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-alphabet precoding for MIMO interference channels"};
  app.require_subcommand(1);
  Overrides o;
  int exit_code = 0;

  auto* sweep = app.add_subcommand("sweep", "evaluate methods over an SNR grid and write CSV");
  auto* optimize = app.add_subcommand("optimize", "run the gradient-ascent optimizer and report precoders");
  auto* design_low = app.add_subcommand("design-low", "low-SNR beamforming design");
  auto* design_high = app.add_subcommand("design-high", "high-SNR power-allocation design");
  auto* ia_loss = app.add_subcommand("ia-loss", "interference-alignment rate accounting");
  auto* gradcheck = app.add_subcommand("gradcheck", "validate gradients against finite differences");
  auto* detect = app.add_subcommand("detect-demo", "soft MAP detection demo");
  for (auto* cmd : {sweep, optimize, design_low, design_high, ia_loss, gradcheck, detect}) add_common(cmd, o);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load(o);
    if (sweep->parsed()) {
      const auto rows = faic::run_sweep(cfg);
      with_output(cfg.output, [&](std::ostream& out) { faic::write_sweep_csv(out, rows); });
    } else if (optimize->parsed()) {
      std::string trace_path = cfg.trace_output;
      if (trace_path.empty()) trace_path = cfg.output == "-" ? "-" : cfg.output + ".trace.csv";
      std::ostringstream report;
      std::ostringstream trace;
      faic::run_optimize(cfg, report, trace);
      with_output(cfg.output, [&](std::ostream& out) { out << report.str(); });
      with_output(trace_path, [&](std::ostream& out) { out << trace.str(); });
    } else if (design_low->parsed()) {
      with_output(cfg.output, [&](std::ostream& out) { faic::run_design_low(cfg, out); });
    } else if (design_high->parsed()) {
      with_output(cfg.output, [&](std::ostream& out) { faic::run_design_high(cfg, out); });
    } else if (ia_loss->parsed()) {
      with_output(cfg.output, [&](std::ostream& out) { faic::run_ia_loss(cfg, out); });
    } else if (gradcheck->parsed()) {
      bool ok = false;
      with_output(cfg.output, [&](std::ostream& out) { ok = faic::run_gradcheck(cfg, out); });
      exit_code = ok ? 0 : 1;
    } else if (detect->parsed()) {
      faic::DetectSummary summary;
      with_output(cfg.output, [&](std::ostream& out) { summary = faic::run_detect_demo(cfg, out); });
      std::fprintf(stderr, "bits %zu, MAP errors %zu, whitened errors %zu\n", summary.bits, summary.map_errors,
                   summary.whitened_errors);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return exit_code;
}
