#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faic/gradient.hpp"

namespace faic {

struct OptimizerOptions {
  double alpha = 0.1;
  double beta = 0.5;
  double c_min = 1e-6;
  int max_outer = 100;
  double rel_tol = 1e-4;
  int restarts = 3;
  std::uint64_t seed = 1;
  /// Draw fresh Monte-Carlo noise at every outer sweep instead of freezing
  /// one set of draws for the whole run.
  bool resample_each_sweep = false;

  void validate() const;
};

/// A differentiable WSR. `epoch` selects the common-random-number set; equal
/// epochs must give bit-identical values.
struct WsrObjective {
  std::function<double(const PrecoderSet&, std::uint64_t epoch)> wsr;
  std::function<std::vector<CMatrix>(const PrecoderSet&, std::uint64_t epoch)> gradients;
};

WsrObjective finite_objective(const ChannelSet& ch, std::vector<SymbolTable> tables, NoiseSpec noise,
                              Weights w, McConfig mc);
WsrObjective gaussian_objective(const ChannelSet& ch, NoiseSpec noise, Weights w);

enum class StopReason { RelativeGain, MaxOuter, NonFinite };
std::string to_string(StopReason r);

struct UserStep {
  int backtracks = 0;
  double step = 0.0;  // accepted t, 0 when the update was abandoned
  bool accepted = false;
  bool projected = false;
};

struct SweepRecord {
  int sweep = 0;
  double wsr = 0.0;
  std::vector<UserStep> users;
};

struct OptimizerTrace {
  std::uint64_t seed = 0;
  double initial_wsr = 0.0;
  std::vector<SweepRecord> sweeps;
  KktReport kkt;
  StopReason stop = StopReason::MaxOuter;

  double final_wsr() const { return sweeps.empty() ? initial_wsr : sweeps.back().wsr; }
};

struct OptimizeResult {
  PrecoderSet precoders;
  OptimizerTrace trace;
};

/// i.i.d. CN(0, 1) entries scaled onto tr(G_j G_j^H) = P_j.
PrecoderSet random_precoders(const ChannelSet& ch, std::span<const double> powers, std::uint64_t seed);

/// Cyclic per-user gradient ascent with backtracking line search and power
/// projection. Starts from random_precoders(opts.seed) unless `start` is given.
OptimizeResult optimize_wsr(const WsrObjective& objective, const ChannelSet& ch, std::span<const double> powers,
                            const OptimizerOptions& opts, std::optional<PrecoderSet> start = std::nullopt);

struct MultistartResult {
  PrecoderSet precoders;
  std::size_t best = 0;
  std::vector<OptimizerTrace> traces;
};

/// Restart r initializes from seed opts.seed + r; the highest final WSR wins,
/// ties resolved toward the earlier restart.
MultistartResult multistart(const WsrObjective& objective, const ChannelSet& ch, std::span<const double> powers,
                            const OptimizerOptions& opts);

}  // namespace faic
