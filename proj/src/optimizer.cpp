#include "faic/optimizer.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace faic {
namespace {

std::uint64_t epoch_seed(std::uint64_t seed, std::uint64_t epoch) {
  return epoch == 0 ? seed : seed ^ (0x9e3779b97f4a7c15ULL * epoch);
}

}  // namespace

void OptimizerOptions::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5)) throw Error("optimizer: alpha must lie in (0, 0.5)");
  if (!(beta > 0.0 && beta < 1.0)) throw Error("optimizer: beta must lie in (0, 1)");
  if (!(c_min > 0.0)) throw Error("optimizer: c_min must be positive");
  if (max_outer < 1) throw Error("optimizer: max_outer must be >= 1");
  if (!(rel_tol >= 0.0)) throw Error("optimizer: rel_tol must be non-negative");
  if (restarts < 1) throw Error("optimizer: restarts must be >= 1");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::RelativeGain: return "relative-gain";
    case StopReason::MaxOuter: return "max-outer";
    case StopReason::NonFinite: return "non-finite";
  }
  return "unknown";
}

WsrObjective finite_objective(const ChannelSet& ch, std::vector<SymbolTable> tables, NoiseSpec noise, Weights w,
                              McConfig mc) {
  w.validate(ch.users());
  mc.validate();
  WsrObjective obj;
  obj.wsr = [=](const PrecoderSet& pre, std::uint64_t epoch) {
    McConfig m = mc;
    m.seed = epoch_seed(mc.seed, epoch);
    return finite_wsr(ch, pre, tables, noise, w, m).value;
  };
  obj.gradients = [=](const PrecoderSet& pre, std::uint64_t epoch) {
    McConfig m = mc;
    m.seed = epoch_seed(mc.seed, epoch);
    return finite_wsr_gradients(ch, pre, tables, noise, w, m).grad;
  };
  return obj;
}

WsrObjective gaussian_objective(const ChannelSet& ch, NoiseSpec noise, Weights w) {
  w.validate(ch.users());
  WsrObjective obj;
  obj.wsr = [=](const PrecoderSet& pre, std::uint64_t) { return gaussian_wsr(ch, pre, noise, w).value; };
  obj.gradients = [=](const PrecoderSet& pre, std::uint64_t) { return gaussian_wsr_gradients(ch, pre, noise, w); };
  return obj;
}

PrecoderSet random_precoders(const ChannelSet& ch, std::span<const double> powers, std::uint64_t seed) {
  if (powers.size() != ch.users()) throw Error("random_precoders: one power budget per user required");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  PrecoderSet pre;
  for (std::size_t j = 0; j < ch.users(); ++j) {
    CMatrix g(ch.n_t(j), ch.n_t(j));
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      for (Eigen::Index r = 0; r < g.rows(); ++r) {
        const double re = normal(rng);
        g(r, c) = cplx{re, normal(rng)};
      }
    }
    pre.G.push_back(g * (std::sqrt(powers[j]) / g.norm()));
    pre.P.push_back(powers[j]);
  }
  return pre;
}

OptimizeResult optimize_wsr(const WsrObjective& objective, const ChannelSet& ch, std::span<const double> powers,
                            const OptimizerOptions& opts, std::optional<PrecoderSet> start) {
  opts.validate();
  OptimizeResult res;
  res.precoders = start ? *start : random_precoders(ch, powers, opts.seed);
  check_dimensions(ch, res.precoders);
  PrecoderSet& pre = res.precoders;
  OptimizerTrace& trace = res.trace;
  trace.seed = opts.seed;

  std::uint64_t epoch = 0;
  double current = objective.wsr(pre, epoch);
  trace.initial_wsr = current;
  if (!std::isfinite(current)) {
    trace.stop = StopReason::NonFinite;
    return res;
  }

  for (int sweep = 1; sweep <= opts.max_outer; ++sweep) {
    if (opts.resample_each_sweep && sweep > 1) {
      epoch = static_cast<std::uint64_t>(sweep - 1);
      current = objective.wsr(pre, epoch);
    }
    const double sweep_start = current;
    SweepRecord rec;
    rec.sweep = sweep;
    for (std::size_t k = 0; k < ch.users(); ++k) {
      UserStep step;
      const CMatrix grad = objective.gradients(pre, epoch)[k];
      const double g2 = grad.squaredNorm();
      double t = 1.0;
      while (true) {
        const double c = opts.alpha * t * g2;
        if (c < opts.c_min) break;
        PrecoderSet cand = pre;
        cand.G[k] = pre.G[k] + t * grad;
        const bool projected = cand.trace(k) > pre.P[k];
        if (projected) cand.G[k] = project_power(cand.G[k], pre.P[k]);
        // Sufficient increase is measured on the step actually taken; it
        // equals c whenever no projection occurred.
        const double c_eff = projected ? opts.alpha * (cand.G[k] - pre.G[k]).squaredNorm() / t : c;
        const double value = objective.wsr(cand, epoch);
        if (!std::isfinite(value)) {
          rec.users.push_back(step);
          rec.wsr = current;
          trace.sweeps.push_back(rec);
          trace.stop = StopReason::NonFinite;
          return res;
        }
        if (value < current + c_eff) {
          t *= opts.beta;
          ++step.backtracks;
          continue;
        }
        pre = std::move(cand);
        current = value;
        step.accepted = true;
        step.projected = projected;
        step.step = t;
        break;
      }
      rec.users.push_back(step);
    }
    rec.wsr = current;
    trace.sweeps.push_back(rec);
    const double gain = current - sweep_start;
    if (gain <= opts.rel_tol * std::max(std::abs(sweep_start), 1e-12)) {
      trace.stop = StopReason::RelativeGain;
      break;
    }
    if (sweep == opts.max_outer) trace.stop = StopReason::MaxOuter;
  }
  const auto grads = objective.gradients(pre, epoch);
  trace.kkt = kkt_residual(pre, grads);
  return res;
}

MultistartResult multistart(const WsrObjective& objective, const ChannelSet& ch, std::span<const double> powers,
                            const OptimizerOptions& opts) {
  opts.validate();
  MultistartResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    OptimizerOptions o = opts;
    o.seed = opts.seed + static_cast<std::uint64_t>(r);
    auto res = optimize_wsr(objective, ch, powers, o);
    const double v = res.trace.final_wsr();
    if (v > best || out.traces.empty()) {
      best = v;
      out.best = static_cast<std::size_t>(r);
      out.precoders = res.precoders;
    }
    out.traces.push_back(std::move(res.trace));
  }
  return out;
}

}  // namespace faic
