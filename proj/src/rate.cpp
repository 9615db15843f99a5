#include "faic/rate.hpp"

#include <cmath>
#include <numeric>

#include "geometry.hpp"

namespace faic {
namespace {

using detail::ReceiverGeometry;

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanAndError summarize(const std::vector<double>& draws) {
  const auto n = static_cast<double>(draws.size());
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
  if (draws.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double d : draws) ss += (d - mean) * (d - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

void check_user(const ChannelSet& ch, std::size_t j) {
  if (j >= ch.users()) {
    throw Error("user index " + std::to_string(j + 1) + " out of range 1.." + std::to_string(ch.users()));
  }
}

// Sum over receiver-j signal covariances H_ji G_i G_i^H H_ji^H, optionally skipping user j.
CMatrix received_covariance(const ChannelSet& ch, const PrecoderSet& pre, std::size_t j, bool skip_own) {
  CMatrix c = CMatrix::Zero(ch.n_r(j), ch.n_r(j));
  for (std::size_t i = 0; i < ch.users(); ++i) {
    if (skip_own && i == j) continue;
    const CMatrix hg = ch(j, i) * pre.G[i];
    c += hg * hg.adjoint();
  }
  return c;
}

}  // namespace

Weights Weights::equal(std::size_t users) { return Weights{std::vector<double>(users, 1.0)}; }

void Weights::validate(std::size_t users) const {
  if (mu.size() != users) {
    throw Error("weights: expected " + std::to_string(users) + " entries, got " + std::to_string(mu.size()));
  }
  double sum = 0.0;
  for (double m : mu) {
    if (!(m >= 0.0)) throw Error("weights: every mu_j must be non-negative");
    sum += m;
  }
  if (std::abs(sum - static_cast<double>(users)) > 1e-9) {
    throw Error("weights: sum of mu_j must equal the user count " + std::to_string(users));
  }
}

std::vector<double> finite_rate_draws(const ChannelSet& ch, const PrecoderSet& pre,
                                      std::span<const SymbolTable> tables, const NoiseSpec& noise,
                                      std::size_t j, const McConfig& mc) {
  check_user(ch, j);
  detail::check_inputs(ch, pre, tables, noise.sigma2);
  mc.validate();
  const ReceiverGeometry geo = detail::build_geometry(ch, pre, tables, j);
  const auto total = geo.index.total();
  const double inv_s2 = 1.0 / noise.sigma2;

  std::vector<double> draws(mc.samples);
  parallel_for(mc.samples, mc.threads, [&](std::size_t s) {
    const CVector z = noise_draw(mc.seed, j, s, ch.n_r(j), noise.sigma2);
    Eigen::RowVectorXd expo(static_cast<Eigen::Index>(total));
    std::vector<double> sub;
    double acc = 0.0;
    for (std::size_t m = 0; m < total; ++m) {
      const CVector v = geo.points.col(static_cast<Eigen::Index>(m)) + z;
      expo = -(geo.points.colwise() - v).colwise().squaredNorm() * inv_s2;
      const double lse_all = detail::log_sum_exp(std::span<const double>(expo.data(), total));
      const auto& own = geo.same_own[geo.index.digit(m, j)];
      sub.resize(own.size());
      for (std::size_t q = 0; q < own.size(); ++q) sub[q] = expo(static_cast<Eigen::Index>(own[q]));
      acc += lse_all - detail::log_sum_exp(sub);
    }
    draws[s] = kLog2e * acc / static_cast<double>(total);
  });
  return draws;
}

RateEstimate finite_rate(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                         const NoiseSpec& noise, std::size_t j, const McConfig& mc) {
  const auto draws = finite_rate_draws(ch, pre, tables, noise, j, mc);
  const auto stats = summarize(draws);
  return {std::log2(static_cast<double>(tables[j].size())) - stats.mean, stats.std_error, mc.samples};
}

RateEstimate finite_wsr(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                        const NoiseSpec& noise, const Weights& w, const McConfig& mc) {
  w.validate(ch.users());
  detail::check_inputs(ch, pre, tables, noise.sigma2);
  RateEstimate out{0.0, 0.0, mc.samples};
  double var = 0.0;
  for (std::size_t j = 0; j < ch.users(); ++j) {
    if (w.mu[j] == 0.0) continue;
    const auto r = finite_rate(ch, pre, tables, noise, j, mc);
    out.value += w.mu[j] * r.value;
    var += w.mu[j] * w.mu[j] * r.std_error * r.std_error;
  }
  out.std_error = std::sqrt(var);
  return out;
}

double log2_det_hpd(const CMatrix& a) {
  const Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) throw Error("log2_det_hpd: matrix is not positive definite");
  double acc = 0.0;
  const CMatrix& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log2(l(i, i).real());
  return 2.0 * acc;
}

RateEstimate gaussian_rate(const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise, std::size_t j) {
  check_user(ch, j);
  check_dimensions(ch, pre);
  if (!(noise.sigma2 > 0.0)) throw Error("noise variance must be positive");
  const CMatrix floor = noise.sigma2 * CMatrix::Identity(ch.n_r(j), ch.n_r(j));
  const double all = log2_det_hpd(floor + received_covariance(ch, pre, j, false));
  const double interference = log2_det_hpd(floor + received_covariance(ch, pre, j, true));
  return {all - interference, 0.0, 0};
}

RateEstimate gaussian_wsr(const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise, const Weights& w) {
  w.validate(ch.users());
  RateEstimate out;
  for (std::size_t j = 0; j < ch.users(); ++j) out.value += w.mu[j] * gaussian_rate(ch, pre, noise, j).value;
  return out;
}

RateEstimate jensen_rate(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                         const NoiseSpec& noise, std::size_t j) {
  check_user(ch, j);
  detail::check_inputs(ch, pre, tables, noise.sigma2);
  const ReceiverGeometry geo = detail::build_geometry(ch, pre, tables, j);
  const auto total = geo.index.total();
  const double scale = 1.0 / (2.0 * noise.sigma2);

  Eigen::RowVectorXd expo(static_cast<Eigen::Index>(total));
  std::vector<double> sub;
  double acc = 0.0;
  for (std::size_t m = 0; m < total; ++m) {
    const CVector p = geo.points.col(static_cast<Eigen::Index>(m));
    expo = -(geo.points.colwise() - p).colwise().squaredNorm() * scale;
    const double lse_all = detail::log_sum_exp(std::span<const double>(expo.data(), total));
    const auto& own = geo.same_own[geo.index.digit(m, j)];
    sub.resize(own.size());
    for (std::size_t q = 0; q < own.size(); ++q) sub[q] = expo(static_cast<Eigen::Index>(own[q]));
    acc += lse_all - detail::log_sum_exp(sub);
  }
  const double value = std::log2(static_cast<double>(tables[j].size())) - kLog2e * acc / static_cast<double>(total);
  return {value, 0.0, 0};
}

RateEstimate first_order_rate(const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise, std::size_t j) {
  check_user(ch, j);
  check_dimensions(ch, pre);
  if (!(noise.sigma2 > 0.0)) throw Error("noise variance must be positive");
  const double gain = (ch(j, j) * pre.G[j]).squaredNorm();
  return {kLog2e * gain / noise.sigma2, 0.0, 0};
}

}  // namespace faic
