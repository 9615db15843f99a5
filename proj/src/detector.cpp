#include "faic/detector.hpp"

#include <cmath>
#include <limits>

#include "geometry.hpp"

namespace faic {
namespace {

// Extrinsic LLRs from per-vector log-likelihoods over one user's table.
std::vector<double> llr_from_likelihoods(const std::vector<double>& loglik, std::span<const double> priors,
                                         const BitMapping& map, const LlrOptions& options) {
  const int bits = map.bits;
  if (!priors.empty() && priors.size() != static_cast<std::size_t>(bits)) {
    throw Error("map_llr: expected " + std::to_string(bits) + " prior LLRs, got " + std::to_string(priors.size()));
  }
  std::vector<double> out(static_cast<std::size_t>(bits));
  std::vector<double> plus;
  std::vector<double> minus;
  for (int i = 0; i < bits; ++i) {
    plus.clear();
    minus.clear();
    for (std::size_t p = 0; p < loglik.size(); ++p) {
      double metric = loglik[p];
      if (!priors.empty()) {
        for (int k = 0; k < bits; ++k) {
          if (k != i) metric += 0.5 * map.sign(p, k) * priors[static_cast<std::size_t>(k)];
        }
      }
      (map.sign(p, i) > 0 ? plus : minus).push_back(metric);
    }
    double l = detail::log_sum_exp(plus) - detail::log_sum_exp(minus);
    if (options.unit == LlrUnit::Log2) l *= kLog2e;
    if (!std::isfinite(l)) {
      const double cap = std::numeric_limits<double>::max();
      l = std::isnan(l) ? 0.0 : (l > 0 ? cap : -cap);
    }
    out[static_cast<std::size_t>(i)] = l;
  }
  return out;
}

const BitMapping& mapping_for(const LlrOptions& options, const SymbolTable& table, std::size_t j,
                              BitMapping& storage) {
  if (options.mapping.empty()) {
    storage = BitMapping::natural(table);
    return storage;
  }
  if (j >= options.mapping.size()) throw Error("map_llr: no bit mapping for user " + std::to_string(j + 1));
  if (options.mapping[j].bits != table.bits()) throw Error("map_llr: bit mapping size mismatch");
  return options.mapping[j];
}

void check_received(const CVector& y, const ChannelSet& ch, std::size_t j) {
  if (j >= ch.users()) throw Error("user index out of range");
  if (y.size() != ch.n_r(j)) {
    throw Error("dimension mismatch: received vector has " + std::to_string(y.size()) + " entries, receiver " +
                std::to_string(j + 1) + " has " + std::to_string(ch.n_r(j)) + " antennas");
  }
}

}  // namespace

BitMapping BitMapping::natural(const SymbolTable& table) { return BitMapping{table.bits(), 0}; }

int BitMapping::sign(std::size_t p, int i) const {
  const std::uint64_t label = static_cast<std::uint64_t>(p) ^ flip_mask;
  return ((label >> (bits - 1 - i)) & 1U) ? -1 : 1;
}

std::size_t BitMapping::vector_index(std::span<const int> signs) const {
  if (signs.size() != static_cast<std::size_t>(bits)) throw Error("BitMapping: wrong bit vector length");
  std::uint64_t label = 0;
  for (int s : signs) label = (label << 1) | (s < 0 ? 1U : 0U);
  return static_cast<std::size_t>(label ^ flip_mask);
}

std::vector<double> map_llr(const CVector& y, const ChannelSet& ch, const PrecoderSet& pre,
                            std::span<const SymbolTable> tables, const NoiseSpec& noise, std::size_t j,
                            std::span<const double> priors, const LlrOptions& options) {
  check_received(y, ch, j);
  detail::check_inputs(ch, pre, tables, noise.sigma2);
  const detail::ReceiverGeometry geo = detail::build_geometry(ch, pre, tables, j);
  const Eigen::RowVectorXd expo = -(geo.points.colwise() - y).colwise().squaredNorm() / noise.sigma2;

  std::vector<double> loglik(geo.same_own.size());
  std::vector<double> sub;
  for (std::size_t p = 0; p < geo.same_own.size(); ++p) {
    const auto& idx = geo.same_own[p];
    sub.resize(idx.size());
    for (std::size_t q = 0; q < idx.size(); ++q) sub[q] = expo(static_cast<Eigen::Index>(idx[q]));
    loglik[p] = detail::log_sum_exp(sub);
  }
  BitMapping storage;
  return llr_from_likelihoods(loglik, priors, mapping_for(options, tables[j], j, storage), options);
}

CMatrix inverse_sqrt_hpd(const CMatrix& c) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(c);
  if (eig.info() != Eigen::Success) throw Error("inverse_sqrt_hpd: eigendecomposition failed");
  const double floor = 1e-12 * c.trace().real();
  const Eigen::VectorXd scaled = eig.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * scaled.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();
}

Whitened whiten(const CVector& y, const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise,
                std::size_t j) {
  check_received(y, ch, j);
  check_dimensions(ch, pre);
  if (!(noise.sigma2 > 0.0)) throw Error("noise variance must be positive");
  CMatrix c = noise.sigma2 * CMatrix::Identity(ch.n_r(j), ch.n_r(j));
  for (std::size_t i = 0; i < ch.users(); ++i) {
    if (i == j) continue;
    const CMatrix hg = ch(j, i) * pre.G[i];
    c += hg * hg.adjoint();
  }
  Whitened w;
  w.inv_sqrt = inverse_sqrt_hpd(c);
  w.y = w.inv_sqrt * y;
  w.channel = w.inv_sqrt * ch(j, j) * pre.G[j];
  return w;
}

std::vector<double> whitened_llr(const CVector& y, const ChannelSet& ch, const PrecoderSet& pre,
                                 std::span<const SymbolTable> tables, const NoiseSpec& noise, std::size_t j,
                                 std::span<const double> priors, const LlrOptions& options) {
  detail::check_inputs(ch, pre, tables, noise.sigma2);
  const Whitened w = whiten(y, ch, pre, noise, j);
  const CMatrix points = w.channel * tables[j].vectors;
  const Eigen::RowVectorXd expo = -(points.colwise() - w.y).colwise().squaredNorm();
  std::vector<double> loglik(expo.data(), expo.data() + expo.size());
  BitMapping storage;
  return llr_from_likelihoods(loglik, priors, mapping_for(options, tables[j], j, storage), options);
}

}  // namespace faic
