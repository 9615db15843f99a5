#include "faic/channel.hpp"

#include <cmath>
#include <random>

namespace faic {

ChannelSet::ChannelSet(std::size_t users, std::vector<CMatrix> links, bool normalized)
    : users_(users), links_(std::move(links)), normalized_(normalized) {
  if (users_ == 0) throw Error("ChannelSet: at least one user is required");
  if (links_.size() != users_ * users_) {
    throw Error("ChannelSet: expected " + std::to_string(users_ * users_) + " links, got " +
                std::to_string(links_.size()));
  }
  n_t_.assign(users_, 0);
  n_r_.assign(users_, 0);
  for (std::size_t j = 0; j < users_; ++j) n_r_[j] = static_cast<int>((*this)(j, 0).rows());
  for (std::size_t i = 0; i < users_; ++i) n_t_[i] = static_cast<int>((*this)(0, i).cols());
  for (std::size_t j = 0; j < users_; ++j) {
    for (std::size_t i = 0; i < users_; ++i) {
      const CMatrix& h = (*this)(j, i);
      if (h.rows() != n_r_[j] || h.cols() != n_t_[i] || h.size() == 0) {
        throw Error("ChannelSet: H_" + std::to_string(j + 1) + "_" + std::to_string(i + 1) +
                    " is " + std::to_string(h.rows()) + "x" + std::to_string(h.cols()) +
                    ", expected " + std::to_string(n_r_[j]) + "x" + std::to_string(n_t_[i]));
      }
    }
  }
}

ChannelSet ChannelSet::normalized_copy() const {
  std::vector<CMatrix> links;
  links.reserve(links_.size());
  for (const auto& h : links_) links.push_back(normalize_channel(h));
  return ChannelSet(users_, std::move(links), true);
}

ChannelSet ChannelSet::with_link(std::size_t j, std::size_t i, CMatrix h) const {
  auto links = links_;
  links[j * users_ + i] = std::move(h);
  return ChannelSet(users_, std::move(links), false);
}

bool PrecoderSet::feasible(double tol) const {
  for (std::size_t j = 0; j < G.size(); ++j) {
    if (trace(j) > P[j] + tol) return false;
  }
  return true;
}

double NoiseSpec::power_for_snr_db(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

void check_dimensions(const ChannelSet& ch, const PrecoderSet& pre) {
  if (pre.G.size() != ch.users() || pre.P.size() != ch.users()) {
    throw Error("dimension mismatch: channel has " + std::to_string(ch.users()) +
                " users, precoder set has " + std::to_string(pre.G.size()) + " matrices and " +
                std::to_string(pre.P.size()) + " power budgets");
  }
  for (std::size_t j = 0; j < ch.users(); ++j) {
    if (pre.G[j].rows() != ch.n_t(j) || pre.G[j].cols() != ch.n_t(j)) {
      throw Error("dimension mismatch: G_" + std::to_string(j + 1) + " is " +
                  std::to_string(pre.G[j].rows()) + "x" + std::to_string(pre.G[j].cols()) +
                  " but user has " + std::to_string(ch.n_t(j)) + " transmit antennas");
    }
  }
}

CMatrix normalize_channel(const CMatrix& h) {
  const double energy = h.squaredNorm();
  if (!(energy > 0.0)) throw Error("normalize_channel: zero matrix cannot be normalized");
  return h * std::sqrt(static_cast<double>(h.rows()) / energy);
}

CMatrix project_power(const CMatrix& g, double power) {
  const double tr = g.squaredNorm();
  if (tr <= power) return g;
  return g * (std::sqrt(power) / std::sqrt(tr));
}

PrecoderSet scaled_identity_precoders(const ChannelSet& ch, std::span<const double> powers) {
  if (powers.size() != ch.users()) throw Error("scaled_identity_precoders: one power per user required");
  PrecoderSet pre;
  for (std::size_t j = 0; j < ch.users(); ++j) {
    const int nt = ch.n_t(j);
    pre.G.push_back(CMatrix::Identity(nt, nt) * std::sqrt(powers[j] / nt));
    pre.P.push_back(powers[j]);
  }
  return pre;
}

ChannelSet random_channel(std::size_t users, int n_t, int n_r, std::uint64_t seed, bool normalize) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::vector<CMatrix> links;
  for (std::size_t k = 0; k < users * users; ++k) {
    CMatrix h(n_r, n_t);
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        const double re = normal(rng);
        h(r, c) = cplx{re, normal(rng)};
      }
    }
    links.push_back(normalize ? normalize_channel(h) : h);
  }
  return ChannelSet(users, std::move(links), normalize);
}

}  // namespace faic
