#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "faic/types.hpp"

namespace faic {

/// The K^2 cross links of a K-user interference channel.
/// H(j, i) is the N_{r_j} x N_{t_i} matrix from transmitter i to receiver j.
class ChannelSet {
 public:
  ChannelSet() = default;
  /// `links` is row-major over (receiver, transmitter); dimensions are validated.
  ChannelSet(std::size_t users, std::vector<CMatrix> links, bool normalized = false);

  std::size_t users() const { return users_; }
  int n_t(std::size_t i) const { return n_t_[i]; }
  int n_r(std::size_t j) const { return n_r_[j]; }
  const CMatrix& operator()(std::size_t j, std::size_t i) const { return links_[j * users_ + i]; }
  bool normalized() const { return normalized_; }

  /// Copy with every link scaled to tr(H H^H) = N_r.
  ChannelSet normalized_copy() const;
  /// Copy with the link (j, i) replaced; dimensions must match.
  ChannelSet with_link(std::size_t j, std::size_t i, CMatrix h) const;

 private:
  std::size_t users_ = 0;
  std::vector<int> n_t_;
  std::vector<int> n_r_;
  std::vector<CMatrix> links_;
  bool normalized_ = false;
};

/// One precoder and one power budget per user.
struct PrecoderSet {
  std::vector<CMatrix> G;
  std::vector<double> P;

  std::size_t users() const { return G.size(); }
  double trace(std::size_t j) const { return G[j].squaredNorm(); }
  bool feasible(double tol = 1e-9) const;
};

/// Complex AWGN with E[n n^H] = sigma2 I.
struct NoiseSpec {
  double sigma2 = 1.0;

  /// sigma2 = 1 convention: the power budget for a given SNR is 10^{snr/10}.
  static double power_for_snr_db(double snr_db);
};

/// Throws unless precoders and channel agree on K and every N_t.
void check_dimensions(const ChannelSet& ch, const PrecoderSet& pre);

/// c * H with tr(H' H'^H) equal to the row count.
CMatrix normalize_channel(const CMatrix& h);

/// Identity when tr(G G^H) <= P, otherwise the radial projection onto the
/// power sphere, sqrt(P) G / ||G||_F.
CMatrix project_power(const CMatrix& g, double power);

/// G_j = sqrt(P_j / N_{t_j}) I for every user.
PrecoderSet scaled_identity_precoders(const ChannelSet& ch, std::span<const double> powers);

/// i.i.d. CN(0, 1) entries per link, optionally normalized.
ChannelSet random_channel(std::size_t users, int n_t, int n_r, std::uint64_t seed,
                          bool normalize = true);

// Built-in fixtures -----------------------------------------------------

struct FixtureInfo {
  std::string name;
  std::string description;
};

/// "paper-2user-2x2" or "paper-3user-2x2"; matrices are returned as printed,
/// without renormalization.
std::pair<ChannelSet, FixtureInfo> load_fixture(std::string_view name);

/// Reference precoders for the 2-user fixture at SNR 5 dB:
/// "paper-2user-bpsk-snr5" and "paper-2user-qpsk-snr5".
PrecoderSet load_precoder_fixture(std::string_view name);

std::vector<std::string> fixture_names();

// Plain-text matrix files ---------------------------------------------------
//
// A file is a sequence of named blocks. A block starts with a line holding a
// key such as "H_1_2" or "G_1" (optionally wrapped in brackets and/or
// followed by ':'), and continues with one line per matrix row containing
// whitespace-separated "re,im" entries. '#' starts a comment.

using MatrixBlocks = std::map<std::string, CMatrix>;

/// Throws Error("<source>:<line>: ...") on malformed input.
MatrixBlocks parse_matrix_blocks(std::istream& in, std::string_view source = "<input>");
MatrixBlocks read_matrix_file(const std::string& path);

void write_matrix_block(std::ostream& out, std::string_view key, const CMatrix& m, int decimals = 4);

/// Builds a ChannelSet from "H_j_i" blocks (1-based), requiring all K^2 links.
ChannelSet channel_from_blocks(const MatrixBlocks& blocks);
/// Builds precoders from "G_j" blocks with the given power budgets.
PrecoderSet precoders_from_blocks(const MatrixBlocks& blocks, std::span<const double> powers);

}  // namespace faic
