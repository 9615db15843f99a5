#include <doctest.h>

#include <cmath>
#include <sstream>

#include "faic/channel.hpp"
#include "oracles.hpp"

using namespace faic;

namespace {

// Printed values, transcribed separately from the library's fixture tables.
constexpr const char* kTwoUserText = R"(
H_1_1
1.2813,0 0.1578,0.3445
0.1578,-0.3445 0.2666,0
H_1_2
0.4596,0 0.0332,-0.5936
0.0332,0.5936 1.0401,0
H_2_1
0.3523,0 -0.3938,0.3207
-0.3938,-0.3207 1.1662,0
H_2_2
0.2483,0 0.3246,0.2157
0.3246,-0.2157 1.2785,0
)";

constexpr const char* kThreeUserText = R"(
H_1_1
-0.2279,-0.6039 0.0660,0.6264
-0.8774,0.6273 0.1515,-0.0198
H_1_2
0.1915,-0.3442 -0.1092,-0.0798
0.1022,1.2773 0.4246,0.0667
H_1_3
0.5759,0.1583 -0.1092,-0.0798
0.1022,1.2773 0.4246,0.0667
H_2_1
-0.3382,-0.7046 0.6131,-0.1955
0.4195,0.2793 -0.7792,0.3374
H_2_2
0.4643,0.6778 0.7344,-0.0113
0.4052,-0.6845 0.3806,-0.0892
H_2_3
-0.8238,-0.4134 0.5425,0.1126
0.1321,0.2715 0.7267,-0.4734
H_3_1
-0.9707,0.2271 -0.4520,-0.2644
-0.0265,-0.7569 0.2748,-0.2878
H_3_2
-0.2200,-0.0000 -0.0113,0.6334
-0.5837,-0.1839 -0.0279,-1.0840
H_3_3
-0.2200,-0.0000 -0.0113,0.6334
-0.5837,-0.1839 -0.0279,-1.0840
)";

constexpr const char* kBpskPrecoderText = R"(
G_1
0.5390,-0.7978 1.0204,0.1993
-1.0166,-0.1732 0.2907,0.0809
G_2
-0.0063,0.0404 0.2802,-0.3445
1.2232,0.0059 0.6386,-1.0292
)";

constexpr const char* kQpskPrecoderText = R"(
G_1
1.0523,-0.6658 0.2312,-1.1369
0.3759,-0.0377 0.2090,-0.2814
G_2
-0.4825,0.0572 0.2828,0.1678
-0.8290,1.0292 1.0257,0.1388
)";

MatrixBlocks parse(const char* text) {
  std::istringstream in(text);
  return parse_matrix_blocks(in, "table");
}

}  // namespace

TEST_CASE("fixtures match the printed tables exactly") {
  for (const auto& [name, text] : {std::pair{"paper-2user-2x2", kTwoUserText}, {"paper-3user-2x2", kThreeUserText}}) {
    CAPTURE(name);
    const auto [ch, info] = load_fixture(name);
    const ChannelSet ref = channel_from_blocks(parse(text));
    REQUIRE(ch.users() == ref.users());
    CHECK(info.name == name);
    CHECK_FALSE(ch.normalized());
    for (std::size_t j = 0; j < ch.users(); ++j) {
      for (std::size_t i = 0; i < ch.users(); ++i) CHECK((ch(j, i) - ref(j, i)).norm() == 0.0);
    }
  }
}

TEST_CASE("fixture spot values") {
  const auto two = load_fixture("paper-2user-2x2").first;
  CHECK(two(0, 0)(0, 0) == cplx{1.2813, 0.0});
  const auto three = load_fixture("paper-3user-2x2").first;
  CHECK(three(1, 1)(0, 0) == cplx{0.4643, 0.6778});
  CHECK_THROWS_AS(load_fixture("bogus"), Error);
  CHECK(fixture_names().size() == 2);
}

TEST_CASE("printed precoder fixtures match and sit on the SNR 5 dB power budget") {
  const double p = std::pow(10.0, 0.5);
  for (const auto& [name, text] :
       {std::pair{"paper-2user-bpsk-snr5", kBpskPrecoderText}, {"paper-2user-qpsk-snr5", kQpskPrecoderText}}) {
    CAPTURE(name);
    const PrecoderSet pre = load_precoder_fixture(name);
    const std::vector<double> powers{p, p};
    const PrecoderSet ref = precoders_from_blocks(parse(text), powers);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK((pre.G[j] - ref.G[j]).norm() == 0.0);
      CHECK(pre.P[j] == doctest::Approx(p).epsilon(1e-15));
      // Sum of squared moduli of the printed entries.
      double tr = 0.0;
      for (Eigen::Index r = 0; r < 2; ++r) {
        for (Eigen::Index c = 0; c < 2; ++c) tr += std::norm(ref.G[j](r, c));
      }
      CHECK(std::abs(tr - p) / p < 0.01);
    }
  }
  CHECK_THROWS_AS(load_precoder_fixture("nope"), Error);
}

TEST_CASE("SNR convention") {
  CHECK(NoiseSpec::power_for_snr_db(0.0) == 1.0);
  CHECK(NoiseSpec::power_for_snr_db(10.0) == doctest::Approx(10.0));
  CHECK(NoiseSpec::power_for_snr_db(5.0) == doctest::Approx(3.16227766));
}

TEST_CASE("normalize_channel examples") {
  const CMatrix eye = CMatrix::Identity(2, 2);
  CHECK((normalize_channel(eye) - eye).norm() < 1e-15);
  CHECK((normalize_channel(2.0 * eye) - eye).norm() < 1e-15);
  oracle::Gen gen(11);
  for (int k = 0; k < 20; ++k) {
    const int rows = gen.integer(1, 4);
    const CMatrix h = gen.matrix(rows, gen.integer(1, 4));
    const CMatrix n = normalize_channel(h);
    CHECK(std::abs((n * n.adjoint()).trace().real() - rows) < 1e-9);
    // Same direction.
    CHECK(std::abs(std::abs(n.cwiseProduct(h.conjugate()).sum()) - n.norm() * h.norm()) < 1e-9);
  }
  CHECK_THROWS_AS(normalize_channel(CMatrix::Zero(2, 2)), Error);
}

TEST_CASE("normalized copies carry the flag and the trace invariant") {
  const auto ch = load_fixture("paper-3user-2x2").first.normalized_copy();
  CHECK(ch.normalized());
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(ch(j, i).squaredNorm() - ch.n_r(j)) < 1e-9);
  }
  const auto r = random_channel(3, 2, 3, 5);
  CHECK(r.normalized());
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r(j, i).squaredNorm() - 3.0) < 1e-9);
  }
}

TEST_CASE("project_power examples") {
  const CMatrix eye = CMatrix::Identity(2, 2);
  CHECK((project_power(0.5 * eye, 1.0) - 0.5 * eye).norm() == 0.0);
  const CMatrix big = project_power(2.0 * eye, 1.0);
  CHECK(big.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((big - eye / std::sqrt(2.0)).norm() < 1e-15);
}

TEST_CASE("project_power is idempotent and never increases the trace") {
  oracle::Gen gen(3);
  for (int k = 0; k < 200; ++k) {
    const int n = gen.integer(1, 4);
    const CMatrix g = gen.matrix(n, n) * gen.uniform(0.01, 5.0);
    const double p = gen.uniform(0.1, 10.0);
    const CMatrix once = project_power(g, p);
    const CMatrix twice = project_power(once, p);
    CHECK((once - twice).norm() <= 1e-12 * once.norm());
    const double tr = once.squaredNorm();
    CHECK(tr <= g.squaredNorm() * (1 + 1e-12));
    const bool unchanged = (once - g).norm() == 0.0;
    CHECK((unchanged || std::abs(tr - p) < 1e-12 * p));
    CHECK(tr <= p + 1e-9);
  }
}

TEST_CASE("channel dimension validation") {
  std::vector<CMatrix> links{CMatrix::Identity(2, 2), CMatrix::Identity(2, 3), CMatrix::Identity(1, 2),
                             CMatrix::Identity(1, 3)};
  const ChannelSet ch(2, links);
  CHECK(ch.n_t(0) == 2);
  CHECK(ch.n_t(1) == 3);
  CHECK(ch.n_r(0) == 2);
  CHECK(ch.n_r(1) == 1);
  links[3] = CMatrix::Identity(2, 3);
  CHECK_THROWS_AS(ChannelSet(2, links), Error);
  CHECK_THROWS_AS(ChannelSet(3, {}), Error);

  PrecoderSet pre = scaled_identity_precoders(ch, std::vector<double>{1.0, 3.0});
  CHECK_NOTHROW(check_dimensions(ch, pre));
  CHECK(pre.trace(1) == doctest::Approx(3.0));
  pre.G[1] = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(check_dimensions(ch, pre), Error);
  CHECK_THROWS_AS(ch.with_link(0, 0, CMatrix::Identity(3, 3)), Error);
}

TEST_CASE("precoder feasibility tolerance") {
  PrecoderSet pre;
  pre.G = {CMatrix::Identity(2, 2)};
  pre.P = {2.0 - 5e-10};
  CHECK(pre.feasible());
  pre.P = {2.0 - 2e-9};
  CHECK_FALSE(pre.feasible());
}

TEST_CASE("matrix file round trip and errors") {
  const auto ch = load_fixture("paper-2user-2x2").first;
  std::ostringstream out;
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t i = 0; i < 2; ++i) {
      write_matrix_block(out, "H_" + std::to_string(j + 1) + "_" + std::to_string(i + 1), ch(j, i));
    }
  }
  std::istringstream in(out.str());
  const ChannelSet back = channel_from_blocks(parse_matrix_blocks(in));
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t i = 0; i < 2; ++i) CHECK((back(j, i) - ch(j, i)).norm() < 1e-12);
  }

  std::istringstream bracketed("[G_1]:\n1,0 0,0   # comment\n0,0 1,0\n");
  const auto blocks = parse_matrix_blocks(bracketed);
  REQUIRE(blocks.count("G_1") == 1);
  CHECK((blocks.at("G_1") - CMatrix::Identity(2, 2)).norm() == 0.0);

  const auto error_of = [](const std::string& text) {
    std::istringstream s(text);
    try {
      parse_matrix_blocks(s, "f.txt");
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("1,0\n") == "f.txt:1: matrix row before any block name");
  CHECK(error_of("H_1_1\n1,0 2,0\n3,0\n").rfind("f.txt:3:", 0) == 0);
  CHECK(error_of("H_1_1\n1;0\n").rfind("f.txt:2:", 0) == 0);
  CHECK(error_of("H_1_1\n\nG_1\n1,0\n").rfind("f.txt:1:", 0) == 0);
  CHECK(error_of("G_1\n1,0\nG_1\n2,0\n").find("duplicate") != std::string::npos);

  std::istringstream partial("H_1_1\n1,0\nH_2_2\n1,0\nH_1_2\n1,0\n");
  CHECK_THROWS_AS(channel_from_blocks(parse_matrix_blocks(partial)), Error);
}
