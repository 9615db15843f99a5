#include <doctest.h>

#include <cmath>
#include <set>
#include <utility>

#include "faic/constellation.hpp"

using namespace faic;

namespace {

void check_alphabet(const Constellation& c) {
  cplx mean = 0.0;
  double energy = 0.0;
  for (const cplx& x : c.points) {
    mean += x;
    energy += std::norm(x);
  }
  const double q = static_cast<double>(c.points.size());
  CHECK(std::abs(mean / q) < 1e-12);
  CHECK(std::abs(energy / q - 1.0) < 1e-12);
  for (std::size_t a = 0; a < c.points.size(); ++a) {
    for (std::size_t b = a + 1; b < c.points.size(); ++b) CHECK(std::abs(c.points[a] - c.points[b]) > 1e-6);
  }
}

}  // namespace

TEST_CASE("BPSK is {+1, -1}") {
  const auto c = make_constellation(Scheme::BPSK, 2);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0] == cplx{1.0, 0.0});
  CHECK(c.points[1] == cplx{-1.0, 0.0});
}

TEST_CASE("QPSK points are (+-1 +- j)/sqrt2") {
  const auto c = make_constellation(Scheme::QPSK, 4);
  REQUIRE(c.points.size() == 4);
  std::set<std::pair<int, int>> seen;
  for (const cplx& x : c.points) {
    CHECK(std::abs(std::abs(x.real()) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(std::abs(x.imag()) - 1.0 / std::sqrt(2.0)) < 1e-15);
    seen.insert({x.real() > 0, x.imag() > 0});
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("PAM4 is {+-1, +-3}/sqrt5") {
  const auto c = make_constellation(Scheme::PAM, 4);
  std::multiset<long> scaled;
  for (const cplx& x : c.points) {
    CHECK(x.imag() == 0.0);
    scaled.insert(std::lround(x.real() * std::sqrt(5.0)));
  }
  CHECK(scaled == std::multiset<long>{-3, -1, 1, 3});
}

TEST_CASE("every supported alphabet is zero-mean, unit-energy and distinct") {
  for (const char* name : {"bpsk", "qpsk", "psk8", "psk16", "pam2", "pam4", "pam8", "qam4", "qam16", "qam64"}) {
    CAPTURE(name);
    const auto c = parse_constellation(name);
    check_alphabet(c);
    CHECK(c.name() == name);
  }
}

TEST_CASE("QAM16 neighbours along each axis differ in one bit") {
  const auto c = make_constellation(Scheme::QAM, 16);
  const double step = 2.0 / std::sqrt(10.0);
  for (std::size_t a = 0; a < 16; ++a) {
    for (std::size_t b = 0; b < 16; ++b) {
      if (std::abs(std::abs(c.points[a] - c.points[b]) - step) < 1e-9) {
        CHECK(__builtin_popcount(static_cast<unsigned>(a ^ b)) == 1);
      }
    }
  }
}

TEST_CASE("PSK8 circular neighbours differ in one bit") {
  const auto c = make_constellation(Scheme::PSK, 8);
  const double step = 2.0 * std::sin(M_PI / 8.0);
  int pairs = 0;
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t b = a + 1; b < 8; ++b) {
      if (std::abs(std::abs(c.points[a] - c.points[b]) - step) < 1e-9) {
        ++pairs;
        CHECK(__builtin_popcount(static_cast<unsigned>(a ^ b)) == 1);
      }
    }
  }
  CHECK(pairs == 8);
}

TEST_CASE("unsupported alphabets are rejected") {
  CHECK_THROWS_AS(make_constellation(Scheme::BPSK, 4), Error);
  CHECK_THROWS_AS(make_constellation(Scheme::QPSK, 8), Error);
  CHECK_THROWS_AS(make_constellation(Scheme::QAM, 8), Error);
  CHECK_THROWS_AS(make_constellation(Scheme::PAM, 6), Error);
  CHECK_THROWS_AS(make_constellation(Scheme::PSK, 1), Error);
  CHECK_THROWS_AS(parse_constellation("gmsk"), Error);
  CHECK_THROWS_AS(parse_constellation("qam"), Error);
  CHECK(parse_constellation("QPSK").points.size() == 4);
}

TEST_CASE("BPSK product space over two antennas") {
  const auto t = product_space(make_constellation(Scheme::BPSK, 2), 2);
  REQUIRE(t.size() == 4);
  const double expected[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(t[p](0) == cplx{expected[p][0], 0.0});
    CHECK(t[p](1) == cplx{expected[p][1], 0.0});
  }
  const CMatrix gram = t.vectors * t.vectors.adjoint();
  CHECK((gram - 4.0 * CMatrix::Identity(2, 2)).norm() == 0.0);
  CHECK(t.bits() == 2);
}

TEST_CASE("QPSK product space over two antennas has 16 vectors") {
  const auto t = product_space(make_constellation(Scheme::QPSK, 4), 2);
  CHECK(t.size() == 16);
  CHECK(t.bits() == 4);
}

TEST_CASE("symbol-table moment identities hold for every alphabet") {
  for (const char* name : {"bpsk", "qpsk", "psk8", "pam4", "qam16"}) {
    for (int nt = 1; nt <= 3; ++nt) {
      CAPTURE(name);
      CAPTURE(nt);
      const auto t = product_space(parse_constellation(name), nt);
      const double m = static_cast<double>(t.size());
      const CVector sum = t.vectors.rowwise().sum();
      CHECK(sum.norm() < 1e-9 * m);
      const CMatrix gram = t.vectors * t.vectors.adjoint();
      CHECK((gram - m * CMatrix::Identity(nt, nt)).norm() < 1e-9 * m);
      CHECK((sum * sum.adjoint()).norm() < 1e-9 * m * m);
    }
  }
}

TEST_CASE("product-space sizes multiply") {
  for (const char* name : {"bpsk", "qpsk", "pam8"}) {
    const auto c = parse_constellation(name);
    for (int a = 1; a <= 3; ++a) {
      for (int b = 1; b <= 3; ++b) {
        CHECK(product_space(c, a).size() * product_space(c, b).size() == product_space(c, a + b).size());
      }
    }
  }
}

TEST_CASE("product space refuses sizes beyond the enumeration cap") {
  const auto c = make_constellation(Scheme::QAM, 64);
  CHECK_NOTHROW(product_space(c, 3));
  CHECK_THROWS_AS(product_space(c, 4), Error);
  CHECK_THROWS_AS(product_space(c, 0), Error);
}

TEST_CASE("joint enumeration cap") {
  const auto q = product_space(make_constellation(Scheme::QPSK, 4), 2);
  std::vector<SymbolTable> three(3, q);
  CHECK(checked_joint_size(three) == 4096);
  std::vector<SymbolTable> six(6, q);
  CHECK_THROWS_AS(checked_joint_size(six), Error);
}

TEST_CASE("difference table is antisymmetric with a zero diagonal") {
  const auto t = product_space(make_constellation(Scheme::QPSK, 4), 2);
  const DifferenceTable d(t);
  REQUIRE(d.size() == t.size());
  for (std::size_t m = 0; m < d.size(); ++m) {
    CHECK(d(m, m).norm() == 0.0);
    for (std::size_t n = 0; n < d.size(); ++n) {
      CHECK((d(m, n) + d(n, m)).norm() == 0.0);
      CHECK((d(m, n) - (t[m] - t[n])).norm() == 0.0);
    }
  }
}
