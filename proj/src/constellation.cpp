#include "faic/constellation.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace faic {
namespace {

bool is_power_of_two(int v) { return v >= 2 && std::has_single_bit(static_cast<unsigned>(v)); }

int gray(int k) { return k ^ (k >> 1); }

// Gray-labelled PAM amplitudes before normalization, indexed by label.
// Position 0 is the most positive level.
std::vector<double> gray_pam_levels(int levels) {
  std::vector<double> out(static_cast<std::size_t>(levels));
  for (int pos = 0; pos < levels; ++pos) {
    out[static_cast<std::size_t>(gray(pos))] = static_cast<double>(levels - 1 - 2 * pos);
  }
  return out;
}

[[noreturn]] void unsupported(std::string_view scheme, int order) {
  throw Error("unsupported constellation: " + std::string(scheme) + " with order " +
              std::to_string(order));
}

}  // namespace

int Constellation::bits_per_symbol() const { return std::countr_zero(static_cast<unsigned>(order)); }

std::string Constellation::name() const {
  switch (scheme) {
    case Scheme::BPSK: return "bpsk";
    case Scheme::QPSK: return "qpsk";
    case Scheme::PSK: return "psk" + std::to_string(order);
    case Scheme::PAM: return "pam" + std::to_string(order);
    case Scheme::QAM: return "qam" + std::to_string(order);
  }
  return "unknown";
}

Constellation make_constellation(Scheme scheme, int order) {
  Constellation c;
  c.scheme = scheme;
  c.order = order;
  switch (scheme) {
    case Scheme::BPSK:
      if (order != 2) unsupported("bpsk", order);
      c.points = {cplx{1.0, 0.0}, cplx{-1.0, 0.0}};
      break;
    case Scheme::QPSK: {
      if (order != 4) unsupported("qpsk", order);
      const double a = 1.0 / std::numbers::sqrt2;
      c.points = {cplx{a, a}, cplx{a, -a}, cplx{-a, a}, cplx{-a, -a}};
      break;
    }
    case Scheme::PSK: {
      if (!is_power_of_two(order)) unsupported("psk", order);
      const double offset = order >= 4 ? std::numbers::pi / order : 0.0;
      c.points.resize(static_cast<std::size_t>(order));
      for (int pos = 0; pos < order; ++pos) {
        const double theta = 2.0 * std::numbers::pi * pos / order + offset;
        c.points[static_cast<std::size_t>(gray(pos))] = std::polar(1.0, theta);
      }
      break;
    }
    case Scheme::PAM: {
      if (!is_power_of_two(order)) unsupported("pam", order);
      const double scale = std::sqrt((order * order - 1.0) / 3.0);
      for (double v : gray_pam_levels(order)) c.points.emplace_back(v / scale, 0.0);
      break;
    }
    case Scheme::QAM: {
      // Square QAM only: order must be an even power of two.
      if (!is_power_of_two(order) || std::countr_zero(static_cast<unsigned>(order)) % 2 != 0) {
        unsupported("qam", order);
      }
      const int side = 1 << (std::countr_zero(static_cast<unsigned>(order)) / 2);
      const auto axis = gray_pam_levels(side);
      const double scale = std::sqrt(2.0 * (side * side - 1.0) / 3.0);
      c.points.resize(static_cast<std::size_t>(order));
      for (int label = 0; label < order; ++label) {
        const auto re = axis[static_cast<std::size_t>(label / side)];
        const auto im = axis[static_cast<std::size_t>(label % side)];
        c.points[static_cast<std::size_t>(label)] = cplx{re, im} / scale;
      }
      break;
    }
  }
  return c;
}

Constellation parse_constellation(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "bpsk") return make_constellation(Scheme::BPSK, 2);
  if (lower == "qpsk") return make_constellation(Scheme::QPSK, 4);

  const auto with_order = [&](std::string_view prefix, Scheme scheme) -> std::optional<Constellation> {
    if (!lower.starts_with(prefix)) return std::nullopt;
    const std::string_view digits = std::string_view(lower).substr(prefix.size());
    int order = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), order);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
      throw Error("malformed constellation name '" + std::string(name) + "'");
    }
    return make_constellation(scheme, order);
  };
  if (auto c = with_order("psk", Scheme::PSK)) return *c;
  if (auto c = with_order("pam", Scheme::PAM)) return *c;
  if (auto c = with_order("qam", Scheme::QAM)) return *c;
  throw Error("unknown constellation '" + std::string(name) + "'");
}

int SymbolTable::bits() const { return n_t * std::countr_zero(static_cast<unsigned>(order)); }

SymbolTable product_space(const Constellation& c, int n_t) {
  if (n_t < 1) throw Error("product_space: antenna count must be >= 1");
  const auto q = static_cast<std::size_t>(c.order);
  std::size_t size = 1;
  for (int t = 0; t < n_t; ++t) {
    size *= q;
    if (size > kEnumerationCap) {
      throw Error("product_space: " + std::to_string(c.order) + "^" + std::to_string(n_t) +
                  " vectors exceed the enumeration cap of " + std::to_string(kEnumerationCap));
    }
  }

  SymbolTable table;
  table.n_t = n_t;
  table.order = c.order;
  table.vectors.resize(n_t, static_cast<Eigen::Index>(size));
  for (std::size_t p = 0; p < size; ++p) {
    std::size_t rest = p;
    for (int t = n_t - 1; t >= 0; --t) {
      table.vectors(t, static_cast<Eigen::Index>(p)) = c.points[rest % q];
      rest /= q;
    }
  }
  return table;
}

DifferenceTable::DifferenceTable(const SymbolTable& table) : size_(table.size()) {
  data_.resize(table.n_t, static_cast<Eigen::Index>(size_ * size_));
  for (std::size_t m = 0; m < size_; ++m) {
    for (std::size_t n = 0; n < size_; ++n) {
      data_.col(static_cast<Eigen::Index>(m * size_ + n)) = table[m] - table[n];
    }
  }
}

std::size_t checked_joint_size(std::span<const SymbolTable> tables) {
  std::size_t total = 1;
  for (const auto& t : tables) {
    total *= t.size();
    if (total > kEnumerationCap) {
      std::size_t required = 1;
      for (const auto& u : tables) required *= u.size();
      throw Error("joint symbol enumeration of " + std::to_string(required) +
                  " exceeds the cap of " + std::to_string(kEnumerationCap));
    }
  }
  return total;
}

}  // namespace faic
