#include <cctype>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "faic/channel.hpp"

namespace faic {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool is_key_line(const std::string& line) {
  const char c = line.front();
  return c == '[' || std::isalpha(static_cast<unsigned char>(c));
}

std::string key_of(std::string line) {
  if (!line.empty() && line.back() == ':') line.pop_back();
  if (line.size() >= 2 && line.front() == '[' && line.back() == ']') line = line.substr(1, line.size() - 2);
  return trim(line);
}

bool parse_entry(const std::string& tok, cplx& out) {
  const auto comma = tok.find(',');
  if (comma == std::string::npos) return false;
  try {
    std::size_t used_re = 0;
    std::size_t used_im = 0;
    const std::string re = tok.substr(0, comma);
    const std::string im = tok.substr(comma + 1);
    const double r = std::stod(re, &used_re);
    const double i = std::stod(im, &used_im);
    if (used_re != re.size() || used_im != im.size()) return false;
    out = cplx{r, i};
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

MatrixBlocks parse_matrix_blocks(std::istream& in, std::string_view source) {
  MatrixBlocks blocks;
  std::string key;
  std::vector<std::vector<cplx>> rows;
  int key_line = 0;

  const auto fail = [&](int line, const std::string& msg) -> Error {
    return Error(std::string(source) + ":" + std::to_string(line) + ": " + msg);
  };
  const auto flush = [&](int line) {
    if (key.empty()) return;
    if (rows.empty()) throw fail(key_line, "block '" + key + "' has no rows");
    CMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
    if (!blocks.emplace(key, std::move(m)).second) throw fail(key_line, "duplicate block '" + key + "'");
    (void)line;
    key.clear();
    rows.clear();
  };

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (is_key_line(line)) {
      flush(lineno);
      key = key_of(line);
      key_line = lineno;
      if (key.empty()) throw fail(lineno, "empty block name");
      continue;
    }
    if (key.empty()) throw fail(lineno, "matrix row before any block name");
    std::istringstream tokens(line);
    std::vector<cplx> row;
    std::string tok;
    while (tokens >> tok) {
      cplx v;
      if (!parse_entry(tok, v)) throw fail(lineno, "expected 're,im' entry, got '" + tok + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw fail(lineno, "row has " + std::to_string(row.size()) + " entries, expected " +
                             std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  flush(lineno);
  return blocks;
}

MatrixBlocks read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matrix file '" + path + "'");
  return parse_matrix_blocks(in, path);
}

void write_matrix_block(std::ostream& out, std::string_view key, const CMatrix& m, int decimals) {
  out << key << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%.*f,%.*f", decimals, m(r, c).real(), decimals, m(r, c).imag());
      out << (c ? " " : "") << buf;
    }
    out << '\n';
  }
}

ChannelSet channel_from_blocks(const MatrixBlocks& blocks) {
  std::size_t users = 0;
  while (blocks.count("H_" + std::to_string(users + 1) + "_" + std::to_string(users + 1))) ++users;
  if (users == 0) throw Error("matrix file has no H_1_1 block");
  std::vector<CMatrix> links;
  for (std::size_t j = 1; j <= users; ++j) {
    for (std::size_t i = 1; i <= users; ++i) {
      const auto key = "H_" + std::to_string(j) + "_" + std::to_string(i);
      const auto it = blocks.find(key);
      if (it == blocks.end()) throw Error("matrix file is missing block " + key);
      links.push_back(it->second);
    }
  }
  return ChannelSet(users, std::move(links), false);
}

PrecoderSet precoders_from_blocks(const MatrixBlocks& blocks, std::span<const double> powers) {
  PrecoderSet pre;
  for (std::size_t j = 1; j <= powers.size(); ++j) {
    const auto key = "G_" + std::to_string(j);
    const auto it = blocks.find(key);
    if (it == blocks.end()) throw Error("matrix file is missing block " + key);
    pre.G.push_back(it->second);
    pre.P.push_back(powers[j - 1]);
  }
  return pre;
}

}  // namespace faic
