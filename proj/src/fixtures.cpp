#include <array>
#include <cmath>

#include "faic/channel.hpp"

namespace faic {
namespace {

using Entry = std::array<double, 2>;  // re, im
using Block = std::array<Entry, 4>;   // row-major 2x2

CMatrix to_matrix(const Block& b) {
  CMatrix m(2, 2);
  m << cplx{b[0][0], b[0][1]}, cplx{b[1][0], b[1][1]},
       cplx{b[2][0], b[2][1]}, cplx{b[3][0], b[3][1]};
  return m;
}

// Two users, 2x2, fixed non-fading links. Order: H11, H12, H21, H22.
constexpr std::array<Block, 4> kTwoUser = {{
    {{{1.2813, 0.0}, {0.1578, 0.3445}, {0.1578, -0.3445}, {0.2666, 0.0}}},
    {{{0.4596, 0.0}, {0.0332, -0.5936}, {0.0332, 0.5936}, {1.0401, 0.0}}},
    {{{0.3523, 0.0}, {-0.3938, 0.3207}, {-0.3938, -0.3207}, {1.1662, 0.0}}},
    {{{0.2483, 0.0}, {0.3246, 0.2157}, {0.3246, -0.2157}, {1.2785, 0.0}}},
}};

// Three users, 2x2. Order: H11, H12, H13, H21, ..., H33. Entries are kept
// exactly as tabulated, including the repeated rows in H12/H13 and H32/H33.
constexpr std::array<Block, 9> kThreeUser = {{
    {{{-0.2279, -0.6039}, {0.0660, 0.6264}, {-0.8774, 0.6273}, {0.1515, -0.0198}}},
    {{{0.1915, -0.3442}, {-0.1092, -0.0798}, {0.1022, 1.2773}, {0.4246, 0.0667}}},
    {{{0.5759, 0.1583}, {-0.1092, -0.0798}, {0.1022, 1.2773}, {0.4246, 0.0667}}},
    {{{-0.3382, -0.7046}, {0.6131, -0.1955}, {0.4195, 0.2793}, {-0.7792, 0.3374}}},
    {{{0.4643, 0.6778}, {0.7344, -0.0113}, {0.4052, -0.6845}, {0.3806, -0.0892}}},
    {{{-0.8238, -0.4134}, {0.5425, 0.1126}, {0.1321, 0.2715}, {0.7267, -0.4734}}},
    {{{-0.9707, 0.2271}, {-0.4520, -0.2644}, {-0.0265, -0.7569}, {0.2748, -0.2878}}},
    {{{-0.2200, -0.0000}, {-0.0113, 0.6334}, {-0.5837, -0.1839}, {-0.0279, -1.0840}}},
    {{{-0.2200, -0.0000}, {-0.0113, 0.6334}, {-0.5837, -0.1839}, {-0.0279, -1.0840}}},
}};

// Optimized precoders reported for the 2-user fixture at SNR 5 dB.
constexpr std::array<Block, 2> kBpskSnr5 = {{
    {{{0.5390, -0.7978}, {1.0204, 0.1993}, {-1.0166, -0.1732}, {0.2907, 0.0809}}},
    {{{-0.0063, 0.0404}, {0.2802, -0.3445}, {1.2232, 0.0059}, {0.6386, -1.0292}}},
}};
constexpr std::array<Block, 2> kQpskSnr5 = {{
    {{{1.0523, -0.6658}, {0.2312, -1.1369}, {0.3759, -0.0377}, {0.2090, -0.2814}}},
    {{{-0.4825, 0.0572}, {0.2828, 0.1678}, {-0.8290, 1.0292}, {1.0257, 0.1388}}},
}};

template <std::size_t N>
std::vector<CMatrix> to_links(const std::array<Block, N>& blocks) {
  std::vector<CMatrix> out;
  for (const auto& b : blocks) out.push_back(to_matrix(b));
  return out;
}

}  // namespace

std::vector<std::string> fixture_names() { return {"paper-2user-2x2", "paper-3user-2x2"}; }

std::pair<ChannelSet, FixtureInfo> load_fixture(std::string_view name) {
  if (name == "paper-2user-2x2") {
    return {ChannelSet(2, to_links(kTwoUser), false),
            FixtureInfo{std::string(name), "2-user interference channel, 2 tx / 2 rx antennas"}};
  }
  if (name == "paper-3user-2x2") {
    return {ChannelSet(3, to_links(kThreeUser), false),
            FixtureInfo{std::string(name), "3-user interference channel, 2 tx / 2 rx antennas"}};
  }
  throw Error("unknown fixture '" + std::string(name) + "' (known: paper-2user-2x2, paper-3user-2x2)");
}

PrecoderSet load_precoder_fixture(std::string_view name) {
  const double power = NoiseSpec::power_for_snr_db(5.0);
  PrecoderSet pre;
  if (name == "paper-2user-bpsk-snr5") {
    pre.G = to_links(kBpskSnr5);
  } else if (name == "paper-2user-qpsk-snr5") {
    pre.G = to_links(kQpskSnr5);
  } else {
    throw Error("unknown precoder fixture '" + std::string(name) +
                "' (known: paper-2user-bpsk-snr5, paper-2user-qpsk-snr5)");
  }
  pre.P.assign(pre.G.size(), power);
  return pre;
}

}  // namespace faic
