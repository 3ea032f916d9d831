#include "harqdvp/phy_config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "harqdvp/error.hpp"

namespace harqdvp {
namespace {

// 3GPP TS 38.214 V16, Table 5.1.3.1-1 "MCS index table 1 for PDSCH".
// Kept identical to assets/mcs_table.csv. Note the spectral efficiency of
// index 17 (first 64QAM row) is slightly below that of index 16.
constexpr std::array<McsEntry, 29> kMcsTable{{
    {0, 2, 120, 0.2344},  {1, 2, 157, 0.3066},  {2, 2, 193, 0.3770},
    {3, 2, 251, 0.4902},  {4, 2, 308, 0.6016},  {5, 2, 379, 0.7402},
    {6, 2, 449, 0.8770},  {7, 2, 526, 1.0273},  {8, 2, 602, 1.1758},
    {9, 2, 679, 1.3262},  {10, 4, 340, 1.3281}, {11, 4, 378, 1.4766},
    {12, 4, 434, 1.6953}, {13, 4, 490, 1.9141}, {14, 4, 553, 2.1602},
    {15, 4, 616, 2.4063}, {16, 4, 658, 2.5703}, {17, 6, 438, 2.5664},
    {18, 6, 466, 2.7305}, {19, 6, 517, 3.0293}, {20, 6, 567, 3.3223},
    {21, 6, 616, 3.6094}, {22, 6, 666, 3.9023}, {23, 6, 719, 4.2129},
    {24, 6, 772, 4.5234}, {25, 6, 822, 4.8164}, {26, 6, 873, 5.1152},
    {27, 6, 910, 5.3320}, {28, 6, 948, 5.5547},
}};

double channel_uses_per_rb(std::uint32_t symbols_per_slot) {
  return static_cast<double>(kSubcarriersPerRb * symbols_per_slot);
}

bool carries(double eta, std::uint32_t packet_bits, std::uint32_t n_rb,
             std::uint32_t symbols_per_slot) {
  return channel_uses_per_rb(symbols_per_slot) * n_rb * eta >= packet_bits;
}

// ceil(n / (uses * eta)), nudged so the result agrees with `carries`.
std::uint32_t smallest_nrb(double eta, std::uint32_t packet_bits,
                           std::uint32_t symbols_per_slot) {
  auto n_rb = static_cast<std::uint32_t>(
      std::ceil(packet_bits / (channel_uses_per_rb(symbols_per_slot) * eta)));
  n_rb = std::max<std::uint32_t>(n_rb, 1);
  while (n_rb > 1 && carries(eta, packet_bits, n_rb - 1, symbols_per_slot)) {
    --n_rb;
  }
  while (!carries(eta, packet_bits, n_rb, symbols_per_slot)) ++n_rb;
  return n_rb;
}

}  // namespace

double Numerology::slot_duration_ms() const { return std::ldexp(1.0, -static_cast<int>(nu)); }

double Numerology::scs_khz() const { return 15.0 * std::ldexp(1.0, static_cast<int>(nu)); }

double ResourceGrid::blocklength(BlocklengthMode mode) const {
  return mode == BlocklengthMode::kSlotChannelUses
             ? static_cast<double>(blocklength_per_slot())
             : static_cast<double>(n_re());
}

std::span<const McsEntry> mcs_table() { return kMcsTable; }

std::vector<McsEntry> load_mcs_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open MCS table: " + path);

  std::vector<McsEntry> table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line.rfind("index,", 0) != 0) {
        throw Error(ErrorCode::kConfigError, "MCS table: missing header row");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    McsEntry e;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(row >> e.index >> c1 >> e.modulation_order >> c2 >>
          e.coding_rate_x1024 >> c3 >> e.spectral_efficiency) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw Error(ErrorCode::kConfigError, "MCS table: malformed row: " + line);
    }
    if (e.index != table.size()) {
      throw Error(ErrorCode::kConfigError, "MCS table: indices must be 0,1,2,...");
    }
    if (!(e.spectral_efficiency > 0.0)) {
      throw Error(ErrorCode::kConfigError, "MCS table: nonpositive efficiency");
    }
    table.push_back(e);
  }
  if (table.empty()) throw Error(ErrorCode::kConfigError, "MCS table: no rows");
  return table;
}

McsEntry select_mcs(std::span<const McsEntry> table, std::uint32_t packet_bits,
                    std::uint32_t n_rb, std::uint32_t symbols_per_slot) {
  if (packet_bits == 0 || n_rb == 0 || symbols_per_slot == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "select_mcs: packet bits and N_RB must be >= 1");
  }
  for (const McsEntry& e : table) {
    if (carries(e.spectral_efficiency, packet_bits, n_rb, symbols_per_slot)) return e;
  }
  throw Error(ErrorCode::kInfeasibleAllocation,
              "no MCS carries " + std::to_string(packet_bits) + " bits on " +
                  std::to_string(n_rb) + " RB");
}

McsEntry select_mcs(std::uint32_t packet_bits, std::uint32_t n_rb,
                    std::uint32_t symbols_per_slot) {
  return select_mcs(kMcsTable, packet_bits, n_rb, symbols_per_slot);
}

std::pair<std::uint32_t, std::uint32_t> nrb_range(std::uint32_t packet_bits,
                                                  std::uint32_t symbols_per_slot) {
  return nrb_range(kMcsTable, packet_bits, symbols_per_slot);
}

std::pair<std::uint32_t, std::uint32_t> nrb_range(std::span<const McsEntry> table,
                                                  std::uint32_t packet_bits,
                                                  std::uint32_t symbols_per_slot) {
  if (packet_bits == 0 || symbols_per_slot == 0 || table.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nrb_range: packet bits must be >= 1");
  }
  // Lowest entry has the smallest efficiency, the last the largest.
  const double eta_min = table.front().spectral_efficiency;
  const double eta_max = table.back().spectral_efficiency;
  return {smallest_nrb(eta_max, packet_bits, symbols_per_slot),
          smallest_nrb(eta_min, packet_bits, symbols_per_slot)};
}

PhyConfig make_phy_config(std::uint32_t packet_bits, std::uint32_t n_rb,
                          std::uint32_t nu, BlocklengthMode mode,
                          std::uint32_t symbols_per_slot) {
  if (packet_bits > kMaxPacketBits) {
    throw Error(ErrorCode::kInvalidArgument,
                "packet of " + std::to_string(packet_bits) +
                    " bits needs code block segmentation (limit 8448)");
  }
  if (nu > 6) throw Error(ErrorCode::kInvalidArgument, "numerology index out of range");
  PhyConfig cfg;
  cfg.numerology.nu = nu;
  cfg.grid.n_rb = n_rb;
  cfg.grid.symbols_per_slot = symbols_per_slot;
  cfg.mcs = select_mcs(packet_bits, n_rb, symbols_per_slot);
  cfg.packet_bits = packet_bits;
  cfg.blocklength_mode = mode;
  return cfg;
}

}  // namespace harqdvp
