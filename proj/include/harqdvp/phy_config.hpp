#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace harqdvp {

inline constexpr std::uint32_t kSubcarriersPerRb = 12;
inline constexpr std::uint32_t kDefaultSymbolsPerSlot = 15;
// Largest transport block that avoids code block segmentation.
inline constexpr std::uint32_t kMaxPacketBits = 8448;

struct Numerology {
  std::uint32_t nu = 0;

  double slot_duration_ms() const;
  double scs_khz() const;
};

struct McsEntry {
  std::uint32_t index = 0;
  std::uint32_t modulation_order = 0;
  std::uint32_t coding_rate_x1024 = 0;
  double spectral_efficiency = 0.0;

  double coding_rate() const { return coding_rate_x1024 / 1024.0; }
};

// How many channel uses enter the dispersion term of the error model.
//   kSlotChannelUses:  12 * symbols_per_slot * N_RB (180 N_RB by default)
//   kResourceElements: 12 * N_RB, the literal N_RE reading
enum class BlocklengthMode { kSlotChannelUses, kResourceElements };

struct ResourceGrid {
  std::uint32_t n_rb = 1;
  std::uint32_t symbols_per_slot = kDefaultSymbolsPerSlot;

  std::uint32_t n_re() const { return kSubcarriersPerRb * n_rb; }
  std::uint32_t blocklength_per_slot() const {
    return kSubcarriersPerRb * symbols_per_slot * n_rb;
  }
  double blocklength(BlocklengthMode mode) const;
};

struct PhyConfig {
  Numerology numerology;
  ResourceGrid grid;
  McsEntry mcs;
  std::uint32_t packet_bits = 0;
  BlocklengthMode blocklength_mode = BlocklengthMode::kSlotChannelUses;

  double slot_ms() const { return numerology.slot_duration_ms(); }
  double blocklength() const { return grid.blocklength(blocklength_mode); }
};

// 3GPP TS 38.214 Table 5.1.3.1-1 (64QAM), indices 0..28. Compiled in.
std::span<const McsEntry> mcs_table();

// Reads the CSV asset (index,modulation_order,coding_rate_x1024,
// spectral_efficiency). Throws Error(kIoError / kConfigError).
std::vector<McsEntry> load_mcs_table(const std::string& path);

// Lowest-index entry with 180 * N_RB * eta >= n. Throws
// Error(kInfeasibleAllocation) when even the last entry is too small.
McsEntry select_mcs(std::uint32_t packet_bits, std::uint32_t n_rb,
                    std::uint32_t symbols_per_slot = kDefaultSymbolsPerSlot);
McsEntry select_mcs(std::span<const McsEntry> table, std::uint32_t packet_bits,
                    std::uint32_t n_rb,
                    std::uint32_t symbols_per_slot = kDefaultSymbolsPerSlot);

// (min, max) N_RB: smallest allocation that carries n bits at all, and the
// smallest that carries it with the lowest MCS.
std::pair<std::uint32_t, std::uint32_t> nrb_range(
    std::uint32_t packet_bits,
    std::uint32_t symbols_per_slot = kDefaultSymbolsPerSlot);
std::pair<std::uint32_t, std::uint32_t> nrb_range(
    std::span<const McsEntry> table, std::uint32_t packet_bits,
    std::uint32_t symbols_per_slot = kDefaultSymbolsPerSlot);

// Selects the MCS and validates the packet length.
PhyConfig make_phy_config(std::uint32_t packet_bits, std::uint32_t n_rb,
                          std::uint32_t nu = 0,
                          BlocklengthMode mode = BlocklengthMode::kSlotChannelUses,
                          std::uint32_t symbols_per_slot = kDefaultSymbolsPerSlot);

}  // namespace harqdvp
