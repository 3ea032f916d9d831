#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace harqdvp {

enum class Scheme { kArq, kHarqIr };
enum class ArrivalKind { kBernoulli, kDeterministic };

inline constexpr std::uint32_t kUnlimited = std::numeric_limits<std::uint32_t>::max();

struct SimConfig {
  Scheme scheme = Scheme::kHarqIr;
  ArrivalKind arrival = ArrivalKind::kBernoulli;
  double f = 1.0 / 3.0;
  std::uint64_t cycle_slots = 0;  // deterministic arrivals: one packet every cycle
  double p = 0.0;                 // ARQ per-attempt PER
  std::vector<double> p_vec;      // HARQ-IR per-attempt PERs; M = size()
  std::uint32_t zeta = 1;
  std::uint32_t delta = 2;
  std::uint32_t max_attempts = kUnlimited;  // ARQ truncation; HARQ uses p_vec
  std::uint32_t q_max = kUnlimited;
  std::uint64_t slots = 10'000'000;
  std::uint64_t warmup_slots = 10'000;
  std::uint64_t seed = 1;
  bool if_mode = false;  // zeta = delta = 0 regardless of the fields above
  double slot_ms = 1.0;
  bool keep_records = false;
  std::uint32_t batches = 50;  // batch-means error bars

  std::uint32_t effective_zeta() const { return if_mode ? 0 : zeta; }
  std::uint32_t effective_delta() const { return if_mode ? 0 : delta; }
  std::uint32_t attempt_limit() const;
  double failure_probability(std::uint32_t attempt) const;  // attempt is 1-based
  void validate() const;
};

enum class Outcome { kDelivered, kDiscarded, kDroppedOverflow };

const char* to_string(Outcome outcome);

struct PacketRecord {
  std::uint64_t arrival_slot = 0;
  std::uint64_t first_tx_slot = 0;
  std::uint32_t attempts = 0;
  std::uint64_t completion_slot = 0;
  Outcome outcome = Outcome::kDelivered;
  std::uint64_t wait_slots = 0;
  std::uint64_t service_slots = 0;
  std::uint64_t total_slots = 0;
};

// Proportion with a Wilson interval (z = 1.96) and a batch-means standard
// error that accounts for correlation between packets and slots.
struct ProportionEstimate {
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  double std_error = 0.0;
  std::uint64_t count = 0;
  std::uint64_t trials = 0;

  double wilson_half_width() const { return 0.5 * (ci_hi - ci_lo); }
};

ProportionEstimate wilson(std::uint64_t count, std::uint64_t trials, double z = 1.96);

struct TargetDvp {
  double d_ms = 0.0;
  ProportionEstimate dvp;
};

struct SimStats {
  SimConfig config;

  // Every packet, including the warm-up period.
  std::uint64_t arrivals = 0;
  std::uint64_t delivered = 0;
  std::uint64_t discarded = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;

  // Packets arriving after warm-up.
  std::uint64_t measured_arrivals = 0;
  std::uint64_t measured_delivered = 0;
  std::uint64_t measured_discarded = 0;
  std::uint64_t measured_dropped = 0;
  std::uint64_t attempts_total = 0;  // over measured finalized packets

  // Per batch; the last bin of each histogram collects overflow.
  std::vector<std::vector<std::uint64_t>> wait_hist;
  std::vector<std::vector<std::uint64_t>> total_hist_delivered;
  std::vector<std::vector<std::uint64_t>> occupancy_hist;
  std::vector<std::uint64_t> batch_discarded;
  std::vector<std::uint64_t> batch_finalized;
  std::vector<std::uint64_t> batch_slots;
  std::vector<std::uint64_t> service_hist;  // all batches

  std::vector<TargetDvp> targets;
  std::vector<PacketRecord> records;  // only with keep_records

  std::uint64_t measured_slots() const { return config.slots - config.warmup_slots; }
  std::uint64_t finalized() const { return measured_delivered + measured_discarded; }

  // P(D > d); discarded packets always violate. Drops are excluded.
  ProportionEstimate dvp(double d_ms) const;
  // P(D_w > j) over finalized packets.
  ProportionEstimate wait_ccdf(std::uint64_t j) const;
  // P(Q > q), queue length at the slot boundary before the arrival.
  ProportionEstimate queue_ccdf(std::uint64_t q) const;
  // P(D_w = k).
  ProportionEstimate wait_pmf(std::uint64_t k) const;
};

SimStats run(const SimConfig& config, std::span<const double> targets_ms = {});

// Delivered-in-time packets * n bits per simulated second.
double throughput(const SimStats& stats, double d_ms, std::uint32_t packet_bits,
                  double slot_ms);

struct CcdfPoint {
  std::uint64_t j = 0;
  double value = 0.0;
  double std_error = 0.0;
};

// P(D_w > j) for j = 0 .. largest observed wait.
std::vector<CcdfPoint> empirical_wait_ccdf(const SimStats& stats);

// CSV: arrival_slot,first_tx_slot,attempts,outcome,wait_slots,service_slots,total_slots
void write_trace_csv(const SimStats& stats, std::ostream& out);

}  // namespace harqdvp
