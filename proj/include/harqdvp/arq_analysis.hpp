#pragma once

#include <cstdint>
#include <utility>

namespace harqdvp {

// Persistent ARQ with i.i.d. per-attempt failures.
struct ArqParams {
  double f = 1.0 / 3.0;    // per-slot arrival probability
  double p = 0.0;          // per-attempt error probability
  std::uint32_t zeta = 1;  // decoding delay, slots
  std::uint32_t delta = 2; // feedback delay, slots
  double slot_ms = 1.0;

  std::uint32_t rtt_slots() const { return 1 + zeta + delta; }
  void validate() const;
};

// floor(d / T), with a 1e-9 slack that absorbs decimal representation
// error in d (8.5 / 0.5 and the like).
std::int64_t whole_slots(double d_ms, double slot_ms);

// Attempts that fit in d: floor((d/T + delta) / (delta + zeta + 1)).
std::int64_t attempts_within(double d_ms, double slot_ms, std::uint32_t zeta,
                             std::uint32_t delta);

// Bounded-arrival warm-up scheme (no queueing).
std::int64_t bar_kd(double d_ms, const ArqParams& params);
double bar_dvp(double d_ms, const ArqParams& params);

// p / (1 - f); the queue is stable when this is <= 1.
double stability_ratio(const ArqParams& params);

// Immediate-feedback queue statistics. All throw Error(kUnstableQueue)
// when f + p >= 1.
double queue_mean(const ArqParams& params);
double queue_pmf(std::uint64_t q, const ArqParams& params);
double queue_ccdf(std::uint64_t q, const ArqParams& params);
double wait_ccdf_bound(std::uint64_t j, const ArqParams& params);

// Negative binomial: P(k attempts to get q successes), 1 <= q <= k.
double negbin_pmf(std::uint64_t k, std::uint64_t q, double p);

// (service delay in slots, probability) for a packet needing k attempts.
std::pair<std::uint64_t, double> service_pmf(std::uint64_t k, const ArqParams& params);

std::int64_t arq_kd(double d_ms, const ArqParams& params);

// Upper bound on P(D > d) for persistent ARQ, clamped to [0, 1].
double arq_dvp(double d_ms, const ArqParams& params);

}  // namespace harqdvp
