#include "harqdvp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <ostream>

#include "harqdvp/arq_analysis.hpp"
#include "harqdvp/error.hpp"
#include "harqdvp/rng.hpp"

namespace harqdvp {
namespace {

constexpr std::size_t kHistogramBins = 1 << 16;

struct LivePacket {
  std::uint64_t arrival_slot;
  std::uint64_t first_tx_slot;
  std::uint32_t attempts;
};

void bump(std::vector<std::uint64_t>& hist, std::uint64_t value) {
  const std::size_t bin = std::min<std::uint64_t>(value, kHistogramBins - 1);
  if (hist.size() <= bin) hist.resize(bin + 1, 0);
  ++hist[bin];
}

std::uint64_t count_above(const std::vector<std::uint64_t>& hist, std::uint64_t j) {
  std::uint64_t acc = 0;
  for (std::size_t k = j + 1; k < hist.size(); ++k) acc += hist[k];
  return acc;
}

// Pooled proportion with Wilson interval plus batch-means standard error.
template <typename PerBatch>
ProportionEstimate batched(std::size_t batches, PerBatch per_batch) {
  std::uint64_t count = 0, trials = 0;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    const auto [c, t] = per_batch(b);
    count += c;
    trials += t;
    if (t > 0) means.push_back(static_cast<double>(c) / static_cast<double>(t));
  }
  ProportionEstimate est = wilson(count, trials);
  if (means.size() > 1) {
    double mean = 0.0;
    for (double v : means) mean += v;
    mean /= static_cast<double>(means.size());
    double var = 0.0;
    for (double v : means) var += (v - mean) * (v - mean);
    var /= static_cast<double>(means.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(means.size()));
  }
  return est;
}

}  // namespace

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kDelivered: return "delivered";
    case Outcome::kDiscarded: return "discarded";
    case Outcome::kDroppedOverflow: return "dropped_overflow";
  }
  return "unknown";
}

std::uint32_t SimConfig::attempt_limit() const {
  if (scheme == Scheme::kHarqIr) return static_cast<std::uint32_t>(p_vec.size());
  return max_attempts;
}

double SimConfig::failure_probability(std::uint32_t attempt) const {
  if (scheme == Scheme::kArq) return p;
  return p_vec[attempt - 1];
}

void SimConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::kConfigError, what); };
  if (arrival == ArrivalKind::kBernoulli && !(f >= 0.0 && f < 1.0)) {
    fail("arrival probability f must be in [0, 1)");
  }
  if (arrival == ArrivalKind::kDeterministic && cycle_slots == 0) {
    fail("deterministic arrivals need a cycle of at least one slot");
  }
  if (scheme == Scheme::kArq) {
    if (!(p >= 0.0 && p <= 1.0)) fail("ARQ error probability must be in [0, 1]");
    if (max_attempts == 0) fail("attempt limit must be >= 1");
    if (max_attempts == kUnlimited && p >= 1.0) fail("persistent ARQ with p = 1 never finishes");
  } else {
    if (p_vec.empty()) fail("HARQ-IR needs a PER vector with M >= 1 entries");
    for (double v : p_vec) {
      if (!(v >= 0.0 && v <= 1.0)) fail("PER values must be in [0, 1]");
    }
  }
  if (q_max == 0) fail("Q_max must be >= 1");
  if (slots < 10'000) fail("horizon must be at least 1e4 slots");
  if (warmup_slots >= slots) fail("warm-up must be shorter than the horizon");
  if (batches == 0 || batches > slots - warmup_slots) fail("invalid batch count");
  if (!(slot_ms > 0.0)) fail("slot duration must be > 0");
}

ProportionEstimate wilson(std::uint64_t count, std::uint64_t trials, double z) {
  ProportionEstimate est;
  est.count = count;
  est.trials = trials;
  if (trials == 0) return est;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(count) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  est.value = phat;
  // The interval always contains phat; rounding can push an end past it
  // at 0 and 1.
  est.ci_lo = std::clamp(center - half, 0.0, phat);
  est.ci_hi = std::clamp(center + half, phat, 1.0);
  est.std_error = std::sqrt(phat * (1.0 - phat) / n);
  return est;
}

SimStats run(const SimConfig& config, std::span<const double> targets_ms) {
  config.validate();
  for (double d : targets_ms) {
    if (!(d >= 0.0)) throw Error(ErrorCode::kConfigError, "delay targets must be >= 0");
  }

  SimStats stats;
  stats.config = config;
  const std::uint32_t batches = config.batches;
  stats.wait_hist.resize(batches);
  stats.total_hist_delivered.resize(batches);
  stats.occupancy_hist.resize(batches);
  stats.batch_discarded.assign(batches, 0);
  stats.batch_finalized.assign(batches, 0);
  stats.batch_slots.assign(batches, 0);

  const std::uint64_t measured = config.slots - config.warmup_slots;
  auto batch_of = [&](std::uint64_t slot) -> std::optional<std::size_t> {
    if (slot < config.warmup_slots || slot >= config.slots) return std::nullopt;
    return static_cast<std::size_t>((slot - config.warmup_slots) * batches / measured);
  };

  const std::uint32_t zeta = config.effective_zeta();
  const std::uint32_t rtt = 1 + zeta + config.effective_delta();
  const std::uint32_t limit = config.attempt_limit();

  CounterRng rng(config.seed, 0);
  std::deque<LivePacket> queue;
  // A failure in slot k comes back in slot k + rtt, so one pending
  // retransmission per residue class is all there can be.
  std::vector<std::optional<LivePacket>> pending(rtt);
  std::uint64_t pending_count = 0;

  auto finalize = [&](const LivePacket& pkt, std::uint64_t last_tx_slot, Outcome outcome) {
    const std::uint64_t completion = last_tx_slot + 1 + zeta;
    if (outcome == Outcome::kDelivered) ++stats.delivered; else ++stats.discarded;
    const auto batch = batch_of(pkt.arrival_slot);
    if (!batch) return;
    PacketRecord rec{pkt.arrival_slot, pkt.first_tx_slot, pkt.attempts, completion, outcome,
                     pkt.first_tx_slot - pkt.arrival_slot, completion - pkt.first_tx_slot,
                     completion - pkt.arrival_slot};
    if (outcome == Outcome::kDelivered) {
      ++stats.measured_delivered;
      bump(stats.total_hist_delivered[*batch], rec.total_slots);
    } else {
      ++stats.measured_discarded;
      ++stats.batch_discarded[*batch];
    }
    ++stats.batch_finalized[*batch];
    stats.attempts_total += pkt.attempts;
    bump(stats.wait_hist[*batch], rec.wait_slots);
    bump(stats.service_hist, rec.service_slots);
    if (config.keep_records) stats.records.push_back(rec);
  };

  for (std::uint64_t slot = 0; slot < config.slots; ++slot) {
    // Retransmissions due now go to the head of the queue.
    auto& due = pending[slot % rtt];
    if (due) {
      queue.push_front(*due);
      due.reset();
      --pending_count;
    }

    if (const auto batch = batch_of(slot)) {
      bump(stats.occupancy_hist[*batch], queue.size());
      ++stats.batch_slots[*batch];
    }

    bool arrived = false;
    if (config.arrival == ArrivalKind::kBernoulli) {
      arrived = rng.bernoulli(config.f);
    } else {
      arrived = slot % config.cycle_slots == 0;
    }
    if (arrived) {
      ++stats.arrivals;
      const bool measured_arrival = batch_of(slot).has_value();
      if (measured_arrival) ++stats.measured_arrivals;
      if (config.q_max != kUnlimited && queue.size() >= config.q_max) {
        ++stats.dropped;
        if (measured_arrival) {
          ++stats.measured_dropped;
          if (config.keep_records) {
            PacketRecord rec;
            rec.arrival_slot = slot;
            rec.outcome = Outcome::kDroppedOverflow;
            stats.records.push_back(rec);
          }
        }
      } else {
        queue.push_back({slot, 0, 0});
      }
    }

    if (queue.empty()) continue;
    LivePacket pkt = queue.front();
    queue.pop_front();
    if (pkt.attempts == 0) pkt.first_tx_slot = slot;
    ++pkt.attempts;
    const bool failed = rng.bernoulli(config.failure_probability(pkt.attempts));
    if (!failed) {
      finalize(pkt, slot, Outcome::kDelivered);
    } else if (limit != kUnlimited && pkt.attempts >= limit) {
      finalize(pkt, slot, Outcome::kDiscarded);
    } else {
      pending[(slot + rtt) % rtt] = pkt;
      ++pending_count;
    }
  }
  stats.in_flight = queue.size() + pending_count;

  for (double d : targets_ms) stats.targets.push_back({d, stats.dvp(d)});
  return stats;
}

ProportionEstimate SimStats::dvp(double d_ms) const {
  const std::int64_t whole = whole_slots(d_ms, config.slot_ms);
  return batched(batch_finalized.size(), [&](std::size_t b) {
    const auto& hist = total_hist_delivered[b];
    const std::uint64_t late = whole < 0 ? std::accumulate(hist.begin(), hist.end(), std::uint64_t{0})
                                         : count_above(hist, static_cast<std::uint64_t>(whole));
    return std::pair{late + batch_discarded[b], batch_finalized[b]};
  });
}

ProportionEstimate SimStats::wait_ccdf(std::uint64_t j) const {
  return batched(batch_finalized.size(), [&](std::size_t b) {
    return std::pair{count_above(wait_hist[b], j), batch_finalized[b]};
  });
}

ProportionEstimate SimStats::wait_pmf(std::uint64_t k) const {
  return batched(batch_finalized.size(), [&](std::size_t b) {
    const auto& hist = wait_hist[b];
    return std::pair{k < hist.size() ? hist[k] : std::uint64_t{0}, batch_finalized[b]};
  });
}

ProportionEstimate SimStats::queue_ccdf(std::uint64_t q) const {
  return batched(batch_slots.size(), [&](std::size_t b) {
    return std::pair{count_above(occupancy_hist[b], q), batch_slots[b]};
  });
}

double throughput(const SimStats& stats, double d_ms, std::uint32_t packet_bits,
                  double slot_ms) {
  const std::int64_t whole = whole_slots(d_ms, slot_ms);
  std::uint64_t on_time = 0;
  if (whole >= 0) {
    for (const auto& hist : stats.total_hist_delivered) {
      const std::size_t upto = std::min<std::size_t>(hist.size(), static_cast<std::size_t>(whole) + 1);
      for (std::size_t k = 0; k < upto; ++k) on_time += hist[k];
    }
  }
  const double seconds = static_cast<double>(stats.measured_slots()) * slot_ms / 1000.0;
  return static_cast<double>(on_time) * packet_bits / seconds;
}

std::vector<CcdfPoint> empirical_wait_ccdf(const SimStats& stats) {
  std::size_t longest = 0;
  for (const auto& hist : stats.wait_hist) longest = std::max(longest, hist.size());
  std::vector<CcdfPoint> out;
  for (std::uint64_t j = 0; j < std::max<std::size_t>(longest, 1); ++j) {
    const ProportionEstimate e = stats.wait_ccdf(j);
    out.push_back({j, e.value, e.std_error});
  }
  return out;
}

void write_trace_csv(const SimStats& stats, std::ostream& out) {
  out << "arrival_slot,first_tx_slot,attempts,outcome,wait_slots,service_slots,total_slots\n";
  for (const PacketRecord& r : stats.records) {
    out << r.arrival_slot << ',' << r.first_tx_slot << ',' << r.attempts << ','
        << to_string(r.outcome) << ',' << r.wait_slots << ',' << r.service_slots << ','
        << r.total_slots << '\n';
  }
}

}  // namespace harqdvp
