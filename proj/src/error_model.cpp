#include "harqdvp/error_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "harqdvp/error.hpp"
#include "harqdvp/rng.hpp"

namespace harqdvp {
namespace {

constexpr std::uint64_t kChunkSamples = 1 << 16;

struct ChunkSums {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

// Q argument for m jointly decoded attempts given the running sum of
// log2(1 + S_i).
inline double harq_argument(double log_sum, std::uint32_t m, double eta,
                            double blocklength_per_slot, double dispersion) {
  const double md = static_cast<double>(m);
  return (log_sum / md - eta / md) * std::sqrt(md * blocklength_per_slot / dispersion);
}

ChunkSums run_chunk(const ChannelParams& ch, double eta, double blocklength,
                    std::uint32_t max_attempts, std::uint64_t seed,
                    std::uint64_t chunk, std::uint64_t count) {
  ChunkSums out{std::vector<double>(max_attempts, 0.0),
                std::vector<double>(max_attempts, 0.0)};
  CounterRng rng(seed, chunk);
  // S = (gamma / mu) |h|^2 with |h|^2 ~ Exp(mu); mean SNR is gamma.
  const double scale = ch.gamma / ch.mu_h2;
  for (std::uint64_t i = 0; i < count; ++i) {
    double log_sum = 0.0;
    for (std::uint32_t m = 1; m <= max_attempts; ++m) {
      const double snr = scale * rng.exponential(ch.mu_h2);
      log_sum += std::log2(1.0 + snr);
      const double per =
          q_function(harq_argument(log_sum, m, eta, blocklength, ch.dispersion));
      out.sum[m - 1] += per;
      out.sum_sq[m - 1] += per * per;
    }
  }
  return out;
}

}  // namespace

void ChannelParams::validate() const {
  if (!(gamma > 0.0) || !(mu_h2 > 0.0) || !(dispersion > 0.0) ||
      !std::isfinite(gamma) || !std::isfinite(mu_h2) || !std::isfinite(dispersion)) {
    throw Error(ErrorCode::kInvalidArgument,
                "channel parameters gamma, mu_h2 and dispersion must be positive");
  }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<double> PerVector::values() const {
  std::vector<double> v;
  v.reserve(p.size());
  for (const auto& e : p) v.push_back(e.value);
  return v;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double per_arq_instant(double snr, double eta, double blocklength, double dispersion) {
  return q_function((std::log2(1.0 + snr) - eta) * std::sqrt(blocklength / dispersion));
}

double per_harq_instant(std::span<const double> snrs, double eta,
                        double blocklength_per_slot, double dispersion) {
  if (snrs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "per_harq_instant: need at least one SNR");
  }
  double log_sum = 0.0;
  for (double s : snrs) log_sum += std::log2(1.0 + s);
  return q_function(harq_argument(log_sum, static_cast<std::uint32_t>(snrs.size()), eta,
                                  blocklength_per_slot, dispersion));
}

PerEstimate per_arq_avg(const ChannelParams& ch, double eta, double blocklength,
                        const MonteCarloOptions& mc) {
  MonteCarloOptions one = mc;
  one.enforce_monotone = false;
  return per_harq_avg(ch, eta, blocklength, 1, one).p.front();
}

PerVector per_harq_avg(const ChannelParams& ch, double eta, double blocklength_per_slot,
                       std::uint32_t max_attempts, const MonteCarloOptions& mc) {
  ch.validate();
  if (max_attempts == 0) {
    throw Error(ErrorCode::kInvalidArgument, "per_harq_avg: M must be >= 1");
  }
  if (mc.samples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "Monte Carlo needs at least one sample");
  }
  if (!(blocklength_per_slot > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "blocklength must be positive");
  }

  const std::uint64_t n_chunks = (mc.samples + kChunkSamples - 1) / kChunkSamples;
  std::vector<ChunkSums> partial(n_chunks);
  auto chunk_size = [&](std::uint64_t c) {
    return std::min(kChunkSamples, mc.samples - c * kChunkSamples);
  };

  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < n_chunks; c = next++) {
      partial[c] = run_chunk(ch, eta, blocklength_per_slot, max_attempts, mc.seed, c,
                             chunk_size(c));
    }
  };
  const unsigned jobs =
      static_cast<unsigned>(std::clamp<std::uint64_t>(mc.jobs, 1, n_chunks));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  // Reduction in chunk order keeps the result independent of `jobs`.
  PerVector out;
  const double n = static_cast<double>(mc.samples);
  for (std::uint32_t m = 0; m < max_attempts; ++m) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& c : partial) {
      sum += c.sum[m];
      sum_sq += c.sum_sq[m];
    }
    const double mean = sum / n;
    double var = 0.0;
    if (mc.samples > 1) var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    out.p.push_back({mean, std::sqrt(var / n), mc.samples, mc.seed});
  }
  if (mc.enforce_monotone) {
    for (std::size_t m = 1; m < out.p.size(); ++m) {
      out.p[m].value = std::min(out.p[m].value, out.p[m - 1].value);
    }
  }
  return out;
}

}  // namespace harqdvp
