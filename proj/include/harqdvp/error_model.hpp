#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace harqdvp {

// Rayleigh block-fading channel. `gamma` is the average received SNR in
// linear scale; mu_h2 = E[|h|^2]; `dispersion` is V.
struct ChannelParams {
  double gamma = 10.0;
  double mu_h2 = 1.0;
  double dispersion = 1.0;

  void validate() const;
};

double db_to_linear(double db);

struct PerEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct PerVector {
  std::vector<PerEstimate> p;

  std::vector<double> values() const;
};

struct MonteCarloOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  // Running minimum over attempts so that p_{m+1} <= p_m.
  bool enforce_monotone = true;
};

// Gaussian tail probability Q(x).
double q_function(double x);

// Normal-approximation error probability of one transmission at
// instantaneous SNR `snr`.
double per_arq_instant(double snr, double eta, double blocklength, double dispersion = 1.0);

// Error probability after jointly decoding m = snrs.size() incremental
// redundancy transmissions of `blocklength_per_slot` channel uses each.
double per_harq_instant(std::span<const double> snrs, double eta,
                        double blocklength_per_slot, double dispersion = 1.0);

// Fading-averaged PER, Monte Carlo over exponential SNR draws.
PerEstimate per_arq_avg(const ChannelParams& ch, double eta, double blocklength,
                        const MonteCarloOptions& mc = {});

// [p_1 .. p_M]. Each sample draws M SNRs; p_m uses the first m of them.
PerVector per_harq_avg(const ChannelParams& ch, double eta, double blocklength_per_slot,
                       std::uint32_t max_attempts, const MonteCarloOptions& mc = {});

}  // namespace harqdvp
