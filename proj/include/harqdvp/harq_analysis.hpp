#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace harqdvp {

struct HarqParams {
  double f = 1.0 / 3.0;
  std::vector<double> p_vec;  // [p_1 .. p_M], nonincreasing
  std::uint32_t q_max = 16;
  std::uint32_t zeta = 1;
  std::uint32_t delta = 2;
  double slot_ms = 1.0;

  std::uint32_t max_attempts() const { return static_cast<std::uint32_t>(p_vec.size()); }
  std::uint32_t rtt_slots() const { return 1 + zeta + delta; }
  void validate() const;
};

// Immediate-feedback chain over (q, m), q in [0, q_max], m in [1, M].
// State (q, m) has 0-based index q * M + (m - 1). Rows are stored sparsely
// (at most five nonzeros each); `dense()` expands for small chains.
class HarqChain {
 public:
  struct Entry {
    std::size_t to;
    double prob;
  };

  HarqChain(std::uint32_t max_attempts, std::uint32_t q_max);

  std::uint32_t max_attempts() const { return max_attempts_; }
  std::uint32_t q_max() const { return q_max_; }
  std::size_t n_states() const { return rows_.size(); }
  std::size_t index(std::uint32_t q, std::uint32_t m) const;

  std::span<const Entry> row(std::size_t from) const { return rows_[from]; }
  double at(std::size_t from, std::size_t to) const;
  std::vector<double> dense() const;  // row-major n x n

  // Adds probability mass; repeated targets accumulate.
  void add(std::size_t from, std::size_t to, double prob);

  // y = x P
  void left_multiply(std::span<const double> x, std::span<double> y) const;

 private:
  std::uint32_t max_attempts_;
  std::uint32_t q_max_;
  std::vector<std::vector<Entry>> rows_;
};

HarqChain build_chain(const HarqParams& params);

struct SteadyStateOptions {
  double tol = 1e-12;
  std::uint64_t max_iter = 1'000'000;
};

// Stationary vector over all (q_max + 1) * M states. Throws
// Error(kNoConvergence).
std::vector<double> steady_state(const HarqChain& chain, const SteadyStateOptions& opts = {});

// max_s |(pi P)_s - pi_s|
double stationary_residual(const HarqChain& chain, std::span<const double> pi);

// pi_q = sum over m of the state probabilities with queue length q.
std::vector<double> queue_marginal(std::span<const double> pi_states,
                                   std::uint32_t max_attempts, std::uint32_t q_max);

// Conditional wait probability f_W(k | q): the q packets ahead take k slots
// in total under immediate feedback. Recursive over the number of packets
// that use all M attempts at each level, memoized on (k, q, M).
class WaitProbability {
 public:
  // `p_vec` holds p_1..p_M0; `max_q` bounds the q values queried.
  WaitProbability(std::span<const double> p_vec, std::uint32_t max_q);

  double operator()(std::uint64_t k, std::uint64_t q) { return eval(k, q, m0_); }
  double eval(std::uint64_t k, std::uint64_t q, std::uint32_t m);

 private:
  std::size_t slot(std::uint64_t k, std::uint64_t q, std::uint32_t m) const;

  std::vector<double> p_;
  std::uint32_t m0_;
  std::uint32_t max_q_;
  std::vector<std::vector<double>> binom_;  // Pascal triangle up to max_q
  std::vector<double> fail_prefix_;         // prod_{i<=j} p_i, j = 0..M0
  std::vector<std::size_t> base_;           // memo offset per (m, q)
  std::vector<double> memo_;
};

double wait_prob(std::uint64_t k, std::uint64_t q, std::span<const double> p_vec,
                 std::uint32_t m, std::uint32_t m0);

struct WaitPmf {
  std::vector<double> mass;  // mass[k] = P(D_w = k), k = 0 .. M * q_max

  double total() const;
  double ccdf(std::uint64_t j) const;  // sum_{k > j} mass[k]
};

WaitPmf wait_pmf(const HarqParams& params, std::span<const double> queue_pi);

std::int64_t harq_kd(double d_ms, const HarqParams& params);
double harq_service_dvp(double d_ms, const HarqParams& params);

// Solved analysis context; immutable once constructed.
class HarqAnalysis {
 public:
  explicit HarqAnalysis(HarqParams params, const SteadyStateOptions& opts = {});

  const HarqParams& params() const { return params_; }
  const HarqChain& chain() const { return chain_; }
  const std::vector<double>& state_probabilities() const { return pi_states_; }
  const std::vector<double>& queue_probabilities() const { return pi_queue_; }
  const WaitPmf& wait() const { return wait_; }

  // Steady-state probability of a full queue; drops are not part of DVP.
  double overflow_probability() const { return pi_queue_.back(); }

  double dvp(double d_ms) const;

 private:
  HarqParams params_;
  HarqChain chain_;
  std::vector<double> pi_states_;
  std::vector<double> pi_queue_;
  WaitPmf wait_;
};

double harq_dvp(double d_ms, const HarqParams& params);

}  // namespace harqdvp
