#include "harqdvp/harq_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "harqdvp/arq_analysis.hpp"
#include "harqdvp/error.hpp"

namespace harqdvp {
namespace {

constexpr std::size_t kDirectSolveLimit = 1500;

// Solves pi (P - I) = 0, sum(pi) = 1 over the states reachable from (0, 1)
// by Gaussian elimination with partial pivoting.
std::vector<double> direct_solve(const HarqChain& chain) {
  const std::uint32_t m_max = chain.max_attempts();
  std::vector<std::size_t> live;
  for (std::size_t s = 0; s < chain.n_states(); ++s) {
    if (s < m_max && s != 0) continue;  // (0, m >= 2) is never entered
    live.push_back(s);
  }
  const std::size_t n = live.size();
  std::vector<std::size_t> pos(chain.n_states(), n);
  for (std::size_t i = 0; i < n; ++i) pos[live[i]] = i;

  // Row i of A is the balance equation of state live[i]: A = (P - I)^T.
  std::vector<double> a(n * n, 0.0), b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : chain.row(live[i])) {
      if (pos[e.to] < n) a[pos[e.to] * n + i] += e.prob;
    }
    a[i * n + i] -= 1.0;
  }
  for (std::size_t j = 0; j < n; ++j) a[(n - 1) * n + j] = 1.0;
  b[n - 1] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    }
    if (a[piv * n + col] == 0.0) {
      throw Error(ErrorCode::kNoConvergence, "steady state: singular balance equations");
    }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
      std::swap(b[col], b[piv]);
    }
    const double d = a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / d;
      if (factor == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[r * n + j] -= factor * a[col * n + j];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i * n + j] * x[j];
    x[i] = acc / a[i * n + i];
  }

  std::vector<double> pi(chain.n_states(), 0.0);
  for (std::size_t i = 0; i < n; ++i) pi[live[i]] = std::max(0.0, x[i]);
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& v : pi) v /= total;
  return pi;
}

}  // namespace

void HarqParams::validate() const {
  if (!(f >= 0.0 && f < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "arrival probability f must be in [0, 1)");
  }
  if (p_vec.empty()) throw Error(ErrorCode::kInvalidArgument, "HARQ needs M >= 1");
  for (std::size_t i = 0; i < p_vec.size(); ++i) {
    if (!(p_vec[i] >= 0.0 && p_vec[i] <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "PER values must be in [0, 1]");
    }
    if (i > 0 && p_vec[i] > p_vec[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "PER vector must be nonincreasing");
    }
  }
  if (q_max < 1) throw Error(ErrorCode::kInvalidArgument, "Q_max must be >= 1");
  if (!(slot_ms > 0.0)) throw Error(ErrorCode::kInvalidArgument, "slot duration must be > 0");
}

HarqChain::HarqChain(std::uint32_t max_attempts, std::uint32_t q_max)
    : max_attempts_(max_attempts),
      q_max_(q_max),
      rows_(static_cast<std::size_t>(q_max + 1) * max_attempts) {}

std::size_t HarqChain::index(std::uint32_t q, std::uint32_t m) const {
  return static_cast<std::size_t>(q) * max_attempts_ + (m - 1);
}

double HarqChain::at(std::size_t from, std::size_t to) const {
  for (const auto& e : rows_[from]) {
    if (e.to == to) return e.prob;
  }
  return 0.0;
}

std::vector<double> HarqChain::dense() const {
  const std::size_t n = n_states();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : rows_[i]) out[i * n + e.to] = e.prob;
  }
  return out;
}

void HarqChain::add(std::size_t from, std::size_t to, double prob) {
  if (prob == 0.0) return;
  for (auto& e : rows_[from]) {
    if (e.to == to) {
      e.prob += prob;
      return;
    }
  }
  rows_[from].push_back({to, prob});
}

void HarqChain::left_multiply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (const auto& e : rows_[i]) y[e.to] += xi * e.prob;
  }
}

HarqChain build_chain(const HarqParams& params) {
  params.validate();
  const std::uint32_t m_max = params.max_attempts();
  const std::uint32_t q_max = params.q_max;
  const double f = params.f;
  const double f_bar = 1.0 - f;
  HarqChain chain(m_max, q_max);
  auto p = [&](std::uint32_t m) { return params.p_vec[m - 1]; };

  // Empty queue: a fresh arrival is sent at once and, on failure, stays.
  if (m_max >= 2) chain.add(chain.index(0, 1), chain.index(1, 2), f * p(1));
  // (0, m >= 2) are unreachable placeholders with a unit self-loop.

  for (std::uint32_t q = 1; q <= q_max; ++q) {
    for (std::uint32_t m = 1; m < m_max; ++m) {
      const std::size_t s = chain.index(q, m);
      const double pm = p(m);
      if (q < q_max) {
        chain.add(s, chain.index(q, m + 1), f_bar * pm);
        chain.add(s, chain.index(q + 1, m + 1), f * pm);
      } else {
        // Full queue: an arrival on a failure is dropped.
        chain.add(s, chain.index(q, m + 1), pm);
      }
      chain.add(s, chain.index(q, 1), f * (1.0 - pm));
      chain.add(s, chain.index(q - 1, 1), f_bar * (1.0 - pm));
    }
    // Last attempt: the packet leaves whatever the outcome.
    const std::size_t s = chain.index(q, m_max);
    chain.add(s, chain.index(q, 1), f);
    chain.add(s, chain.index(q - 1, 1), f_bar);
  }

  // Residual mass on the diagonal.
  for (std::size_t s = 0; s < chain.n_states(); ++s) {
    double off = 0.0;
    for (const auto& e : chain.row(s)) {
      if (e.to != s) off += e.prob;
    }
    const double stay = 1.0 - off - chain.at(s, s);
    if (stay > 0.0) chain.add(s, s, stay);
  }
  return chain;
}

double stationary_residual(const HarqChain& chain, std::span<const double> pi) {
  std::vector<double> next(chain.n_states());
  chain.left_multiply(pi, next);
  double res = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) res = std::max(res, std::abs(next[i] - pi[i]));
  return res;
}

std::vector<double> steady_state(const HarqChain& chain, const SteadyStateOptions& opts) {
  const std::size_t n = chain.n_states();
  std::vector<double> pi(n, 0.0), next(n);
  pi[chain.index(0, 1)] = 1.0;

  for (std::uint64_t it = 0; it < opts.max_iter; ++it) {
    chain.left_multiply(pi, next);
    double res = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      res = std::max(res, std::abs(next[i] - pi[i]));
      total += next[i];
    }
    if (res <= opts.tol) return pi;
    for (std::size_t i = 0; i < n; ++i) pi[i] = next[i] / total;
  }

  if (n <= kDirectSolveLimit) {
    pi = direct_solve(chain);
    if (stationary_residual(chain, pi) <= opts.tol) return pi;
  }
  throw Error(ErrorCode::kNoConvergence,
              "steady state did not converge after " + std::to_string(opts.max_iter) +
                  " iterations");
}

std::vector<double> queue_marginal(std::span<const double> pi_states,
                                   std::uint32_t max_attempts, std::uint32_t q_max) {
  if (pi_states.size() != static_cast<std::size_t>(q_max + 1) * max_attempts) {
    throw Error(ErrorCode::kInvalidArgument, "queue_marginal: state vector size mismatch");
  }
  std::vector<double> out(q_max + 1, 0.0);
  for (std::uint32_t q = 0; q <= q_max; ++q) {
    for (std::uint32_t m = 0; m < max_attempts; ++m) {
      out[q] += pi_states[static_cast<std::size_t>(q) * max_attempts + m];
    }
  }
  return out;
}

WaitProbability::WaitProbability(std::span<const double> p_vec, std::uint32_t max_q)
    : p_(p_vec.begin(), p_vec.end()),
      m0_(static_cast<std::uint32_t>(p_vec.size())),
      max_q_(max_q) {
  if (m0_ == 0) throw Error(ErrorCode::kInvalidArgument, "wait_prob: M0 must be >= 1");

  binom_.resize(max_q + 1);
  for (std::uint32_t q = 0; q <= max_q; ++q) {
    binom_[q].assign(q + 1, 1.0);
    for (std::uint32_t n = 1; n < q; ++n) binom_[q][n] = binom_[q - 1][n - 1] + binom_[q - 1][n];
  }

  fail_prefix_.assign(m0_ + 1, 1.0);
  for (std::uint32_t j = 1; j <= m0_; ++j) fail_prefix_[j] = fail_prefix_[j - 1] * p_[j - 1];

  base_.resize(static_cast<std::size_t>(m0_) * (max_q + 1));
  std::size_t offset = 0;
  for (std::uint32_t m = 1; m <= m0_; ++m) {
    for (std::uint32_t q = 0; q <= max_q; ++q) {
      base_[(m - 1) * (max_q + 1) + q] = offset;
      offset += static_cast<std::size_t>(m - 1) * q + 1;
    }
  }
  memo_.assign(offset, std::numeric_limits<double>::quiet_NaN());
}

std::size_t WaitProbability::slot(std::uint64_t k, std::uint64_t q, std::uint32_t m) const {
  return base_[(m - 1) * (static_cast<std::size_t>(max_q_) + 1) + q] + (k - q);
}

double WaitProbability::eval(std::uint64_t k, std::uint64_t q, std::uint32_t m) {
  if (q > max_q_) throw Error(ErrorCode::kInvalidArgument, "wait_prob: q above table bound");
  if (m == 0 || m > m0_) throw Error(ErrorCode::kInvalidArgument, "wait_prob: M out of range");
  if (k == q) {
    // Every packet takes one slot: a first-attempt success, or any outcome
    // when a single attempt is all there is.
    return m0_ == 1 ? 1.0 : std::pow(1.0 - p_[0], static_cast<double>(q));
  }
  if (k < q || k > static_cast<std::uint64_t>(m) * q) return 0.0;

  double& cached = memo_[slot(k, q, m)];
  if (!std::isnan(cached)) return cached;

  // n packets take all m slots; the other q - n take at most m - 1 each.
  const std::uint64_t n_max = std::min<std::uint64_t>((k - q) / (m - 1), q);
  const double seq_fail = fail_prefix_[m - 1];
  const double seq_succ = (m == m0_) ? 1.0 : (1.0 - p_[m - 1]);
  const double seq = seq_fail * seq_succ;
  double prob = 0.0;
  double seq_pow = 1.0;
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    if (n > 0) seq_pow *= seq;
    if (seq_pow == 0.0) break;
    prob += binom_[q][n] * seq_pow * eval(k - static_cast<std::uint64_t>(m) * n, q - n, m - 1);
  }
  cached = prob;
  return prob;
}

double wait_prob(std::uint64_t k, std::uint64_t q, std::span<const double> p_vec,
                 std::uint32_t m, std::uint32_t m0) {
  if (m0 != p_vec.size()) {
    throw Error(ErrorCode::kInvalidArgument, "wait_prob: M0 must equal the PER vector length");
  }
  WaitProbability table(p_vec, static_cast<std::uint32_t>(q));
  return table.eval(k, q, m);
}

double WaitPmf::total() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

double WaitPmf::ccdf(std::uint64_t j) const {
  double acc = 0.0;
  for (std::size_t k = j + 1; k < mass.size(); ++k) acc += mass[k];
  return acc;
}

WaitPmf wait_pmf(const HarqParams& params, std::span<const double> queue_pi) {
  params.validate();
  if (queue_pi.size() != params.q_max + 1u) {
    throw Error(ErrorCode::kInvalidArgument, "wait_pmf: queue distribution size mismatch");
  }
  const std::uint32_t m_max = params.max_attempts();
  WaitProbability table(params.p_vec, params.q_max);
  WaitPmf out;
  out.mass.assign(static_cast<std::size_t>(m_max) * params.q_max + 1, 0.0);
  for (std::uint32_t q = 0; q <= params.q_max; ++q) {
    if (queue_pi[q] == 0.0) continue;
    for (std::uint64_t k = q; k <= static_cast<std::uint64_t>(m_max) * q; ++k) {
      out.mass[k] += queue_pi[q] * table(k, q);
    }
  }
  return out;
}

std::int64_t harq_kd(double d_ms, const HarqParams& params) {
  if (d_ms < 0.0) throw Error(ErrorCode::kInvalidArgument, "delay target must be >= 0");
  return std::min<std::int64_t>(params.max_attempts(),
                                attempts_within(d_ms, params.slot_ms, params.zeta, params.delta));
}

double harq_service_dvp(double d_ms, const HarqParams& params) {
  params.validate();
  const std::int64_t k = harq_kd(d_ms, params);
  double prod = 1.0;
  for (std::int64_t i = 0; i < k; ++i) prod *= params.p_vec[i];
  return prod;
}

HarqAnalysis::HarqAnalysis(HarqParams params, const SteadyStateOptions& opts)
    : params_(std::move(params)),
      chain_(build_chain(params_)),
      pi_states_(steady_state(chain_, opts)),
      pi_queue_(queue_marginal(pi_states_, params_.max_attempts(), params_.q_max)),
      wait_(wait_pmf(params_, pi_queue_)) {}

double HarqAnalysis::dvp(double d_ms) const {
  if (d_ms < 0.0) throw Error(ErrorCode::kInvalidArgument, "delay target must be >= 0");
  const std::uint32_t m_max = params_.max_attempts();
  // prefix[j] = p_1 * ... * p_j
  std::vector<double> prefix(m_max + 1, 1.0);
  for (std::uint32_t j = 1; j <= m_max; ++j) prefix[j] = prefix[j - 1] * params_.p_vec[j - 1];

  const double rtt = static_cast<double>(params_.rtt_slots());
  double total = 0.0;
  for (std::size_t k = 0; k < wait_.mass.size(); ++k) {
    const double mass = wait_.mass[k];
    if (mass == 0.0) continue;
    const double x = (d_ms / params_.slot_ms - static_cast<double>(k) + params_.delta) / rtt;
    const auto attempts = static_cast<std::int64_t>(std::floor(x + 1e-9));
    // No attempt fits after this wait: the packet violates regardless.
    const double service = attempts <= 0 ? 1.0 : prefix[std::min<std::int64_t>(attempts, m_max)];
    total += mass * service;
  }
  return std::clamp(total, 0.0, 1.0);
}

double harq_dvp(double d_ms, const HarqParams& params) { return HarqAnalysis(params).dvp(d_ms); }

}  // namespace harqdvp
