#include "harqdvp/arq_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "harqdvp/error.hpp"

namespace harqdvp {
namespace {

void require_stable(const ArqParams& params) {
  params.validate();
  if (params.f + params.p >= 1.0) {
    throw Error(ErrorCode::kUnstableQueue,
                "unstable queue: f + p = " + std::to_string(params.f + params.p) +
                    " >= 1 (stability ratio p/(1-f) = " +
                    std::to_string(stability_ratio(params)) + ")");
  }
}

// fp / ((1-f)(1-p)), the geometric ratio of the immediate-feedback queue.
double load_ratio(const ArqParams& params) {
  return params.f * params.p / ((1.0 - params.f) * (1.0 - params.p));
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// sum_{i=1..k} (1-p) p^{i-1} * bound(wait > D - s_i), s_i = i(zeta+1) + (i-1)delta.
double arq_wait_terms_by_sum(std::int64_t k, std::int64_t whole, const ArqParams& params) {
  double total = 0.0;
  const double log_r = std::log(params.p / (1.0 - params.f));
  const double log_lead = std::log(params.f) - std::log(1.0 - params.p);
  for (std::int64_t i = 1; i <= k; ++i) {
    const std::int64_t service = i * (params.zeta + 1) + (i - 1) * params.delta;
    const double j = static_cast<double>(whole - service);
    const double log_wait = std::min(0.0, log_lead + (j + 1.0) * log_r);
    total += std::exp(std::log1p(-params.p) + (i - 1) * std::log(params.p) + log_wait);
  }
  return total;
}

}  // namespace

void ArqParams::validate() const {
  if (!(f >= 0.0 && f < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "arrival probability f must be in [0, 1)");
  }
  if (!(p >= 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "error probability p must be in [0, 1)");
  }
  if (!(slot_ms > 0.0)) throw Error(ErrorCode::kInvalidArgument, "slot duration must be > 0");
}

std::int64_t whole_slots(double d_ms, double slot_ms) {
  return static_cast<std::int64_t>(std::floor(d_ms / slot_ms + 1e-9));
}

std::int64_t attempts_within(double d_ms, double slot_ms, std::uint32_t zeta,
                             std::uint32_t delta) {
  const double x = (d_ms / slot_ms + delta) / (static_cast<double>(delta) + zeta + 1.0);
  return static_cast<std::int64_t>(std::floor(x + 1e-9));
}

std::int64_t bar_kd(double d_ms, const ArqParams& params) {
  if (d_ms < 0.0) throw Error(ErrorCode::kInvalidArgument, "delay target must be >= 0");
  return attempts_within(d_ms, params.slot_ms, params.zeta, params.delta);
}

double bar_dvp(double d_ms, const ArqParams& params) {
  params.validate();
  return std::pow(params.p, static_cast<double>(bar_kd(d_ms, params)));
}

double stability_ratio(const ArqParams& params) {
  if (!(params.f < 1.0)) throw Error(ErrorCode::kInvalidArgument, "f must be < 1");
  return params.p / (1.0 - params.f);
}

double queue_mean(const ArqParams& params) {
  require_stable(params);
  return params.f * params.p / (1.0 - params.f - params.p);
}

double queue_pmf(std::uint64_t q, const ArqParams& params) {
  require_stable(params);
  const double rho = load_ratio(params);
  return std::pow(rho, static_cast<double>(q)) * (1.0 - rho);
}

double queue_ccdf(std::uint64_t q, const ArqParams& params) {
  require_stable(params);
  return std::pow(load_ratio(params), static_cast<double>(q) + 1.0);
}

double wait_ccdf_bound(std::uint64_t j, const ArqParams& params) {
  require_stable(params);
  const double r = params.p / (1.0 - params.f);
  return std::min(1.0, params.f / (1.0 - params.p) * std::pow(r, static_cast<double>(j) + 1.0));
}

double negbin_pmf(std::uint64_t k, std::uint64_t q, double p) {
  if (q < 1 || k < q) return 0.0;
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "negbin_pmf: p must be in [0, 1]");
  }
  const std::uint64_t failures = k - q;
  if (p == 0.0) return failures == 0 ? 1.0 : 0.0;
  if (p == 1.0) return 0.0;
  const double log_choose = std::lgamma(static_cast<double>(k)) -
                            std::lgamma(static_cast<double>(q)) -
                            std::lgamma(static_cast<double>(failures) + 1.0);
  return std::exp(log_choose + static_cast<double>(q) * std::log1p(-p) +
                  static_cast<double>(failures) * std::log(p));
}

std::pair<std::uint64_t, double> service_pmf(std::uint64_t k, const ArqParams& params) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "service_pmf: k must be >= 1");
  params.validate();
  const std::uint64_t slots = k * (params.zeta + 1) + params.delta * (k - 1);
  return {slots, std::pow(params.p, static_cast<double>(k - 1)) * (1.0 - params.p)};
}

std::int64_t arq_kd(double d_ms, const ArqParams& params) { return bar_kd(d_ms, params); }

double arq_dvp(double d_ms, const ArqParams& params) {
  require_stable(params);
  const std::int64_t k = arq_kd(d_ms, params);
  if (k <= 0) return 1.0;
  if (params.p == 0.0) return 0.0;

  const double kd = static_cast<double>(k);
  const double service_term = std::exp(kd * std::log(params.p));
  if (params.f == 0.0) return clamp01(service_term);

  // p^k + f r^(D - zeta) (1 - x^k) / (1 - x), r = p/(1-f), x = p r^-(1+delta+zeta).
  const std::int64_t whole = whole_slots(d_ms, params.slot_ms);
  const double log_r = std::log(params.p / (1.0 - params.f));
  const double rtt = static_cast<double>(params.rtt_slots());
  const double log_x = std::log(params.p) - rtt * log_r;
  const double x = std::exp(log_x);
  if (std::abs(1.0 - x) < 1e-12) {
    return clamp01(service_term + arq_wait_terms_by_sum(k, whole, params));
  }

  const double log_lead =
      std::log(params.f) + static_cast<double>(whole - static_cast<std::int64_t>(params.zeta)) * log_r;
  double log_series;  // log((1 - x^k) / (1 - x)), both signs handled
  if (log_x < 0.0) {
    log_series = std::log(-std::expm1(kd * log_x)) - std::log(-std::expm1(log_x));
  } else {
    log_series = (kd - 1.0) * log_x + std::log(-std::expm1(-kd * log_x)) -
                 std::log(-std::expm1(-log_x));
  }
  return clamp01(service_term + std::exp(log_lead + log_series));
}

}  // namespace harqdvp
