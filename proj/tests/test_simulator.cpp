#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "harqdvp/arq_analysis.hpp"
#include "harqdvp/error.hpp"
#include "harqdvp/simulator.hpp"

using namespace harqdvp;

namespace {

SimConfig small(Scheme scheme = Scheme::kHarqIr) {
  SimConfig c;
  c.scheme = scheme;
  c.p = 0.2;
  c.p_vec = {0.3, 0.2, 0.1, 0.05};
  c.slots = 200'000;
  c.warmup_slots = 1'000;
  c.keep_records = true;
  return c;
}

}  // namespace

TEST_CASE("sparse arrivals without errors") {
  SimConfig c = small(Scheme::kArq);
  c.f = 1e-3;
  c.p = 0.0;
  const double targets[] = {2.0, 5.0};
  auto s = run(c, targets);
  REQUIRE(s.finalized() > 100);
  for (const auto& r : s.records) {
    CHECK(r.wait_slots == 0);
    CHECK(r.service_slots == 2);
    CHECK(r.outcome == Outcome::kDelivered);
  }
  CHECK(s.targets[0].dvp.value == 0.0);
  CHECK(s.targets[1].dvp.value == 0.0);
  CHECK(s.dvp(1.0).value == 1.0);
  for (const auto& pt : empirical_wait_ccdf(s)) CHECK(pt.value == 0.0);
  const double tp = throughput(s, 2.0, 800, 1.0);
  const double expect = static_cast<double>(s.measured_delivered) * 800 /
                        (static_cast<double>(s.measured_slots()) / 1000.0);
  CHECK(tp == doctest::Approx(expect));
  // f n / T within sampling noise of the arrival count
  CHECK(tp == doctest::Approx(1e-3 * 800 * 1000).epsilon(0.1));
}

TEST_CASE("conservation and delay decomposition") {
  for (auto scheme : {Scheme::kArq, Scheme::kHarqIr}) {
    SimConfig c = small(scheme);
    c.f = 0.45;
    c.q_max = 6;
    if (scheme == Scheme::kArq) c.max_attempts = 3;
    auto s = run(c);
    CHECK(s.arrivals == s.delivered + s.discarded + s.dropped + s.in_flight);
    CHECK(s.dropped > 0);
    CHECK(s.discarded > 0);
    const std::uint32_t zeta = c.zeta, delta = c.delta;
    for (const auto& r : s.records) {
      if (r.outcome == Outcome::kDroppedOverflow) continue;
      CHECK(r.total_slots == r.wait_slots + r.service_slots);
      const std::uint64_t m = r.attempts;
      CHECK(r.service_slots == m + m * zeta + (m - 1) * delta);
      CHECK(r.completion_slot == r.arrival_slot + r.total_slots);
      if (r.outcome == Outcome::kDiscarded) CHECK(r.attempts == c.attempt_limit());
    }
  }
}

TEST_CASE("histograms and estimates are consistent") {
  auto s = run(small());
  std::uint64_t wait_mass = 0;
  for (const auto& h : s.wait_hist)
    for (auto x : h) wait_mass += x;
  CHECK(wait_mass == s.finalized());
  std::uint64_t svc = 0;
  for (auto x : s.service_hist) svc += x;
  CHECK(svc == s.finalized());
  for (double d : {0.0, 2.0, 4.5, 8.5, 30.0}) {
    auto e = s.dvp(d);
    CHECK(e.value >= 0.0);
    CHECK(e.value <= 1.0);
    CHECK(e.ci_lo <= e.value);
    CHECK(e.ci_hi >= e.value);
  }
  // Full-queue arrivals aside, every slot sees a nonnegative queue.
  CHECK(s.queue_ccdf(0).value > 0.0);
  double pmf = 0.0;
  for (std::uint64_t k = 0; k < 200; ++k) pmf += s.wait_pmf(k).value;
  CHECK(pmf == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("same seed is bit identical, different seeds agree") {
  SimConfig c = small();
  c.keep_records = false;
  const double targets[] = {4.5, 8.5};
  auto a = run(c, targets);
  auto b = run(c, targets);
  CHECK(a.arrivals == b.arrivals);
  CHECK(a.wait_hist == b.wait_hist);
  CHECK(a.total_hist_delivered == b.total_hist_delivered);
  CHECK(a.targets[0].dvp.value == b.targets[0].dvp.value);
  c.seed = 2;
  auto other = run(c, targets);
  CHECK(other.arrivals != a.arrivals);
  for (int i = 0; i < 2; ++i) {
    const double sigma =
        std::hypot(a.targets[i].dvp.std_error, other.targets[i].dvp.std_error);
    CHECK(std::abs(a.targets[i].dvp.value - other.targets[i].dvp.value) <= 4.0 * sigma);
  }
}

TEST_CASE("deterministic arrivals in the bounded regime") {
  SimConfig c = small(Scheme::kArq);
  c.arrival = ArrivalKind::kDeterministic;
  c.cycle_slots = 16;
  c.max_attempts = 4;
  c.p = 0.3;
  auto s = run(c);
  for (const auto& r : s.records) CHECK(r.wait_slots == 0);
  // arrivals at multiples of 16 in [warmup, slots)
  CHECK(s.measured_arrivals == (c.slots - 1) / 16 - (c.warmup_slots - 1) / 16);
}

TEST_CASE("immediate-feedback mode ignores the delay fields") {
  SimConfig c = small(Scheme::kArq);
  c.if_mode = true;
  c.zeta = 3;
  c.delta = 5;
  auto s = run(c);
  for (const auto& r : s.records) CHECK(r.service_slots == r.attempts);
}

TEST_CASE("trace csv") {
  SimConfig c = small();
  c.slots = 20'000;
  auto s = run(c);
  std::ostringstream out;
  write_trace_csv(s, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "arrival_slot,first_tx_slot,attempts,outcome,wait_slots,service_slots,total_slots");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == s.records.size());
}

TEST_CASE("wilson interval") {
  auto e = wilson(0, 100);
  CHECK(e.value == 0.0);
  CHECK(e.ci_lo == 0.0);
  CHECK(e.ci_hi > 0.0);
  auto h = wilson(50, 100);
  CHECK(h.wilson_half_width() == doctest::Approx(0.0962).epsilon(1e-3));
  auto none = wilson(0, 0);
  CHECK(none.trials == 0);
}

TEST_CASE("config errors") {
  SimConfig c = small();
  c.slots = 5'000;
  c.warmup_slots = 100;
  CHECK_THROWS_AS(run(c), Error);
  c = small();
  c.warmup_slots = c.slots;
  CHECK_THROWS_AS(run(c), Error);
  c = small();
  c.p_vec = {0.3, 1.2};
  CHECK_THROWS_AS(run(c), Error);
  c = small();
  c.p_vec.clear();
  CHECK_THROWS_AS(run(c), Error);
  c = small();
  c.arrival = ArrivalKind::kDeterministic;
  c.cycle_slots = 0;
  CHECK_THROWS_AS(run(c), Error);
  c = small(Scheme::kArq);
  c.p = 1.5;
  CHECK_THROWS_AS(run(c), Error);
  try {
    c = small();
    c.f = -0.1;
    run(c);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigError);
  }
}

TEST_CASE("throughput collapses above saturation") {
  SimConfig c = small(Scheme::kArq);
  c.keep_records = false;
  c.p = 0.3;
  c.f = 0.4;
  const double below = throughput(run(c), 8.5, 800, 1.0);
  c.f = 0.9;  // f + p > 1: the backlog grows without bound
  const double above = throughput(run(c), 8.5, 800, 1.0);
  CHECK(below > 0.9 * 0.4 * 800 * 1000 * (1 - 0.3 * 0.3));
  CHECK(above < 0.01 * below);
}
