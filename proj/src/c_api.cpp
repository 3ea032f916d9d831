#include "harqdvp/harqdvp.h"

#include <fstream>
#include <memory>
#include <mutex>
#include <new>
#include <shared_mutex>
#include <string>
#include <vector>

#include "harqdvp/arq_analysis.hpp"
#include "harqdvp/error.hpp"
#include "harqdvp/error_model.hpp"
#include "harqdvp/harq_analysis.hpp"
#include "harqdvp/phy_config.hpp"
#include "harqdvp/simulator.hpp"

struct hd_harq {
  harqdvp::HarqAnalysis analysis;
};

struct hd_sim {
  harqdvp::SimStats stats;
};

namespace {

thread_local std::string g_last_error;

std::shared_mutex g_table_mutex;
std::vector<harqdvp::McsEntry>& active_table() {
  static std::vector<harqdvp::McsEntry> table(harqdvp::mcs_table().begin(),
                                              harqdvp::mcs_table().end());
  return table;
}

hd_status to_status(harqdvp::ErrorCode code) {
  using harqdvp::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return HD_ERR_INVALID_ARGUMENT;
    case ErrorCode::kInfeasibleAllocation: return HD_ERR_INFEASIBLE;
    case ErrorCode::kUnstableQueue: return HD_ERR_UNSTABLE;
    case ErrorCode::kNoConvergence: return HD_ERR_NO_CONVERGENCE;
    case ErrorCode::kConfigError: return HD_ERR_CONFIG;
    case ErrorCode::kIoError: return HD_ERR_IO;
  }
  return HD_ERR_INTERNAL;
}

template <typename Fn>
hd_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HD_OK;
  } catch (const harqdvp::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HD_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* what) {
  if (ptr == nullptr) {
    throw harqdvp::Error(harqdvp::ErrorCode::kInvalidArgument,
                         std::string(what) + " must not be NULL");
  }
}

hd_mcs to_c(const harqdvp::McsEntry& e) {
  return {e.index, e.modulation_order, e.coding_rate_x1024, e.spectral_efficiency};
}

harqdvp::ChannelParams from_c(const hd_channel& ch) {
  return {ch.gamma_linear, ch.mu_h2, ch.dispersion};
}

harqdvp::ArqParams from_c(const hd_arq_params& p) {
  return {p.f, p.p, p.zeta, p.delta, p.slot_ms};
}

hd_per_estimate to_c(const harqdvp::PerEstimate& e) {
  return {e.value, e.std_error, e.samples, e.seed};
}

hd_proportion to_c(const harqdvp::ProportionEstimate& e) {
  return {e.value, e.ci_lo, e.ci_hi, e.std_error, e.count, e.trials};
}

}  // namespace

extern "C" {

const char* hd_version(void) { return "0.1.0"; }

const char* hd_last_error(void) { return g_last_error.c_str(); }

const char* hd_status_string(hd_status status) {
  switch (status) {
    case HD_OK: return "ok";
    case HD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HD_ERR_INFEASIBLE: return "infeasible allocation";
    case HD_ERR_UNSTABLE: return "unstable queue";
    case HD_ERR_NO_CONVERGENCE: return "no convergence";
    case HD_ERR_CONFIG: return "configuration error";
    case HD_ERR_IO: return "i/o error";
    case HD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

size_t hd_mcs_table_size(void) {
  std::shared_lock lock(g_table_mutex);
  return active_table().size();
}

hd_status hd_mcs_table_entry(size_t index, hd_mcs* out) {
  return guarded([&] {
    require(out, "out");
    std::shared_lock lock(g_table_mutex);
    const auto& table = active_table();
    if (index >= table.size()) {
      throw harqdvp::Error(harqdvp::ErrorCode::kInvalidArgument, "MCS index out of range");
    }
    *out = to_c(table[index]);
  });
}

hd_status hd_mcs_table_load(const char* path) {
  return guarded([&] {
    require(path, "path");
    auto table = harqdvp::load_mcs_table(path);
    std::unique_lock lock(g_table_mutex);
    active_table() = std::move(table);
  });
}

hd_status hd_select_mcs(uint32_t packet_bits, uint32_t n_rb, hd_mcs* out) {
  return guarded([&] {
    require(out, "out");
    std::shared_lock lock(g_table_mutex);
    *out = to_c(harqdvp::select_mcs(active_table(), packet_bits, n_rb));
  });
}

hd_status hd_nrb_range(uint32_t packet_bits, uint32_t* min_nrb, uint32_t* max_nrb) {
  return guarded([&] {
    require(min_nrb, "min_nrb");
    require(max_nrb, "max_nrb");
    std::shared_lock lock(g_table_mutex);
    const auto [lo, hi] = harqdvp::nrb_range(active_table(), packet_bits);
    *min_nrb = lo;
    *max_nrb = hi;
  });
}

double hd_blocklength(uint32_t n_rb, int literal_re) {
  harqdvp::ResourceGrid grid;
  grid.n_rb = n_rb;
  return grid.blocklength(literal_re ? harqdvp::BlocklengthMode::kResourceElements
                                     : harqdvp::BlocklengthMode::kSlotChannelUses);
}

double hd_slot_duration_ms(uint32_t nu) { return harqdvp::Numerology{nu}.slot_duration_ms(); }

double hd_q_function(double x) { return harqdvp::q_function(x); }

hd_status hd_per_arq(const hd_channel* channel, double eta, double blocklength,
                     uint64_t samples, uint64_t seed, unsigned jobs, hd_per_estimate* out) {
  return guarded([&] {
    require(channel, "channel");
    require(out, "out");
    harqdvp::MonteCarloOptions mc{samples, seed, jobs, true};
    *out = to_c(harqdvp::per_arq_avg(from_c(*channel), eta, blocklength, mc));
  });
}

hd_status hd_per_harq(const hd_channel* channel, double eta, double blocklength,
                      uint32_t max_attempts, uint64_t samples, uint64_t seed, unsigned jobs,
                      hd_per_estimate* out) {
  return guarded([&] {
    require(channel, "channel");
    require(out, "out");
    harqdvp::MonteCarloOptions mc{samples, seed, jobs, true};
    const auto vec = harqdvp::per_harq_avg(from_c(*channel), eta, blocklength, max_attempts, mc);
    for (std::size_t i = 0; i < vec.p.size(); ++i) out[i] = to_c(vec.p[i]);
  });
}

hd_status hd_arq_stability_ratio(const hd_arq_params* params, double* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = harqdvp::stability_ratio(from_c(*params));
  });
}

hd_status hd_arq_kd(const hd_arq_params* params, double d_ms, int64_t* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = harqdvp::arq_kd(d_ms, from_c(*params));
  });
}

hd_status hd_arq_dvp(const hd_arq_params* params, double d_ms, double* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = harqdvp::arq_dvp(d_ms, from_c(*params));
  });
}

hd_status hd_arq_wait_ccdf_bound(const hd_arq_params* params, uint64_t j, double* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = harqdvp::wait_ccdf_bound(j, from_c(*params));
  });
}

hd_status hd_arq_queue_ccdf(const hd_arq_params* params, uint64_t q, double* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = harqdvp::queue_ccdf(q, from_c(*params));
  });
}

hd_status hd_bar_dvp(const hd_arq_params* params, double d_ms, double* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = harqdvp::bar_dvp(d_ms, from_c(*params));
  });
}

hd_status hd_harq_create(const hd_harq_params* params, hd_harq** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = nullptr;
    if (params->max_attempts > 0) require(params->p_vec, "p_vec");
    harqdvp::HarqParams hp;
    hp.f = params->f;
    hp.p_vec.assign(params->p_vec, params->p_vec + params->max_attempts);
    hp.q_max = params->q_max;
    hp.zeta = params->zeta;
    hp.delta = params->delta;
    hp.slot_ms = params->slot_ms;
    *out = new hd_harq{harqdvp::HarqAnalysis(std::move(hp))};
  });
}

void hd_harq_destroy(hd_harq* harq) { delete harq; }

hd_status hd_harq_dvp(const hd_harq* harq, double d_ms, double* out) {
  return guarded([&] {
    require(harq, "harq");
    require(out, "out");
    *out = harq->analysis.dvp(d_ms);
  });
}

hd_status hd_harq_service_dvp(const hd_harq* harq, double d_ms, double* out) {
  return guarded([&] {
    require(harq, "harq");
    require(out, "out");
    *out = harqdvp::harq_service_dvp(d_ms, harq->analysis.params());
  });
}

hd_status hd_harq_kd(const hd_harq* harq, double d_ms, int64_t* out) {
  return guarded([&] {
    require(harq, "harq");
    require(out, "out");
    *out = harqdvp::harq_kd(d_ms, harq->analysis.params());
  });
}

hd_status hd_harq_overflow_probability(const hd_harq* harq, double* out) {
  return guarded([&] {
    require(harq, "harq");
    require(out, "out");
    *out = harq->analysis.overflow_probability();
  });
}

hd_status hd_harq_queue_distribution(const hd_harq* harq, double* out, size_t len) {
  return guarded([&] {
    require(harq, "harq");
    require(out, "out");
    const auto& pi = harq->analysis.queue_probabilities();
    if (len != pi.size()) {
      throw harqdvp::Error(harqdvp::ErrorCode::kInvalidArgument, "length must be q_max + 1");
    }
    std::copy(pi.begin(), pi.end(), out);
  });
}

hd_status hd_harq_wait_pmf(const hd_harq* harq, double* out, size_t len) {
  return guarded([&] {
    require(harq, "harq");
    require(out, "out");
    const auto& mass = harq->analysis.wait().mass;
    if (len != mass.size()) {
      throw harqdvp::Error(harqdvp::ErrorCode::kInvalidArgument, "length must be M * q_max + 1");
    }
    std::copy(mass.begin(), mass.end(), out);
  });
}

void hd_sim_config_default(hd_sim_config* config) {
  if (config == nullptr) return;
  const harqdvp::SimConfig d;
  *config = hd_sim_config{};
  config->scheme = HD_SCHEME_HARQ_IR;
  config->arrival = HD_ARRIVAL_BERNOULLI;
  config->f = d.f;
  config->zeta = d.zeta;
  config->delta = d.delta;
  config->max_attempts = HD_UNLIMITED;
  config->q_max = HD_UNLIMITED;
  config->slots = d.slots;
  config->warmup_slots = d.warmup_slots;
  config->seed = d.seed;
  config->slot_ms = d.slot_ms;
}

hd_status hd_sim_run(const hd_sim_config* config, hd_sim** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    harqdvp::SimConfig sc;
    sc.scheme = config->scheme == HD_SCHEME_ARQ ? harqdvp::Scheme::kArq : harqdvp::Scheme::kHarqIr;
    sc.arrival = config->arrival == HD_ARRIVAL_DETERMINISTIC ? harqdvp::ArrivalKind::kDeterministic
                                                             : harqdvp::ArrivalKind::kBernoulli;
    sc.f = config->f;
    sc.cycle_slots = config->cycle_slots;
    sc.p = config->p;
    if (config->p_len > 0) {
      require(config->p_vec, "p_vec");
      sc.p_vec.assign(config->p_vec, config->p_vec + config->p_len);
    }
    sc.zeta = config->zeta;
    sc.delta = config->delta;
    sc.max_attempts = config->max_attempts;
    sc.q_max = config->q_max;
    sc.slots = config->slots;
    sc.warmup_slots = config->warmup_slots;
    sc.seed = config->seed;
    sc.if_mode = config->if_mode != 0;
    sc.slot_ms = config->slot_ms;
    sc.keep_records = config->keep_records != 0;
    *out = new hd_sim{harqdvp::run(sc)};
  });
}

void hd_sim_destroy(hd_sim* sim) { delete sim; }

hd_status hd_sim_counts_get(const hd_sim* sim, hd_sim_counts* out) {
  return guarded([&] {
    require(sim, "sim");
    require(out, "out");
    const auto& s = sim->stats;
    *out = {s.arrivals,          s.delivered,   s.discarded,        s.dropped,
            s.in_flight,         s.measured_arrivals, s.finalized(), s.measured_slots()};
  });
}

hd_status hd_sim_dvp(const hd_sim* sim, double d_ms, hd_proportion* out) {
  return guarded([&] {
    require(sim, "sim");
    require(out, "out");
    if (!(d_ms >= 0.0)) {
      throw harqdvp::Error(harqdvp::ErrorCode::kInvalidArgument, "delay target must be >= 0");
    }
    *out = to_c(sim->stats.dvp(d_ms));
  });
}

hd_status hd_sim_wait_ccdf(const hd_sim* sim, uint64_t j, hd_proportion* out) {
  return guarded([&] {
    require(sim, "sim");
    require(out, "out");
    *out = to_c(sim->stats.wait_ccdf(j));
  });
}

hd_status hd_sim_queue_ccdf(const hd_sim* sim, uint64_t q, hd_proportion* out) {
  return guarded([&] {
    require(sim, "sim");
    require(out, "out");
    *out = to_c(sim->stats.queue_ccdf(q));
  });
}

hd_status hd_sim_throughput(const hd_sim* sim, double d_ms, uint32_t packet_bits,
                            double* out_bps) {
  return guarded([&] {
    require(sim, "sim");
    require(out_bps, "out_bps");
    *out_bps = harqdvp::throughput(sim->stats, d_ms, packet_bits, sim->stats.config.slot_ms);
  });
}

hd_status hd_sim_write_trace(const hd_sim* sim, const char* path) {
  return guarded([&] {
    require(sim, "sim");
    require(path, "path");
    if (!sim->stats.config.keep_records) {
      throw harqdvp::Error(harqdvp::ErrorCode::kConfigError,
                           "trace requires a run with keep_records set");
    }
    std::ofstream out(path);
    if (!out) throw harqdvp::Error(harqdvp::ErrorCode::kIoError, std::string("cannot write ") + path);
    harqdvp::write_trace_csv(sim->stats, out);
  });
}

}  // extern "C"
