// harqdvp command-line front end. Talks to the library only through the C
// interface in harqdvp/harqdvp.h.

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "harqdvp/harqdvp.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

// A failed library call, carrying the status for the exit code.
struct LibError : std::runtime_error {
  hd_status status;
  LibError(hd_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(hd_status s, const char* call) {
  if (s != HD_OK) throw LibError(s, std::string(call) + ": " + hd_last_error());
}

int exit_code(hd_status s) {
  switch (s) {
    case HD_ERR_INVALID_ARGUMENT:
    case HD_ERR_CONFIG: return kExitUsage;
    case HD_ERR_INFEASIBLE:
    case HD_ERR_UNSTABLE: return kExitInfeasible;
    default: return 1;
  }
}

struct RunSpec {
  std::string scheme = "harq";
  std::uint32_t bits = 800;
  std::uint32_t bytes = 0;  // when set, overrides bits
  std::uint32_t nrb = 10;
  std::uint32_t nu = 0;
  bool literal_re = false;
  double snr_db = 10.0;
  double mu_h2 = 1.0;
  double dispersion = 1.0;
  double f = 1.0 / 3.0;
  std::uint32_t zeta = 1;
  std::uint32_t delta = 2;
  std::uint32_t max_attempts = 4;
  std::uint32_t q_max = 16;
  std::vector<double> d_ms{8.5};
  std::uint64_t samples = 1'000'000;
  std::uint64_t slots = 10'000'000;
  std::uint64_t warmup = 10'000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  double encode_delay_ms = 0.0;
  std::uint32_t propagation_slots = 0;
  std::vector<double> per_values;
  std::string mcs_table;
  std::string out;

  std::uint32_t packet_bits() const { return bytes ? bytes * 8 : bits; }
  bool harq() const { return scheme == "harq"; }
  std::uint32_t zeta_eff() const { return zeta + propagation_slots; }
  double target(double d) const { return d - encode_delay_ms; }
};

// Everything derived from the physical layer for one operating point.
struct Link {
  hd_mcs mcs{};
  double blocklength = 0.0;
  double slot_ms = 1.0;
  std::vector<hd_per_estimate> per;  // one entry for ARQ

  std::vector<double> values() const {
    std::vector<double> v;
    for (const auto& e : per) v.push_back(e.value);
    return v;
  }
};

Link resolve_link(const RunSpec& s, unsigned jobs) {
  Link link;
  check(hd_select_mcs(s.packet_bits(), s.nrb, &link.mcs), "select_mcs");
  link.blocklength = hd_blocklength(s.nrb, s.literal_re ? 1 : 0);
  link.slot_ms = hd_slot_duration_ms(s.nu);
  const std::uint32_t m = s.harq() ? s.max_attempts : 1;
  if (!s.per_values.empty()) {
    if (s.per_values.size() != m) {
      throw LibError(HD_ERR_INVALID_ARGUMENT,
                     "--per-values needs " + std::to_string(m) + " value(s)");
    }
    for (double p : s.per_values) link.per.push_back({p, 0.0, 0, 0});
    return link;
  }
  const hd_channel ch{std::pow(10.0, s.snr_db / 10.0), s.mu_h2, s.dispersion};
  link.per.resize(m);
  if (s.harq()) {
    check(hd_per_harq(&ch, link.mcs.spectral_efficiency, link.blocklength, m, s.samples, s.seed,
                      jobs, link.per.data()),
          "per_harq");
  } else {
    check(hd_per_arq(&ch, link.mcs.spectral_efficiency, link.blocklength, s.samples, s.seed,
                     jobs, link.per.data()),
          "per_arq");
  }
  return link;
}

hd_arq_params arq_params(const RunSpec& s, const Link& link) {
  return {s.f, link.per.at(0).value, s.zeta_eff(), s.delta, link.slot_ms};
}

using HarqHandle = std::unique_ptr<hd_harq, decltype(&hd_harq_destroy)>;

HarqHandle solve_harq(const RunSpec& s, const Link& link) {
  const auto p = link.values();
  const hd_harq_params hp{s.f, p.data(), static_cast<std::uint32_t>(p.size()), s.q_max,
                          s.zeta_eff(), s.delta, link.slot_ms};
  hd_harq* h = nullptr;
  check(hd_harq_create(&hp, &h), "harq_create");
  HarqHandle handle(h, &hd_harq_destroy);
  double overflow = 0.0;
  check(hd_harq_overflow_probability(h, &overflow), "overflow_probability");
  if (overflow > 1e-6) {
    std::fprintf(stderr,
                 "warning: full-queue probability %.3g exceeds 1e-6; overflow drops are not "
                 "counted in the DVP\n",
                 overflow);
  }
  return handle;
}

// Persistent ARQ needs f + p < 1; say why before failing.
void require_stable(const hd_arq_params& a) {
  double ratio = 0.0;
  check(hd_arq_stability_ratio(&a, &ratio), "stability_ratio");
  if (a.f + a.p >= 1.0) {
    std::ostringstream msg;
    msg << "unstable queue: p/(1-f) = " << ratio << " >= 1 (f = " << a.f << ", p = " << a.p
        << "); lower f or the error rate";
    throw LibError(HD_ERR_UNSTABLE, msg.str());
  }
}

double analytic_dvp(const RunSpec& s, const Link& link, const hd_harq* h, double d) {
  double v = 0.0;
  if (s.harq()) {
    check(hd_harq_dvp(h, s.target(d), &v), "harq_dvp");
  } else {
    const auto a = arq_params(s, link);
    check(hd_arq_dvp(&a, s.target(d), &v), "arq_dvp");
  }
  return v;
}

using SimHandle = std::unique_ptr<hd_sim, decltype(&hd_sim_destroy)>;

SimHandle simulate(const RunSpec& s, const Link& link, bool keep_records) {
  const auto p = link.values();
  hd_sim_config c;
  hd_sim_config_default(&c);
  c.scheme = s.harq() ? HD_SCHEME_HARQ_IR : HD_SCHEME_ARQ;
  c.f = s.f;
  c.p = p.at(0);
  c.p_vec = p.data();
  c.p_len = static_cast<std::uint32_t>(p.size());
  c.zeta = s.zeta_eff();
  c.delta = s.delta;
  c.max_attempts = HD_UNLIMITED;
  c.q_max = s.harq() ? s.q_max : HD_UNLIMITED;
  c.slots = s.slots;
  c.warmup_slots = s.warmup;
  c.seed = s.seed;
  c.slot_ms = link.slot_ms;
  c.keep_records = keep_records ? 1 : 0;
  hd_sim* sim = nullptr;
  check(hd_sim_run(&c, &sim), "sim_run");
  return SimHandle(sim, &hd_sim_destroy);
}

// Output sink: stdout or --out, with the '#' header block.
class Output {
 public:
  Output(const std::string& path, const std::string& command, const std::string& config) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw LibError(HD_ERR_IO, "cannot write " + path);
    }
    out() << "# harqdvp " << hd_version() << " " << command << "\n";
    std::istringstream lines(config);
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty()) out() << "# " << line << "\n";
    }
  }

  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string join(const std::vector<double>& v, char sep) {
  std::ostringstream s;
  s.precision(10);
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? std::string(1, sep) : "") << v[i];
  return s.str();
}

void print_link(std::ostream& os, const RunSpec& s, const Link& link) {
  os << "# packet_bits = " << s.packet_bits() << "\n"
     << "# mcs = " << link.mcs.index << " (eta " << link.mcs.spectral_efficiency << ")\n"
     << "# blocklength = " << link.blocklength << "\n"
     << "# slot_ms = " << link.slot_ms << "\n"
     << "# per = " << join(link.values(), ';') << "\n";
}

// ---- subcommands ---------------------------------------------------------

void cmd_per(const RunSpec& s, Output& o) {
  const Link link = resolve_link(s, s.jobs);
  auto& os = o.out();
  print_link(os, s, link);
  os << "m,p_m,std_error,samples,seed\n";
  os.precision(12);
  for (std::size_t m = 0; m < link.per.size(); ++m) {
    const auto& e = link.per[m];
    os << m + 1 << ',' << e.value << ',' << e.std_error << ',' << e.samples << ',' << e.seed
       << '\n';
  }
}

void cmd_dvp(const RunSpec& s, Output& o, bool validate) {
  const Link link = resolve_link(s, s.jobs);
  if (!s.harq()) require_stable(arq_params(s, link));
  HarqHandle h(nullptr, &hd_harq_destroy);
  if (s.harq()) h = solve_harq(s, link);
  SimHandle sim(nullptr, &hd_sim_destroy);
  if (validate) sim = simulate(s, link, false);

  auto& os = o.out();
  print_link(os, s, link);
  os << "d_ms,d_eff_ms,dvp_analytic" << (validate ? ",dvp_sim,ci_lo,ci_hi,std_error" : "")
     << '\n';
  os.precision(12);
  for (double d : s.d_ms) {
    os << d << ',' << s.target(d) << ',' << analytic_dvp(s, link, h.get(), d);
    if (validate) {
      hd_proportion e{};
      check(hd_sim_dvp(sim.get(), s.target(d), &e), "sim_dvp");
      os << ',' << e.value << ',' << e.ci_lo << ',' << e.ci_hi << ',' << e.std_error;
    }
    os << '\n';
  }
}

void cmd_simulate(const RunSpec& s, Output& o, const std::string& trace) {
  const Link link = resolve_link(s, s.jobs);
  const SimHandle sim = simulate(s, link, !trace.empty());
  hd_sim_counts n{};
  check(hd_sim_counts_get(sim.get(), &n), "sim_counts");
  auto& os = o.out();
  print_link(os, s, link);
  os << "# arrivals = " << n.arrivals << ", delivered = " << n.delivered
     << ", discarded = " << n.discarded << ", dropped = " << n.dropped
     << ", in_flight = " << n.in_flight << "\n";
  os << "d_ms,d_eff_ms,dvp_sim,ci_lo,ci_hi,std_error,count,trials,throughput_bps\n";
  os.precision(12);
  for (double d : s.d_ms) {
    hd_proportion e{};
    check(hd_sim_dvp(sim.get(), s.target(d), &e), "sim_dvp");
    double bps = 0.0;
    check(hd_sim_throughput(sim.get(), s.target(d), s.packet_bits(), &bps), "sim_throughput");
    os << d << ',' << s.target(d) << ',' << e.value << ',' << e.ci_lo << ',' << e.ci_hi << ','
       << e.std_error << ',' << e.count << ',' << e.trials << ',' << bps << '\n';
  }
  if (!trace.empty()) check(hd_sim_write_trace(sim.get(), trace.c_str()), "write_trace");
}

// Analytic against simulation for both the DVP and, for ARQ, the wait bound.
void cmd_validate(const RunSpec& s, Output& o) {
  const Link link = resolve_link(s, s.jobs);
  if (!s.harq()) require_stable(arq_params(s, link));
  HarqHandle h(nullptr, &hd_harq_destroy);
  if (s.harq()) h = solve_harq(s, link);
  const SimHandle sim = simulate(s, link, false);
  auto& os = o.out();
  print_link(os, s, link);
  // HARQ: two-sided agreement within 3 Wilson half-widths. ARQ: the
  // analytic value is an upper bound, so only excess over it counts.
  os << "quantity,x,analytic,sim,ci_lo,ci_hi,deviation_halfwidths,ok\n";
  os.precision(12);
  auto row = [&](const char* what, double x, double ana, const hd_proportion& e) {
    const double hw = std::max(0.5 * (e.ci_hi - e.ci_lo), 1e-300);
    const double dev = s.harq() ? std::abs(e.value - ana) / hw : (e.value - ana) / hw;
    os << what << ',' << x << ',' << ana << ',' << e.value << ',' << e.ci_lo << ',' << e.ci_hi
       << ',' << dev << ',' << (dev <= 3.0 ? "yes" : "no") << '\n';
  };
  for (double d : s.d_ms) {
    hd_proportion e{};
    check(hd_sim_dvp(sim.get(), s.target(d), &e), "sim_dvp");
    row("dvp", d, analytic_dvp(s, link, h.get(), d), e);
  }
  if (!s.harq()) {
    const auto a = arq_params(s, link);
    for (std::uint64_t j = 0; j <= 10; ++j) {
      hd_proportion e{};
      check(hd_sim_wait_ccdf(sim.get(), j, &e), "sim_wait_ccdf");
      double bound = 0.0;
      check(hd_arq_wait_ccdf_bound(&a, j, &bound), "wait_ccdf_bound");
      row("wait_ccdf", static_cast<double>(j), bound, e);
    }
  }
}

struct SweepRow {
  std::string cells;
  std::string error;
};

std::vector<double> parse_grid(const std::string& text) {
  // "a:b:step" or a comma separated list
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double a = 0, b = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0) || b < a)
      throw CLI::ValidationError("--grid", "expected a:b:step with step > 0 and a <= b");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--grid", "not a number: " + item);
    }
  }
  if (out.empty()) throw CLI::ValidationError("--grid", "empty grid");
  return out;
}

void cmd_sweep(const RunSpec& base, Output& o, const std::string& axis, std::string grid_text,
               const std::vector<std::string>& schemes) {
  if (grid_text.empty()) {
    if (axis == "nrb" || axis == "nrb_per_byte") {
      std::uint32_t lo = 0, hi = 0;
      check(hd_nrb_range(base.packet_bits(), &lo, &hi), "nrb_range");
      std::ostringstream g;
      if (axis == "nrb") {
        g << lo << ':' << hi << ":1";
      } else {
        for (std::uint32_t n = lo; n <= hi; ++n)
          g << (n > lo ? "," : "") << 8.0 * n / base.packet_bits();
      }
      grid_text = g.str();
    } else {
      throw CLI::ValidationError("--grid", "required for axis " + axis);
    }
  }
  const std::vector<double> grid = parse_grid(grid_text);

  struct Point {
    double x;
    std::string scheme;
  };
  std::vector<Point> points;
  for (double x : grid)
    for (const auto& sc : schemes) points.push_back({x, sc});

  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const Point& pt = points[i];
      RunSpec s = base;
      s.scheme = pt.scheme;
      double d = s.d_ms.front();
      std::ostringstream cells;
      cells.precision(10);
      try {
        if (axis == "nrb") {
          s.nrb = static_cast<std::uint32_t>(std::llround(pt.x));
        } else if (axis == "nrb_per_byte") {
          s.nrb = static_cast<std::uint32_t>(std::llround(pt.x * s.packet_bits() / 8.0));
        } else if (axis == "d") {
          d = pt.x;
        } else if (axis == "rtt") {
          // d stays at the first target; zeta fixed, delta fills the rest
          const auto rtt = static_cast<std::int64_t>(std::llround(pt.x));
          if (rtt < 1 + static_cast<std::int64_t>(s.zeta_eff()))
            throw LibError(HD_ERR_INVALID_ARGUMENT, "rtt below 1 + zeta");
          s.delta = static_cast<std::uint32_t>(rtt - 1 - s.zeta_eff());
        } else if (axis == "f") {
          s.f = pt.x;
        }
        if (s.nrb == 0) throw LibError(HD_ERR_INVALID_ARGUMENT, "N_RB rounds to 0");
        const Link link = resolve_link(s, 1);
        double dvp = 0.0;
        if (s.harq()) {
          const HarqHandle h = solve_harq(s, link);
          dvp = analytic_dvp(s, link, h.get(), d);
        } else {
          require_stable(arq_params(s, link));
          dvp = analytic_dvp(s, link, nullptr, d);
        }
        const double tput = s.f * s.packet_bits() / (link.slot_ms / 1000.0) * (1.0 - dvp);
        cells << s.nrb << ',' << link.mcs.index << ',' << link.mcs.spectral_efficiency << ','
              << s.f << ',' << s.zeta_eff() << ',' << s.delta << ',' << d << ','
              << join(link.values(), ';') << ',' << dvp << ',' << tput;
        rows[i].cells = cells.str();
      } catch (const std::exception& e) {
        rows[i].cells = std::to_string(s.nrb) + ",,,,,,,,,";
        rows[i].error = e.what();
        for (char& c : rows[i].error)
          if (c == ',' || c == '\n') c = ' ';
      }
    }
  };
  std::vector<std::jthread> pool;
  const unsigned n_workers = std::max(1u, std::min<unsigned>(base.jobs, points.size()));
  for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  pool.clear();

  auto& os = o.out();
  os << "index,axis,axis_value,scheme,nrb,mcs,eta,f,zeta,delta,d_ms,per,dvp,throughput_bps,error\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    os << i << ',' << axis << ',' << points[i].x << ',' << points[i].scheme << ','
       << rows[i].cells << ',' << rows[i].error << '\n';
  }
}

// Round-trip formatting so echoed defaults replay bit-exactly.
std::string exact(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay violation analysis for ARQ and HARQ-IR links with delayed feedback"};
  app.set_version_flag("--version", std::string(hd_version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key = value file; flags given on the command line win");

  RunSpec s;
  app.add_option("--seed", s.seed, "PRNG seed for Monte Carlo and simulation")->capture_default_str();
  app.add_option("--jobs", s.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", s.out, "Write CSV here instead of stdout");
  app.add_option("--scheme", s.scheme, "arq (persistent) or harq (HARQ-IR)")
      ->check(CLI::IsMember({"arq", "harq"}))
      ->capture_default_str();
  app.add_option("--bits", s.bits, "Packet length in bits")->check(CLI::Range(1u, 8448u))->capture_default_str();
  app.add_option("--bytes", s.bytes, "Packet length in bytes (overrides --bits)")->check(CLI::Range(1u, 1056u));
  app.add_option("--nrb", s.nrb, "Resource blocks")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--nu", s.nu, "Numerology index")->check(CLI::Range(0u, 6u))->capture_default_str();
  app.add_flag("--literal-re", s.literal_re, "Use 12 N_RB channel uses in the dispersion term");
  app.add_option("--snr-db", s.snr_db, "Average SNR in dB")->capture_default_str();
  app.add_option("--mu-h2", s.mu_h2, "E|h|^2")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--dispersion", s.dispersion, "Channel dispersion V")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("-f,--arrival", s.f, "Per-slot arrival probability")
      ->check(CLI::Range(0.0, 0.999999))
      ->default_str(exact(s.f));
  app.add_option("--zeta", s.zeta, "Decoding delay, slots")->capture_default_str();
  app.add_option("--delta", s.delta, "Feedback delay, slots")->capture_default_str();
  app.add_option("-M,--max-attempts", s.max_attempts, "HARQ transmissions per packet")->check(CLI::Range(1u, 64u))->capture_default_str();
  app.add_option("--q-max", s.q_max, "HARQ queue capacity")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("-d,--delay", s.d_ms, "Delay targets, ms")->delimiter(',')->capture_default_str();
  app.add_option("--samples", s.samples, "Monte Carlo draws for the PER")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--slots", s.slots, "Simulation horizon, slots")->capture_default_str();
  app.add_option("--warmup", s.warmup, "Slots excluded at the start of a simulation")->capture_default_str();
  app.add_option("--encode-delay-ms", s.encode_delay_ms, "Subtracted from every delay target")->capture_default_str();
  app.add_option("--propagation-slots", s.propagation_slots, "Added to the decoding delay")->capture_default_str();
  app.add_option("--per-values", s.per_values, "Use these PERs instead of Monte Carlo")->delimiter(',');
  app.add_option("--mcs-table", s.mcs_table, "MCS table CSV replacing the compiled one")->check(CLI::ExistingFile);

  auto* per = app.add_subcommand("per", "Packet error rate per attempt");
  auto* dvp = app.add_subcommand("dvp", "Analytic delay violation probability");
  bool validate_flag = false;
  dvp->add_flag("--validate", validate_flag, "Add simulated columns");
  auto* sweep = app.add_subcommand("sweep", "DVP over a parameter grid");
  std::string axis = "nrb", grid;
  std::vector<std::string> schemes{"arq", "harq"};
  sweep->add_option("--axis", axis, "nrb | d | rtt | f | nrb_per_byte")
      ->check(CLI::IsMember({"nrb", "d", "rtt", "f", "nrb_per_byte"}))
      ->capture_default_str();
  sweep->add_option("--grid", grid, "a:b:step or a comma separated list");
  sweep->add_option("--schemes", schemes, "Schemes per grid point")
      ->delimiter(',')
      ->check(CLI::IsMember({"arq", "harq"}))
      ->capture_default_str();
  auto* sim = app.add_subcommand("simulate", "Slot-level simulation");
  std::string trace;
  sim->add_option("--trace", trace, "Per-packet CSV trace");
  auto* val = app.add_subcommand("validate", "Analytic against simulated DVP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  // Unset options without a default come out as key=""; leave them out so
  // the block can be fed back through --config.
  std::string effective;
  {
    std::istringstream all(app.config_to_str(true, false));
    for (std::string line; std::getline(all, line);) {
      if (line.size() >= 3 && line.compare(line.size() - 3, 3, "=\"\"") == 0) continue;
      effective += line + '\n';
    }
  }
  // With --out the header block goes to the file; echo to the terminal too.
  if (!s.out.empty()) std::cerr << "# effective configuration\n" << effective;

  try {
    if (!s.mcs_table.empty()) check(hd_mcs_table_load(s.mcs_table.c_str()), "mcs_table_load");
    if (s.slots < 10'000 || s.warmup >= s.slots)
      throw LibError(HD_ERR_CONFIG, "need --slots >= 10000 and --warmup < --slots");
    const char* name = app.get_subcommands().front()->get_name().c_str();
    Output out(s.out, name, effective);
    if (per->parsed()) cmd_per(s, out);
    if (dvp->parsed()) cmd_dvp(s, out, validate_flag);
    if (sweep->parsed()) cmd_sweep(s, out, axis, grid, schemes);
    if (sim->parsed()) cmd_simulate(s, out, trace);
    if (val->parsed()) cmd_validate(s, out);
  } catch (const LibError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.status);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
