#include "qtwp/cli.hpp"

#include "qtwp/analytics.hpp"
#include "qtwp/report.hpp"
#include "qtwp/sim_engine.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <thread>

namespace qtwp::cli {

namespace {

using report::Json;
using sim::ConfigError;
using sim::SimConfig;

class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw simulation flags shared by run, batch and sweep.
struct SimFlags {
  std::string mode = "quantum-ideal";
  std::int64_t slots = 1000;
  std::int64_t rounds = 0;
  std::uint64_t seed = 1;
  std::int64_t c = 0;
  double t1 = 20.0;
  double t2 = 18.0;
  double delta = 0.0;
  std::int64_t rounds_per_swap = 1;
  std::string noise;
  std::size_t buffer_bits = 0;
  bool exclude_presharing = false;

  CLI::Option* mode_opt = nullptr;
  CLI::Option* rounds_opt = nullptr;
  CLI::Option* c_opt = nullptr;
  CLI::Option* t1_opt = nullptr;
  CLI::Option* t2_opt = nullptr;
  CLI::Option* noise_opt = nullptr;
  CLI::Option* buffer_opt = nullptr;
};

void add_sim_flags(CLI::App& app, SimFlags& f, bool with_mode, bool with_c) {
  if (with_mode) {
    f.mode_opt = app.add_option("--mode", f.mode,
                                "quantum-ideal | quantum-variant | direct | sdc-tdd | ping-pong");
  }
  app.add_option("--slots", f.slots, "horizon in slots")->capture_default_str();
  f.rounds_opt = app.add_option("--rounds", f.rounds, "horizon in completed rounds (overrides --slots)");
  app.add_option("--seed", f.seed, "master seed")->capture_default_str();
  if (with_c) {
    f.c_opt = app.add_option("--c", f.c, "coherence budget in slots (>= 2)");
  }
  f.t1_opt = app.add_option("--t1", f.t1, "relaxation time in slots")->capture_default_str();
  f.t2_opt = app.add_option("--t2", f.t2, "dephasing time in slots")->capture_default_str();
  app.add_option("--delta", f.delta, "delay per role swap, in slots")->capture_default_str();
  app.add_option("--rounds-per-swap", f.rounds_per_swap, "rounds between role swaps (N)")
      ->capture_default_str();
  f.noise_opt = app.add_option("--noise", f.noise,
                               "none | cliff | t1t2 (default: t1t2 if --t1/--t2 given, else none)");
  f.buffer_opt = app.add_option("--buffer-bits", f.buffer_bits, "cap on each user's input bits");
  app.add_flag("--exclude-presharing", f.exclude_presharing,
               "sdc-tdd only: do not charge the distribution slot");
}

SimConfig resolve(const SimFlags& f, std::optional<std::int64_t> c_override = std::nullopt) {
  SimConfig config;
  if (f.mode_opt) {
    const auto mode = sim::parse_mode(f.mode);
    if (!mode) throw ConfigError("mode", "unknown mode '" + f.mode + "'");
    config.mode = *mode;
  } else {
    config.mode = sim::Mode::QuantumVariant;
  }
  config.horizon = (f.rounds_opt && f.rounds_opt->count() > 0) ? sim::Horizon::rounds(f.rounds)
                                                               : sim::Horizon::slots(f.slots);
  config.seed = f.seed;
  if (c_override) {
    config.c = c_override;
  } else if (f.c_opt && f.c_opt->count() > 0) {
    config.c = f.c;
  }
  const bool times_given = f.t1_opt->count() > 0 || f.t2_opt->count() > 0;
  if (f.noise_opt->count() > 0) {
    const auto noise = sim::parse_noise(f.noise);
    if (!noise) throw ConfigError("noise", "unknown noise model '" + f.noise + "'");
    config.noise = *noise;
  } else {
    config.noise = times_given ? sim::NoiseKind::T1T2 : sim::NoiseKind::None;
  }
  config.t1t2 = {f.t1, f.t2};
  config.delta = f.delta;
  config.rounds_per_swap = f.rounds_per_swap;
  if (f.buffer_opt->count() > 0) config.buffer_bits = f.buffer_bits;
  config.include_presharing = !f.exclude_presharing;
  config.validate();
  return config;
}

std::pair<std::int64_t, std::int64_t> parse_c_range(const std::string& text) {
  const auto colon = text.find(':');
  auto parse = [&](std::string_view s) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ConfigError("c-range", "expected lo:hi, got '" + text + "'");
    }
    return v;
  };
  if (colon == std::string::npos) {
    const auto v = parse(text);
    return {v, v};
  }
  const std::string_view view(text);
  const auto lo = parse(view.substr(0, colon));
  const auto hi = parse(view.substr(colon + 1));
  if (lo < 2) throw ConfigError("c-range", "c must be at least 2");
  if (hi < lo) throw ConfigError("c-range", "empty range '" + text + "'");
  return {lo, hi};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot open '" + path + "' for writing");
  return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::max(1U, std::min<unsigned>(worker_count(), static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Json echo_for(const std::string& command, const Json& config, std::vector<std::string> replay) {
  Json j;
  j["command"] = command;
  j["config"] = config;
  replay.insert(replay.begin(), command);
  j["replay"] = replay;
  return j;
}

std::string cell(const std::optional<double>& v) {
  return v ? report::format_real(*v) : std::string{};
}

// ---------------------------------------------------------------------------

int cmd_run(const SimFlags& flags, const std::string& prefix, std::ostream& out) {
  const SimConfig config = resolve(flags);
  std::vector<std::string> replay = report::config_to_args(config);
  replay.insert(replay.end(), {"--out-prefix", prefix});
  const Json echo = echo_for("run", report::config_to_json(config), replay);

  const sim::Trace trace = sim::run_simulation(config);
  {
    auto csv = open_output(prefix + ".trace.csv");
    report::write_trace_csv(csv, trace, echo);
  }
  const Json summary = report::run_summary(trace, echo);
  {
    auto json = open_output(prefix + ".summary.json");
    json << summary.dump(2) << '\n';
  }
  const auto& fin = summary["final"];
  auto show = [](const Json& v) {
    return v.is_null() ? std::string("n/a") : report::format_real(v.get<double>());
  };
  out << "R = " << show(fin["R"]) << "\nE = " << show(fin["E"])
      << "\nsd_error_rate = " << show(fin["sd_error_rate"]) << '\n';
  return kExitOk;
}

struct RunResult {
  std::uint64_t seed = 0;
  analytics::Metrics truncated;
  analytics::Metrics full;
};

int cmd_batch(const SimFlags& flags, std::int64_t runs, std::int64_t truncate,
              const std::string& prefix, std::ostream& out) {
  if (runs < 1) throw ConfigError("runs", "runs must be at least 1");
  if (truncate < 1) throw ConfigError("truncate", "truncation point must be at least 1");
  const SimConfig base = resolve(flags);

  std::vector<std::string> replay = report::config_to_args(base);
  replay.insert(replay.end(), {"--runs", std::to_string(runs), "--truncate",
                               std::to_string(truncate), "--out-prefix", prefix});
  Json config_json = report::config_to_json(base);
  config_json["runs"] = runs;
  config_json["truncate"] = truncate;
  config_json["seeds"] = "seed + run index";
  const Json echo = echo_for("batch", config_json, replay);

  std::vector<RunResult> results(static_cast<std::size_t>(runs));
  parallel_for(results.size(), [&](std::size_t i) {
    SimConfig config = base;
    config.seed = base.seed + i;
    config.record_trace = false;
    const sim::Trace trace = sim::run_simulation(config);
    results[i] = {config.seed, analytics::empirical_metrics(trace, truncate),
                  analytics::empirical_metrics(trace)};
  });

  std::vector<std::uint64_t> seeds;
  std::vector<double> r_trunc, e_trunc, r_full, e_full;
  for (const auto& r : results) {
    seeds.push_back(r.seed);
    r_trunc.push_back(r.truncated.r);
    e_trunc.push_back(r.truncated.e);
    r_full.push_back(r.full.r);
    e_full.push_back(r.full.e);
  }
  {
    auto csv = open_output(prefix + ".batch.csv");
    csv << "# config: " << echo.dump() << '\n';
    csv << "seed,R_truncated,E_truncated,R_full,E_full,sd_error_rate\n";
    for (const auto& r : results) {
      csv << r.seed << ',' << report::format_real(r.truncated.r) << ','
          << report::format_real(r.truncated.e) << ',' << report::format_real(r.full.r) << ','
          << report::format_real(r.full.e) << ',' << cell(r.full.sd_error_rate) << '\n';
    }
  }
  const auto s_rt = analytics::batch_stats(r_trunc);
  const auto s_et = analytics::batch_stats(e_trunc);
  const auto s_rf = analytics::batch_stats(r_full);
  const auto s_ef = analytics::batch_stats(e_full);
  Json summary;
  summary["config"] = echo;
  summary["quartile_convention"] = analytics::kQuartileConvention;
  summary["outlier_rule"] = "value < q1 - 1.5 IQR or value > q3 + 1.5 IQR";
  summary["truncated"] = {{"slots", truncate},
                          {"R", report::batch_summary_json(s_rt, seeds)},
                          {"E", report::batch_summary_json(s_et, seeds)}};
  summary["full"] = {{"slots", base.horizon.count},
                     {"R", report::batch_summary_json(s_rf, seeds)},
                     {"E", report::batch_summary_json(s_ef, seeds)}};
  {
    auto json = open_output(prefix + ".batch.json");
    json << summary.dump(2) << '\n';
  }
  out << "runs = " << runs << "\nR(full) median = " << report::format_real(s_rf.median)
      << " IQR = " << report::format_real(s_rf.iqr)
      << "\nR(truncated) median = " << report::format_real(s_rt.median)
      << " IQR = " << report::format_real(s_rt.iqr) << '\n';
  return kExitOk;
}

int cmd_sweep(const SimFlags& flags, const std::string& c_range, std::int64_t runs_per_c,
              const std::string& prefix, std::ostream& out) {
  if (runs_per_c < 1) throw ConfigError("runs-per-c", "runs per c must be at least 1");
  const auto [lo, hi] = parse_c_range(c_range);
  const SimConfig base = resolve(flags, lo);

  std::vector<std::string> replay = report::config_to_args(base);
  // c comes from the range, not from a single --c flag.
  const auto c_flag = std::find(replay.begin(), replay.end(), "--c");
  replay.erase(c_flag, c_flag + 2);
  replay.erase(replay.begin(), replay.begin() + 2);  // --mode is fixed for sweeps
  replay.insert(replay.end(), {"--c-range", std::to_string(lo) + ":" + std::to_string(hi),
                               "--runs-per-c", std::to_string(runs_per_c), "--out-prefix",
                               prefix});
  Json config_json = report::config_to_json(base);
  config_json["c"] = nullptr;
  config_json["c_range"] = {lo, hi};
  config_json["runs_per_c"] = runs_per_c;
  config_json["seeds"] = "seed + run index";
  const Json echo = echo_for("sweep", config_json, replay);

  const auto n_c = static_cast<std::size_t>(hi - lo + 1);
  const auto per_c = static_cast<std::size_t>(runs_per_c);
  std::vector<analytics::Metrics> metrics(n_c * per_c);
  parallel_for(metrics.size(), [&](std::size_t k) {
    SimConfig config = base;
    config.c = lo + static_cast<std::int64_t>(k / per_c);
    config.seed = base.seed + k % per_c;
    config.record_trace = false;
    config.validate();
    metrics[k] = analytics::empirical_metrics(sim::run_simulation(config));
  });

  std::vector<report::SweepRow> rows;
  for (std::size_t ci = 0; ci < n_c; ++ci) {
    std::vector<double> r, e, err;
    for (std::size_t i = 0; i < per_c; ++i) {
      const auto& m = metrics[ci * per_c + i];
      r.push_back(m.r);
      e.push_back(m.e);
      if (m.sd_error_rate) err.push_back(*m.sd_error_rate);
    }
    report::SweepRow row;
    row.c = lo + static_cast<std::int64_t>(ci);
    row.theory = analytics::theory_decoherence(row.c);
    row.r = analytics::batch_stats(r);
    row.e = analytics::batch_stats(e);
    if (!err.empty()) row.err = analytics::batch_stats(err);
    out << "c = " << row.c << "  R = " << report::format_real(row.r.mean)
        << " (theory " << report::format_real(row.theory.r) << ")  E = "
        << report::format_real(row.e.mean) << " (theory " << report::format_real(row.theory.e)
        << ")  err = " << (row.err ? report::format_real(row.err->mean) : std::string("n/a"))
        << '\n';
    rows.push_back(std::move(row));
  }
  auto csv = open_output(prefix + ".sweep.csv");
  report::write_sweep_csv(csv, rows, echo);
  return kExitOk;
}

struct TheoryFlags {
  std::string c_range;
  double delta = 0.0;
  std::int64_t n = 1;
  std::string out_prefix;
  CLI::Option* c_range_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

int cmd_theory(const TheoryFlags& f, std::ostream& out) {
  const bool has_range = f.c_range_opt->count() > 0;
  const bool has_delta = f.delta_opt->count() > 0;
  if (!(f.delta >= 0.0)) throw ConfigError("delta", "delta must be non-negative");
  if (f.n < 1) throw ConfigError("n", "n must be at least 1");

  std::pair<std::int64_t, std::int64_t> range{2, 12};
  if (has_range) range = parse_c_range(f.c_range);
  const bool emit_range = has_range || !has_delta;

  std::vector<report::TheoryRow> rows;
  const auto ideal = analytics::theory_ideal();
  {
    report::TheoryRow row{"ideal", std::nullopt, f.delta, f.n, ideal};
    row.point.r = analytics::theory_delay(f.delta, std::nullopt, f.n);
    rows.push_back(row);
  }
  if (emit_range) {
    for (std::int64_t c = range.first; c <= range.second; ++c) {
      report::TheoryRow row{"decoherence", c, f.delta, f.n, analytics::theory_decoherence(c)};
      row.point.r = analytics::theory_delay(f.delta, c, f.n);
      rows.push_back(row);
    }
  }
  rows.push_back({"direct", std::nullopt, std::nullopt, std::nullopt, {1.0, 2.0, 2.0, 2.0}});
  rows.push_back({"sdc_tdd", std::nullopt, std::nullopt, std::nullopt, {1.0, 1.0, 2.0, 2.0}});
  rows.push_back({"ping_pong", std::nullopt, std::nullopt, std::nullopt, {0.5, 0.5, 1.0, 2.0}});

  std::vector<std::string> replay;
  Json config;
  if (emit_range) {
    const auto text = std::to_string(range.first) + ":" + std::to_string(range.second);
    replay.insert(replay.end(), {"--c-range", text});
    config["c_range"] = {range.first, range.second};
  }
  replay.insert(replay.end(), {"--delta", report::format_real(f.delta), "--n", std::to_string(f.n)});
  config["delta"] = f.delta;
  config["n"] = f.n;
  if (f.out_opt->count() > 0) replay.insert(replay.end(), {"--out-prefix", f.out_prefix});
  const Json echo = echo_for("theory", config, replay);

  if (f.out_opt->count() > 0) {
    auto csv = open_output(f.out_prefix + ".theory.csv");
    report::write_theory_csv(csv, rows, echo);
  } else {
    report::write_theory_csv(out, rows, echo);
  }
  return kExitOk;
}

}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv("QTWP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-way superdense-coding protocol simulator", "qtwp"};
  app.require_subcommand(1);

  SimFlags run_flags;
  std::string run_prefix = "qtwp_run";
  auto* run = app.add_subcommand("run", "simulate one execution and write trace + summary");
  add_sim_flags(*run, run_flags, true, true);
  run->add_option("--out-prefix", run_prefix, "output path prefix")->capture_default_str();

  SimFlags batch_flags;
  std::string batch_prefix = "qtwp_batch";
  std::int64_t batch_runs = 1000;
  std::int64_t batch_truncate = 100;
  auto* batch = app.add_subcommand("batch", "many seeds; boxplot statistics at two horizons");
  add_sim_flags(*batch, batch_flags, true, true);
  batch->add_option("--runs", batch_runs, "number of runs (seeds seed..seed+runs-1)")
      ->capture_default_str();
  batch->add_option("--truncate", batch_truncate, "truncated view, in slots")->capture_default_str();
  batch->add_option("--out-prefix", batch_prefix, "output path prefix")->capture_default_str();

  SimFlags sweep_flags;
  std::string sweep_prefix = "qtwp_sweep";
  std::string sweep_range = "2:12";
  std::int64_t sweep_runs = 100;
  auto* sweep = app.add_subcommand("sweep", "decoherence variant over a range of c");
  add_sim_flags(*sweep, sweep_flags, false, false);
  sweep->add_option("--c-range", sweep_range, "inclusive range lo:hi")->capture_default_str();
  sweep->add_option("--runs-per-c", sweep_runs, "runs per value of c")->capture_default_str();
  sweep->add_option("--out-prefix", sweep_prefix, "output path prefix")->capture_default_str();

  TheoryFlags theory_flags;
  auto* theory = app.add_subcommand("theory", "closed-form rate/efficiency table");
  theory_flags.c_range_opt = theory->add_option("--c-range", theory_flags.c_range, "inclusive range lo:hi");
  theory_flags.delta_opt = theory->add_option("--delta", theory_flags.delta, "delay per role swap");
  theory->add_option("--n", theory_flags.n, "rounds per swap")->capture_default_str();
  theory_flags.out_opt =
      theory->add_option("--out-prefix", theory_flags.out_prefix, "write <prefix>.theory.csv");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, run_prefix, out);
    if (batch->parsed()) return cmd_batch(batch_flags, batch_runs, batch_truncate, batch_prefix, out);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_range, sweep_runs, sweep_prefix, out);
    if (theory->parsed()) return cmd_theory(theory_flags, out);
  } catch (const ConfigError& e) {
    err << "error: --" << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace qtwp::cli
