#include "qtwp/report.hpp"

#include <cstdio>

namespace qtwp::report {

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::string cli_spelling(std::string_view name) {
  std::string s(name);
  for (char& ch : s) {
    if (ch == '_') ch = '-';
  }
  return s;
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string{};
}

std::string optional_cell(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : std::string{};
}

void write_echo(std::ostream& out, const Json& echo) { out << "# config: " << echo.dump() << '\n'; }

}  // namespace

Json config_to_json(const sim::SimConfig& config) {
  Json j;
  j["mode"] = cli_spelling(sim::to_string(config.mode));
  j["c"] = config.c ? Json(*config.c) : Json(nullptr);
  j["noise"] = std::string(sim::to_string(config.noise));
  j["t1"] = config.t1t2.t1;
  j["t2"] = config.t1t2.t2;
  j["delta"] = config.delta;
  j["rounds_per_swap"] = config.rounds_per_swap;
  j["seed"] = config.seed;
  j["horizon_unit"] = config.horizon.unit == sim::Horizon::Unit::Slots ? "slots" : "rounds";
  j["horizon"] = config.horizon.count;
  j["buffer_bits"] = config.buffer_bits ? Json(*config.buffer_bits) : Json(nullptr);
  j["include_presharing"] = config.include_presharing;
  return j;
}

std::vector<std::string> config_to_args(const sim::SimConfig& config) {
  std::vector<std::string> args{"--mode", cli_spelling(sim::to_string(config.mode))};
  if (config.horizon.unit == sim::Horizon::Unit::Slots) {
    args.insert(args.end(), {"--slots", std::to_string(config.horizon.count)});
  } else {
    args.insert(args.end(), {"--rounds", std::to_string(config.horizon.count)});
  }
  args.insert(args.end(), {"--seed", std::to_string(config.seed)});
  if (config.c) {
    args.insert(args.end(), {"--c", std::to_string(*config.c)});
  }
  args.insert(args.end(), {"--noise", std::string(sim::to_string(config.noise)), "--t1",
                           format_real(config.t1t2.t1), "--t2", format_real(config.t1t2.t2),
                           "--delta", format_real(config.delta), "--rounds-per-swap",
                           std::to_string(config.rounds_per_swap)});
  if (config.buffer_bits) {
    args.insert(args.end(), {"--buffer-bits", std::to_string(*config.buffer_bits)});
  }
  if (!config.include_presharing) {
    args.emplace_back("--exclude-presharing");
  }
  return args;
}

void write_trace_csv(std::ostream& out, const sim::Trace& trace, const Json& echo) {
  write_echo(out, echo);
  out << "slot,direction,tx_kind,pair_id,bits_decoded,cum_R,cum_E\n";
  for (const auto& ev : trace.events) {
    out << ev.slot << ',' << sim::to_string(ev.direction) << ',' << sim::to_string(ev.tx) << ','
        << ev.pair_id << ',' << ev.decoded_bits << ',' << format_real(ev.cum_r) << ','
        << format_real(ev.cum_e) << '\n';
  }
}

Json run_summary(const sim::Trace& trace, const Json& echo) {
  Json j;
  j["config"] = echo;
  j["termination"] = std::string(sim::to_string(trace.termination));
  j["elapsed_slots"] = trace.elapsed_slots;
  j["delay_charged"] = trace.delay_charged;
  j["total_qubits"] = trace.total_qubits;
  j["bits_delivered"] = trace.bits_delivered;
  j["discarded_qubits"] = trace.discarded_qubits;
  j["rounds_completed"] = trace.rounds.size();

  Json final_metrics;
  try {
    const auto m = analytics::empirical_metrics(trace);
    final_metrics["R"] = m.r;
    final_metrics["E"] = m.e;
    final_metrics["round_bits"] = m.n_bits;
    final_metrics["round_slots"] = m.n_slots;
    final_metrics["round_qubits"] = m.n_qubits;
    final_metrics["sd_bits_total"] = m.n_sd_bits;
    final_metrics["sd_bit_errors"] = m.n_sd_bit_errors;
    final_metrics["sd_error_rate"] = m.sd_error_rate ? Json(*m.sd_error_rate) : Json(nullptr);
  } catch (const std::domain_error&) {
    final_metrics["R"] = nullptr;
    final_metrics["E"] = nullptr;
    final_metrics["sd_bits_total"] = 0;
    final_metrics["sd_bit_errors"] = 0;
    final_metrics["sd_error_rate"] = nullptr;
  }
  j["final"] = final_metrics;

  Json round_ends = Json::array();
  for (const auto& r : trace.rounds) round_ends.push_back(r.end_slot);
  j["round_end_slots"] = std::move(round_ends);
  return j;
}

Json batch_summary_json(const analytics::BatchSummary& summary,
                        const std::vector<std::uint64_t>& seeds) {
  Json j;
  j["n"] = summary.samples.size();
  j["mean"] = summary.mean;
  j["stddev"] = summary.stddev;
  j["std_error"] = summary.std_error;
  j["q1"] = summary.q1;
  j["median"] = summary.median;
  j["q3"] = summary.q3;
  j["iqr"] = summary.iqr;
  j["lower_fence"] = summary.q1 - 1.5 * summary.iqr;
  j["upper_fence"] = summary.q3 + 1.5 * summary.iqr;
  Json outliers = Json::array();
  for (std::size_t i : summary.outliers) {
    outliers.push_back({{"seed", seeds.at(i)}, {"value", summary.samples[i]}});
  }
  j["outliers"] = std::move(outliers);
  return j;
}

void write_theory_csv(std::ostream& out, const std::vector<TheoryRow>& rows, const Json& echo) {
  write_echo(out, echo);
  out << "kind,c,delta,n,R,E,B,T\n";
  for (const auto& row : rows) {
    out << row.kind << ',' << optional_cell(row.c) << ',' << optional_cell(row.delta) << ','
        << optional_cell(row.n) << ',' << format_real(row.point.r) << ','
        << format_real(row.point.e) << ',' << format_real(row.point.b) << ','
        << format_real(row.point.t) << '\n';
  }
}

void write_decoherence_table(std::ostream& out, std::int64_t c_lo, std::int64_t c_hi) {
  out << "c,R_theory,E_theory,B,T\n";
  for (std::int64_t c = c_lo; c <= c_hi; ++c) {
    const auto p = analytics::theory_decoherence(c);
    out << c << ',' << format_real(p.r) << ',' << format_real(p.e) << ',' << format_real(p.b)
        << ',' << format_real(p.t) << '\n';
  }
}

namespace {

void write_summary_cells(std::ostream& out, const analytics::BatchSummary& s) {
  out << ',' << format_real(s.mean) << ',' << format_real(s.std_error) << ','
      << format_real(s.q1) << ',' << format_real(s.median) << ',' << format_real(s.q3) << ','
      << s.outliers.size();
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const Json& echo) {
  write_echo(out, echo);
  out << "c,runs,R_theory,E_theory"
         ",R_sim_mean,R_sim_se,R_sim_q1,R_sim_median,R_sim_q3,R_outliers"
         ",E_sim_mean,E_sim_se,E_sim_q1,E_sim_median,E_sim_q3,E_outliers"
         ",err_rate_mean,err_rate_se,err_rate_q1,err_rate_median,err_rate_q3,err_rate_outliers\n";
  for (const auto& row : rows) {
    out << row.c << ',' << row.r.samples.size() << ',' << format_real(row.theory.r) << ','
        << format_real(row.theory.e);
    write_summary_cells(out, row.r);
    write_summary_cells(out, row.e);
    if (row.err) {
      write_summary_cells(out, *row.err);
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
}

void write_cumulative_csv(std::ostream& out,
                          const std::vector<analytics::CumulativePoint>& series) {
  out << "slot,cum_R,cum_E\n";
  for (const auto& p : series) {
    out << p.slot << ',' << format_real(p.r) << ',' << format_real(p.e) << '\n';
  }
}

}  // namespace qtwp::report
