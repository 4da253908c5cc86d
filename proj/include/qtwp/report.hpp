#pragma once

#include "qtwp/analytics.hpp"
#include "qtwp/sim_engine.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qtwp::report {

using Json = nlohmann::ordered_json;

/// Reals are written with 17 significant digits ("%.17g").
std::string format_real(double value);

Json config_to_json(const sim::SimConfig& config);

/// Command-line arguments (after the subcommand) that resolve to `config`.
std::vector<std::string> config_to_args(const sim::SimConfig& config);

/// One row per slot event: slot,direction,tx_kind,pair_id,bits_decoded,cum_R,cum_E.
/// The first line is a "# config: {...}" comment echoing `echo`.
void write_trace_csv(std::ostream& out, const sim::Trace& trace, const Json& echo);

/// Run summary: config, totals, final R and E, SD bit counts and error rate.
Json run_summary(const sim::Trace& trace, const Json& echo);

Json batch_summary_json(const analytics::BatchSummary& summary,
                        const std::vector<std::uint64_t>& seeds);

struct TheoryRow {
  std::string kind;
  std::optional<std::int64_t> c;
  std::optional<double> delta;
  std::optional<std::int64_t> n;
  analytics::TheoryPoint point;
};

/// Columns: kind,c,delta,n,R,E,B,T (empty cells for unset fields).
void write_theory_csv(std::ostream& out, const std::vector<TheoryRow>& rows, const Json& echo);

/// Plain c,R_theory,E_theory,B,T table over an inclusive c range.
void write_decoherence_table(std::ostream& out, std::int64_t c_lo, std::int64_t c_hi);

struct SweepRow {
  std::int64_t c = 2;
  analytics::TheoryPoint theory;
  analytics::BatchSummary r;
  analytics::BatchSummary e;
  std::optional<analytics::BatchSummary> err;
};

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const Json& echo);

/// Columns: slot,cum_R,cum_E.
void write_cumulative_csv(std::ostream& out, const std::vector<analytics::CumulativePoint>& series);

}  // namespace qtwp::report
