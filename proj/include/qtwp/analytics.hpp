#pragma once

#include "qtwp/sim_engine.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qtwp::analytics {

using sim::Trace;

/// Rate (bits/slot) and efficiency (bits/qubit) over the completed rounds of a trace.
struct Metrics {
  double r = 0.0;
  double e = 0.0;
  std::optional<double> sd_error_rate;  // empty when no SD bits were sent

  std::int64_t n_rounds = 0;
  std::int64_t n_slots = 0;
  std::int64_t n_bits = 0;
  std::int64_t n_qubits = 0;
  double delay = 0.0;
  std::int64_t n_sd_bits = 0;
  std::int64_t n_sd_bit_errors = 0;
};

/// R = sum(B_i) / (sum(T_i) + charged delay), E = sum(B_i) / qubits, over
/// rounds that ended before `slot_limit` (all rounds when empty).
/// Throws std::domain_error when the selected rounds span no time or no qubits.
Metrics empirical_metrics(const Trace& trace, std::optional<std::int64_t> slot_limit = std::nullopt);

struct CumulativePoint {
  std::int64_t slot = 0;
  double r = 0.0;
  double e = 0.0;
};

/// Per-slot cumulative series from the recorded events.
std::vector<CumulativePoint> cumulative_series(const Trace& trace);

struct TheoryPoint {
  double r = 0.0;
  double e = 0.0;
  double b = 0.0;  // expected bits per round
  double t = 0.0;  // expected slots per round
};

/// Ideal protocol: (R, E) = (1.5, 3).
TheoryPoint theory_ideal();

/// Decoherence variant with coherence budget c >= 2; throws std::invalid_argument otherwise.
TheoryPoint theory_decoherence(std::int64_t c);

/// Rate with per-swap delay delta amortised over N rounds per swap.
double theory_delay(double delta, std::optional<std::int64_t> c, std::int64_t rounds_per_swap);

/// Wrong SD bits over SD bits sent. Throws std::domain_error without SD bits.
double sd_error_rate(const Trace& trace);

/// Quartiles use linear interpolation between order statistics (the
/// "type 7" rule): position (n-1)*p in the sorted sample.
inline constexpr const char* kQuartileConvention = "linear interpolation, position (n-1)p";

struct BatchSummary {
  std::vector<double> samples;
  double mean = 0.0;
  double stddev = 0.0;    // sample standard deviation
  double std_error = 0.0;  // stddev / sqrt(n)
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  std::vector<std::size_t> outliers;  // indices into samples
};

double quantile(std::vector<double> samples, double p);

/// Throws std::invalid_argument for an empty sample.
BatchSummary batch_stats(std::span<const double> samples);

/// Delta-method standard error of sum(B)/sum(T + delay), treating blocks of
/// `block` consecutive rounds as independent units.
double ratio_standard_error(std::span<const protocol::RoundRecord> rounds, std::int64_t block = 1);

/// Standard error of sum(B)/sum(qubits) under the same blocking.
double efficiency_standard_error(std::span<const protocol::RoundRecord> rounds,
                                 std::int64_t block = 1);

}  // namespace qtwp::analytics
