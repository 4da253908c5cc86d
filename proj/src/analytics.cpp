#include "qtwp/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qtwp::analytics {

Metrics empirical_metrics(const Trace& trace, std::optional<std::int64_t> slot_limit) {
  Metrics m;
  for (const auto& round : trace.rounds) {
    if (slot_limit && round.end_slot >= *slot_limit) {
      break;
    }
    ++m.n_rounds;
    m.n_bits += round.bits_delivered;
    m.n_slots += round.slots_used;
    m.n_qubits += round.qubits;
    m.delay += round.delay;
    if (round.has_sd) {
      m.n_sd_bits += 2;
      m.n_sd_bit_errors += round.sd_bit_errors();
    }
  }
  const double elapsed = static_cast<double>(m.n_slots) + m.delay;
  if (!(elapsed > 0.0)) {
    throw std::domain_error("metrics undefined: zero elapsed time");
  }
  m.r = static_cast<double>(m.n_bits) / elapsed;
  m.e = m.n_qubits > 0 ? static_cast<double>(m.n_bits) / static_cast<double>(m.n_qubits) : 0.0;
  if (m.n_sd_bits > 0) {
    m.sd_error_rate =
        static_cast<double>(m.n_sd_bit_errors) / static_cast<double>(m.n_sd_bits);
  }
  return m;
}

std::vector<CumulativePoint> cumulative_series(const Trace& trace) {
  std::vector<CumulativePoint> out;
  out.reserve(trace.events.size());
  for (const auto& ev : trace.events) {
    out.push_back({ev.slot, ev.cum_r, ev.cum_e});
  }
  return out;
}

TheoryPoint theory_ideal() { return {1.5, 3.0, 6.0, 4.0}; }

TheoryPoint theory_decoherence(std::int64_t c) {
  if (c < 2) {
    throw std::invalid_argument("c must be at least 2");
  }
  const double m = static_cast<double>(c - 2);
  const double x = std::pow(2.0, 1.0 - static_cast<double>(c));  // 1/2^(c-1)
  TheoryPoint p;
  p.r = 1.0 + (1.0 - x) / (2.0 - x);
  p.e = 3.0 - 4.0 / std::pow(2.0, static_cast<double>(c));
  p.b = 6.0 - 1.0 / std::pow(2.0, m - 1.0);
  p.t = 4.0 - std::pow(0.5, m);
  return p;
}

double theory_delay(double delta, std::optional<std::int64_t> c, std::int64_t rounds_per_swap) {
  if (!(delta >= 0.0)) {
    throw std::invalid_argument("delta must be non-negative");
  }
  if (rounds_per_swap < 1) {
    throw std::invalid_argument("rounds per swap must be at least 1");
  }
  const double d = delta / static_cast<double>(rounds_per_swap);
  if (!c) {
    return 1.0 + (1.0 - d / 2.0) / (2.0 + d / 2.0);
  }
  if (*c < 2) {
    throw std::invalid_argument("c must be at least 2");
  }
  const double x = std::pow(2.0, 1.0 - static_cast<double>(*c));
  return 1.0 + (1.0 - x - d / 2.0) / (2.0 - x + d / 2.0);
}

double sd_error_rate(const Trace& trace) {
  std::int64_t bits = 0;
  std::int64_t errors = 0;
  for (const auto& round : trace.rounds) {
    if (!round.has_sd) continue;
    bits += 2;
    errors += round.sd_bit_errors();
  }
  if (bits == 0) {
    throw std::domain_error("trace contains no superdense-coded bits");
  }
  return static_cast<double>(errors) / static_cast<double>(bits);
}

double quantile(std::vector<double> samples, double p) {
  if (samples.empty()) {
    throw std::invalid_argument("quantile of an empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const double pos = p * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

BatchSummary batch_stats(std::span<const double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("batch statistics need at least one sample");
  }
  BatchSummary s;
  s.samples.assign(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
    s.std_error = s.stddev / std::sqrt(n);
  }
  s.q1 = quantile(s.samples, 0.25);
  s.median = quantile(s.samples, 0.5);
  s.q3 = quantile(s.samples, 0.75);
  s.iqr = s.q3 - s.q1;
  const double lo = s.q1 - 1.5 * s.iqr;
  const double hi = s.q3 + 1.5 * s.iqr;
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    if (s.samples[i] < lo || s.samples[i] > hi) {
      s.outliers.push_back(i);
    }
  }
  return s;
}

namespace {

template <typename Denominator>
double blocked_ratio_se(std::span<const protocol::RoundRecord> rounds, std::int64_t block,
                        Denominator denom) {
  if (block < 1) {
    throw std::invalid_argument("block size must be at least 1");
  }
  std::vector<double> num;
  std::vector<double> den;
  const auto b = static_cast<std::size_t>(block);
  for (std::size_t start = 0; start + b <= rounds.size(); start += b) {
    double x = 0.0;
    double y = 0.0;
    for (std::size_t i = start; i < start + b; ++i) {
      x += static_cast<double>(rounds[i].bits_delivered);
      y += denom(rounds[i]);
    }
    num.push_back(x);
    den.push_back(y);
  }
  const std::size_t n = num.size();
  if (n < 2) {
    throw std::domain_error("need at least two blocks for a standard error");
  }
  const double sx = std::accumulate(num.begin(), num.end(), 0.0);
  const double sy = std::accumulate(den.begin(), den.end(), 0.0);
  const double ratio = sx / sy;
  double ss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = num[j] - ratio * den[j];
    ss += r * r;
  }
  const double nn = static_cast<double>(n);
  const double mean_den = sy / nn;
  return std::sqrt(ss / (nn * (nn - 1.0))) / mean_den;
}

}  // namespace

double ratio_standard_error(std::span<const protocol::RoundRecord> rounds, std::int64_t block) {
  return blocked_ratio_se(rounds, block, [](const protocol::RoundRecord& r) {
    return static_cast<double>(r.slots_used) + r.delay;
  });
}

double efficiency_standard_error(std::span<const protocol::RoundRecord> rounds,
                                 std::int64_t block) {
  return blocked_ratio_se(rounds, block, [](const protocol::RoundRecord& r) {
    return static_cast<double>(r.qubits);
  });
}

}  // namespace qtwp::analytics
