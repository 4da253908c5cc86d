#pragma once

#include "qtwp/protocol.hpp"
#include "qtwp/quantum_core.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qtwp::sim {

using protocol::RoundRecord;
using quantum::SlotIndex;

enum class Mode { QuantumIdeal, QuantumVariant, Direct, SdcTdd, PingPong };
enum class NoiseKind { None, Cliff, T1T2 };

std::string_view to_string(Mode mode);
std::string_view to_string(NoiseKind noise);
/// Accepts both "quantum_ideal" and "quantum-ideal" spellings.
std::optional<Mode> parse_mode(std::string_view text);
std::optional<NoiseKind> parse_noise(std::string_view text);

[[nodiscard]] inline bool is_quantum(Mode mode) {
  return mode == Mode::QuantumIdeal || mode == Mode::QuantumVariant;
}

/// Invalid configuration; `field()` names the offending setting.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Horizon {
  enum class Unit { Slots, Rounds };

  Unit unit = Unit::Slots;
  std::int64_t count = 1000;

  static Horizon slots(std::int64_t n) { return {Unit::Slots, n}; }
  static Horizon rounds(std::int64_t n) { return {Unit::Rounds, n}; }
};

struct SimConfig {
  Mode mode = Mode::QuantumIdeal;
  std::optional<std::int64_t> c;
  NoiseKind noise = NoiseKind::None;
  quantum::NoiseParams t1t2{20.0, 18.0};
  double delta = 0.0;
  std::int64_t rounds_per_swap = 1;
  std::uint64_t seed = 1;
  Horizon horizon{};
  bool record_trace = true;
  /// Optional cap on each user's input length; unlimited when empty.
  std::optional<std::size_t> buffer_bits;
  /// sdc_tdd only: charge the distribution slot and qubit.
  bool include_presharing = true;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  [[nodiscard]] quantum::NoiseModel noise_model() const;
  [[nodiscard]] protocol::ProtocolMode protocol_mode() const;
};

enum class Direction { U1ToU2, U2ToU1 };
/// FirstQubit/SecondQubit belong to an EPR pair; Qubit is a lone carrier
/// qubit used by the direct and ping-pong baselines.
enum class TxKind { Silent, FirstQubit, SecondQubit, Qubit };

std::string_view to_string(Direction direction);
std::string_view to_string(TxKind kind);

struct SlotEvent {
  SlotIndex slot = 0;
  Direction direction = Direction::U1ToU2;
  TxKind tx = TxKind::Silent;
  std::int64_t pair_id = -1;
  std::string decoded_bits;  // '0'/'1' characters delivered this slot
  std::int64_t round_id = 0;
  double cum_r = 0.0;
  double cum_e = 0.0;
};

enum class Termination { Horizon, BufferIdle, BufferMidRound };
std::string_view to_string(Termination termination);

struct Trace {
  SimConfig config;
  std::vector<SlotEvent> events;  // empty unless config.record_trace
  std::vector<RoundRecord> rounds;

  std::int64_t elapsed_slots = 0;
  std::int64_t total_qubits = 0;     // includes an unfinished round's first qubit
  std::int64_t bits_delivered = 0;   // all decoded bits, including an unfinished round's zeros
  double delay_charged = 0.0;        // includes the delay of an unfinished round
  Termination termination = Termination::Horizon;
  std::int64_t discarded_qubits = 0;  // stored qubits left unmeasured at termination

  /// Bits each user received, in order (recorded with the trace).
  std::array<std::string, 2> received;
};

/// Adds the per-block delay: delta at the start of round 1, N+1, 2N+1, ...
/// Throws std::invalid_argument for round_index < 1.
double charge_round_delay(double clock, std::int64_t round_index, const SimConfig& config);

struct RoundTiming {
  SlotIndex generated_at = 0;
  SlotIndex first_arrival = 0;
  SlotIndex second_arrival = 0;
};

/// Reference composition of the per-round memory exposure: qubit A is stored
/// at the sender from generation to its transmission and then encoded, qubit
/// B is stored at the receiver from its arrival to the second arrival.
/// Returns the state presented to the Bell measurement.
quantum::PairState apply_noise_schedule(quantum::PairState pair, const RoundTiming& timing,
                                        const quantum::NoiseModel& memory, bool b0, bool b1);

/// Runs one simulation. Throws ConfigError for an invalid config.
Trace run_simulation(const SimConfig& config);

/// Independent seeds for (U1 buffer, U2 buffer, measurements).
std::array<std::uint64_t, 3> derive_seeds(std::uint64_t master);

}  // namespace qtwp::sim
