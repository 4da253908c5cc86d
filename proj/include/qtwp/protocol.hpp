#pragma once

#include "qtwp/bit_buffer.hpp"
#include "qtwp/quantum_core.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtwp::protocol {

using quantum::NoiseModel;
using quantum::PairState;
using quantum::Rng;
using quantum::SlotIndex;

/// Ideal protocol, or the decoherence variant that stuffs a "1" after m zeros
/// following the first qubit (m = c - 2).
struct ProtocolMode {
  enum class Variant { Ideal, Decoherence };

  Variant variant = Variant::Ideal;
  std::int64_t m = 0;

  static ProtocolMode ideal() { return {}; }
  static ProtocolMode decoherence(std::int64_t m);
  /// Decoherence variant for coherence budget c (m = c - 2).
  static ProtocolMode for_budget(std::int64_t c);

  [[nodiscard]] bool stuffing() const { return variant == Variant::Decoherence; }
};

class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Round accounting

struct RoundRecord {
  std::int64_t index = 0;
  int sender = 0;  // 0 = U1, 1 = U2
  SlotIndex start_slot = 0;
  SlotIndex end_slot = 0;  // inclusive

  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  bool stuffed = false;

  std::int64_t bits_delivered = 0;  // B_i
  std::int64_t slots_used = 0;      // T_i
  std::int64_t qubits = 0;
  double delay = 0.0;  // delay charged at the start of this round

  bool has_sd = false;
  std::array<std::uint8_t, 2> sd_sent{0, 0};
  std::array<std::uint8_t, 2> sd_decoded{0, 0};

  std::int64_t pair_id = -1;
  SlotIndex generated_at = -1;
  SlotIndex second_qubit_slot = -1;

  [[nodiscard]] int sd_bit_errors() const {
    return has_sd ? (sd_sent[0] != sd_decoded[0]) + (sd_sent[1] != sd_decoded[1]) : 0;
  }
};

/// B_i for a quantum round.
std::int64_t round_bits(const ProtocolMode& mode, std::int64_t k1, std::int64_t k2, bool stuffed);
/// T_i for a quantum round.
inline std::int64_t round_slots(std::int64_t k1, std::int64_t k2) { return k1 + k2 + 2; }

// ---------------------------------------------------------------------------
// Sender

enum class SenderPhase { S0, S1 };

struct SenderState {
  SenderPhase phase = SenderPhase::S0;
  std::int64_t leading_zeros = 0;  // zeros sent in S0 this round (K1)
  std::int64_t zeros_sent_since_first_qubit = 0;
  std::optional<PairState> held_pair;
};

struct SlotAction {
  enum class Kind { Silent, SendFirstQubit, SendSecondQubit };

  Kind kind = Kind::Silent;
  std::optional<PairState> pair;

  static SlotAction silent() { return {}; }
};

/// Sender-side summary of a round that just ended.
struct SenderRound {
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  bool stuffed = false;
  std::array<std::uint8_t, 2> sd_payload{0, 0};
  SlotIndex generated_at = 0;
};

struct SenderStep {
  SlotAction action;
  SenderState state;
  std::optional<SenderRound> completed;
  /// The buffer ran dry: in S0 the sender idles, in S1 the round cannot be
  /// finished. The returned state equals the input state in both cases.
  bool buffer_exhausted = false;
};

/// Advances the transmitting user by one slot. Storage noise on the kept
/// qubit (A) is applied through `memory` just before superdense encoding.
SenderStep sender_step(SenderState state, BitBuffer& buffer, const ProtocolMode& mode,
                       SlotIndex slot, const NoiseModel& memory = NoiseModel::none());

// ---------------------------------------------------------------------------
// Receiver

enum class ReceiverPhase { R0, R1 };

struct ReceiverState {
  ReceiverPhase phase = ReceiverPhase::R0;
  std::int64_t zeros_seen_since_first_qubit = 0;
  std::optional<SlotIndex> stored_qubit_arrival;
};

struct Observation {
  bool qubit = false;
  /// Joint state carried by the second qubit's arrival; unused otherwise.
  std::optional<PairState> pair;

  static Observation silent() { return {}; }
  static Observation arrival(std::optional<PairState> pair = std::nullopt) {
    return {true, std::move(pair)};
  }
};

struct ReceiverStep {
  std::vector<std::uint8_t> bits;
  ReceiverState state;
  bool round_complete = false;  // ends the round; roles swap under one round per turn
  bool stuffed = false;
  std::optional<std::array<std::uint8_t, 2>> sd_decoded;
};

/// Advances the receiving user by one slot. Throws ProtocolViolation if the
/// peer exceeds the stuffing bound or a second qubit arrives without a pair.
ReceiverStep receiver_step(ReceiverState state, const Observation& observation,
                           const ProtocolMode& mode, SlotIndex slot, Rng& rng,
                           const NoiseModel& memory = NoiseModel::none());

// ---------------------------------------------------------------------------
// Framing

struct FramedStream {
  /// Input with stuffed "1"s inserted.
  std::vector<std::uint8_t> bits;
  /// Positions in `bits` holding a stuffed "1".
  std::vector<std::size_t> stuffed_positions;
  /// Per-slot channel activity (1 = qubit sent). SD payload bits occupy no slot.
  std::vector<std::uint8_t> wire;
  /// Number of the first-to-second-qubit spans, each "1 0^k2 1", in slots.
  std::vector<std::int64_t> round_spans;
};

/// Pure bit-stuffing transform of a complete input stream with threshold m.
/// A trailing incomplete round is copied without SD grouping.
FramedStream stuff_transform(const std::vector<std::uint8_t>& input, std::int64_t m);

// ---------------------------------------------------------------------------
// Baselines. Each call consumes one round's worth of input from the buffer;
// nullopt means the buffer cannot supply a full round.

/// Presence/absence of a qubit carries one bit: rounds of 0^K 1.
std::optional<RoundRecord> next_direct_round(BitBuffer& buffer);

/// Time-division superdense coding paying for distribution: the pair is
/// generated and one qubit sent at `start_slot`, the encoded qubit follows at
/// start_slot + 1. With include_presharing = false only the data slot counts.
std::optional<RoundRecord> next_sdc_tdd_round(BitBuffer& buffer, SlotIndex start_slot,
                                              const NoiseModel& memory, Rng& rng,
                                              bool include_presharing = true);

/// Cost model of the ping-pong protocol: one bit per qubit round trip.
std::optional<RoundRecord> next_ping_pong_round(BitBuffer& buffer);

}  // namespace qtwp::protocol
