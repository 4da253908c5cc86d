#include "qtwp/protocol.hpp"

namespace qtwp::protocol {

using quantum::BellOutcome;
using quantum::Qubit;

ProtocolMode ProtocolMode::decoherence(std::int64_t m) {
  if (m < 0) {
    throw std::invalid_argument("stuffing threshold m must be non-negative");
  }
  return {Variant::Decoherence, m};
}

ProtocolMode ProtocolMode::for_budget(std::int64_t c) {
  if (c < 2) {
    throw std::invalid_argument("c must be at least 2");
  }
  return decoherence(c - 2);
}

std::int64_t round_bits(const ProtocolMode& mode, std::int64_t k1, std::int64_t k2,
                        bool stuffed) {
  if (mode.stuffing() && stuffed) {
    return k1 + mode.m + 3;
  }
  return k1 + k2 + 4;
}

namespace {

SenderStep emit_second_qubit(SenderState state, bool stuffed, bool b0, bool b1,
                             SlotIndex slot, const NoiseModel& memory) {
  PairState held = std::move(*state.held_pair);
  held = memory.store(std::move(held), Qubit::A, slot - held.generated_at);

  SenderStep step;
  step.completed = SenderRound{state.leading_zeros,
                               state.zeros_sent_since_first_qubit,
                               stuffed,
                               {static_cast<std::uint8_t>(b0), static_cast<std::uint8_t>(b1)},
                               held.generated_at};
  step.action.kind = SlotAction::Kind::SendSecondQubit;
  step.action.pair = quantum::encode_superdense(std::move(held), b0, b1);
  step.state = SenderState{};
  return step;
}

}  // namespace

SenderStep sender_step(SenderState state, BitBuffer& buffer, const ProtocolMode& mode,
                       SlotIndex slot, const NoiseModel& memory) {
  if (state.phase == SenderPhase::S0) {
    const auto bit = buffer.next();
    if (!bit) {
      return {SlotAction::silent(), std::move(state), std::nullopt, true};
    }
    if (!*bit) {
      ++state.leading_zeros;
      return {SlotAction::silent(), std::move(state), std::nullopt, false};
    }
    PairState pair = quantum::make_epr_pair(slot);
    state.phase = SenderPhase::S1;
    state.zeros_sent_since_first_qubit = 0;
    state.held_pair = pair;
    return {SlotAction{SlotAction::Kind::SendFirstQubit, std::move(pair)}, std::move(state),
            std::nullopt, false};
  }

  // S1: the counter reaching m forces a stuffed second qubit.
  if (mode.stuffing() && state.zeros_sent_since_first_qubit >= mode.m) {
    if (!buffer.has(2)) {
      return {SlotAction::silent(), std::move(state), std::nullopt, true};
    }
    const bool b0 = *buffer.next();
    const bool b1 = *buffer.next();
    return emit_second_qubit(std::move(state), true, b0, b1, slot, memory);
  }

  const auto bit = buffer.peek();
  if (!bit) {
    return {SlotAction::silent(), std::move(state), std::nullopt, true};
  }
  if (!*bit) {
    buffer.next();
    ++state.zeros_sent_since_first_qubit;
    return {SlotAction::silent(), std::move(state), std::nullopt, false};
  }
  if (!buffer.has(3)) {
    return {SlotAction::silent(), std::move(state), std::nullopt, true};
  }
  buffer.next();
  const bool b0 = *buffer.next();
  const bool b1 = *buffer.next();
  return emit_second_qubit(std::move(state), false, b0, b1, slot, memory);
}

ReceiverStep receiver_step(ReceiverState state, const Observation& observation,
                           const ProtocolMode& mode, SlotIndex slot, Rng& rng,
                           const NoiseModel& memory) {
  ReceiverStep step;
  if (state.phase == ReceiverPhase::R0) {
    if (!observation.qubit) {
      step.bits.push_back(0);
    } else {
      step.bits.push_back(1);
      state.phase = ReceiverPhase::R1;
      state.zeros_seen_since_first_qubit = 0;
      state.stored_qubit_arrival = slot;
    }
    step.state = std::move(state);
    return step;
  }

  if (!observation.qubit) {
    ++state.zeros_seen_since_first_qubit;
    if (mode.stuffing() && state.zeros_seen_since_first_qubit > mode.m) {
      throw ProtocolViolation("more than m silent slots after the first qubit");
    }
    step.state = std::move(state);
    return step;
  }

  if (!observation.pair) {
    throw ProtocolViolation("second qubit arrived without its pair state");
  }
  PairState pair = memory.store(*observation.pair, Qubit::B,
                                slot - state.stored_qubit_arrival.value_or(slot));
  const BellOutcome outcome = memory.measure(pair, slot, rng);
  const auto [d0, d1] = quantum::decode_superdense(outcome);

  const std::int64_t pending = state.zeros_seen_since_first_qubit;
  step.bits.assign(static_cast<std::size_t>(pending), 0);
  step.stuffed = mode.stuffing() && pending == mode.m;
  if (!step.stuffed) {
    step.bits.push_back(1);
  }
  step.bits.push_back(d0 ? 1 : 0);
  step.bits.push_back(d1 ? 1 : 0);
  step.sd_decoded = std::array<std::uint8_t, 2>{static_cast<std::uint8_t>(d0),
                                                static_cast<std::uint8_t>(d1)};
  step.round_complete = true;
  step.state = ReceiverState{};
  return step;
}

FramedStream stuff_transform(const std::vector<std::uint8_t>& input, std::int64_t m) {
  if (m < 0) {
    throw std::invalid_argument("stuffing threshold m must be non-negative");
  }
  FramedStream out;
  const std::size_t n = input.size();
  std::size_t i = 0;
  auto copy_rest = [&] {
    for (; i < n; ++i) out.bits.push_back(input[i] ? 1 : 0);
  };

  while (i < n) {
    const std::uint8_t first = input[i++] ? 1 : 0;
    out.bits.push_back(first);
    out.wire.push_back(first);
    if (!first) {
      continue;
    }
    std::int64_t k2 = 0;
    bool complete = false;
    while (true) {
      if (k2 == m) {
        if (i + 2 > n) {
          copy_rest();
          break;
        }
        out.stuffed_positions.push_back(out.bits.size());
        out.bits.push_back(1);
        out.wire.push_back(1);
        out.bits.push_back(input[i] ? 1 : 0);
        out.bits.push_back(input[i + 1] ? 1 : 0);
        i += 2;
        complete = true;
        break;
      }
      if (i >= n) {
        break;
      }
      const std::uint8_t b = input[i] ? 1 : 0;
      if (b && i + 3 > n) {
        copy_rest();
        break;
      }
      ++i;
      out.bits.push_back(b);
      out.wire.push_back(b);
      if (b) {
        out.bits.push_back(input[i] ? 1 : 0);
        out.bits.push_back(input[i + 1] ? 1 : 0);
        i += 2;
        complete = true;
        break;
      }
      ++k2;
    }
    if (complete) {
      out.round_spans.push_back(k2 + 2);
    }
  }
  return out;
}

std::optional<RoundRecord> next_direct_round(BitBuffer& buffer) {
  std::size_t zeros = 0;
  while (true) {
    const auto bit = buffer.peek(zeros);
    if (!bit) {
      return std::nullopt;
    }
    if (*bit) {
      break;
    }
    ++zeros;
  }
  for (std::size_t i = 0; i <= zeros; ++i) {
    buffer.next();
  }
  RoundRecord r;
  r.k1 = static_cast<std::int64_t>(zeros);
  r.bits_delivered = r.k1 + 1;
  r.slots_used = r.k1 + 1;
  r.qubits = 1;
  return r;
}

std::optional<RoundRecord> next_sdc_tdd_round(BitBuffer& buffer, SlotIndex start_slot,
                                              const NoiseModel& memory, Rng& rng,
                                              bool include_presharing) {
  if (!buffer.has(2)) {
    return std::nullopt;
  }
  const bool b0 = *buffer.next();
  const bool b1 = *buffer.next();

  const SlotIndex data_slot = start_slot + 1;
  PairState pair = quantum::make_epr_pair(start_slot);
  pair = memory.store(std::move(pair), Qubit::A, data_slot - start_slot);
  pair = quantum::encode_superdense(std::move(pair), b0, b1);
  pair = memory.store(std::move(pair), Qubit::B, data_slot - start_slot);
  const auto [d0, d1] = quantum::decode_superdense(memory.measure(pair, data_slot, rng));

  RoundRecord r;
  r.bits_delivered = 2;
  r.slots_used = include_presharing ? 2 : 1;
  r.qubits = include_presharing ? 2 : 1;
  r.has_sd = true;
  r.sd_sent = {static_cast<std::uint8_t>(b0), static_cast<std::uint8_t>(b1)};
  r.sd_decoded = {static_cast<std::uint8_t>(d0), static_cast<std::uint8_t>(d1)};
  r.generated_at = start_slot;
  r.second_qubit_slot = data_slot;
  return r;
}

std::optional<RoundRecord> next_ping_pong_round(BitBuffer& buffer) {
  if (!buffer.next()) {
    return std::nullopt;
  }
  RoundRecord r;
  r.bits_delivered = 1;
  r.slots_used = 2;
  r.qubits = 2;
  return r;
}

}  // namespace qtwp::protocol
