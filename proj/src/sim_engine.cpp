#include "qtwp/sim_engine.hpp"

#include <cmath>
#include <utility>

namespace qtwp::sim {

using protocol::BitBuffer;
using protocol::ProtocolMode;
using protocol::ReceiverState;
using protocol::SenderState;
using protocol::SlotAction;
using quantum::NoiseModel;
using quantum::PairState;
using quantum::Qubit;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::QuantumIdeal: return "quantum_ideal";
    case Mode::QuantumVariant: return "quantum_variant";
    case Mode::Direct: return "direct";
    case Mode::SdcTdd: return "sdc_tdd";
    case Mode::PingPong: return "ping_pong";
  }
  return "?";
}

std::string_view to_string(NoiseKind noise) {
  switch (noise) {
    case NoiseKind::None: return "none";
    case NoiseKind::Cliff: return "cliff";
    case NoiseKind::T1T2: return "t1t2";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  std::string s(text);
  for (char& ch : s) {
    if (ch == '-') ch = '_';
  }
  for (Mode m : {Mode::QuantumIdeal, Mode::QuantumVariant, Mode::Direct, Mode::SdcTdd,
                 Mode::PingPong}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<NoiseKind> parse_noise(std::string_view text) {
  for (NoiseKind n : {NoiseKind::None, NoiseKind::Cliff, NoiseKind::T1T2}) {
    if (text == to_string(n)) return n;
  }
  return std::nullopt;
}

std::string_view to_string(Direction direction) {
  return direction == Direction::U1ToU2 ? "U1->U2" : "U2->U1";
}

std::string_view to_string(TxKind kind) {
  switch (kind) {
    case TxKind::Silent: return "silent";
    case TxKind::FirstQubit: return "first";
    case TxKind::SecondQubit: return "second";
    case TxKind::Qubit: return "qubit";
  }
  return "?";
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::Horizon: return "horizon";
    case Termination::BufferIdle: return "buffer_idle";
    case Termination::BufferMidRound: return "buffer_mid_round";
  }
  return "?";
}

void SimConfig::validate() const {
  if (horizon.count < 1) {
    throw ConfigError(horizon.unit == Horizon::Unit::Slots ? "slots" : "rounds",
                      "horizon must be at least 1");
  }
  if (c && *c < 2) {
    throw ConfigError("c", "c must be at least 2");
  }
  if (mode == Mode::QuantumVariant && !c) {
    throw ConfigError("c", "c required for quantum-variant");
  }
  if (noise == NoiseKind::Cliff && !c) {
    throw ConfigError("c", "c required for cliff noise");
  }
  if (noise != NoiseKind::None && (mode == Mode::Direct || mode == Mode::PingPong)) {
    throw ConfigError("noise", "memory noise has no effect on the " +
                                   std::string(to_string(mode)) + " baseline");
  }
  if (noise == NoiseKind::T1T2) {
    if (!(t1t2.t1 > 0.0)) throw ConfigError("t1", "t1 must be positive");
    if (!(t1t2.t2 > 0.0)) throw ConfigError("t2", "t2 must be positive");
    if (t1t2.t2 > 2.0 * t1t2.t1) throw ConfigError("t2", "t2 must not exceed 2*t1");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ConfigError("delta", "delta must be a finite non-negative number");
  }
  if (rounds_per_swap < 1) {
    throw ConfigError("rounds-per-swap", "rounds per swap must be at least 1");
  }
}

NoiseModel SimConfig::noise_model() const {
  switch (noise) {
    case NoiseKind::None: return NoiseModel::none();
    case NoiseKind::Cliff: return NoiseModel::cliff({c.value_or(2)});
    case NoiseKind::T1T2: return NoiseModel::t1t2(t1t2);
  }
  return NoiseModel::none();
}

ProtocolMode SimConfig::protocol_mode() const {
  if (mode == Mode::QuantumVariant) {
    return ProtocolMode::for_budget(c.value_or(2));
  }
  return ProtocolMode::ideal();
}

double charge_round_delay(double clock, std::int64_t round_index, const SimConfig& config) {
  if (round_index < 1) {
    throw std::invalid_argument("round index starts at 1");
  }
  if ((round_index - 1) % config.rounds_per_swap == 0) {
    return clock + config.delta;
  }
  return clock;
}

PairState apply_noise_schedule(PairState pair, const RoundTiming& timing,
                               const NoiseModel& memory, bool b0, bool b1) {
  pair = memory.store(std::move(pair), Qubit::A, timing.second_arrival - timing.generated_at);
  pair = quantum::encode_superdense(std::move(pair), b0, b1);
  return memory.store(std::move(pair), Qubit::B, timing.second_arrival - timing.first_arrival);
}

std::array<std::uint64_t, 3> derive_seeds(std::uint64_t master) {
  // splitmix64
  std::array<std::uint64_t, 3> out{};
  std::uint64_t state = master;
  for (auto& s : out) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    s = z ^ (z >> 31);
  }
  return out;
}

namespace {

// Shared bookkeeping of a run: clock, role, cumulative series and trace.
class Run {
 public:
  explicit Run(const SimConfig& config) : config_(config) {
    trace_.config = config;
    const auto seeds = derive_seeds(config.seed);
    buffers_[0] = BitBuffer::random(seeds[0], config.buffer_bits);
    buffers_[1] = BitBuffer::random(seeds[1], config.buffer_bits);
    rng_.seed(seeds[2]);
  }

  bool horizon_reached() const {
    if (config_.horizon.unit == Horizon::Unit::Slots) {
      return slot_ >= config_.horizon.count;
    }
    return static_cast<std::int64_t>(trace_.rounds.size()) >= config_.horizon.count;
  }

  int transmitter() const { return transmitter_; }
  SlotIndex slot() const { return slot_; }
  BitBuffer& buffer(int user) { return buffers_[user]; }
  quantum::Rng& rng() { return rng_; }
  std::int64_t next_pair_id() { return pair_counter_++; }

  void begin_round_if_needed() {
    if (round_open_) return;
    round_open_ = true;
    round_start_ = slot_;
    const auto index = static_cast<std::int64_t>(trace_.rounds.size()) + 1;
    const double before = trace_.delay_charged;
    trace_.delay_charged = charge_round_delay(before, index, config_);
    round_delay_ = trace_.delay_charged - before;
  }

  // Records one slot of activity.
  void record_slot(Direction direction, TxKind tx, std::int64_t pair_id,
                   const std::string& bits) {
    const int receiver = direction == Direction::U1ToU2 ? 1 : 0;
    if (tx != TxKind::Silent) ++trace_.total_qubits;
    trace_.bits_delivered += static_cast<std::int64_t>(bits.size());
    ++slot_;
    trace_.elapsed_slots = slot_;
    if (!config_.record_trace) return;

    trace_.received[receiver] += bits;
    SlotEvent ev;
    ev.slot = slot_ - 1;
    ev.direction = direction;
    ev.tx = tx;
    ev.pair_id = pair_id;
    ev.decoded_bits = bits;
    ev.round_id = static_cast<std::int64_t>(trace_.rounds.size());
    const double bits_so_far = static_cast<double>(trace_.bits_delivered);
    ev.cum_r = bits_so_far / (static_cast<double>(slot_) + trace_.delay_charged);
    ev.cum_e = trace_.total_qubits > 0 ? bits_so_far / static_cast<double>(trace_.total_qubits)
                                       : 0.0;
    trace_.events.push_back(std::move(ev));
  }

  void complete_round(RoundRecord record) {
    record.index = static_cast<std::int64_t>(trace_.rounds.size());
    record.sender = transmitter_;
    record.start_slot = round_start_;
    record.end_slot = slot_ - 1;
    record.delay = round_delay_;
    trace_.rounds.push_back(record);
    round_open_ = false;
    if (static_cast<std::int64_t>(trace_.rounds.size()) % config_.rounds_per_swap == 0) {
      transmitter_ = 1 - transmitter_;
    }
  }

  Direction forward() const {
    return transmitter_ == 0 ? Direction::U1ToU2 : Direction::U2ToU1;
  }
  Direction backward() const {
    return transmitter_ == 0 ? Direction::U2ToU1 : Direction::U1ToU2;
  }

  Trace finish(Termination termination) {
    trace_.termination = termination;
    return std::move(trace_);
  }

  Trace& trace() { return trace_; }

 private:
  const SimConfig& config_;
  Trace trace_;
  std::array<BitBuffer, 2> buffers_;
  quantum::Rng rng_;
  SlotIndex slot_ = 0;
  int transmitter_ = 0;
  std::int64_t pair_counter_ = 0;
  bool round_open_ = false;
  SlotIndex round_start_ = 0;
  double round_delay_ = 0.0;
};

Trace run_quantum(const SimConfig& config) {
  Run run(config);
  const ProtocolMode mode = config.protocol_mode();
  const NoiseModel memory = config.noise_model();
  std::array<SenderState, 2> senders{};
  std::array<ReceiverState, 2> receivers{};
  std::int64_t open_pair = -1;

  while (!run.horizon_reached()) {
    const int tx = run.transmitter();
    const int rx = 1 - tx;
    const SlotIndex slot = run.slot();

    auto step = protocol::sender_step(std::move(senders[tx]), run.buffer(tx), mode, slot, memory);
    if (step.buffer_exhausted) {
      const bool mid_round = step.state.phase == protocol::SenderPhase::S1;
      if (mid_round) run.trace().discarded_qubits += 2;
      return run.finish(mid_round ? Termination::BufferMidRound : Termination::BufferIdle);
    }
    senders[tx] = std::move(step.state);
    run.begin_round_if_needed();

    protocol::Observation observation;
    TxKind kind = TxKind::Silent;
    std::int64_t pair_id = -1;
    switch (step.action.kind) {
      case SlotAction::Kind::Silent:
        break;
      case SlotAction::Kind::SendFirstQubit:
        kind = TxKind::FirstQubit;
        open_pair = run.next_pair_id();
        pair_id = open_pair;
        observation = protocol::Observation::arrival();
        break;
      case SlotAction::Kind::SendSecondQubit:
        kind = TxKind::SecondQubit;
        pair_id = open_pair;
        observation = protocol::Observation::arrival(std::move(step.action.pair));
        break;
    }

    auto received = protocol::receiver_step(std::move(receivers[rx]), observation, mode, slot,
                                            run.rng(), memory);
    receivers[rx] = std::move(received.state);

    std::string bits;
    bits.reserve(received.bits.size());
    for (auto b : received.bits) bits.push_back(b ? '1' : '0');
    run.record_slot(run.forward(), kind, pair_id, bits);

    if (received.round_complete) {
      const protocol::SenderRound& sent = *step.completed;
      RoundRecord record;
      record.k1 = sent.k1;
      record.k2 = sent.k2;
      record.stuffed = sent.stuffed;
      record.bits_delivered = protocol::round_bits(mode, sent.k1, sent.k2, sent.stuffed);
      record.slots_used = protocol::round_slots(sent.k1, sent.k2);
      record.qubits = 2;
      record.has_sd = true;
      record.sd_sent = sent.sd_payload;
      record.sd_decoded = *received.sd_decoded;
      record.pair_id = open_pair;
      record.generated_at = sent.generated_at;
      record.second_qubit_slot = slot;
      run.complete_round(record);
      open_pair = -1;
    }
  }
  // A round cut by the horizon leaves its pair unmeasured.
  if (open_pair >= 0) run.trace().discarded_qubits += 2;
  return run.finish(Termination::Horizon);
}

// One baseline round expanded into per-slot activity.
struct ScriptedSlot {
  bool backward = false;
  TxKind tx = TxKind::Silent;
  std::string bits;
};

Trace run_baseline(const SimConfig& config) {
  Run run(config);
  const NoiseModel memory = config.noise_model();

  while (!run.horizon_reached()) {
    const int tx = run.transmitter();
    const SlotIndex start = run.slot();
    std::optional<RoundRecord> record;
    std::vector<ScriptedSlot> script;
    std::int64_t pair_id = -1;

    switch (config.mode) {
      case Mode::Direct:
        record = protocol::next_direct_round(run.buffer(tx));
        if (record) {
          script.assign(static_cast<std::size_t>(record->k1), {false, TxKind::Silent, "0"});
          script.push_back({false, TxKind::Qubit, "1"});
        }
        break;
      case Mode::SdcTdd:
        record = protocol::next_sdc_tdd_round(run.buffer(tx), start, memory, run.rng(),
                                              config.include_presharing);
        if (record) {
          pair_id = run.next_pair_id();
          record->pair_id = pair_id;
          std::string decoded{static_cast<char>('0' + record->sd_decoded[0]),
                              static_cast<char>('0' + record->sd_decoded[1])};
          if (config.include_presharing) {
            script.push_back({false, TxKind::FirstQubit, ""});
          }
          script.push_back({false, TxKind::SecondQubit, decoded});
        }
        break;
      case Mode::PingPong:
        if (const auto bit = run.buffer(tx).peek()) {
          record = protocol::next_ping_pong_round(run.buffer(tx));
          // The receiver's home qubit travels out, then returns carrying the bit.
          script.push_back({true, TxKind::Qubit, ""});
          script.push_back({false, TxKind::Qubit, std::string(1, *bit ? '1' : '0')});
        }
        break;
      default:
        break;
    }
    if (!record) {
      return run.finish(Termination::BufferIdle);
    }

    run.begin_round_if_needed();
    for (const auto& s : script) {
      if (run.horizon_reached()) {
        return run.finish(Termination::Horizon);
      }
      const bool carries_pair = s.tx == TxKind::FirstQubit || s.tx == TxKind::SecondQubit;
      run.record_slot(s.backward ? run.backward() : run.forward(), s.tx,
                      carries_pair ? pair_id : -1, s.bits);
    }
    if (config.mode == Mode::SdcTdd && !config.include_presharing) {
      // The pair counts as preshared: generated one slot before its data slot.
      record->generated_at = start - 1;
      record->second_qubit_slot = start;
    }
    run.complete_round(*record);
  }
  return run.finish(Termination::Horizon);
}

}  // namespace

Trace run_simulation(const SimConfig& config) {
  config.validate();
  if (is_quantum(config.mode)) {
    return run_quantum(config);
  }
  return run_baseline(config);
}

}  // namespace qtwp::sim
