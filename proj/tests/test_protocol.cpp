#include "qtwp/protocol.hpp"

#include "drive.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>

using namespace qtwp::protocol;
using qtwp::quantum::BellOutcome;
using qtwp::quantum::CoherenceBudget;

using drive::bits_of;
using drive::random_bits;
using drive::Transcript;

namespace {

Transcript drive_one(BitBuffer buffer, const ProtocolMode& mode,
                     const NoiseModel& memory = NoiseModel::none(), std::uint64_t seed = 1,
                     std::size_t max_rounds = SIZE_MAX) {
  return drive::run(std::move(buffer), mode, memory, seed, max_rounds);
}

}  // namespace

TEST_CASE("no stuffing for 00011 with m = 2") {
  const auto t = drive_one(BitBuffer::from_string("0001101"), ProtocolMode::decoherence(2));
  CHECK(t.wire == "00011");
  REQUIRE(t.rounds.size() == 1);
  CHECK_FALSE(t.rounds[0].stuffed);
  CHECK(t.rounds[0].k1 == 3);
  CHECK(t.rounds[0].k2 == 0);
  CHECK(t.rounds[0].sd_payload == std::array<std::uint8_t, 2>{0, 1});
  CHECK(t.received == "0001101");
  CHECK(stuff_transform(bits_of("0001101"), 2).stuffed_positions.empty());
}

TEST_CASE("stuffing for 001001 with m = 2") {
  const auto t = drive_one(BitBuffer::from_string("0010011"), ProtocolMode::decoherence(2));
  CHECK(t.wire == "001001");
  REQUIRE(t.rounds.size() == 1);
  CHECK(t.rounds[0].stuffed);
  CHECK(t.receiver_stuffed[0]);
  CHECK(t.rounds[0].sd_payload == std::array<std::uint8_t, 2>{1, 1});
  CHECK(t.received == "0010011");

  const auto framed = stuff_transform(bits_of("0010011"), 2);
  CHECK(framed.stuffed_positions == std::vector<std::size_t>{5});
  CHECK(to_bit_string(framed.bits) == "00100111");
}

TEST_CASE("stuffing for 010001 with m = 2") {
  const auto t = drive_one(BitBuffer::from_string("010001"), ProtocolMode::decoherence(2));
  CHECK(t.wire == "01001");
  REQUIRE(t.rounds.size() == 1);
  CHECK(t.rounds[0].stuffed);
  CHECK(t.rounds[0].k1 == 1);
  CHECK(t.rounds[0].k2 == 2);
  CHECK(t.rounds[0].sd_payload == std::array<std::uint8_t, 2>{0, 1});
  CHECK(t.received == "010001");
  CHECK(stuff_transform(bits_of("010001"), 2).stuffed_positions.size() == 1);
}

TEST_CASE("10111: the final two bits travel by superdense coding") {
  for (const auto mode : {ProtocolMode::ideal(), ProtocolMode::decoherence(2),
                          ProtocolMode::decoherence(3)}) {
    const auto t = drive_one(BitBuffer::from_string("10111"), mode);
    CHECK(t.wire == "101");
    REQUIRE(t.rounds.size() == 1);
    CHECK(t.rounds[0].generated_at == 0);
    CHECK(t.rounds[0].k1 == 0);
    CHECK(t.rounds[0].k2 == 1);
    CHECK_FALSE(t.rounds[0].stuffed);
    CHECK(t.rounds[0].sd_payload == std::array<std::uint8_t, 2>{1, 1});
    CHECK(t.received == "10111");
  }
  // With m = 0 the second qubit directly follows the first and is stuffed.
  const auto t = drive_one(BitBuffer::from_string("10111"), ProtocolMode::decoherence(0));
  REQUIRE(t.rounds.size() >= 1);
  CHECK(t.wire.substr(0, 2) == "11");
  CHECK(t.rounds[0].stuffed);
  CHECK(t.rounds[0].sd_payload == std::array<std::uint8_t, 2>{0, 1});
}

TEST_CASE("stuffed 1 is inserted even when the next input bit is 1") {
  // m = 2: "1 0 0" then the genuine "1" becomes the first SD payload bit.
  const auto framed = stuff_transform(bits_of("100110"), 2);
  CHECK(framed.stuffed_positions == std::vector<std::size_t>{3});
  CHECK(to_bit_string(framed.bits) == "1001110");
  CHECK(to_bit_string(framed.wire) == "10010");

  const auto t = drive_one(BitBuffer::from_string("100110"), ProtocolMode::decoherence(2));
  REQUIRE(t.rounds.size() == 1);
  CHECK(t.rounds[0].stuffed);
  CHECK(t.rounds[0].sd_payload == std::array<std::uint8_t, 2>{1, 1});
  CHECK(t.wire == "10010");
  CHECK(t.received == "100110");
}

TEST_CASE("all-zero input never transmits a qubit") {
  const std::string zeros(40, '0');
  const auto framed = stuff_transform(bits_of(zeros), 2);
  CHECK(framed.stuffed_positions.empty());
  CHECK(to_bit_string(framed.wire) == zeros);
  const auto t = drive_one(BitBuffer::from_string(zeros), ProtocolMode::decoherence(2));
  CHECK(t.wire == zeros);
  CHECK(t.rounds.empty());
  CHECK(t.received == zeros);
  CHECK_FALSE(t.mid_round);
}

TEST_CASE("receiver decodes unstuffed, stuffed and minimal rounds") {
  Rng rng(1);
  const auto m2 = ProtocolMode::decoherence(2);
  auto payload = [](bool b0, bool b1) {
    return qtwp::quantum::encode_superdense(qtwp::quantum::make_epr_pair(2), b0, b1);
  };

  SUBCASE("0 0 1[q] 1[q]") {
    ReceiverState r;
    std::string out;
    const std::vector<Observation> obs{Observation::silent(), Observation::silent(),
                                       Observation::arrival(), Observation::arrival(payload(1, 0))};
    ReceiverStep step;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      step = receiver_step(r, obs[i], m2, static_cast<SlotIndex>(i), rng);
      r = step.state;
      for (auto b : step.bits) out.push_back(b ? '1' : '0');
    }
    CHECK(out == "001110");
    CHECK(step.round_complete);
    CHECK_FALSE(step.stuffed);
  }
  SUBCASE("1[q] 0 0 1[q] is stuffed") {
    ReceiverState r;
    std::string out;
    const std::vector<Observation> obs{Observation::arrival(), Observation::silent(),
                                       Observation::silent(), Observation::arrival(payload(0, 1))};
    ReceiverStep step;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      step = receiver_step(r, obs[i], m2, static_cast<SlotIndex>(i), rng);
      r = step.state;
      for (auto b : step.bits) out.push_back(b ? '1' : '0');
    }
    CHECK(out == "10001");
    CHECK(step.stuffed);
  }
  SUBCASE("ideal 1[q] 1[q] with payload 11") {
    ReceiverState r;
    auto s1 = receiver_step(r, Observation::arrival(), ProtocolMode::ideal(), 0, rng);
    auto s2 = receiver_step(s1.state, Observation::arrival(payload(1, 1)), ProtocolMode::ideal(), 1, rng);
    std::string out;
    for (auto b : s1.bits) out.push_back(b ? '1' : '0');
    for (auto b : s2.bits) out.push_back(b ? '1' : '0');
    CHECK(out == "1111");
    CHECK(s2.round_complete);
  }
  SUBCASE("more than m silent slots is a protocol violation") {
    ReceiverState r = receiver_step({}, Observation::arrival(), m2, 0, rng).state;
    r = receiver_step(r, Observation::silent(), m2, 1, rng).state;
    r = receiver_step(r, Observation::silent(), m2, 2, rng).state;
    CHECK_THROWS_AS(receiver_step(r, Observation::silent(), m2, 3, rng), ProtocolViolation);
  }
  SUBCASE("second arrival without a pair is a protocol violation") {
    ReceiverState r = receiver_step({}, Observation::arrival(), m2, 0, rng).state;
    CHECK_THROWS_AS(receiver_step(r, Observation::arrival(), m2, 1, rng), ProtocolViolation);
  }
}

TEST_CASE("unique decodability over random buffers") {
  Rng rng(2024);
  std::vector<ProtocolMode> modes{ProtocolMode::ideal()};
  for (std::int64_t m = 0; m <= 8; ++m) modes.push_back(ProtocolMode::decoherence(m));

  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::string input = random_bits(rng, 1 + rng() % 1000);
    for (const auto& mode : modes) {
      const auto t = drive_one(BitBuffer::from_string(input), mode);
      // Output is exactly a prefix of the consumed input: everything up to
      // the last completed round plus zeros already sent in S0.
      REQUIRE(t.received.size() <= t.consumed.size());
      REQUIRE(t.consumed == input.substr(0, t.consumed.size()));
      REQUIRE(t.received == t.consumed.substr(0, t.received.size()));
      if (!t.mid_round) {
        REQUIRE(t.received == t.consumed);
      }
      if (mode.stuffing()) {
        const auto framed = stuff_transform(bits_of(input), mode.m);
        const auto stuffed_rounds =
            std::count(t.receiver_stuffed.begin(), t.receiver_stuffed.end(), true);
        REQUIRE(framed.round_spans.size() == t.rounds.size());
        REQUIRE(static_cast<std::size_t>(stuffed_rounds) == framed.stuffed_positions.size());
        REQUIRE(to_bit_string(framed.wire).substr(0, t.wire.size()) == t.wire);
      }
      ++checked;
    }
  }
  CHECK(checked == 10000);
}

TEST_CASE("coherence bound holds exhaustively for inputs up to length 12") {
  for (std::int64_t m = 0; m <= 8; ++m) {
    const auto mode = ProtocolMode::decoherence(m);
    const std::int64_t c = m + 2;
    const auto cliff = NoiseModel::cliff(CoherenceBudget{c});
    for (int len = 1; len <= 12; ++len) {
      for (std::uint32_t word = 0; word < (1U << len); ++word) {
        std::string input;
        for (int i = 0; i < len; ++i) input.push_back(((word >> i) & 1) ? '1' : '0');
        const auto t = drive_one(BitBuffer::from_string(input), mode, cliff);
        for (std::size_t r = 0; r < t.rounds.size(); ++r) {
          REQUIRE(t.ages[r] <= c);
          // Within budget, the cliff model never randomises the payload.
          REQUIRE(t.decoded[r] == t.rounds[r].sd_payload);
        }
        for (auto span : stuff_transform(bits_of(input), m).round_spans) REQUIRE(span <= c);
      }
    }
  }
}

TEST_CASE("round accounting identities") {
  const auto m3 = ProtocolMode::decoherence(3);
  CHECK(round_bits(ProtocolMode::ideal(), 2, 5, false) == 11);
  CHECK(round_bits(m3, 2, 1, false) == 7);
  CHECK(round_bits(m3, 2, 3, true) == 8);
  CHECK(round_slots(2, 3) == 7);

  // Bits the receiver emits per round equal B_i.
  Rng rng(5);
  const auto t = drive_one(BitBuffer::random(77), m3, NoiseModel::none(), 1, 2000);
  std::int64_t total_bits = 0;
  for (const auto& r : t.rounds) total_bits += round_bits(m3, r.k1, r.k2, r.stuffed);
  CHECK(static_cast<std::size_t>(total_bits) == t.received.size());
}

TEST_CASE("K1, K2 statistics over 1e5 rounds") {
  SUBCASE("ideal: E[K1] = 1, E[B] = 6, E[T] = 4") {
    const auto t = drive_one(BitBuffer::random(123), ProtocolMode::ideal(), NoiseModel::none(), 1, 100000);
    REQUIRE(t.rounds.size() == 100000);
    const double n = static_cast<double>(t.rounds.size());
    double k1 = 0, b = 0, tt = 0, b2 = 0, t2 = 0, k12 = 0;
    for (const auto& r : t.rounds) {
      const double bi = static_cast<double>(round_bits(ProtocolMode::ideal(), r.k1, r.k2, false));
      const double ti = static_cast<double>(round_slots(r.k1, r.k2));
      k1 += static_cast<double>(r.k1);
      k12 += static_cast<double>(r.k1 * r.k1);
      b += bi;
      b2 += bi * bi;
      tt += ti;
      t2 += ti * ti;
    }
    auto se = [n](double s, double s2) { return std::sqrt((s2 / n - (s / n) * (s / n)) / n); };
    CHECK(std::abs(k1 / n - 1.0) < 3 * se(k1, k12));
    CHECK(std::abs(b / n - 6.0) < 3 * se(b, b2));
    CHECK(std::abs(tt / n - 4.0) < 3 * se(tt, t2));
  }
  SUBCASE("variant: K2 pmf matches (1/2)^{i+1}, i < m and (1/2)^m at m") {
    for (std::int64_t m : {1, 4, 6}) {
      const auto mode = ProtocolMode::decoherence(m);
      const auto t = drive_one(BitBuffer::random(900 + m), mode, NoiseModel::none(), 1, 100000);
      std::vector<double> counts(static_cast<std::size_t>(m + 1), 0.0);
      for (const auto& r : t.rounds) {
        REQUIRE(r.k2 <= m);
        REQUIRE(r.stuffed == (r.k2 == m));
        counts[static_cast<std::size_t>(r.k2)] += 1;
      }
      const double n = static_cast<double>(t.rounds.size());
      double chi2 = 0.0;
      for (std::int64_t i = 0; i <= m; ++i) {
        const double p = i < m ? std::pow(0.5, static_cast<double>(i + 1))
                               : std::pow(0.5, static_cast<double>(m));
        const double expected = n * p;
        chi2 += (counts[static_cast<std::size_t>(i)] - expected) *
                (counts[static_cast<std::size_t>(i)] - expected) / expected;
      }
      // Upper 0.1% points of chi-square with m degrees of freedom.
      const double critical = m == 1 ? 10.828 : (m == 4 ? 18.467 : 22.458);
      CHECK(chi2 < critical);
    }
  }
}

TEST_CASE("direct baseline") {
  BitBuffer one = BitBuffer::from_string("1");
  const auto r = next_direct_round(one);
  REQUIRE(r);
  CHECK(r->k1 == 0);
  CHECK(r->bits_delivered == 1);
  CHECK(r->slots_used == 1);
  CHECK(r->qubits == 1);

  BitBuffer trailing = BitBuffer::from_string("0001000");
  CHECK(next_direct_round(trailing)->bits_delivered == 4);
  CHECK_FALSE(next_direct_round(trailing));
  CHECK(trailing.consumed() == 4);

  BitBuffer buffer = BitBuffer::random(3);
  double k = 0, b = 0, t = 0, q = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto round = next_direct_round(buffer);
    k += static_cast<double>(round->k1);
    b += static_cast<double>(round->bits_delivered);
    t += static_cast<double>(round->slots_used);
    q += static_cast<double>(round->qubits);
  }
  // Var(K) = 2 for the geometric pmf; 4 standard errors.
  CHECK(std::abs(k / n - 1.0) < 4 * std::sqrt(2.0 / n));
  CHECK(b / t == 1.0);
  CHECK(std::abs(b / q - 2.0) < 4 * std::sqrt(2.0 / n));
}

TEST_CASE("superdense TDD baseline") {
  Rng rng(1);
  BitBuffer buffer = BitBuffer::from_string("1001");
  const auto r = next_sdc_tdd_round(buffer, 0, NoiseModel::none(), rng);
  REQUIRE(r);
  CHECK(r->bits_delivered == 2);
  CHECK(r->slots_used == 2);
  CHECK(r->qubits == 2);
  CHECK(r->sd_sent == std::array<std::uint8_t, 2>{1, 0});
  CHECK(r->sd_decoded == r->sd_sent);

  const auto preshared = next_sdc_tdd_round(buffer, 2, NoiseModel::none(), rng, false);
  REQUIRE(preshared);
  CHECK(preshared->slots_used == 1);
  CHECK(preshared->qubits == 1);
  CHECK(static_cast<double>(preshared->bits_delivered) / preshared->slots_used == 2.0);
  CHECK_FALSE(next_sdc_tdd_round(buffer, 4, NoiseModel::none(), rng));
}

TEST_CASE("ping-pong baseline costs two slots and two qubits per bit") {
  BitBuffer buffer = BitBuffer::random(4);
  std::int64_t bits = 0, slots = 0, qubits = 0;
  for (int i = 0; i < 100; ++i) {
    const auto r = next_ping_pong_round(buffer);
    bits += r->bits_delivered;
    slots += r->slots_used;
    qubits += r->qubits;
  }
  CHECK(bits == 100);
  CHECK(slots == 200);
  CHECK(qubits == 200);
}

TEST_CASE("bit buffer") {
  auto b = BitBuffer::from_string("101");
  CHECK(b.peek(2) == std::optional<bool>(true));
  CHECK(b.has(3));
  CHECK_FALSE(b.has(4));
  CHECK(b.next() == std::optional<bool>(true));
  CHECK(b.next() == std::optional<bool>(false));
  CHECK(b.next() == std::optional<bool>(true));
  CHECK_FALSE(b.next());
  CHECK(b.consumed() == 3);
  CHECK_THROWS(BitBuffer::from_string("10x"));

  auto capped = BitBuffer::random(9, 5);
  CHECK(capped.has(5));
  CHECK_FALSE(capped.has(6));

  auto x = BitBuffer::random(42);
  auto y = BitBuffer::random(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(x.next() == y.next());
}
