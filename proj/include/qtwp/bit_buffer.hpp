#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace qtwp::protocol {

/// A user's classical input stream with a read cursor.
///
/// Either a fixed bit list (finite; reads past the end return nullopt) or an
/// i.i.d. uniform stream drawn lazily from a seeded generator, optionally
/// capped at a maximum length.
class BitBuffer {
 public:
  static BitBuffer from_bits(std::vector<std::uint8_t> bits);
  /// Parses a string of '0'/'1'; throws std::invalid_argument on other characters.
  static BitBuffer from_string(std::string_view bits);
  static BitBuffer random(std::uint64_t seed,
                          std::optional<std::size_t> limit = std::nullopt);

  /// Next bit, advancing the cursor.
  std::optional<bool> next();
  /// Bit at cursor + offset without advancing.
  std::optional<bool> peek(std::size_t offset = 0);
  /// True if at least `count` more bits can be read.
  bool has(std::size_t count);

  [[nodiscard]] std::size_t consumed() const { return cursor_; }
  /// The bits read so far, in order.
  [[nodiscard]] std::vector<std::uint8_t> consumed_bits() const;

 private:
  bool fill_to(std::size_t size);

  std::vector<std::uint8_t> bits_;
  std::size_t cursor_ = 0;
  bool generated_ = false;
  std::optional<std::size_t> limit_;
  std::mt19937_64 rng_;
  std::uint64_t word_ = 0;
  int word_bits_left_ = 0;
};

std::string to_bit_string(const std::vector<std::uint8_t>& bits);

}  // namespace qtwp::protocol
