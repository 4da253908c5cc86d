#include "qtwp/bit_buffer.hpp"

#include <stdexcept>

namespace qtwp::protocol {

BitBuffer BitBuffer::from_bits(std::vector<std::uint8_t> bits) {
  BitBuffer buffer;
  for (auto& b : bits) {
    b = b ? 1 : 0;
  }
  buffer.bits_ = std::move(bits);
  return buffer;
}

BitBuffer BitBuffer::from_string(std::string_view bits) {
  std::vector<std::uint8_t> out;
  out.reserve(bits.size());
  for (char ch : bits) {
    if (ch != '0' && ch != '1') {
      throw std::invalid_argument("bit string may only contain '0' and '1'");
    }
    out.push_back(ch == '1' ? 1 : 0);
  }
  return from_bits(std::move(out));
}

BitBuffer BitBuffer::random(std::uint64_t seed, std::optional<std::size_t> limit) {
  BitBuffer buffer;
  buffer.generated_ = true;
  buffer.limit_ = limit;
  buffer.rng_.seed(seed);
  return buffer;
}

bool BitBuffer::fill_to(std::size_t size) {
  if (bits_.size() >= size) {
    return true;
  }
  if (!generated_) {
    return false;
  }
  if (limit_ && size > *limit_) {
    return false;
  }
  while (bits_.size() < size) {
    if (word_bits_left_ == 0) {
      word_ = rng_();
      word_bits_left_ = 64;
    }
    bits_.push_back(static_cast<std::uint8_t>(word_ & 1U));
    word_ >>= 1;
    --word_bits_left_;
  }
  return true;
}

std::optional<bool> BitBuffer::next() {
  if (!fill_to(cursor_ + 1)) {
    return std::nullopt;
  }
  return bits_[cursor_++] != 0;
}

std::optional<bool> BitBuffer::peek(std::size_t offset) {
  if (!fill_to(cursor_ + offset + 1)) {
    return std::nullopt;
  }
  return bits_[cursor_ + offset] != 0;
}

bool BitBuffer::has(std::size_t count) { return fill_to(cursor_ + count); }

std::vector<std::uint8_t> BitBuffer::consumed_bits() const {
  return {bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(cursor_)};
}

std::string to_bit_string(const std::vector<std::uint8_t>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace qtwp::protocol
