#include "sketchmap/bitvec.hpp"

#include "sketchmap/errors.hpp"

namespace sketchmap {

BitVec::BitVec(std::uint32_t width, std::uint64_t value) : width_(width), value_(value) {
  if (width == 0 || width > kMaxWidth) {
    throw WidthError("bitvector width " + std::to_string(width) + " outside 1..64");
  }
  if ((value & ~mask(width)) != 0) {
    throw WidthError("value " + std::to_string(value) + " does not fit in " + std::to_string(width) + " bits");
  }
}

BitVec BitVec::truncate(std::uint32_t width, std::uint64_t value) {
  if (width == 0 || width > kMaxWidth) {
    throw WidthError("bitvector width " + std::to_string(width) + " outside 1..64");
  }
  return BitVec(width, value & mask(width));
}

std::int64_t BitVec::signed_value() const {
  if (width_ == 64) return static_cast<std::int64_t>(value_);
  if (bit(width_ - 1)) return static_cast<std::int64_t>(value_ | ~mask(width_));
  return static_cast<std::int64_t>(value_);
}

std::string BitVec::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::uint32_t n = (width_ + 3) / 4;
  std::string out(n, '0');
  for (std::uint32_t i = 0; i < n; ++i) {
    out[n - 1 - i] = digits[(value_ >> (4 * i)) & 0xF];
  }
  return out;
}

std::string BitVec::to_bin() const {
  std::string out(width_, '0');
  for (std::uint32_t i = 0; i < width_; ++i) {
    if (bit(i)) out[width_ - 1 - i] = '1';
  }
  return out;
}

std::string BitVec::to_smtlib() const { return "#b" + to_bin(); }

std::string BitVec::to_verilog() const { return std::to_string(width_) + "'h" + to_hex(); }

}  // namespace sketchmap
