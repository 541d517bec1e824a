#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace sketchmap {

/// Fixed-width unsigned bitvector, 1 to 64 bits wide.
class BitVec {
 public:
  static constexpr std::uint32_t kMaxWidth = 64;

  BitVec() = default;
  /// Throws WidthError unless 1 <= width <= 64 and value < 2^width.
  BitVec(std::uint32_t width, std::uint64_t value);

  /// Keeps the low `width` bits of `value`.
  static BitVec truncate(std::uint32_t width, std::uint64_t value);
  static BitVec zero(std::uint32_t width) { return truncate(width, 0); }
  static BitVec ones(std::uint32_t width) { return truncate(width, ~std::uint64_t{0}); }

  static std::uint64_t mask(std::uint32_t width) {
    return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
  }

  std::uint32_t width() const { return width_; }
  std::uint64_t value() const { return value_; }
  std::int64_t signed_value() const;
  bool bit(std::uint32_t i) const { return (value_ >> i) & 1; }

  /// Lowercase hex digits, no prefix, zero padded to ceil(width/4) digits.
  std::string to_hex() const;
  /// MSB-first binary digits, exactly `width` characters.
  std::string to_bin() const;
  /// SMT-LIB literal: `#b...` (always binary so widths need not be multiples of 4).
  std::string to_smtlib() const;
  /// Verilog sized literal, e.g. `16'h8000`.
  std::string to_verilog() const;

  friend bool operator==(const BitVec&, const BitVec&) = default;
  friend auto operator<=>(const BitVec&, const BitVec&) = default;

 private:
  std::uint32_t width_ = 1;
  std::uint64_t value_ = 0;
};

}  // namespace sketchmap
