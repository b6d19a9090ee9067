#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmc/errors.hpp"

namespace qmc {

/// Base-b digit expansion of a nonnegative integer, least significant digit
/// first: digits[t] carries weight base^t.
struct DigitVector {
  unsigned base = 2;
  std::vector<std::uint8_t> digits;

  std::size_t size() const noexcept { return digits.size(); }
};

/// An index together with the number of significant digits it is read at.
struct BitIndex {
  std::uint64_t value = 0;
  unsigned width = 0;
};

inline bool is_prime(unsigned b) noexcept {
  if (b < 2) return false;
  for (unsigned f = 2; f * f <= b; ++f)
    if (b % f == 0) return false;
  return true;
}

inline void require_prime_base(unsigned base) {
  if (!is_prime(base)) throw std::invalid_argument("base must be a prime >= 2, got " + std::to_string(base));
}

// Largest m with base^m representable in 64 bits (capped at 64 for base 2).
inline unsigned max_digits(unsigned base) {
  require_prime_base(base);
  if (base == 2) return 64;
  unsigned m = 0;
  std::uint64_t p = 1;
  while (p <= (std::numeric_limits<std::uint64_t>::max() / base)) {
    p *= base;
    ++m;
  }
  return m;
}

// base^m, throwing when it would not fit.
inline std::uint64_t ipow_checked(unsigned base, unsigned m) {
  if (base == 2) {
    if (m > 64) throw std::out_of_range("2^m exceeds 64 bits");
    return m == 64 ? 0 /* wraps; callers treat m==64 specially */ : (std::uint64_t{1} << m);
  }
  std::uint64_t p = 1;
  for (unsigned t = 0; t < m; ++t) {
    if (p > std::numeric_limits<std::uint64_t>::max() / base)
      throw std::out_of_range("base^m exceeds 64 bits");
    p *= base;
  }
  return p;
}

inline void require_index_below(std::uint64_t i, unsigned base, unsigned m) {
  if (base == 2 && m >= 64) return;  // every u64 fits
  std::uint64_t bound = ipow_checked(base, m);
  if (i >= bound)
    throw std::out_of_range("index " + std::to_string(i) + " >= base^m = " + std::to_string(bound));
}

/// First m base-b digits of i, least significant first.
inline DigitVector digit_vector(std::uint64_t i, unsigned base, unsigned m) {
  require_prime_base(base);
  if (m == 0) throw std::invalid_argument("digit_vector: m must be positive");
  require_index_below(i, base, m);
  DigitVector v;
  v.base = base;
  v.digits.resize(m);
  for (unsigned t = 0; t < m; ++t) {
    v.digits[t] = static_cast<std::uint8_t>(i % base);
    i /= base;
  }
  return v;
}

inline std::uint64_t reconstruct(const DigitVector& v) {
  std::uint64_t i = 0;
  for (std::size_t t = v.digits.size(); t-- > 0;) i = i * v.base + v.digits[t];
  return i;
}

/// Radical inverse: mirror the first m base-b digits of i across the radix
/// point. Exact in binary64 for base 2 with m <= 64.
inline double radical_inverse(std::uint64_t i, unsigned base, unsigned m) {
  require_prime_base(base);
  require_index_below(i, base, m);
  if (base == 2) {
    // Horner from the most significant digit keeps every step exact.
    double v = 0.0;
    for (unsigned t = m; t-- > 0;) {
      unsigned bit = (t < 64) ? static_cast<unsigned>((i >> t) & 1u) : 0u;
      v = (v + bit) * 0.5;
    }
    return v;
  }
  double v = 0.0;
  std::uint64_t rest = i;
  std::vector<std::uint8_t> dig(m);
  for (unsigned t = 0; t < m; ++t) {
    dig[t] = static_cast<std::uint8_t>(rest % base);
    rest /= base;
  }
  for (unsigned t = m; t-- > 0;) v = (v + dig[t]) / base;
  return v;
}

/// Reflected base-b Gray code. Digit t of the result is i_t when the integer
/// formed by the digits above t is even, and (b-1) - i_t when odd; consecutive
/// codes differ in exactly one digit by +-1.
inline std::uint64_t gray_code(std::uint64_t i, unsigned base) {
  require_prime_base(base);
  if (base == 2) return i ^ (i >> 1);
  std::uint64_t g = 0, place = 1;
  while (place <= i) {
    std::uint64_t digit = (i / place) % base;
    std::uint64_t above = i / (place * base);
    g += ((above & 1) ? (base - 1 - digit) : digit) * place;
    if (place > std::numeric_limits<std::uint64_t>::max() / base) break;
    place *= base;
  }
  return g;
}

/// Reverse the lowest m bits of i. Involution.
inline std::uint64_t bit_reverse(std::uint64_t i, unsigned m) {
  if (m > 64) throw std::out_of_range("bit_reverse: m > 64");
  require_index_below(i, 2, m);
  std::uint64_t r = 0;
  for (unsigned t = 0; t < m; ++t) {
    r = (r << 1) | (i & 1);
    i >>= 1;
  }
  return r;
}

}  // namespace qmc
