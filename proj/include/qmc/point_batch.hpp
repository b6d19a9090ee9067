#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qmc {

enum class Generator { iid, lattice, dnet, halton };

enum class PointOrder { linear, radical_inverse, gray_code };

enum class RandKind {
  none,
  shift,           // lattice: +Delta mod 1
  digital_shift,   // digitwise +delta mod b (XOR in base 2)
  permutation,     // per-depth digit permutation
  lms,             // linear matrix scramble only (fixes the origin)
  lms_shift,       // LMS followed by a digital shift
  lms_permutation, // LMS followed by a permutation scramble
  nus,             // nested uniform scrambling
  qrng,            // fixed generalized permutations + random digital shifts
};

inline const char* to_string(Generator g) {
  switch (g) {
    case Generator::iid: return "iid";
    case Generator::lattice: return "lattice";
    case Generator::dnet: return "dnet";
    case Generator::halton: return "halton";
  }
  return "?";
}

inline const char* to_string(PointOrder o) {
  switch (o) {
    case PointOrder::linear: return "linear";
    case PointOrder::radical_inverse: return "radical-inverse";
    case PointOrder::gray_code: return "gray-code";
  }
  return "?";
}

inline const char* to_string(RandKind r) {
  switch (r) {
    case RandKind::none: return "none";
    case RandKind::shift: return "shift";
    case RandKind::digital_shift: return "digital-shift";
    case RandKind::permutation: return "permutation";
    case RandKind::lms: return "lms";
    case RandKind::lms_shift: return "lms-shift";
    case RandKind::lms_permutation: return "lms-permutation";
    case RandKind::nus: return "nus";
    case RandKind::qrng: return "qrng";
  }
  return "?";
}

/// R replications x n points x d dimensions of unit-cube coordinates, plus
/// the metadata needed to reproduce and to validate downstream pairings.
/// Base-2 generators also fill `digits` with the exact packed digit words
/// (MSB-first in `digit_t_max` bits) so kernels can work digit-exactly.
struct PointBatch {
  std::size_t R = 0, n = 0, d = 0;
  std::vector<double> x;  // layout (r, i, j), j fastest

  std::vector<std::uint64_t> digits;  // empty unless a base-2 digital generator
  unsigned digit_t_max = 0;

  Generator generator = Generator::iid;
  PointOrder order = PointOrder::radical_inverse;
  RandKind rand = RandKind::none;
  unsigned base = 2;  // lattice/dnet base (halton varies per dimension)
  unsigned interlace_alpha = 1;
  std::uint64_t seed = 0;
  std::string source;  // provenance of generating vector / matrices

  double& at(std::size_t r, std::size_t i, std::size_t j) { return x[(r * n + i) * d + j]; }
  double at(std::size_t r, std::size_t i, std::size_t j) const { return x[(r * n + i) * d + j]; }

  std::span<const double> point(std::size_t r, std::size_t i) const {
    return {x.data() + (r * n + i) * d, d};
  }

  std::uint64_t digit_word(std::size_t r, std::size_t i, std::size_t j) const {
    return digits[(r * n + i) * d + j];
  }

  bool has_digits() const noexcept { return digit_t_max != 0 && !digits.empty(); }
};

}  // namespace qmc
