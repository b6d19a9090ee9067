#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmc/digits.hpp"
#include "qmc/errors.hpp"
#include "qmc/point_batch.hpp"
#include "qmc/rng.hpp"

namespace qmc {

/// First d primes (2, 3, 5, ...).
inline std::vector<unsigned> first_primes(unsigned d) {
  std::vector<unsigned> p;
  p.reserve(d);
  unsigned c = 2;
  while (p.size() < d) {
    if (is_prime(c)) p.push_back(c);
    ++c;
  }
  return p;
}

/// Uniform random permutations of {0,...,base-1}, Fisher-Yates from the
/// counter RNG; same (base, count, seed) always reproduces the same list.
inline std::vector<std::vector<std::uint8_t>> random_digit_permutations(unsigned base,
                                                                        std::size_t count,
                                                                        std::uint64_t seed) {
  require_prime_base(base);
  RngKey key = RngKey(seed).child(rng_label::digit_permutation);
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) out.push_back(key.child(c).permutation(0, base));
  return out;
}

struct HaltonConfig {
  unsigned d = 1;
  RandKind rand = RandKind::none;
  std::size_t R = 1;
  std::uint64_t seed = 0;
  unsigned interlace_alpha = 1;  // anything > 1 is rejected: bases differ per dimension
};

namespace detail {

// Fixed permutation table for the generalized ("qrng") mode, bases 2..7.
// A local choice documented here, not a reproduction of any external
// package's tables: each permutation fixes 0 and spreads the remaining
// digits.
inline const std::vector<std::uint8_t>& qrng_permutation(unsigned base) {
  static const std::vector<std::uint8_t> p2 = {0, 1};
  static const std::vector<std::uint8_t> p3 = {0, 2, 1};
  static const std::vector<std::uint8_t> p5 = {0, 3, 1, 4, 2};
  static const std::vector<std::uint8_t> p7 = {0, 4, 2, 6, 1, 5, 3};
  switch (base) {
    case 2: return p2;
    case 3: return p3;
    case 5: return p5;
    case 7: return p7;
    default: throw std::invalid_argument("qrng mode is provided for d <= 4 (bases 2,3,5,7)");
  }
}

// General-base lower-triangular scramble. rows[r][t] for t <= r with
// diagonal entries in {1,...,b-1}; applied to the identity generating
// matrices of Halton, the scrambled columns are just columns of S.
struct GeneralLms {
  std::vector<std::vector<std::uint8_t>> rows;

  static GeneralLms random(unsigned base, unsigned t_max, RngKey key) {
    GeneralLms S;
    S.rows.assign(t_max, {});
    std::uint64_t ctr = 0;
    for (unsigned r = 0; r < t_max; ++r) {
      S.rows[r].resize(r + 1);
      for (unsigned t = 0; t < r; ++t)
        S.rows[r][t] = static_cast<std::uint8_t>(key.below(ctr++, base));  // g in {0,...,b-1}
      S.rows[r][r] = static_cast<std::uint8_t>(1 + key.below(ctr++, base - 1));  // h in {1,...,b-1}
    }
    return S;
  }
};

}  // namespace detail

/// One replication of a randomized Halton sequence, extensible in blocks.
/// Coordinate j of point i is the base-b_j radical inverse of i (b_j the
/// j-th prime) with digit-level randomizations. Digital interlacing is
/// rejected because the bases differ across dimensions.
class HaltonSequence {
 public:
  HaltonSequence(const HaltonConfig& cfg, std::size_t replication) : cfg_(cfg) {
    if (cfg.d == 0) throw std::invalid_argument("halton: d must be >= 1");
    if (cfg.interlace_alpha > 1)
      throw structure_error("halton: digital interlacing requires a common base");
    if (cfg.rand == RandKind::shift)
      throw std::invalid_argument("halton: mod-1 shifts are a lattice randomization");

    bases_ = first_primes(cfg.d);
    t_max_.resize(cfg.d);
    capacity_.resize(cfg.d);
    for (unsigned j = 0; j < cfg.d; ++j) {
      // Largest digit count keeping base^t within the binary64 mantissa.
      unsigned t = 0;
      std::uint64_t p = 1;
      while (p <= (std::uint64_t{1} << 53) / bases_[j]) {
        p *= bases_[j];
        ++t;
      }
      t_max_[j] = t;
      capacity_[j] = p;
    }

    RngKey kr = RngKey(cfg.seed).child(rng_label::replication).child(replication);
    const bool wants_lms = cfg.rand == RandKind::lms || cfg.rand == RandKind::lms_shift ||
                           cfg.rand == RandKind::lms_permutation;
    lms_.resize(cfg.d);
    shift_.resize(cfg.d);
    depth_perm_.resize(cfg.d);
    nus_key_.resize(cfg.d);
    for (unsigned j = 0; j < cfg.d; ++j) {
      const unsigned base = bases_[j];
      const unsigned tm = t_max_[j];
      RngKey kd = kr.child(rng_label::dimension).child(j);
      if (wants_lms) lms_[j] = detail::GeneralLms::random(base, tm, kd.child(rng_label::lms));
      if (cfg.rand == RandKind::digital_shift || cfg.rand == RandKind::lms_shift ||
          cfg.rand == RandKind::qrng) {
        RngKey ks = kd.child(rng_label::digital_shift);
        shift_[j].resize(tm);
        for (unsigned t = 0; t < tm; ++t)
          shift_[j][t] = static_cast<std::uint8_t>(ks.below(t, base));
      }
      if (cfg.rand == RandKind::permutation || cfg.rand == RandKind::lms_permutation) {
        RngKey kp = kd.child(rng_label::digit_permutation);
        depth_perm_[j].reserve(tm);
        for (unsigned t = 0; t < tm; ++t) depth_perm_[j].push_back(kp.child(t).permutation(0, base));
      }
      nus_key_[j] = kd.child(rng_label::nus);
    }
  }

  const std::vector<unsigned>& bases() const noexcept { return bases_; }

  /// Coordinates for points [i0, i0+count), layout (point, dim).
  void values(std::uint64_t i0, std::size_t count, double* out) const {
    for (unsigned j = 0; j < cfg_.d; ++j) {
      if (i0 + count > capacity_[j])
        throw std::out_of_range("halton: sequence exhausted in dimension " + std::to_string(j + 1));
      const unsigned base = bases_[j];
      const unsigned tm = t_max_[j];
      std::vector<std::uint8_t> dig(tm, 0), out_dig(tm, 0);
      std::uint64_t rest = i0;
      for (unsigned t = 0; t < tm && rest; ++t) {
        dig[t] = static_cast<std::uint8_t>(rest % base);
        rest /= base;
      }
      for (std::size_t k = 0; k < count; ++k) {
        if (k > 0) {
          for (unsigned t = 0; t < tm; ++t) {
            if (++dig[t] < base) break;
            dig[t] = 0;
          }
        }
        randomize_digits(j, dig, out_dig);
        double v = 0.0;
        for (unsigned t = tm; t-- > 0;) v = (v + out_dig[t]) / base;
        out[k * cfg_.d + j] = v;
      }
    }
  }

 private:
  void randomize_digits(unsigned j, const std::vector<std::uint8_t>& dig,
                        std::vector<std::uint8_t>& out_dig) const {
    const unsigned base = bases_[j];
    const unsigned tm = t_max_[j];
    const bool wants_lms = cfg_.rand == RandKind::lms || cfg_.rand == RandKind::lms_shift ||
                           cfg_.rand == RandKind::lms_permutation;
    if (wants_lms) {
      const auto& S = lms_[j].rows;
      for (unsigned t = 0; t < tm; ++t) {
        unsigned acc = 0;
        for (unsigned k = 0; k <= t; ++k) acc += S[t][k] * dig[k];
        out_dig[t] = static_cast<std::uint8_t>(acc % base);
      }
    } else {
      out_dig = dig;
    }
    switch (cfg_.rand) {
      case RandKind::none:
      case RandKind::lms:
        break;
      case RandKind::digital_shift:
      case RandKind::lms_shift:
        for (unsigned t = 0; t < tm; ++t)
          out_dig[t] = static_cast<std::uint8_t>((out_dig[t] + shift_[j][t]) % base);
        break;
      case RandKind::permutation:
      case RandKind::lms_permutation:
        for (unsigned t = 0; t < tm; ++t) out_dig[t] = depth_perm_[j][t][out_dig[t]];
        break;
      case RandKind::qrng: {
        const auto& perm = detail::qrng_permutation(base);
        for (unsigned t = 0; t < tm; ++t)
          out_dig[t] = static_cast<std::uint8_t>((perm[out_dig[t]] + shift_[j][t]) % base);
        break;
      }
      case RandKind::nus: {
        std::uint64_t prefix = 0;
        for (unsigned t = 0; t < tm; ++t) {
          auto perm = nus_key_[j].child(t).child(prefix).permutation(0, base);
          std::uint8_t in = out_dig[t];
          out_dig[t] = perm[in];
          prefix = prefix * base + in;
        }
        break;
      }
      default:
        throw std::invalid_argument("halton: unsupported randomization");
    }
  }

  HaltonConfig cfg_;
  std::vector<unsigned> bases_;
  std::vector<unsigned> t_max_;
  std::vector<std::uint64_t> capacity_;
  std::vector<detail::GeneralLms> lms_;
  std::vector<std::vector<std::uint8_t>> shift_;
  std::vector<std::vector<std::vector<std::uint8_t>>> depth_perm_;
  std::vector<RngKey> nus_key_;
};

inline PointBatch halton_points(const HaltonConfig& cfg, std::size_t n) {
  PointBatch b;
  b.R = cfg.R;
  b.n = n;
  b.d = cfg.d;
  b.generator = Generator::halton;
  b.order = PointOrder::radical_inverse;
  b.rand = cfg.rand;
  b.seed = cfg.seed;
  b.source = "halton-first-primes";
  b.x.resize(cfg.R * n * cfg.d);
  for (std::size_t r = 0; r < cfg.R; ++r) {
    HaltonSequence seq(cfg, r);
    seq.values(0, n, b.x.data() + r * n * cfg.d);
  }
  return b;
}

}  // namespace qmc
