#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmc/digits.hpp"
#include "qmc/errors.hpp"
#include "qmc/point_batch.hpp"
#include "qmc/rng.hpp"

namespace qmc {

/// Base-2 generating matrices. Matrix j is stored as m column words; bit
/// (t_max-1-r) of a column word is row r, so row 0 sits at the most
/// significant bit and a point's digit word divides by 2^t_max to its value.
struct GeneratingMatrixSet {
  unsigned t_max = 0;
  unsigned m = 0;
  std::vector<std::vector<std::uint64_t>> cols;  // [dim][m]
  std::string source;

  std::size_t dimension() const noexcept { return cols.size(); }

  void validate() const {
    if (t_max == 0 || t_max > 64) throw std::invalid_argument("t_max must be in [1, 64]");
    if (m == 0 || m > 64) throw std::invalid_argument("m must be in [1, 64]");
    const std::uint64_t mask = t_max == 64 ? ~std::uint64_t{0}
                                           : ((std::uint64_t{1} << t_max) - 1);
    for (const auto& c : cols) {
      if (c.size() != m) throw std::invalid_argument("ragged generating matrix");
      for (std::uint64_t w : c)
        if ((w & ~mask) != 0) throw std::out_of_range("column value exceeds 2^t_max");
    }
  }
};

/// Identity generating matrices (the van der Corput construction per
/// dimension): column k has a single 1 in row k.
inline GeneratingMatrixSet identity_matrices(unsigned d, unsigned m) {
  GeneratingMatrixSet C;
  C.t_max = m;
  C.m = m;
  C.source = "identity";
  C.cols.assign(d, std::vector<std::uint64_t>(m));
  for (unsigned j = 0; j < d; ++j)
    for (unsigned k = 0; k < m; ++k) C.cols[j][k] = std::uint64_t{1} << (m - 1 - k);
  return C;
}

/// Built-in Sobol' generating matrices for d <= 8, from the Joe & Kuo
/// "new-joe-kuo-6" direction numbers (primitive polynomial a, degree s,
/// initial values m_i); see https://web.maths.unsw.edu.au/~fkuo/sobol/.
inline GeneratingMatrixSet sobol_matrices(unsigned d, unsigned m = 32) {
  struct Row {
    unsigned s;
    unsigned a;
    unsigned minit[5];
  };
  // Dimensions 2..8 of the table; dimension 1 is the identity matrix.
  static const Row joe_kuo[7] = {
      {1, 0, {1, 0, 0, 0, 0}},  {2, 1, {1, 3, 0, 0, 0}},  {3, 1, {1, 3, 1, 0, 0}},
      {3, 2, {1, 1, 1, 0, 0}},  {4, 1, {1, 1, 3, 3, 0}},  {4, 4, {1, 3, 5, 13, 0}},
      {5, 2, {1, 1, 5, 5, 17}},
  };
  if (d == 0 || d > 8)
    throw std::invalid_argument("built-in Sobol' matrices cover 1 <= d <= 8; load a file for larger d");
  if (m == 0 || m > 32) throw std::invalid_argument("built-in Sobol' matrices support m <= 32");

  GeneratingMatrixSet C;
  C.t_max = m;
  C.m = m;
  C.source = "builtin-sobol-joe-kuo-6";
  C.cols.assign(d, std::vector<std::uint64_t>(m));
  for (unsigned k = 0; k < m; ++k) C.cols[0][k] = std::uint64_t{1} << (m - 1 - k);
  for (unsigned j = 1; j < d; ++j) {
    const Row& row = joe_kuo[j - 1];
    std::vector<std::uint64_t> mi(m);
    for (unsigned k = 0; k < m; ++k) {
      if (k < row.s) {
        mi[k] = row.minit[k];
      } else {
        // m_k = 2 a_1 m_{k-1} ^ ... ^ 2^{s-1} a_{s-1} m_{k-s+1}
        //       ^ 2^s m_{k-s} ^ m_{k-s}
        std::uint64_t v = (mi[k - row.s] << row.s) ^ mi[k - row.s];
        for (unsigned q = 1; q < row.s; ++q)
          if ((row.a >> (row.s - 1 - q)) & 1u) v ^= mi[k - q] << q;
        mi[k] = v;
      }
      C.cols[j][k] = mi[k] << (m - 1 - k);  // v_k = m_k / 2^k, row 0 at MSB
    }
  }
  return C;
}

enum class LmsFamily { matousek, tezuka, owen_striped };

inline const char* to_string(LmsFamily f) {
  switch (f) {
    case LmsFamily::matousek: return "matousek";
    case LmsFamily::tezuka: return "tezuka";
    case LmsFamily::owen_striped: return "owen-striped";
  }
  return "?";
}

/// Lower-triangular scrambling matrices, one per dimension. Row r is packed
/// over t_in bits with entry (r, t) at bit (t_in-1-t); the square part
/// carries a unit diagonal (base-2 h values are always 1).
struct LmsSpec {
  LmsFamily family = LmsFamily::matousek;
  unsigned t_in = 0;   // columns of S that can meet nonzero rows of C
  unsigned t_out = 0;  // rows of S = t_max of the scrambled matrices
  std::vector<std::vector<std::uint64_t>> rows;  // [dim][t_out]
};

/// Draw the random entries of an LMS spec. Matousek: independent bits
/// strictly below the diagonal. Tezuka: bits constant along subdiagonals.
/// Owen-striped: bits constant within a column below the diagonal, which in
/// base 2 leaves no free entries at all.
inline LmsSpec random_lms(LmsFamily family, std::size_t d, unsigned t_in, unsigned t_out,
                          RngKey key) {
  if (t_in == 0 || t_out < t_in || t_out > 64)
    throw std::invalid_argument("random_lms: need 0 < t_in <= t_out <= 64");
  LmsSpec S;
  S.family = family;
  S.t_in = t_in;
  S.t_out = t_out;
  S.rows.assign(d, std::vector<std::uint64_t>(t_out));
  for (std::size_t j = 0; j < d; ++j) {
    RngKey kj = key.child(rng_label::dimension).child(j);
    std::vector<std::uint8_t> subdiag(t_out, 0);  // tezuka constants s_1, s_2, ...
    for (unsigned q = 1; q < t_out; ++q) subdiag[q] = static_cast<std::uint8_t>(kj.bits(q) & 1u);
    for (unsigned r = 0; r < t_out; ++r) {
      std::uint64_t row = 0;
      std::uint64_t draw = kj.bits(0x100 + r);
      for (unsigned t = 0; t < t_in; ++t) {
        unsigned bit;
        if (t > r) {
          bit = 0;
        } else if (t == r) {
          bit = 1;  // h in {1,...,b-1} degenerates to 1 in base 2
        } else {
          switch (family) {
            case LmsFamily::matousek: bit = (draw >> t) & 1u; break;
            case LmsFamily::tezuka: bit = subdiag[r - t]; break;
            default: bit = 1; break;  // owen_striped
          }
        }
        row |= static_cast<std::uint64_t>(bit) << (t_in - 1 - t);
      }
      S.rows[j][r] = row;
    }
  }
  return S;
}

/// C~_j = S_j C_j over GF(2). The result has t_out rows; rows of C below its
/// own t_max are treated as zero, so only the first t_in columns of S act.
inline GeneratingMatrixSet lms_scramble(const GeneratingMatrixSet& C, const LmsSpec& S) {
  if (S.rows.size() != C.dimension()) throw std::invalid_argument("lms_scramble: dimension mismatch");
  if (S.t_in < C.t_max)
    throw precision_error("lms_scramble: scrambling matrices narrower than generating matrices");
  GeneratingMatrixSet out;
  out.t_max = S.t_out;
  out.m = C.m;
  out.source = C.source;
  out.cols.assign(C.dimension(), std::vector<std::uint64_t>(C.m));
  const unsigned pad = S.t_in - C.t_max;  // align C's digits to S's columns
  for (std::size_t j = 0; j < C.dimension(); ++j) {
    for (unsigned k = 0; k < C.m; ++k) {
      std::uint64_t col = C.cols[j][k] << pad;
      std::uint64_t v = 0;
      for (unsigned r = 0; r < S.t_out; ++r) {
        std::uint64_t prod = S.rows[j][r] & col;
        v = (v << 1) | (static_cast<std::uint64_t>(__builtin_popcountll(prod)) & 1u);
      }
      out.cols[j][k] = v;
    }
  }
  return out;
}

/// Per-dimension digital shift columns, packed like digit words.
struct DigitalShiftMatrix {
  unsigned t_max = 0;
  std::vector<std::uint64_t> delta;  // [dim]
};

inline DigitalShiftMatrix random_digital_shift(std::size_t d, unsigned t_max, RngKey key) {
  if (t_max == 0 || t_max > 64) throw std::invalid_argument("digital shift: t_max in [1,64]");
  DigitalShiftMatrix s;
  s.t_max = t_max;
  s.delta.resize(d);
  const std::uint64_t mask = t_max == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << t_max) - 1);
  for (std::size_t j = 0; j < d; ++j) s.delta[j] = key.bits(j) & mask;
  return s;
}

/// XOR a shift column into a digit word of the same precision. Involution.
inline std::uint64_t digital_shift_word(std::uint64_t word, std::uint64_t delta) noexcept {
  return word ^ delta;
}

/// Interlace alpha*d matrices into d matrices of alpha*t_max rows: row r of
/// output matrix j is row floor(r/alpha) of input matrix alpha*j + (r mod
/// alpha). Rows beyond 64 are dropped.
inline GeneratingMatrixSet interlace_matrices(const GeneratingMatrixSet& C, unsigned alpha) {
  if (alpha == 0) throw std::invalid_argument("interlace: alpha must be >= 1");
  if (C.dimension() % alpha != 0)
    throw std::invalid_argument("interlace: matrix count is not a multiple of alpha");
  if (alpha == 1) return C;
  const std::size_t d_out = C.dimension() / alpha;
  const unsigned t_out = alpha * C.t_max > 64 ? 64 : alpha * C.t_max;
  GeneratingMatrixSet out;
  out.t_max = t_out;
  out.m = C.m;
  out.source = C.source;
  out.cols.assign(d_out, std::vector<std::uint64_t>(C.m));
  for (std::size_t j = 0; j < d_out; ++j) {
    for (unsigned k = 0; k < C.m; ++k) {
      std::uint64_t v = 0;
      for (unsigned r = 0; r < t_out; ++r) {
        const std::size_t j_in = alpha * j + (r % alpha);
        const unsigned r_in = r / alpha;
        const unsigned bit = (C.cols[j_in][k] >> (C.t_max - 1 - r_in)) & 1u;
        v |= static_cast<std::uint64_t>(bit) << (t_out - 1 - r);
      }
      out.cols[j][k] = v;
    }
  }
  return out;
}

/// Interlace one point's digit words for alpha*d dimensions (width t_in each)
/// into d words of width min(alpha*t_in, 64).
inline void interlace_digits(std::span<const std::uint64_t> in, unsigned alpha, unsigned t_in,
                             std::span<std::uint64_t> out) {
  if (alpha == 0 || in.size() % alpha != 0 || out.size() != in.size() / alpha)
    throw std::invalid_argument("interlace_digits: shape mismatch");
  const unsigned t_out = alpha * t_in > 64 ? 64 : alpha * t_in;
  for (std::size_t j = 0; j < out.size(); ++j) {
    std::uint64_t v = 0;
    for (unsigned r = 0; r < t_out; ++r) {
      const unsigned bit =
          (in[alpha * j + (r % alpha)] >> (t_in - 1 - r / alpha)) & 1u;
      v |= static_cast<std::uint64_t>(bit) << (t_out - 1 - r);
    }
    out[j] = v;
  }
}

/// Nested uniform scrambling with virtual tree nodes: the permutation at
/// depth t under input-digit prefix p is a single bit drawn from a counter
/// RNG keyed by (seed, dimension, t, p). No storage, no locking, and any
/// evaluation order reproduces the same scramble.
class NusScrambler {
 public:
  NusScrambler(RngKey key, unsigned t_out) : key_(key.child(rng_label::nus)), t_out_(t_out) {
    if (t_out == 0 || t_out > 64) throw std::invalid_argument("nus: t_out in [1,64]");
  }

  unsigned t_out() const noexcept { return t_out_; }

  unsigned node_bit(std::size_t dim, unsigned depth, std::uint64_t prefix) const noexcept {
    return static_cast<unsigned>(key_.child(dim).child(depth).bits(prefix) & 1u);
  }

  /// Scramble one digit word of width t_in <= t_out.
  std::uint64_t scramble_word(std::size_t dim, std::uint64_t word, unsigned t_in) const {
    if (t_in > t_out_) throw precision_error("nus: input digits exceed scrambler depth");
    return scramble_word_with(
        [this, dim](unsigned depth, std::uint64_t prefix) { return node_bit(dim, depth, prefix); },
        word, t_in, t_out_);
  }

  /// Core permutation pass with a caller-supplied node-bit source; digit t of
  /// the output depends on the node selected by input digits 0..t-1.
  template <class BitAt>
  static std::uint64_t scramble_word_with(BitAt&& bit_at, std::uint64_t word, unsigned t_in,
                                          unsigned t_out) {
    std::uint64_t out = 0, prefix = 0;
    for (unsigned t = 0; t < t_out; ++t) {
      const unsigned digit = t < t_in ? static_cast<unsigned>((word >> (t_in - 1 - t)) & 1u) : 0u;
      out = (out << 1) | (digit ^ (bit_at(t, prefix) & 1u));
      prefix = (prefix << 1) | digit;
    }
    return out;
  }

 private:
  RngKey key_;
  unsigned t_out_;
};

namespace detail {

// Digit words of net points [i0, i0+count) of one dimension in the requested
// order. Consecutive indices (or Gray codes) differ in a short run of
// digits, so after seeding the first word each step XORs a couple of columns.
inline void dnet_digit_words(const GeneratingMatrixSet& C, std::size_t dim, std::uint64_t i0,
                             std::size_t count, PointOrder order, std::uint64_t* out) {
  const auto& col = C.cols[dim];
  std::uint64_t w = 0;
  std::uint64_t start_digits = order == PointOrder::gray_code ? gray_code(i0, 2) : i0;
  while (start_digits) {
    unsigned q = static_cast<unsigned>(__builtin_ctzll(start_digits));
    w ^= col[q];
    start_digits &= start_digits - 1;
  }
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = w;
    const std::uint64_t i = i0 + k;
    if (k + 1 >= count) break;
    if (order == PointOrder::gray_code) {
      w ^= col[static_cast<unsigned>(__builtin_ctzll(i + 1))];
    } else {
      std::uint64_t flip = i ^ (i + 1);
      while (flip) {
        w ^= col[static_cast<unsigned>(__builtin_ctzll(flip))];
        flip &= flip - 1;
      }
    }
  }
}

inline double word_to_unit(std::uint64_t w, unsigned t_max) noexcept {
  return std::ldexp(static_cast<double>(w), -static_cast<int>(t_max));
}

}  // namespace detail

/// Configuration for digital net generation. `d` is the output dimension;
/// interlacing of order alpha consumes alpha*d generating matrices.
struct DnetConfig {
  unsigned d = 1;
  unsigned alpha = 1;
  PointOrder order = PointOrder::radical_inverse;
  RandKind rand = RandKind::none;
  LmsFamily lms_family = LmsFamily::matousek;
  std::size_t R = 1;
  std::uint64_t seed = 0;
  GeneratingMatrixSet C;  // leave empty to use the built-in Sobol' matrices
  unsigned t_points = 0;  // 0 = automatic (fill the binary64 mantissa)
};

/// One replication of a randomized digital sequence, extensible in blocks:
/// the randomization is resolved once at construction, after which any index
/// range can be materialized, in any order, with identical results.
class DnetSequence {
 public:
  DnetSequence(const DnetConfig& cfg, std::size_t replication) : cfg_(cfg) {
    if (cfg.d == 0) throw std::invalid_argument("dnet: d must be >= 1");
    if (cfg.alpha == 0) throw std::invalid_argument("dnet: alpha must be >= 1");
    if (cfg.order == PointOrder::linear)
      throw std::invalid_argument("dnet: order must be radical-inverse or gray-code");
    if (cfg.rand == RandKind::shift || cfg.rand == RandKind::qrng ||
        cfg.rand == RandKind::lms_permutation)
      throw std::invalid_argument("dnet: unsupported randomization for base-2 nets");

    const unsigned d_in = cfg.alpha * cfg.d;
    base_ = cfg.C.dimension() ? cfg.C : sobol_matrices(d_in, 32);
    base_.validate();
    if (base_.dimension() < d_in) throw std::invalid_argument("dnet: too few generating matrices");
    base_.cols.resize(d_in);

    const bool randomized = cfg.rand != RandKind::none;
    const unsigned t_C = base_.t_max;
    auto clamp64 = [](unsigned t) { return t > 64 ? 64u : t; };
    const unsigned t_interlaced = clamp64(cfg.alpha * t_C);
    t_pts_ = cfg.t_points ? cfg.t_points
                          : (randomized ? clamp64(t_interlaced < 53 ? 53 : t_interlaced)
                                        : t_interlaced);
    if (t_pts_ > 64) throw std::invalid_argument("dnet: t_points > 64");
    nus_ = cfg.rand == RandKind::nus;
    if (t_pts_ < t_interlaced && !nus_)
      throw precision_error("dnet: requested precision below generating-matrix precision");

    RngKey kr = RngKey(cfg.seed).child(rng_label::replication).child(replication);
    if (nus_) {
      t_stream_ = cfg.alpha == 1 ? t_pts_ : (t_pts_ + cfg.alpha - 1) / cfg.alpha;
      scrambler_.emplace(kr, t_stream_);
      eff_ = base_;
      return;
    }

    eff_ = base_;
    if (cfg.rand == RandKind::lms || cfg.rand == RandKind::lms_shift) {
      const unsigned t_lms_out = cfg.alpha == 1 ? t_pts_ : t_C;
      LmsSpec S = random_lms(cfg.lms_family, d_in, t_C, t_lms_out, kr.child(rng_label::lms));
      eff_ = lms_scramble(eff_, S);
    }
    if (cfg.alpha > 1) eff_ = interlace_matrices(eff_, cfg.alpha);
    if (eff_.t_max < t_pts_) {
      const unsigned pad = t_pts_ - eff_.t_max;
      for (auto& cset : eff_.cols)
        for (auto& w : cset) w <<= pad;
      eff_.t_max = t_pts_;
    } else if (eff_.t_max > t_pts_) {
      const unsigned cut = eff_.t_max - t_pts_;
      for (auto& cset : eff_.cols)
        for (auto& w : cset) w >>= cut;
      eff_.t_max = t_pts_;
    }

    if (cfg.rand == RandKind::digital_shift || cfg.rand == RandKind::lms_shift ||
        cfg.rand == RandKind::permutation) {
      // In base 2 every digit permutation is a flip, so a per-depth
      // permutation scramble and a digital shift draw the same object.
      const std::uint64_t label = cfg.rand == RandKind::permutation
                                      ? rng_label::digit_permutation
                                      : rng_label::digital_shift;
      shift_ = random_digital_shift(cfg.d, t_pts_, kr.child(label));
    }
  }

  unsigned t_points() const noexcept { return t_pts_; }
  const GeneratingMatrixSet& matrices() const noexcept { return eff_; }

  void check_capacity(std::uint64_t end) const {
    if (base_.m < 64 && end > (std::uint64_t{1} << base_.m))
      throw std::out_of_range("dnet: sequence exhausted (index beyond 2^m)");
  }

  /// Digit words for points [i0, i0+count), layout (point, dim).
  void words(std::uint64_t i0, std::size_t count, std::uint64_t* out) const {
    check_capacity(i0 + count);
    const unsigned d = cfg_.d;
    if (!nus_) {
      std::vector<std::uint64_t> buf(count);
      for (unsigned j = 0; j < d; ++j) {
        detail::dnet_digit_words(eff_, j, i0, count, cfg_.order, buf.data());
        const std::uint64_t delta = shift_.delta.empty() ? 0 : shift_.delta[j];
        for (std::size_t k = 0; k < count; ++k) out[k * d + j] = buf[k] ^ delta;
      }
      return;
    }
    const unsigned d_in = cfg_.alpha * cfg_.d;
    std::vector<std::uint64_t> buf(count);
    std::vector<std::uint64_t> stream(static_cast<std::size_t>(d_in) * count);
    for (unsigned j = 0; j < d_in; ++j) {
      detail::dnet_digit_words(eff_, j, i0, count, cfg_.order, buf.data());
      for (std::size_t k = 0; k < count; ++k)
        stream[k * d_in + j] = scrambler_->scramble_word(j, buf[k], eff_.t_max);
    }
    if (cfg_.alpha == 1) {
      std::copy(stream.begin(), stream.end(), out);
      return;
    }
    const unsigned t_full = cfg_.alpha * t_stream_ > 64 ? 64 : cfg_.alpha * t_stream_;
    std::vector<std::uint64_t> inter(d);
    for (std::size_t k = 0; k < count; ++k) {
      interlace_digits(std::span<const std::uint64_t>(stream.data() + k * d_in, d_in),
                       cfg_.alpha, t_stream_, inter);
      for (unsigned j = 0; j < d; ++j) out[k * d + j] = inter[j] >> (t_full - t_pts_);
    }
  }

  /// Coordinates for points [i0, i0+count), layout (point, dim).
  void values(std::uint64_t i0, std::size_t count, double* out) const {
    std::vector<std::uint64_t> w(count * cfg_.d);
    words(i0, count, w.data());
    for (std::size_t k = 0; k < w.size(); ++k) out[k] = detail::word_to_unit(w[k], t_pts_);
  }

 private:
  DnetConfig cfg_;
  GeneratingMatrixSet base_;
  GeneratingMatrixSet eff_;
  DigitalShiftMatrix shift_;
  std::optional<NusScrambler> scrambler_;
  unsigned t_pts_ = 0;
  unsigned t_stream_ = 0;
  bool nus_ = false;
};

inline PointBatch dnet_points(const DnetConfig& cfg, std::size_t n) {
  PointBatch b;
  b.R = cfg.R;
  b.n = n;
  b.d = cfg.d;
  b.generator = Generator::dnet;
  b.order = cfg.order;
  b.rand = cfg.rand;
  b.interlace_alpha = cfg.alpha;
  b.seed = cfg.seed;
  b.x.resize(cfg.R * n * cfg.d);
  b.digits.resize(cfg.R * n * cfg.d);
  for (std::size_t r = 0; r < cfg.R; ++r) {
    DnetSequence seq(cfg, r);
    if (r == 0) {
      b.digit_t_max = seq.t_points();
      b.source = seq.matrices().source;
    }
    seq.words(0, n, b.digits.data() + r * n * cfg.d);
  }
  for (std::size_t k = 0; k < b.digits.size(); ++k)
    b.x[k] = detail::word_to_unit(b.digits[k], b.digit_t_max);
  return b;
}

}  // namespace qmc
