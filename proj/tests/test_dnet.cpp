#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "qmc/dnet.hpp"
#include "qmc/rng.hpp"
#include "support/oracles.hpp"

using namespace qmc;

namespace {

DnetConfig plain_config(unsigned d, RandKind rand, std::uint64_t seed = 1,
                        PointOrder order = PointOrder::radical_inverse) {
  DnetConfig cfg;
  cfg.d = d;
  cfg.rand = rand;
  cfg.seed = seed;
  cfg.order = order;
  return cfg;
}

}  // namespace

TEST_CASE("van der Corput: identity matrices, point 1 is 0.5") {
  DnetConfig cfg = plain_config(1, RandKind::none);
  cfg.C = identity_matrices(1, 8);
  auto b = dnet_points(cfg, 4);
  REQUIRE(b.at(0, 0, 0) == 0.0);
  REQUIRE(b.at(0, 1, 0) == 0.5);
  REQUIRE(b.at(0, 2, 0) == 0.25);
  REQUIRE(b.at(0, 3, 0) == 0.75);
}

TEST_CASE("lms without shift fixes the origin") {
  for (auto family : {LmsFamily::matousek, LmsFamily::tezuka, LmsFamily::owen_striped}) {
    DnetConfig cfg = plain_config(3, RandKind::lms, 17);
    cfg.lms_family = family;
    auto b = dnet_points(cfg, 8);
    for (unsigned j = 0; j < 3; ++j) REQUIRE(b.at(0, 0, j) == 0.0);
  }
}

TEST_CASE("digital shift of the origin reads the shift digits") {
  DnetConfig cfg = plain_config(1, RandKind::digital_shift, 5);
  cfg.C = identity_matrices(1, 4);
  auto b = dnet_points(cfg, 2);
  // x_0 = F(delta); recover delta from the stored digits and compare
  std::uint64_t w = b.digit_word(0, 0, 0);
  REQUIRE(b.at(0, 0, 0) ==
          std::ldexp(static_cast<double>(w), -static_cast<int>(b.digit_t_max)));
  // direct construction: delta bits (1,1,0,...) -> 0.75
  std::uint64_t delta4 = 0b1100;  // 4-digit column, row 0 at MSB
  std::uint64_t shifted = digital_shift_word(0, delta4);
  REQUIRE(std::ldexp(static_cast<double>(shifted), -4) == 0.75);
}

TEST_CASE("digital shift is an involution") {
  RngKey key(77);
  auto shift = random_digital_shift(4, 53, key);
  for (int c = 0; c < 1000; ++c) {
    std::uint64_t w = key.bits(c) & ((std::uint64_t{1} << 53) - 1);
    for (unsigned j = 0; j < 4; ++j)
      REQUIRE(digital_shift_word(digital_shift_word(w, shift.delta[j]), shift.delta[j]) == w);
  }
}

TEST_CASE("lms_scramble: identity S, identity C, naive oracle") {
  auto C = sobol_matrices(4, 16);

  LmsSpec ident;
  ident.t_in = 16;
  ident.t_out = 16;
  ident.rows.assign(4, std::vector<std::uint64_t>(16));
  for (unsigned j = 0; j < 4; ++j)
    for (unsigned r = 0; r < 16; ++r) ident.rows[j][r] = std::uint64_t{1} << (16 - 1 - r);
  auto same = lms_scramble(C, ident);
  REQUIRE(same.cols == C.cols);

  // C = identity -> scrambled columns are the columns of S
  auto I = identity_matrices(2, 10);
  auto S = random_lms(LmsFamily::matousek, 2, 10, 10, RngKey(3));
  auto SC = lms_scramble(I, S);
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned k = 0; k < 10; ++k) {
      std::uint64_t col = 0;
      for (unsigned r = 0; r < 10; ++r)
        col |= ((S.rows[j][r] >> (10 - 1 - k)) & 1u) << (10 - 1 - r);
      REQUIRE(SC.cols[j][k] == col);
    }

  // random S against a naive O(t^2) bit loop
  auto S2 = random_lms(LmsFamily::matousek, 4, 16, 20, RngKey(9));
  auto got = lms_scramble(C, S2);
  for (unsigned j = 0; j < 4; ++j)
    for (unsigned k = 0; k < 16; ++k) {
      std::uint64_t want = 0;
      for (unsigned r = 0; r < 20; ++r) {
        unsigned acc = 0;
        for (unsigned t = 0; t < 16; ++t) {
          unsigned s_rt = (S2.rows[j][r] >> (16 - 1 - t)) & 1u;
          unsigned c_tk = (C.cols[j][k] >> (16 - 1 - t)) & 1u;
          acc ^= s_rt & c_tk;
        }
        want |= static_cast<std::uint64_t>(acc) << (20 - 1 - r);
      }
      REQUIRE(got.cols[j][k] == want);
    }
}

TEST_CASE("lms family structure") {
  auto S = random_lms(LmsFamily::tezuka, 1, 12, 12, RngKey(4));
  // constant along subdiagonals
  for (unsigned r = 0; r < 12; ++r)
    for (unsigned t = 0; t < r; ++t) {
      unsigned v = (S.rows[0][r] >> (12 - 1 - t)) & 1u;
      unsigned q = r - t;
      if (q < 12 && t + 1 < 12 && r + 1 < 12) {
        unsigned v2 = (S.rows[0][r + 1] >> (12 - 1 - (t + 1))) & 1u;
        REQUIRE(v == v2);
      }
    }
  // unit diagonals everywhere
  for (auto family : {LmsFamily::matousek, LmsFamily::tezuka, LmsFamily::owen_striped}) {
    auto Sf = random_lms(family, 2, 10, 14, RngKey(5));
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned r = 0; r < 10; ++r) REQUIRE(((Sf.rows[j][r] >> (10 - 1 - r)) & 1u) == 1u);
  }
  // owen-striped in base 2 is the all-ones lower triangle
  auto So = random_lms(LmsFamily::owen_striped, 1, 8, 8, RngKey(6));
  for (unsigned r = 0; r < 8; ++r)
    for (unsigned t = 0; t <= r; ++t) REQUIRE(((So.rows[0][r] >> (8 - 1 - t)) & 1u) == 1u);
}

TEST_CASE("gray-code and radical-inverse orders agree as sets") {
  for (RandKind rand : {RandKind::none, RandKind::lms_shift}) {
    auto a = dnet_points(plain_config(3, rand, 9, PointOrder::radical_inverse), 64);
    auto b = dnet_points(plain_config(3, rand, 9, PointOrder::gray_code), 64);
    std::vector<std::vector<std::uint64_t>> wa, wb;
    for (std::size_t i = 0; i < 64; ++i) {
      wa.push_back({a.digit_word(0, i, 0), a.digit_word(0, i, 1), a.digit_word(0, i, 2)});
      wb.push_back({b.digit_word(0, i, 0), b.digit_word(0, i, 1), b.digit_word(0, i, 2)});
    }
    std::sort(wa.begin(), wa.end());
    std::sort(wb.begin(), wb.end());
    REQUIRE(wa == wb);
  }
}

TEST_CASE("gray-code order steps by a single generating-matrix column") {
  auto cfg = plain_config(2, RandKind::none, 0, PointOrder::gray_code);
  cfg.C = sobol_matrices(2, 10);
  auto b = dnet_points(cfg, 32);
  for (std::size_t i = 0; i + 1 < 32; ++i) {
    unsigned q = static_cast<unsigned>(__builtin_ctzll(i + 1));
    for (unsigned j = 0; j < 2; ++j) {
      std::uint64_t diff = b.digit_word(0, i, j) ^ b.digit_word(0, i + 1, j);
      REQUIRE(diff == cfg.C.cols[j][q]);
    }
  }
}

TEST_CASE("nus core: identity bits, single flip, prefix preservation") {
  auto ident = [](unsigned, std::uint64_t) { return 0u; };
  RngKey key(12);
  for (int c = 0; c < 100; ++c) {
    std::uint64_t w = key.bits(c) >> (64 - 16);
    REQUIRE(NusScrambler::scramble_word_with(ident, w, 16, 16) == w);
  }
  // flip only at depth 0: output = input xor 100...0
  auto flip0 = [](unsigned depth, std::uint64_t) { return depth == 0 ? 1u : 0u; };
  for (int c = 0; c < 100; ++c) {
    std::uint64_t w = key.bits(400 + c) >> (64 - 16);
    REQUIRE(NusScrambler::scramble_word_with(flip0, w, 16, 16) ==
            (w ^ (std::uint64_t{1} << 15)));
  }
  // two inputs sharing a k-digit prefix share the output prefix
  NusScrambler nus(RngKey(77), 24);
  for (int c = 0; c < 200; ++c) {
    std::uint64_t a = key.bits(900 + c) >> (64 - 24);
    for (unsigned k : {4u, 9u, 17u}) {
      std::uint64_t mask_low = (std::uint64_t{1} << (24 - k)) - 1;
      std::uint64_t bvar = (a & ~mask_low) | (key.bits(5000 + c) & mask_low);
      std::uint64_t sa = nus.scramble_word(0, a, 24);
      std::uint64_t sb = nus.scramble_word(0, bvar, 24);
      REQUIRE((sa >> (24 - k)) == (sb >> (24 - k)));
    }
  }
}

TEST_CASE("per-depth permutation scrambling equals a digital shift in base 2") {
  // A depth-uniform permutation scramble is some flip pattern delta; applying
  // it via the nus core with prefix-independent bits must equal XOR by delta.
  RngKey key(31);
  std::uint64_t delta = key.bits(0) >> (64 - 20);
  auto depth_bits = [&](unsigned depth, std::uint64_t) {
    return static_cast<unsigned>((delta >> (20 - 1 - depth)) & 1u);
  };
  for (int c = 0; c < 300; ++c) {
    std::uint64_t w = key.bits(100 + c) >> (64 - 20);
    REQUIRE(NusScrambler::scramble_word_with(depth_bits, w, 20, 20) == (w ^ delta));
  }
}

TEST_CASE("interlace_matrices: alpha 1 identity, row mapping, worked 2x2 case") {
  auto C = sobol_matrices(4, 8);
  auto same = interlace_matrices(C, 1);
  REQUIRE(same.cols == C.cols);

  auto inter = interlace_matrices(C, 2);
  REQUIRE(inter.dimension() == 2);
  REQUIRE(inter.t_max == 16);
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned r = 0; r < 16; ++r)
      for (unsigned k = 0; k < 8; ++k) {
        unsigned got = (inter.cols[j][k] >> (16 - 1 - r)) & 1u;
        unsigned want = (C.cols[2 * j + (r % 2)][k] >> (8 - 1 - r / 2)) & 1u;
        REQUIRE(got == want);
      }

  // m = 2, t_max = 2, alpha = 2: rows of the interlaced matrix alternate
  // rows of the two inputs: (a1 row0; a2 row0; a1 row1; a2 row1).
  GeneratingMatrixSet four;
  four.t_max = 2;
  four.m = 2;
  four.cols.assign(4, std::vector<std::uint64_t>(2));
  RngKey key(8);
  for (unsigned j = 0; j < 4; ++j)
    for (unsigned k = 0; k < 2; ++k) four.cols[j][k] = key.bits(j * 2 + k) & 0x3;
  auto woven = interlace_matrices(four, 2);
  REQUIRE(woven.dimension() == 2);
  REQUIRE(woven.t_max == 4);
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned k = 0; k < 2; ++k) {
      std::uint64_t a = four.cols[2 * j][k], b = four.cols[2 * j + 1][k];
      std::uint64_t want = (((a >> 1) & 1) << 3) | (((b >> 1) & 1) << 2) | ((a & 1) << 1) | (b & 1);
      REQUIRE(woven.cols[j][k] == want);
    }

  GeneratingMatrixSet odd = sobol_matrices(3, 8);
  REQUIRE_THROWS_AS(interlace_matrices(odd, 2), std::invalid_argument);
}

TEST_CASE("interlace_digits identity and pipeline equivalence") {
  std::vector<std::uint64_t> in = {0xAB, 0xCD};
  std::vector<std::uint64_t> out(2);
  interlace_digits(in, 1, 8, out);
  REQUIRE(out == in);

  // d=1, alpha=2, n=8: digit interlacing of the unrandomized 2-dim net equals
  // generation from the matrix-interlaced set.
  auto C = sobol_matrices(2, 8);
  DnetConfig direct;
  direct.d = 1;
  direct.alpha = 2;
  direct.rand = RandKind::none;
  direct.C = C;
  auto a = dnet_points(direct, 8);

  DnetConfig flat;
  flat.d = 2;
  flat.rand = RandKind::none;
  flat.C = C;
  auto two = dnet_points(flat, 8);
  for (std::size_t i = 0; i < 8; ++i) {
    std::vector<std::uint64_t> words = {two.digit_word(0, i, 0), two.digit_word(0, i, 1)};
    std::uint64_t woven;
    interlace_digits(words, 2, 8, {&woven, 1});
    REQUIRE(woven == a.digit_word(0, i, 0));
  }

  // identity node bits: the nus pipeline reduces to the unrandomized case
  auto ident = [](unsigned, std::uint64_t) { return 0u; };
  for (std::size_t i = 0; i < 8; ++i) {
    std::vector<std::uint64_t> words = {
        NusScrambler::scramble_word_with(ident, two.digit_word(0, i, 0), 8, 8),
        NusScrambler::scramble_word_with(ident, two.digit_word(0, i, 1), 8, 8)};
    std::uint64_t woven;
    interlace_digits(words, 2, 8, {&woven, 1});
    REQUIRE(woven == a.digit_word(0, i, 0));
  }
}

TEST_CASE("one-dimensional stratification is exact under every randomization") {
  const unsigned m = 6;
  for (RandKind rand : {RandKind::digital_shift, RandKind::permutation, RandKind::lms,
                        RandKind::lms_shift, RandKind::nus}) {
    DnetConfig cfg = plain_config(1, rand, 21);
    cfg.C = identity_matrices(1, m);
    auto b = dnet_points(cfg, std::size_t{1} << m);
    std::set<std::uint64_t> cells;
    for (std::size_t i = 0; i < b.n; ++i)
      cells.insert(b.digit_word(0, i, 0) >> (b.digit_t_max - m));
    REQUIRE(cells.size() == b.n);  // exactly one point per dyadic interval
  }
}

TEST_CASE("randomizations preserve marginal uniformity (first k bits)") {
  const std::size_t n = 1 << 12;
  const std::size_t R = 100;
  for (RandKind rand : {RandKind::lms_shift, RandKind::nus}) {
    DnetConfig cfg = plain_config(2, rand, 2025);
    cfg.R = R;
    auto b = dnet_points(cfg, n);
    for (unsigned j = 0; j < 2; ++j) {
      std::vector<double> samples;
      samples.reserve(n * R);
      for (std::size_t r = 0; r < R; ++r)
        for (std::size_t i = 0; i < n; ++i) samples.push_back(b.at(r, i, j));
      for (unsigned k = 1; k <= 6; ++k)
        REQUIRE(oracle::uniformity_pvalue(samples, 1u << k) > 0.001);
    }
  }
}

TEST_CASE("exhausted sequence and precision errors") {
  DnetConfig cfg = plain_config(1, RandKind::none);
  cfg.C = identity_matrices(1, 4);
  REQUIRE_THROWS_AS(dnet_points(cfg, 17), std::out_of_range);

  DnetConfig narrow = plain_config(1, RandKind::digital_shift);
  narrow.C = identity_matrices(1, 10);
  narrow.t_points = 6;  // below the matrices' precision
  REQUIRE_THROWS_AS(dnet_points(narrow, 4), precision_error);
}

TEST_CASE("replications differ and reproduce") {
  DnetConfig cfg = plain_config(2, RandKind::lms_shift, 77);
  cfg.R = 2;
  auto a = dnet_points(cfg, 32);
  auto b = dnet_points(cfg, 32);
  REQUIRE(a.x == b.x);
  bool any_diff = false;
  for (std::size_t i = 0; i < 32 && !any_diff; ++i)
    any_diff = a.at(0, i, 0) != a.at(1, i, 0);
  REQUIRE(any_diff);
}
