#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmc/digits.hpp"
#include "qmc/point_batch.hpp"
#include "qmc/rng.hpp"

namespace qmc {

/// Rank-1 generating vector plus the largest log2(n) it was constructed for.
struct LatticeGeneratingVector {
  std::vector<std::uint64_t> g;
  unsigned m_max = 20;
  std::string source;

  std::size_t dimension() const noexcept { return g.size(); }
};

/// Built-in generating vector for d <= 8: the leading components of the
/// embedded base-2 rule of Cools, Kuo & Nuyens (2006), "Constructing embedded
/// lattice rules for multivariate integration", valid for n up to 2^20.
inline LatticeGeneratingVector default_lattice_vector(unsigned d) {
  static const std::uint64_t ckn[8] = {1,      182667, 469891, 498753,
                                       110745, 446247, 250185, 118627};
  if (d == 0 || d > 8)
    throw std::invalid_argument("default lattice vector covers 1 <= d <= 8; load a file for larger d");
  LatticeGeneratingVector v;
  v.g.assign(ckn, ckn + d);
  v.m_max = 20;
  v.source = "builtin-cools-kuo-nuyens-2006";
  return v;
}

/// R independent shift vectors in [0,1)^d.
struct ShiftSet {
  std::size_t R = 0, d = 0;
  std::vector<double> delta;  // (r, j)

  double at(std::size_t r, std::size_t j) const { return delta[r * d + j]; }
};

inline ShiftSet random_shifts(std::size_t d, std::size_t R, std::uint64_t seed) {
  ShiftSet s;
  s.R = R;
  s.d = d;
  s.delta.resize(R * d);
  RngKey key = RngKey(seed).child(rng_label::lattice_shift);
  for (std::size_t r = 0; r < R; ++r) {
    RngKey kr = key.child(r);
    for (std::size_t j = 0; j < d; ++j) s.delta[r * d + j] = kr.uniform01(j);
  }
  return s;
}

// Fractional part with the half-open contract [0, 1): 1.0 folds to 0.0.
inline double frac01(double x) noexcept {
  double f = x - std::floor(x);
  return f < 1.0 ? f : 0.0;
}

/// Lattice points. Radical-inverse order is the extensible sequence
/// z_i = v(i) g mod 1; linear order (requires n = base^m) is z_i = i g / n
/// mod 1. Both orders span the same point set when n = base^m. With a shift
/// set, replication r uses x_i = (z_i + Delta_r) mod 1.
inline PointBatch lattice_points(const LatticeGeneratingVector& gv, std::size_t n,
                                 PointOrder order, const ShiftSet* shifts,
                                 unsigned base = 2) {
  require_prime_base(base);
  if (order == PointOrder::gray_code)
    throw std::invalid_argument("lattice_points: order must be linear or radical-inverse");
  const std::size_t d = gv.dimension();
  if (d == 0) throw std::invalid_argument("lattice_points: empty generating vector");
  if (shifts && shifts->R > 0 && shifts->d != d)
    throw std::invalid_argument("lattice_points: shift dimension mismatch");

  unsigned m = 0;
  if (order == PointOrder::linear) {
    std::uint64_t p = 1;
    while (p < n) {
      p *= base;
      ++m;
    }
    if (p != n) throw std::invalid_argument("lattice_points: linear order requires n = base^m");
  } else {
    while (ipow_checked(base, m) < n && m < max_digits(base)) ++m;
  }

  PointBatch b;
  b.R = shifts && shifts->R > 0 ? shifts->R : 1;
  b.n = n;
  b.d = d;
  b.generator = Generator::lattice;
  b.order = order;
  b.base = base;
  b.rand = (shifts && shifts->R > 0) ? RandKind::shift : RandKind::none;
  b.source = gv.source;
  b.x.resize(b.R * n * d);

  std::vector<double> z(d);
  for (std::size_t i = 0; i < n; ++i) {
    if (order == PointOrder::linear) {
      for (std::size_t j = 0; j < d; ++j) {
        // (i g_j mod n) / n stays exact in integer arithmetic.
        auto prod = static_cast<unsigned __int128>(i) * (gv.g[j] % n);
        z[j] = static_cast<double>(static_cast<std::uint64_t>(prod % n)) / static_cast<double>(n);
      }
    } else {
      double vi = radical_inverse(i, base, m == 0 ? 1 : m);
      for (std::size_t j = 0; j < d; ++j) z[j] = frac01(vi * static_cast<double>(gv.g[j]));
    }
    for (std::size_t r = 0; r < b.R; ++r) {
      for (std::size_t j = 0; j < d; ++j) {
        double v = z[j];
        if (b.rand == RandKind::shift) v = frac01(v + shifts->at(r, j));
        b.at(r, i, j) = v;
      }
    }
  }
  return b;
}

}  // namespace qmc
