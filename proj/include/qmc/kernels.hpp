#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qmc/digits.hpp"
#include "qmc/errors.hpp"

namespace qmc {

/// A point in [0,1) with an exact t_max-bit binary expansion.
/// word holds the digits MSB-first: value = word / 2^t_max.
struct DyadicPoint {
  std::uint64_t word = 0;
  unsigned t_max = 1;

  double value() const noexcept { return std::ldexp(static_cast<double>(word), -static_cast<int>(t_max)); }

  static DyadicPoint from_double(double x, unsigned t_max) {
    if (t_max == 0 || t_max > 64) throw std::invalid_argument("dyadic: t_max in [1,64]");
    if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("dyadic: x must be in [0,1)");
    double scaled = std::ldexp(x, static_cast<int>(t_max));
    double rounded = std::nearbyint(scaled);
    if (scaled != rounded)
      throw precision_error("value has no exact binary expansion at the requested precision");
    return {static_cast<std::uint64_t>(rounded), t_max};
  }

  /// Digital difference x (-) y, i.e. digitwise subtraction mod 2 = XOR.
  friend DyadicPoint operator^(DyadicPoint a, DyadicPoint b) {
    if (a.t_max != b.t_max) throw precision_error("dyadic xor: mismatched precision");
    return {a.word ^ b.word, a.t_max};
  }
};

/// Bernoulli polynomials of even degree 2, 4, 6.
inline double bernoulli_even(unsigned degree, double x) {
  switch (degree) {
    case 2: return (x - 1.0) * x + 1.0 / 6.0;
    case 4: return ((x - 2.0) * x + 1.0) * x * x - 1.0 / 30.0;
    case 6: return (((x - 3.0) * x + 2.5) * x * x - 0.5) * x * x + 1.0 / 42.0;
    default: throw std::invalid_argument("bernoulli_even: degree must be 2, 4 or 6");
  }
}

/// Shift-invariant kernel of smoothness alpha in {1,2,3}:
/// (2 pi)^(2a) / ((-1)^(a+1) (2a)!) * B_{2a}((x - x') mod 1).
inline double si_kernel_1d(unsigned alpha, double x, double xp) {
  double delta = x - xp;
  delta -= std::floor(delta);
  if (delta >= 1.0) delta = 0.0;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  switch (alpha) {
    case 1: return 2.0 * pi2 * bernoulli_even(2, delta);
    case 2: return -(2.0 / 3.0) * pi2 * pi2 * bernoulli_even(4, delta);
    case 3: return (4.0 / 45.0) * pi2 * pi2 * pi2 * bernoulli_even(6, delta);
    default: throw std::invalid_argument("si_kernel_1d: alpha must be 1, 2 or 3");
  }
}

namespace detail {

// Reverse the low t bits of k so that bit a of k lands on the digit of
// weight 2^-(a+1) inside an MSB-first digit word.
inline std::uint64_t reverse_low_bits(std::uint64_t k, unsigned t) {
  std::uint64_t r = 0;
  for (unsigned q = 0; q < t; ++q) {
    r = (r << 1) | (k & 1);
    k >>= 1;
  }
  return r;
}

}  // namespace detail

/// Walsh function wal_k at a dyadic point, base 2: the product of
/// (-1)^(digit a+1 of x) over the set bits a of k. Bits of k at or beyond
/// x's precision meet zero digits and contribute +1.
inline int walsh_sign(std::uint64_t k, DyadicPoint x) {
  unsigned parity = 0;
  while (k) {
    unsigned a = static_cast<unsigned>(__builtin_ctzll(k));
    if (a < x.t_max) parity ^= static_cast<unsigned>((x.word >> (x.t_max - 1 - a)) & 1u);
    k &= k - 1;
  }
  return parity ? -1 : 1;
}

/// General-base Walsh function: exp(2 pi i / b * sum_l k_{a_l} x_{a_l + 1})
/// with x given by its fraction digits (depth t = weight b^-(t+1)).
inline std::complex<double> walsh(std::uint64_t k, std::span<const std::uint8_t> x_digits,
                                  unsigned base) {
  require_prime_base(base);
  if (base == 2) {
    unsigned parity = 0;
    for (unsigned a = 0; k != 0; ++a, k /= 2) {
      unsigned ka = static_cast<unsigned>(k % 2);
      unsigned xa = a < x_digits.size() ? x_digits[a] : 0;
      parity ^= (ka & xa) & 1u;
    }
    return {parity ? -1.0 : 1.0, 0.0};
  }
  double acc = 0;
  for (unsigned a = 0; k != 0; ++a, k /= base) {
    unsigned ka = static_cast<unsigned>(k % base);
    unsigned xa = a < x_digits.size() ? x_digits[a] : 0;
    acc += static_cast<double>(ka) * static_cast<double>(xa);
  }
  double angle = 2.0 * std::numbers::pi * acc / static_cast<double>(base);
  return {std::cos(angle), std::sin(angle)};
}

/// Digit-weight function: sum of (a_l + 1) over the min(alpha, #k) most
/// significant nonzero digit positions a_1 > a_2 > ... of k.
inline unsigned mu_alpha(std::uint64_t k, unsigned alpha) {
  unsigned sum = 0, taken = 0;
  while (k && taken < alpha) {
    unsigned a = 63u - static_cast<unsigned>(__builtin_clzll(k));
    sum += a + 1;
    ++taken;
    k &= ~(std::uint64_t{1} << a);
  }
  return sum;
}

/// Truncated Walsh series sum_{1 <= k <= k_max} wal_k(x) / 2^mu_alpha(k):
/// the brute-force route to the digitally-shift-invariant kernels. The
/// argument is the digital difference x (-) x'.
inline double dsi_kernel_series(unsigned alpha, DyadicPoint x, std::uint64_t k_max) {
  if (alpha == 0) throw std::invalid_argument("dsi series: alpha >= 1");
  double acc = 0.0;
  for (std::uint64_t k = 1; k <= k_max; ++k)
    acc += static_cast<double>(walsh_sign(k, x)) * std::ldexp(1.0, -static_cast<int>(mu_alpha(k, alpha)));
  return acc;
}

/// Order-1 DSI kernel. No closed form is provided here; the truncated series
/// (positive, slowly growing at x = 0) is the definition this library exposes.
inline double dsi_kernel_order1(DyadicPoint x, std::uint64_t k_max) {
  return dsi_kernel_series(1, x, k_max);
}

namespace detail {

// beta(x) = -floor(log2 x) = 1-based position of the first nonzero digit;
// 0 for x = 0 by convention.
inline unsigned dyadic_beta(DyadicPoint x) {
  if (x.word == 0) return 0;
  unsigned top = 63u - static_cast<unsigned>(__builtin_clzll(x.word));
  return x.t_max - top;
}

// sum_{a>=0} wal_{2^a}(x) / 8^a: exact finite part over the stored digits
// plus the geometric tail where every deeper digit is zero.
inline double rademacher_cubic_sum(DyadicPoint x) {
  double acc = 0.0;
  for (unsigned a = 0; a < x.t_max; ++a) {
    int sign = ((x.word >> (x.t_max - 1 - a)) & 1u) ? -1 : 1;
    acc += sign * std::ldexp(1.0, -3 * static_cast<int>(a));
  }
  acc += std::ldexp(1.0, -3 * static_cast<int>(x.t_max)) * (8.0 / 7.0);
  return acc;
}

}  // namespace detail

/// Closed forms of the DSI kernels of smoothness 2, 3, 4 in base 2, with
/// beta(x) = -floor(log2 x), t_nu(x) = 2^(-nu beta(x)), both 0 at x = 0.
/// The argument is the digital difference x (-) x'.
inline double dsi_kernel_1d(unsigned alpha, DyadicPoint xd) {
  const double x = xd.value();
  const unsigned beta_i = detail::dyadic_beta(xd);
  const double beta = static_cast<double>(beta_i);
  const double t1 = xd.word == 0 ? 0.0 : std::ldexp(1.0, -static_cast<int>(beta_i));
  const double t2 = t1 * t1;
  const double t3 = t2 * t1;
  switch (alpha) {
    case 2:
      return -1.0 - beta * x + 2.5 * (1.0 - t1);
    case 3:
      return -1.0 + beta * x * x - 5.0 * (1.0 - t1) * x + (43.0 / 18.0) * (1.0 - t2);
    case 4:
      return -1.0 - (2.0 / 3.0) * beta * x * x * x + 5.0 * (1.0 - t1) * x * x -
             (43.0 / 9.0) * (1.0 - t2) * x + (701.0 / 294.0) * (1.0 - t3) +
             beta * (detail::rademacher_cubic_sum(xd) / 48.0 - 1.0 / 42.0);
    default:
      throw std::invalid_argument("dsi_kernel_1d: closed forms cover alpha in {2,3,4}");
  }
}

enum class KernelFamily { si_bernoulli, dsi_walsh };

inline const char* to_string(KernelFamily f) {
  return f == KernelFamily::si_bernoulli ? "si-bernoulli" : "dsi-walsh";
}

/// Product/subset-weighted d-dimensional kernel specification.
struct KernelSpec {
  KernelFamily family = KernelFamily::si_bernoulli;
  std::vector<unsigned> alpha;        // per-dimension smoothness
  double gamma = 1.0;                 // global scale
  std::vector<double> eta;            // product weights, one per dimension
  std::vector<double> subset_weights; // optional, size 2^d, index = subset bitmask
  std::uint64_t series_k_max = std::uint64_t{1} << 20;  // for DSI alpha = 1

  std::size_t dimension() const noexcept { return alpha.size(); }

  static KernelSpec product(KernelFamily family, std::vector<unsigned> alpha, double gamma,
                            std::vector<double> eta) {
    KernelSpec s;
    s.family = family;
    s.alpha = std::move(alpha);
    s.gamma = gamma;
    s.eta = std::move(eta);
    s.validate();
    return s;
  }

  void validate() const {
    const std::size_t d = alpha.size();
    if (d == 0) throw std::invalid_argument("kernel: dimension must be >= 1");
    if (eta.size() != d) throw std::invalid_argument("kernel: eta size mismatch");
    if (!(gamma > 0)) throw std::invalid_argument("kernel: gamma must be positive");
    for (double e : eta)
      if (!(e >= 0)) throw std::invalid_argument("kernel: weights must be nonnegative");
    for (unsigned a : alpha) {
      if (family == KernelFamily::si_bernoulli && (a < 1 || a > 3))
        throw std::invalid_argument("si kernel: alpha in {1,2,3}");
      if (family == KernelFamily::dsi_walsh && (a < 1 || a > 4))
        throw std::invalid_argument("dsi kernel: alpha in {1,2,3,4}");
    }
    if (!subset_weights.empty()) {
      if (d > 10) throw std::invalid_argument("subset weights supported for d <= 10");
      if (subset_weights.size() != (std::size_t{1} << d))
        throw std::invalid_argument("subset weights must cover all 2^d subsets");
    }
  }

  double kernel_1d(unsigned j, double x, double xp) const {
    if (family == KernelFamily::si_bernoulli) return si_kernel_1d(alpha[j], x, xp);
    throw std::invalid_argument("dsi kernel requires dyadic inputs");
  }
};

namespace detail {

template <class Eval1d>
double weighted_combine(const KernelSpec& spec, Eval1d&& k1d) {
  const std::size_t d = spec.dimension();
  if (!spec.subset_weights.empty()) {
    std::vector<double> kj(d);
    for (std::size_t j = 0; j < d; ++j) kj[j] = k1d(j);
    double acc = 0.0;
    for (std::size_t u = 0; u < spec.subset_weights.size(); ++u) {
      double prod = 1.0;
      for (std::size_t j = 0; j < d; ++j)
        if (u & (std::size_t{1} << j)) prod *= kj[j];
      acc += spec.subset_weights[u] * prod;
    }
    return spec.gamma * acc;
  }
  double prod = 1.0;
  for (std::size_t j = 0; j < d; ++j) prod *= 1.0 + spec.eta[j] * k1d(j);
  return spec.gamma * prod;
}

inline double dsi_1d_dispatch(const KernelSpec& spec, std::size_t j, DyadicPoint diff) {
  if (spec.alpha[j] == 1) return dsi_kernel_order1(diff, spec.series_k_max);
  return dsi_kernel_1d(spec.alpha[j], diff);
}

}  // namespace detail

/// Kernel evaluation on dyadic inputs (required for the DSI family; also
/// valid for SI).
inline double kernel_eval(const KernelSpec& spec, std::span<const DyadicPoint> x,
                          std::span<const DyadicPoint> xp) {
  spec.validate();
  if (x.size() != spec.dimension() || xp.size() != spec.dimension())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  if (spec.family == KernelFamily::dsi_walsh) {
    return detail::weighted_combine(
        spec, [&](std::size_t j) { return detail::dsi_1d_dispatch(spec, j, x[j] ^ xp[j]); });
  }
  return detail::weighted_combine(
      spec, [&](std::size_t j) { return si_kernel_1d(spec.alpha[j], x[j].value(), xp[j].value()); });
}

/// Kernel evaluation on real coordinates. DSI inputs must be exactly dyadic
/// at the requested precision; anything else is a precision error.
inline double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                          std::span<const double> xp, unsigned dyadic_t_max = 53) {
  spec.validate();
  if (x.size() != spec.dimension() || xp.size() != spec.dimension())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  if (spec.family == KernelFamily::si_bernoulli) {
    return detail::weighted_combine(
        spec, [&](std::size_t j) { return si_kernel_1d(spec.alpha[j], x[j], xp[j]); });
  }
  return detail::weighted_combine(spec, [&](std::size_t j) {
    DyadicPoint a = DyadicPoint::from_double(x[j], dyadic_t_max);
    DyadicPoint b = DyadicPoint::from_double(xp[j], dyadic_t_max);
    return detail::dsi_1d_dispatch(spec, j, a ^ b);
  });
}

/// Analytic kernel integrals for the built-in mean-zero families:
/// int K(u, x) du = gamma for every x, and the double integral equals gamma.
struct KernelIntegrals {
  double double_integral = 1.0;
  double column_integral = 1.0;  // constant in x for these kernels
};

inline KernelIntegrals analytic_kernel_integrals(const KernelSpec& spec) {
  return {spec.gamma, spec.gamma};
}

/// Quadrature check of int K(u, x) du for small d, used to verify the
/// analytic value. SI: midpoint rule on a fine grid (the integrand is
/// periodic and piecewise smooth). DSI: exact average over the full dyadic
/// grid at a given depth, which the Walsh series makes exact.
inline double kernel_column_integral_quadrature(const KernelSpec& spec,
                                                std::span<const double> x,
                                                unsigned grid_log2 = 12) {
  spec.validate();
  if (spec.dimension() > 3) throw std::invalid_argument("quadrature check supports d <= 3");
  const std::size_t g = std::size_t{1} << grid_log2;
  const std::size_t d = spec.dimension();
  std::vector<double> u(d);
  std::vector<std::size_t> idx(d, 0);
  const bool dsi = spec.family == KernelFamily::dsi_walsh;
  double acc = 0.0;
  const std::size_t total = [&] {
    std::size_t t = 1;
    for (std::size_t j = 0; j < d; ++j) t *= g;
    return t;
  }();
  for (std::size_t cell = 0; cell < total; ++cell) {
    std::size_t c = cell;
    for (std::size_t j = 0; j < d; ++j) {
      idx[j] = c % g;
      c /= g;
      u[j] = dsi ? static_cast<double>(idx[j]) / static_cast<double>(g)
                 : (static_cast<double>(idx[j]) + 0.5) / static_cast<double>(g);
    }
    acc += kernel_eval(spec, std::span<const double>(u), x, dsi ? grid_log2 : 53);
  }
  return acc / static_cast<double>(total);
}

}  // namespace qmc
