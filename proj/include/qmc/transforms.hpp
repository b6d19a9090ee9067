#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qmc/errors.hpp"

namespace qmc {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

inline unsigned log2_exact(std::size_t n) {
  if (!is_pow2(n)) throw std::invalid_argument("length must be a power of 2");
  unsigned m = 0;
  while ((std::size_t{1} << m) < n) ++m;
  return m;
}

namespace detail {

// Quarter-wave twiddle table for size n: w[t] = exp(-2 pi i t / n), t < n/4,
// shared by all stages of one transform via stride access. Cached per size.
inline const std::vector<cplx>& twiddles(std::size_t n) {
  thread_local std::vector<cplx> table;
  thread_local std::size_t table_n = 0;
  if (table_n != n) {
    std::size_t quarter = n / 4 + 1;
    table.resize(quarter);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t t = 0; t < quarter; ++t) {
      double a = step * static_cast<double>(t);
      table[t] = cplx(std::cos(a), std::sin(a));
    }
    table_n = n;
  }
  return table;
}

// exp(-2 pi i t / n) from the quarter-wave table, t < n.
inline cplx twiddle_at(const std::vector<cplx>& tab, std::size_t t, std::size_t n) {
  // Octant folding: i^k rotations of the first quarter.
  std::size_t q = n / 4;
  if (n < 4) {  // n in {1, 2}: t is 0 or (n=2, t=1 never used: twiddles are +-1)
    return t == 0 ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
  }
  std::size_t k = t / q;  // 0..3
  cplx w = tab[t - k * q];
  switch (k) {
    case 0: return w;
    case 1: return cplx(w.imag(), -w.real());
    case 2: return -w;
    default: return cplx(-w.imag(), w.real());
  }
}

}  // namespace detail

/// Orthonormal fast Walsh-Hadamard transform, in place. Each butterfly is
/// (a, b) -> ((a+b)/sqrt2, (a-b)/sqrt2); the map is symmetric and involutive.
template <class T>
void fwht(std::span<T> y) {
  const std::size_t n = y.size();
  log2_exact(n);
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t start = 0; start < n; start += 2 * len) {
      for (std::size_t t = 0; t < len; ++t) {
        T a = y[start + t];
        T b = y[start + len + t];
        y[start + t] = (a + b) * inv_sqrt2;
        y[start + len + t] = (a - b) * inv_sqrt2;
      }
    }
  }
}

inline void fwht(std::vector<double>& y) { fwht(std::span<double>(y)); }
inline void fwht(std::vector<cplx>& y) { fwht(std::span<cplx>(y)); }

/// Orthonormal FFT in bit-reversed order, in place: the decimation-in-time
/// butterfly network run on the input as-is, i.e. with the usual initial
/// bit-reversal reorder skipped, and with a 1/sqrt2 scaling per stage.
/// Equivalently, output_i = (1/sqrt n) sum_j exp(-2 pi i * i * rev(j) / n) y_j.
inline void fftbr(std::span<cplx> y) {
  const std::size_t n = y.size();
  log2_exact(n);
  if (n == 1) return;
  const auto& tab = detail::twiddles(n);
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  for (std::size_t len = 1; len < n; len <<= 1) {
    // Stage butterflies pair (i, i+len); twiddle for offset t is
    // exp(-pi i t / len) = exp(-2 pi i * (t * n / (2 len)) / n).
    const std::size_t stride = n / (2 * len);
    for (std::size_t start = 0; start < n; start += 2 * len) {
      for (std::size_t t = 0; t < len; ++t) {
        cplx w = detail::twiddle_at(tab, t * stride, n);
        cplx a = y[start + t];
        cplx b = y[start + len + t] * w;
        y[start + t] = (a + b) * inv_sqrt2;
        y[start + len + t] = (a - b) * inv_sqrt2;
      }
    }
  }
}

inline void fftbr(std::vector<cplx>& y) { fftbr(std::span<cplx>(y)); }

/// Exact inverse of fftbr: the same network traversed in the other direction
/// with each butterfly inverted.
inline void ifftbr(std::span<cplx> y) {
  const std::size_t n = y.size();
  log2_exact(n);
  if (n == 1) return;
  const auto& tab = detail::twiddles(n);
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  for (std::size_t len = n >> 1; len >= 1; len >>= 1) {
    const std::size_t stride = n / (2 * len);
    for (std::size_t start = 0; start < n; start += 2 * len) {
      for (std::size_t t = 0; t < len; ++t) {
        cplx w = detail::twiddle_at(tab, t * stride, n);
        cplx a = y[start + t];
        cplx b = y[start + len + t];
        y[start + t] = (a + b) * inv_sqrt2;
        y[start + len + t] = std::conj(w) * ((a - b) * inv_sqrt2);
      }
    }
  }
}

inline void ifftbr(std::vector<cplx>& y) { ifftbr(std::span<cplx>(y)); }

/// Row-wise application over R stacked sequences of length row_len each.
template <class F>
void apply_rows(F&& transform, std::span<double> data, std::size_t row_len) {
  if (row_len == 0 || data.size() % row_len != 0)
    throw std::invalid_argument("apply_rows: data size not a multiple of row length");
  for (std::size_t off = 0; off < data.size(); off += row_len)
    transform(data.subspan(off, row_len));
}

inline void fwht_rows(std::span<double> data, std::size_t row_len) {
  apply_rows([](std::span<double> r) { fwht(r); }, data, row_len);
}

inline void fftbr_rows(std::span<cplx> data, std::size_t row_len) {
  if (row_len == 0 || data.size() % row_len != 0)
    throw std::invalid_argument("fftbr_rows: data size not a multiple of row length");
  for (std::size_t off = 0; off < data.size(); off += row_len)
    fftbr(data.subspan(off, row_len));
}

inline void ifftbr_rows(std::span<cplx> data, std::size_t row_len) {
  if (row_len == 0 || data.size() % row_len != 0)
    throw std::invalid_argument("ifftbr_rows: data size not a multiple of row length");
  for (std::size_t off = 0; off < data.size(); off += row_len)
    ifftbr(data.subspan(off, row_len));
}

enum class TransformKind { fftbr_complex, fwht_real };

/// Twiddle vector for the one-level doubling merge at level m:
/// exp(-pi i k / 2^m) for k < 2^m in the Fourier case, all ones for FWHT.
inline std::vector<cplx> omega_vector(unsigned m) {
  std::size_t half = std::size_t{1} << m;
  std::vector<cplx> w(half);
  const double step = -std::numbers::pi / static_cast<double>(half);
  for (std::size_t k = 0; k < half; ++k) {
    double a = step * static_cast<double>(k);
    w[k] = cplx(std::cos(a), std::sin(a));
  }
  return w;
}

/// A transformed sequence at level m (length 2^m), tagged with its kind.
struct SpectralVector {
  TransformKind kind = TransformKind::fwht_real;
  unsigned m = 0;
  std::vector<double> re;    // fwht_real payload
  std::vector<cplx> cx;      // fftbr_complex payload

  std::size_t size() const noexcept {
    return kind == TransformKind::fwht_real ? re.size() : cx.size();
  }
};

/// Merge the transform of the first 2^m samples with 2^m new samples into the
/// level-(m+1) transform: only the new half is transformed, then one butterfly
/// pass with the level-m twiddle vector combines the halves.
inline std::vector<cplx> fftbr_update_double(std::span<const cplx> tilde_y,
                                             std::span<const cplx> y_new) {
  const std::size_t half = tilde_y.size();
  if (y_new.size() != half) throw std::invalid_argument("update_double: size mismatch");
  const unsigned m = log2_exact(half);
  std::vector<cplx> out(2 * half);
  std::vector<cplx> tn(y_new.begin(), y_new.end());
  fftbr(tn);
  const auto w = omega_vector(m);
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  for (std::size_t k = 0; k < half; ++k) {
    cplx b = w[k] * tn[k];
    out[k] = (tilde_y[k] + b) * inv_sqrt2;
    out[half + k] = (tilde_y[k] - b) * inv_sqrt2;
  }
  return out;
}

inline std::vector<double> fwht_update_double(std::span<const double> tilde_y,
                                              std::span<const double> y_new) {
  const std::size_t half = tilde_y.size();
  if (y_new.size() != half) throw std::invalid_argument("update_double: size mismatch");
  log2_exact(half);
  std::vector<double> out(2 * half);
  std::vector<double> tn(y_new.begin(), y_new.end());
  fwht(std::span<double>(tn));
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  for (std::size_t k = 0; k < half; ++k) {
    out[k] = (tilde_y[k] + tn[k]) * inv_sqrt2;
    out[half + k] = (tilde_y[k] - tn[k]) * inv_sqrt2;
  }
  return out;
}

inline SpectralVector transform_update_double(const SpectralVector& ty,
                                              std::span<const double> y_new) {
  SpectralVector out;
  out.kind = ty.kind;
  out.m = ty.m + 1;
  if (ty.kind == TransformKind::fwht_real) {
    out.re = fwht_update_double(ty.re, y_new);
  } else {
    std::vector<cplx> yn(y_new.begin(), y_new.end());
    out.cx = fftbr_update_double(ty.cx, yn);
  }
  return out;
}

inline SpectralVector transform_update_double(const SpectralVector& ty,
                                              std::span<const cplx> y_new) {
  if (ty.kind != TransformKind::fftbr_complex)
    throw std::invalid_argument("transform_update_double: complex payload requires fftbr kind");
  SpectralVector out;
  out.kind = ty.kind;
  out.m = ty.m + 1;
  out.cx = fftbr_update_double(ty.cx, y_new);
  return out;
}

}  // namespace qmc
