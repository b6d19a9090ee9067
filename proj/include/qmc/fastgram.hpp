#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmc/errors.hpp"
#include "qmc/kernels.hpp"
#include "qmc/point_batch.hpp"
#include "qmc/transforms.hpp"

namespace qmc {

enum class GramKind { si_lattice, dsi_dnet };

/// Eigendecomposition of a structured Gram matrix, held as the eigenvalue
/// vector plus the first Gram column it was computed from. The conjugated
/// fast transform of the first column, scaled by sqrt(n), gives the
/// eigenvalues; matvec and solve then cost one forward and one inverse
/// transform each.
struct SpectralGram {
  GramKind kind = GramKind::dsi_dnet;
  unsigned m = 0;
  std::size_t n = 1;
  std::vector<cplx> lambda_c;   // si_lattice (conjugate-symmetric, real for symmetric kernels)
  std::vector<double> lambda_r; // dsi_dnet
  std::vector<double> k1;       // first Gram column K(x_i, x_0)
  double gamma = 1.0;           // kernel scale, for discrepancy integrals
  std::string fingerprint;      // generator/kernel summary for diagnostics
};

namespace detail {

inline void require_fast_pairing(const KernelSpec& spec, const PointBatch& pts) {
  if (pts.R == 0 || pts.n == 0) throw std::invalid_argument("gram: empty point batch");
  if (spec.dimension() != pts.d) throw std::invalid_argument("gram: dimension mismatch");
  if (!is_pow2(pts.n)) throw structure_error("gram: n must be a power of 2");
  if (pts.order != PointOrder::radical_inverse)
    throw structure_error("gram: points must be generated in radical-inverse order");
  if (pts.base != 2)
    throw structure_error("gram: the fast pairings require base-2 point sets");
  if (spec.family == KernelFamily::si_bernoulli) {
    if (pts.generator != Generator::lattice)
      throw structure_error("gram: shift-invariant kernels pair with rank-1 lattices");
  } else {
    if (pts.generator != Generator::dnet)
      throw structure_error("gram: digitally-shift-invariant kernels pair with base-2 nets");
    if (pts.rand == RandKind::nus)
      throw structure_error("gram: nested uniform scrambling breaks the fast Gram structure");
    if (!pts.has_digits()) throw precision_error("gram: point batch carries no exact digits");
  }
}

}  // namespace detail

/// Build the spectral form of the Gram matrix of `spec` over the first
/// replication of `pts`. Cost: n kernel evaluations plus one fast transform.
inline SpectralGram gram_build(const KernelSpec& spec, const PointBatch& pts,
                               std::size_t replication = 0) {
  spec.validate();
  detail::require_fast_pairing(spec, pts);
  if (replication >= pts.R) throw std::out_of_range("gram: replication index");

  SpectralGram G;
  G.n = pts.n;
  G.m = log2_exact(pts.n);
  G.gamma = spec.gamma;
  G.fingerprint = std::string(to_string(pts.generator)) + "/" + to_string(pts.rand) + "/" +
                  to_string(spec.family);
  G.k1.resize(pts.n);

  if (spec.family == KernelFamily::si_bernoulli) {
    G.kind = GramKind::si_lattice;
    auto x0 = pts.point(replication, 0);
    for (std::size_t i = 0; i < pts.n; ++i)
      G.k1[i] = kernel_eval(spec, pts.point(replication, i), x0);
    G.lambda_c.assign(G.k1.begin(), G.k1.end());
    fftbr(G.lambda_c);
    const double scale = std::sqrt(static_cast<double>(pts.n));
    for (auto& v : G.lambda_c) v *= scale;
  } else {
    G.kind = GramKind::dsi_dnet;
    const unsigned t = pts.digit_t_max;
    std::vector<DyadicPoint> diff(pts.d);
    const std::vector<DyadicPoint> zeros(pts.d, DyadicPoint{0, t});
    for (std::size_t i = 0; i < pts.n; ++i) {
      for (std::size_t j = 0; j < pts.d; ++j)
        diff[j] = DyadicPoint{pts.digit_word(replication, i, j) ^
                                  pts.digit_word(replication, 0, j),
                              t};
      G.k1[i] = kernel_eval(spec, std::span<const DyadicPoint>(diff),
                            std::span<const DyadicPoint>(zeros));
    }
    G.lambda_r = G.k1;
    fwht(std::span<double>(G.lambda_r));
    const double scale = std::sqrt(static_cast<double>(pts.n));
    for (auto& v : G.lambda_r) v *= scale;
  }
  return G;
}

/// K y at O(n log n): transform, scale by the eigenvalues, transform back.
inline std::vector<double> gram_matvec(const SpectralGram& G, std::span<const double> y) {
  if (y.size() != G.n) throw std::invalid_argument("gram_matvec: length mismatch");
  if (G.kind == GramKind::dsi_dnet) {
    std::vector<double> v(y.begin(), y.end());
    fwht(std::span<double>(v));
    for (std::size_t i = 0; i < G.n; ++i) v[i] *= G.lambda_r[i];
    fwht(std::span<double>(v));
    return v;
  }
  std::vector<cplx> v(y.begin(), y.end());
  fftbr(v);
  for (std::size_t i = 0; i < G.n; ++i) v[i] *= G.lambda_c[i];
  ifftbr(v);
  std::vector<double> out(G.n);
  for (std::size_t i = 0; i < G.n; ++i) out[i] = v[i].real();
  return out;
}

inline double singularity_tolerance(const SpectralGram& G) {
  double mx = 0.0;
  if (G.kind == GramKind::dsi_dnet) {
    for (double v : G.lambda_r) mx = std::max(mx, std::abs(v));
  } else {
    for (const cplx& v : G.lambda_c) mx = std::max(mx, std::abs(v));
  }
  return 1e-12 * mx;
}

/// K^{-1} y at O(n log n). Throws singular_gram_error (with the eigenvalue
/// index) when any |lambda_i| falls under 1e-12 of the largest magnitude.
inline std::vector<double> gram_solve(const SpectralGram& G, std::span<const double> y) {
  if (y.size() != G.n) throw std::invalid_argument("gram_solve: length mismatch");
  const double tol = singularity_tolerance(G);
  if (G.kind == GramKind::dsi_dnet) {
    for (std::size_t i = 0; i < G.n; ++i)
      if (std::abs(G.lambda_r[i]) <= tol)
        throw singular_gram_error("gram_solve: eigenvalue below tolerance", i);
    std::vector<double> v(y.begin(), y.end());
    fwht(std::span<double>(v));
    for (std::size_t i = 0; i < G.n; ++i) v[i] /= G.lambda_r[i];
    fwht(std::span<double>(v));
    return v;
  }
  for (std::size_t i = 0; i < G.n; ++i)
    if (std::abs(G.lambda_c[i]) <= tol)
      throw singular_gram_error("gram_solve: eigenvalue below tolerance", i);
  std::vector<cplx> v(y.begin(), y.end());
  fftbr(v);
  for (std::size_t i = 0; i < G.n; ++i) v[i] /= G.lambda_c[i];
  ifftbr(v);
  std::vector<double> out(G.n);
  for (std::size_t i = 0; i < G.n; ++i) out[i] = v[i].real();
  return out;
}

/// Double the point count: `new_k1` holds K(x_i, x_0) for the next 2^m
/// sequence members. Only the new half is transformed; one butterfly pass
/// merges it with the stored eigenvalues.
inline SpectralGram gram_update_double(const SpectralGram& G, std::span<const double> new_k1) {
  if (new_k1.size() != G.n) throw std::invalid_argument("gram_update_double: wrong column length");
  SpectralGram out;
  out.kind = G.kind;
  out.m = G.m + 1;
  out.n = 2 * G.n;
  out.gamma = G.gamma;
  out.fingerprint = G.fingerprint;
  out.k1.reserve(out.n);
  out.k1.assign(G.k1.begin(), G.k1.end());
  out.k1.insert(out.k1.end(), new_k1.begin(), new_k1.end());

  // lambda_m = sqrt(n) * transform(k1), so the stored eigenvalues are the
  // transform scaled by sqrt(n); the doubled transform picks up sqrt(2n).
  const double root_n = std::sqrt(static_cast<double>(G.n));
  const double root_2n = std::sqrt(static_cast<double>(out.n));
  if (G.kind == GramKind::dsi_dnet) {
    std::vector<double> tilde(G.n);
    for (std::size_t i = 0; i < G.n; ++i) tilde[i] = G.lambda_r[i] / root_n;
    out.lambda_r = fwht_update_double(tilde, new_k1);
    for (auto& v : out.lambda_r) v *= root_2n;
  } else {
    std::vector<cplx> tilde(G.n);
    for (std::size_t i = 0; i < G.n; ++i) tilde[i] = G.lambda_c[i] / root_n;
    std::vector<cplx> nk(new_k1.begin(), new_k1.end());
    out.lambda_c = fftbr_update_double(tilde, nk);
    for (auto& v : out.lambda_c) v *= root_2n;
  }
  return out;
}

/// Cubature discrepancy I2 - 2 w'kappa + w'(K w) for the stored kernel.
/// `kappa` are the kernel column integrals; the built-in mean-zero kernels
/// have I2 = kappa_i = gamma exactly.
inline double discrepancy(const SpectralGram& G, std::span<const double> weights,
                          double double_integral, std::span<const double> kappa) {
  if (weights.size() != G.n || kappa.size() != G.n)
    throw std::invalid_argument("discrepancy: length mismatch");
  auto Kw = gram_matvec(G, weights);
  double cross = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < G.n; ++i) {
    cross += weights[i] * kappa[i];
    quad += weights[i] * Kw[i];
  }
  return double_integral - 2.0 * cross + quad;
}

inline double discrepancy(const SpectralGram& G, std::span<const double> weights) {
  std::vector<double> kappa(G.n, G.gamma);
  return discrepancy(G, weights, G.gamma, kappa);
}

/// Weights minimizing the discrepancy: w* = K^{-1} kappa.
inline std::vector<double> optimal_weights(const SpectralGram& G, std::span<const double> kappa) {
  return gram_solve(G, kappa);
}

inline std::vector<double> optimal_weights(const SpectralGram& G) {
  std::vector<double> kappa(G.n, G.gamma);
  return optimal_weights(G, kappa);
}

}  // namespace qmc
