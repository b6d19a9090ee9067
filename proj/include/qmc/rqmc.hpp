#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qmc/dnet.hpp"
#include "qmc/halton.hpp"
#include "qmc/lattice.hpp"
#include "qmc/point_batch.hpp"
#include "qmc/rng.hpp"

namespace qmc {

/// Componentwise tent map 1 - 2|x - 1/2|. Periodizes an integrand without
/// changing its mean; note 0.5 maps to 1.0, so integrands are evaluated on
/// the closed cube.
inline double baker_transform(double x) noexcept { return 1.0 - 2.0 * std::abs(x - 0.5); }

inline void baker_transform(std::span<double> x) noexcept {
  for (double& v : x) v = baker_transform(v);
}

namespace detail {

// Regularized incomplete beta I_x(a, b) via the standard continued fraction
// (Lentz), with the symmetry switch at x > (a+1)/(a+b+2).
inline double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h;
}

inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

/// CDF of Student's t with nu degrees of freedom.
inline double student_t_cdf(double t, unsigned nu) {
  if (nu < 1) throw std::invalid_argument("student_t_cdf: nu >= 1");
  const double x = static_cast<double>(nu) / (nu + t * t);
  const double half_tail = 0.5 * detail::incomplete_beta(0.5 * nu, 0.5, x);
  return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

/// Inverse CDF of Student's t, by bisection on the beta-function CDF.
/// Absolute error below 1e-8 over the quantiles used for confidence
/// intervals.
inline double student_t_quantile(unsigned nu, double p) {
  if (nu < 1) throw std::invalid_argument("student_t_quantile: nu >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("student_t_quantile: p in (0,1)");
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double target = upper ? p : 1.0 - p;
  double lo = 0.0, hi = 2.0;
  while (student_t_cdf(hi, nu) < target) {
    hi *= 2.0;
    if (hi > 1e18) break;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-10 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, nu) < target ? lo : hi) = mid;
  }
  const double q = 0.5 * (lo + hi);
  return upper ? q : -q;
}

/// A catalog integrand on the closed unit cube with its exact mean when one
/// is derivable.
struct Integrand {
  std::string name;
  unsigned d = 1;
  std::function<double(std::span<const double>)> f;
  std::optional<double> exact_mean;
  std::vector<double> coefficients;
};

namespace detail {

inline std::vector<double> genz_coefficients(unsigned d, double scale, bool inverse_square) {
  std::vector<double> c(d);
  double total = 0.0;
  for (unsigned j = 1; j <= d; ++j) {
    double cj = inverse_square ? 1.0 / (static_cast<double>(j) * j)
                               : std::exp(j * std::log(1e-8) / d);
    c[j - 1] = cj;
    total += cj;
  }
  for (double& v : c) v = scale * v / total;
  return c;
}

// Mean of (1 + c.x)^-(d+1) over the cube by inclusion-exclusion:
// (1/(d! prod c_j)) sum_{v in {0,1}^d} (-1)^|v| / (1 + v.c).
inline double corner_peak_mean(const std::vector<double>& c) {
  const unsigned d = static_cast<unsigned>(c.size());
  double fact = 1.0, prod = 1.0;
  for (unsigned j = 0; j < d; ++j) {
    fact *= j + 1.0;
    prod *= c[j];
  }
  double acc = 0.0;
  for (std::size_t v = 0; v < (std::size_t{1} << d); ++v) {
    double dot = 0.0;
    int sign = 1;
    for (unsigned j = 0; j < d; ++j)
      if (v & (std::size_t{1} << j)) {
        dot += c[j];
        sign = -sign;
      }
    acc += sign / (1.0 + dot);
  }
  return acc / (fact * prod);
}

// Mean of cos(c.x): real part of prod_j (e^{i c_j} - 1) / (i c_j).
inline double oscillatory_mean(const std::vector<double>& c) {
  std::complex<double> prod(1.0, 0.0);
  for (double cj : c) {
    std::complex<double> icj(0.0, cj);
    prod *= (std::exp(icj) - 1.0) / icj;
  }
  return prod.real();
}

}  // namespace detail

/// The six-entry catalog. Fixed-dimension entries reject other d.
inline Integrand integrand_library(const std::string& name, unsigned d) {
  Integrand g;
  g.name = name;
  g.d = d;
  if (name == "simple-d1") {
    if (d != 1) throw std::invalid_argument("simple-d1 is one-dimensional");
    g.f = [](std::span<const double> x) { return x[0] * std::exp(x[0]) - 1.0; };
    g.exact_mean = 0.0;
  } else if (name == "simple-d2") {
    if (d != 2) throw std::invalid_argument("simple-d2 is two-dimensional");
    g.f = [](std::span<const double> x) {
      return x[1] * std::exp(x[0] * x[1]) / (std::numbers::e - 2.0) - 1.0;
    };
    g.exact_mean = 0.0;
  } else if (name == "oakley") {
    if (d != 2) throw std::invalid_argument("oakley is two-dimensional");
    g.f = [](std::span<const double> x) {
      const double t1 = (x[0] - 0.5) / 50.0, t2 = (x[1] - 0.5) / 50.0;
      return 5.0 + t1 + t2 + 2.0 * std::cos(t1) + 2.0 * std::cos(t2);
    };
    g.exact_mean = 5.0 + 400.0 * std::sin(0.01);
  } else if (name == "g-function") {
    if (d == 0) throw std::invalid_argument("g-function needs d >= 1");
    std::vector<double> a(d);
    for (unsigned j = 1; j <= d; ++j) a[j - 1] = (static_cast<double>(j) - 2.0) / 2.0;
    g.coefficients = a;
    g.f = [a](std::span<const double> x) {
      double prod = 1.0;
      for (std::size_t j = 0; j < a.size(); ++j)
        prod *= (std::abs(4.0 * x[j] - 2.0) - a[j]) / (1.0 + a[j]);
      return prod;
    };
    double mean = 1.0;
    for (double aj : a) mean *= (1.0 - aj) / (1.0 + aj);
    g.exact_mean = mean;
  } else if (name == "oscillatory") {
    if (d == 0) throw std::invalid_argument("oscillatory needs d >= 1");
    auto c = detail::genz_coefficients(d, 4.5, false);
    g.coefficients = c;
    g.f = [c](std::span<const double> x) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) dot += c[j] * x[j];
      return std::cos(-dot);
    };
    g.exact_mean = detail::oscillatory_mean(c);
  } else if (name == "corner-peak") {
    if (d == 0) throw std::invalid_argument("corner-peak needs d >= 1");
    auto c = detail::genz_coefficients(d, 0.25, true);
    g.coefficients = c;
    g.f = [c](std::span<const double> x) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) dot += c[j] * x[j];
      return std::pow(1.0 + dot, -(static_cast<double>(c.size()) + 1.0));
    };
    g.exact_mean = detail::corner_peak_mean(c);
  } else {
    throw std::invalid_argument("unknown integrand: " + name);
  }
  return g;
}

inline std::vector<std::string> integrand_catalog() {
  return {"simple-d1", "simple-d2", "oakley", "g-function", "oscillatory", "corner-peak"};
}

/// Sampler configuration shared by the estimators and the CLI.
struct SamplerSpec {
  Generator type = Generator::dnet;
  unsigned d = 1;
  std::uint64_t seed = 0;
  PointOrder order = PointOrder::radical_inverse;
  RandKind rand = RandKind::lms_shift;
  unsigned alpha = 1;
  LmsFamily lms_family = LmsFamily::matousek;
  std::optional<LatticeGeneratingVector> lattice_vector;
  std::optional<GeneratingMatrixSet> matrices;
};

/// One replication of any supported sampler, materializable block by block.
class ReplicationSampler {
 public:
  ReplicationSampler(const SamplerSpec& spec, std::size_t replication) : spec_(spec) {
    switch (spec.type) {
      case Generator::iid:
        key_ = RngKey(spec.seed).child(rng_label::iid).child(replication);
        break;
      case Generator::lattice: {
        gv_ = spec.lattice_vector ? *spec.lattice_vector : default_lattice_vector(spec.d);
        if (gv_.dimension() != spec.d) throw std::invalid_argument("sampler: lattice vector dimension");
        if (spec.rand != RandKind::none && spec.rand != RandKind::shift)
          throw std::invalid_argument("sampler: lattices randomize with shifts");
        RngKey key = RngKey(spec.seed).child(rng_label::lattice_shift).child(replication);
        shift_.resize(spec.d);
        for (unsigned j = 0; j < spec.d; ++j)
          shift_[j] = spec.rand == RandKind::shift ? key.uniform01(j) : 0.0;
        break;
      }
      case Generator::dnet: {
        DnetConfig cfg;
        cfg.d = spec.d;
        cfg.alpha = spec.alpha;
        cfg.order = spec.order == PointOrder::linear ? PointOrder::radical_inverse : spec.order;
        cfg.rand = spec.rand;
        cfg.lms_family = spec.lms_family;
        cfg.seed = spec.seed;
        if (spec.matrices) cfg.C = *spec.matrices;
        dnet_.emplace(cfg, replication);
        break;
      }
      case Generator::halton: {
        HaltonConfig cfg;
        cfg.d = spec.d;
        cfg.rand = spec.rand;
        cfg.seed = spec.seed;
        cfg.interlace_alpha = spec.alpha;
        halton_.emplace(cfg, replication);
        break;
      }
    }
  }

  void fill(std::uint64_t i0, std::size_t count, double* out) const {
    switch (spec_.type) {
      case Generator::iid:
        for (std::size_t k = 0; k < count; ++k)
          for (unsigned j = 0; j < spec_.d; ++j)
            out[k * spec_.d + j] = key_.uniform01((i0 + k) * spec_.d + j);
        break;
      case Generator::lattice: {
        unsigned m = 0;
        while ((std::uint64_t{1} << m) < i0 + count && m < 63) ++m;
        for (std::size_t k = 0; k < count; ++k) {
          const double vi = radical_inverse(i0 + k, 2, m == 0 ? 1 : m);
          for (unsigned j = 0; j < spec_.d; ++j)
            out[k * spec_.d + j] =
                frac01(vi * static_cast<double>(gv_.g[j]) + shift_[j]);
        }
        break;
      }
      case Generator::dnet:
        dnet_->values(i0, count, out);
        break;
      case Generator::halton:
        halton_->values(i0, count, out);
        break;
    }
  }

 private:
  SamplerSpec spec_;
  RngKey key_;
  LatticeGeneratingVector gv_;
  std::vector<double> shift_;
  std::optional<DnetSequence> dnet_;
  std::optional<HaltonSequence> halton_;
};

/// RQMC estimate with per-replication means and a Student's-t interval.
struct RqmcResult {
  double mu_hat = 0.0;
  std::vector<double> rep_means;
  double sigma_hat = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  double level = 0.95;
  std::size_t n = 0;
  std::size_t R = 0;
  bool tolerance_met = true;

  double half_width() const noexcept { return 0.5 * (ci_hi - ci_lo); }
};

namespace detail {

// Neumaier compensated accumulator; keeps replication means reproducible to
// the last bit regardless of how work is scheduled.
struct KahanSum {
  double sum = 0.0, comp = 0.0;

  void add(double v) noexcept {
    double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const noexcept { return sum + comp; }
};

template <class Work>
void parallel_over_replications(std::size_t R, unsigned threads, Work&& work) {
  if (threads <= 1 || R <= 1) {
    for (std::size_t r = 0; r < R; ++r) work(r);
    return;
  }
  const unsigned nt = std::min<std::size_t>(threads, R);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t r = t; r < R; r += nt) work(r);
    });
  }
  for (auto& th : pool) th.join();
}

inline RqmcResult summarize(std::vector<double> rep_means, std::size_t n, double tau) {
  RqmcResult res;
  res.n = n;
  res.R = rep_means.size();
  res.level = 1.0 - tau;
  res.rep_means = std::move(rep_means);
  KahanSum ms;
  for (double m : res.rep_means) ms.add(m);
  res.mu_hat = ms.value() / static_cast<double>(res.R);
  KahanSum vs;
  for (double m : res.rep_means) vs.add((m - res.mu_hat) * (m - res.mu_hat));
  res.sigma_hat = std::sqrt(vs.value() / (static_cast<double>(res.R) - 1.0));
  const double t = student_t_quantile(static_cast<unsigned>(res.R - 1), 1.0 - tau / 2.0);
  const double hw = t * res.sigma_hat / std::sqrt(static_cast<double>(res.R));
  res.ci_lo = res.mu_hat - hw;
  res.ci_hi = res.mu_hat + hw;
  return res;
}

}  // namespace detail

/// Fixed-n randomized QMC: R independent randomizations, Student's-t CI at
/// level 1 - tau.
inline RqmcResult rqmc_fixed(const Integrand& f, const SamplerSpec& sampler, std::size_t n,
                             std::size_t R, double tau, bool baker = false,
                             unsigned threads = 1) {
  if (R < 2) throw std::invalid_argument("rqmc: R >= 2 needed for a t interval");
  if (n == 0) throw std::invalid_argument("rqmc: n >= 1");
  if (f.d != sampler.d) throw std::invalid_argument("rqmc: integrand/sampler dimension mismatch");
  std::vector<double> means(R, 0.0);
  detail::parallel_over_replications(R, threads, [&](std::size_t r) {
    ReplicationSampler gen(sampler, r);
    const std::size_t chunk = std::min<std::size_t>(n, 4096);
    std::vector<double> buf(chunk * sampler.d);
    detail::KahanSum acc;
    for (std::size_t i0 = 0; i0 < n; i0 += chunk) {
      const std::size_t c = std::min(chunk, n - i0);
      gen.fill(i0, c, buf.data());
      for (std::size_t k = 0; k < c; ++k) {
        std::span<double> x(buf.data() + k * sampler.d, sampler.d);
        if (baker) baker_transform(x);
        acc.add(f.f(x));
      }
    }
    means[r] = acc.value() / static_cast<double>(n);
  });
  return detail::summarize(std::move(means), n, tau);
}

/// Adaptive randomized QMC: double n, extending each replication's sequence
/// and reusing all previous function values through running sums, until the
/// CI half-width meets abs_tol or n reaches n_max. Never throws on an unmet
/// tolerance; the flag reports it.
inline RqmcResult rqmc_adaptive(const Integrand& f, const SamplerSpec& sampler, double tau,
                                double abs_tol, std::size_t n0, std::size_t n_max,
                                std::size_t R = 15, bool baker = false, unsigned threads = 1) {
  if (R < 2) throw std::invalid_argument("rqmc: R >= 2 needed for a t interval");
  if (n0 == 0 || (n0 & (n0 - 1)) != 0) throw std::invalid_argument("rqmc: n0 must be a power of 2");
  if (n_max < n0) throw std::invalid_argument("rqmc: n_max < n0");

  std::vector<detail::KahanSum> sums(R);
  std::vector<ReplicationSampler> gens;
  gens.reserve(R);
  for (std::size_t r = 0; r < R; ++r) gens.emplace_back(sampler, r);

  std::size_t n = 0;
  RqmcResult res;
  for (std::size_t target = n0;; target *= 2) {
    detail::parallel_over_replications(R, threads, [&](std::size_t r) {
      const std::size_t add = target - n;
      const std::size_t chunk = std::min<std::size_t>(add, 4096);
      std::vector<double> buf(chunk * sampler.d);
      for (std::size_t i0 = n; i0 < target; i0 += chunk) {
        const std::size_t c = std::min(chunk, target - i0);
        gens[r].fill(i0, c, buf.data());
        for (std::size_t k = 0; k < c; ++k) {
          std::span<double> x(buf.data() + k * sampler.d, sampler.d);
          if (baker) baker_transform(x);
          sums[r].add(f.f(x));
        }
      }
    });
    n = target;
    std::vector<double> means(R);
    for (std::size_t r = 0; r < R; ++r) means[r] = sums[r].value() / static_cast<double>(n);
    res = detail::summarize(std::move(means), n, tau);
    if (res.half_width() <= abs_tol) {
      res.tolerance_met = true;
      break;
    }
    if (2 * n > n_max) {
      res.tolerance_met = false;
      break;
    }
  }
  return res;
}

}  // namespace qmc
