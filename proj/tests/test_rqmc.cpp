#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "qmc/rqmc.hpp"
#include "support/oracles.hpp"

using namespace qmc;

namespace {

SamplerSpec lattice_sampler(unsigned d, std::uint64_t seed) {
  SamplerSpec s;
  s.type = Generator::lattice;
  s.d = d;
  s.seed = seed;
  s.rand = RandKind::shift;
  return s;
}

SamplerSpec dnet_sampler(unsigned d, std::uint64_t seed, unsigned alpha = 1) {
  SamplerSpec s;
  s.type = Generator::dnet;
  s.d = d;
  s.seed = seed;
  s.rand = RandKind::lms_shift;
  s.alpha = alpha;
  return s;
}

// trapezoid-free dense check of a catalog mean on a fine grid (d <= 2)
double grid_mean(const Integrand& f, unsigned g) {
  if (f.d == 1) {
    double acc = 0;
    std::vector<double> x(1);
    for (unsigned c = 0; c < g; ++c) {
      x[0] = (c + 0.5) / g;
      acc += f.f(x);
    }
    return acc / g;
  }
  double acc = 0;
  std::vector<double> x(2);
  for (unsigned a = 0; a < g; ++a)
    for (unsigned b = 0; b < g; ++b) {
      x[0] = (a + 0.5) / g;
      x[1] = (b + 0.5) / g;
      acc += f.f(x);
    }
  return acc / (static_cast<double>(g) * g);
}

}  // namespace

TEST_CASE("baker transform values") {
  REQUIRE(baker_transform(0.25) == 0.5);
  REQUIRE(baker_transform(0.0) == 0.0);
  REQUIRE(baker_transform(0.5) == 1.0);
  REQUIRE(baker_transform(0.75) == 0.5);
}

TEST_CASE("student t quantiles against closed forms") {
  // nu = 1: tan(pi (p - 1/2));  nu = 2: (2p-1) sqrt(2 / (4p(1-p)))
  for (double p : {0.6, 0.9, 0.975, 0.995}) {
    REQUIRE(student_t_quantile(1, p) ==
            Catch::Approx(std::tan(std::numbers::pi * (p - 0.5))).margin(1e-8));
    REQUIRE(student_t_quantile(2, p) ==
            Catch::Approx((2 * p - 1) * std::sqrt(2.0 / (4 * p * (1 - p)))).margin(1e-8));
  }
  REQUIRE(student_t_quantile(1, 0.975) == Catch::Approx(12.7062047362).margin(1e-6));
  REQUIRE(student_t_quantile(2, 0.975) == Catch::Approx(4.30265272991).margin(1e-6));
  REQUIRE(student_t_quantile(14, 0.5) == 0.0);
  REQUIRE(student_t_quantile(5, 0.025) == Catch::Approx(-student_t_quantile(5, 0.975)).margin(1e-9));
  REQUIRE_THROWS_AS(student_t_quantile(0, 0.9), std::invalid_argument);
  REQUIRE_THROWS_AS(student_t_quantile(3, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(student_t_quantile(3, 1.0), std::invalid_argument);
}

TEST_CASE("integrand catalog values and means") {
  auto s1 = integrand_library("simple-d1", 1);
  std::vector<double> x = {1.0};
  REQUIRE(s1.f(x) == Catch::Approx(std::numbers::e - 1.0));
  REQUIRE(*s1.exact_mean == 0.0);
  REQUIRE(grid_mean(s1, 1 << 16) == Catch::Approx(0.0).margin(1e-8));

  auto s2 = integrand_library("simple-d2", 2);
  REQUIRE(*s2.exact_mean == 0.0);
  REQUIRE(grid_mean(s2, 1 << 9) == Catch::Approx(0.0).margin(1e-5));

  auto ok = integrand_library("oakley", 2);
  REQUIRE(*ok.exact_mean == Catch::Approx(5.0 + 400.0 * std::sin(0.01)));
  REQUIRE(grid_mean(ok, 1 << 9) == Catch::Approx(*ok.exact_mean).margin(1e-8));

  auto gf = integrand_library("g-function", 3);
  REQUIRE(*gf.exact_mean == Catch::Approx(1.0));

  auto cp2 = integrand_library("corner-peak", 2);
  REQUIRE(grid_mean(cp2, 1 << 10) == Catch::Approx(*cp2.exact_mean).margin(1e-7));

  auto os2 = integrand_library("oscillatory", 2);
  REQUIRE(grid_mean(os2, 1 << 10) == Catch::Approx(*os2.exact_mean).margin(1e-7));

  REQUIRE_THROWS_AS(integrand_library("nope", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(integrand_library("simple-d1", 2), std::invalid_argument);
}

TEST_CASE("fixed estimate of a constant integrand collapses the interval") {
  Integrand c;
  c.name = "const";
  c.d = 1;
  c.f = [](std::span<const double>) { return 4.25; };
  auto res = rqmc_fixed(c, lattice_sampler(1, 3), 64, 8, 0.05);
  REQUIRE(res.mu_hat == Catch::Approx(4.25));
  REQUIRE(res.sigma_hat == 0.0);
  REQUIRE(res.ci_lo == res.ci_hi);
  REQUIRE(res.n == 64);
  REQUIRE(res.R == 8);
}

TEST_CASE("R < 2 is a degrees-of-freedom error") {
  auto f = integrand_library("simple-d1", 1);
  REQUIRE_THROWS_AS(rqmc_fixed(f, lattice_sampler(1, 3), 64, 1, 0.05), std::invalid_argument);
}

TEST_CASE("dimension mismatch is rejected") {
  auto f = integrand_library("simple-d2", 2);
  REQUIRE_THROWS_AS(rqmc_fixed(f, lattice_sampler(3, 3), 64, 4, 0.05), std::invalid_argument);
}

TEST_CASE("simple-d1: estimate lands within 3 half-widths almost always") {
  auto f = integrand_library("simple-d1", 1);
  int hits = 0;
  const int runs = 200;
  for (int s = 0; s < runs; ++s) {
    auto res = rqmc_fixed(f, lattice_sampler(1, 1000 + s), 1 << 10, 15, 0.05, /*baker=*/true);
    if (std::abs(res.mu_hat) <= 3.0 * res.half_width() + 1e-15) ++hits;
  }
  REQUIRE(hits >= runs * 95 / 100);
}

TEST_CASE("g-function d=3 estimate approaches its unit mean") {
  auto f = integrand_library("g-function", 3);
  auto res = rqmc_fixed(f, dnet_sampler(3, 77), 1 << 12, 8, 0.05);
  REQUIRE(std::abs(res.mu_hat - 1.0) < 5e-3);
}

TEST_CASE("unbiasedness under shifts") {
  auto f = integrand_library("simple-d2", 2);
  auto res = rqmc_fixed(f, lattice_sampler(2, 9), 32, 1000, 0.05);
  // mean of per-replication means is within 4 standard errors of the truth
  const double se = res.sigma_hat / std::sqrt(1000.0);
  REQUIRE(std::abs(res.mu_hat - 0.0) < 4.0 * se + 1e-12);
}

TEST_CASE("adaptive: infinite tolerance stops at n0; flag reports misses") {
  auto f = integrand_library("simple-d1", 1);
  auto res = rqmc_adaptive(f, dnet_sampler(1, 5), 0.05,
                           std::numeric_limits<double>::infinity(), 64, 1 << 20);
  REQUIRE(res.n == 64);
  REQUIRE(res.tolerance_met);

  Integrand c;
  c.name = "const";
  c.d = 1;
  c.f = [](std::span<const double>) { return -1.5; };
  auto rc = rqmc_adaptive(c, dnet_sampler(1, 6), 0.05, 1e-12, 16, 1 << 16);
  REQUIRE(rc.n == 16);
  REQUIRE(rc.tolerance_met);
  REQUIRE(rc.mu_hat == Catch::Approx(-1.5));

  // unreachable tolerance: returns at n_max with the flag down, no throw
  auto f2 = integrand_library("simple-d2", 2);
  auto rf = rqmc_adaptive(f2, lattice_sampler(2, 7), 0.05, 1e-14, 16, 64);
  REQUIRE(rf.n == 64);
  REQUIRE(!rf.tolerance_met);

  REQUIRE_THROWS_AS(rqmc_adaptive(f, dnet_sampler(1, 5), 0.05, 1e-3, 17, 128),
                    std::invalid_argument);
}

TEST_CASE("adaptive corner-peak d=3 meets a 1e-4 tolerance") {
  auto f = integrand_library("corner-peak", 3);
  auto res = rqmc_adaptive(f, dnet_sampler(3, 11), 0.05, 1e-4, 1 << 6, 1 << 16);
  REQUIRE(res.tolerance_met);
  REQUIRE(std::abs(res.mu_hat - *f.exact_mean) <= 1e-4);
}

TEST_CASE("adaptive reuses the sequence prefix: means extend consistently") {
  // With the same seed, a fixed run at the final n must reproduce the
  // adaptive result exactly (same points, same sums).
  auto f = integrand_library("simple-d1", 1);
  auto ad = rqmc_adaptive(f, dnet_sampler(1, 21), 0.05, 1e-6, 32, 1 << 12, 6);
  auto fx = rqmc_fixed(f, dnet_sampler(1, 21), ad.n, 6, 0.05);
  REQUIRE(ad.mu_hat == Catch::Approx(fx.mu_hat).epsilon(1e-14));
  REQUIRE(ad.sigma_hat == Catch::Approx(fx.sigma_hat).epsilon(1e-10));
}

TEST_CASE("results are identical across thread counts") {
  auto f = integrand_library("corner-peak", 3);
  auto a = rqmc_fixed(f, dnet_sampler(3, 31), 1 << 9, 16, 0.05, false, 1);
  auto b = rqmc_fixed(f, dnet_sampler(3, 31), 1 << 9, 16, 0.05, false, 4);
  auto c = rqmc_fixed(f, dnet_sampler(3, 31), 1 << 9, 16, 0.05, false, 8);
  REQUIRE(a.mu_hat == b.mu_hat);
  REQUIRE(a.mu_hat == c.mu_hat);
  REQUIRE(a.rep_means == b.rep_means);
  REQUIRE(a.rep_means == c.rep_means);

  auto ad1 = rqmc_adaptive(f, dnet_sampler(3, 33), 0.05, 1e-3, 64, 1 << 12, 8, false, 1);
  auto ad4 = rqmc_adaptive(f, dnet_sampler(3, 33), 0.05, 1e-3, 64, 1 << 12, 8, false, 4);
  REQUIRE(ad1.mu_hat == ad4.mu_hat);
  REQUIRE(ad1.n == ad4.n);
}

TEST_CASE("iid and halton samplers flow through the estimator") {
  auto f = integrand_library("simple-d2", 2);
  SamplerSpec iid;
  iid.type = Generator::iid;
  iid.d = 2;
  iid.seed = 3;
  auto r1 = rqmc_fixed(f, iid, 1 << 10, 10, 0.05);
  REQUIRE(std::abs(r1.mu_hat) < 0.2);

  SamplerSpec hal;
  hal.type = Generator::halton;
  hal.d = 2;
  hal.seed = 3;
  hal.rand = RandKind::nus;
  auto r2 = rqmc_fixed(f, hal, 1 << 10, 10, 0.05);
  REQUIRE(std::abs(r2.mu_hat) < 0.02);
}
