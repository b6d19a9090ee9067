#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "qmc/lattice.hpp"
#include "support/oracles.hpp"

using namespace qmc;

TEST_CASE("linear order matches the direct formula") {
  LatticeGeneratingVector gv;
  gv.g = {1, 3};
  auto b = lattice_points(gv, 4, PointOrder::linear, nullptr);
  const double want[4][2] = {{0, 0}, {0.25, 0.75}, {0.5, 0.5}, {0.75, 0.25}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) REQUIRE(b.at(0, i, j) == want[i][j]);
}

TEST_CASE("radical-inverse order: origin first, v(1)=1/2") {
  LatticeGeneratingVector gv;
  gv.g = {1, 3};
  auto b = lattice_points(gv, 2, PointOrder::radical_inverse, nullptr);
  REQUIRE(b.at(0, 0, 0) == 0.0);
  REQUIRE(b.at(0, 0, 1) == 0.0);
  REQUIRE(b.at(0, 1, 0) == 0.5);
  REQUIRE(b.at(0, 1, 1) == 0.5);  // 1.5 mod 1
}

TEST_CASE("orders agree as sets when n is a power of the base") {
  auto gv = default_lattice_vector(3);
  for (std::size_t n : {8u, 64u}) {
    auto lin = lattice_points(gv, n, PointOrder::linear, nullptr);
    auto rad = lattice_points(gv, n, PointOrder::radical_inverse, nullptr);
    std::vector<std::vector<double>> a, b;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back({lin.at(0, i, 0), lin.at(0, i, 1), lin.at(0, i, 2)});
      b.push_back({rad.at(0, i, 0), rad.at(0, i, 1), rad.at(0, i, 2)});
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        REQUIRE(std::abs(a[i][j] - b[i][j]) < 0x1.0p-52);
  }
}

TEST_CASE("orders agree as sets in a non-binary prime base") {
  LatticeGeneratingVector gv;
  gv.g = {1, 5};
  const std::size_t n = 27;  // 3^3
  auto lin = lattice_points(gv, n, PointOrder::linear, nullptr, 3);
  auto rad = lattice_points(gv, n, PointOrder::radical_inverse, nullptr, 3);
  std::vector<std::pair<double, double>> a, b;
  for (std::size_t i = 0; i < n; ++i) {
    a.emplace_back(lin.at(0, i, 0), lin.at(0, i, 1));
    b.emplace_back(rad.at(0, i, 0), rad.at(0, i, 1));
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(std::abs(a[i].first - b[i].first) < 0x1.0p-50);
    REQUIRE(std::abs(a[i].second - b[i].second) < 0x1.0p-50);
  }
}

TEST_CASE("linear order requires n = base^m") {
  auto gv = default_lattice_vector(2);
  REQUIRE_THROWS_AS(lattice_points(gv, 6, PointOrder::linear, nullptr), std::invalid_argument);
}

TEST_CASE("shift dimension mismatch is a shape error") {
  auto gv = default_lattice_vector(2);
  auto shifts = random_shifts(3, 2, 11);
  REQUIRE_THROWS_AS(lattice_points(gv, 4, PointOrder::linear, &shifts), std::invalid_argument);
}

TEST_CASE("random_shifts: empty, deterministic, law of large numbers") {
  auto empty = random_shifts(4, 0, 1);
  REQUIRE(empty.delta.empty());

  auto a = random_shifts(3, 5, 99);
  auto b = random_shifts(3, 5, 99);
  REQUIRE(a.delta == b.delta);

  auto big = random_shifts(2, 10000, 7);
  for (unsigned j = 0; j < 2; ++j) {
    double mean = 0;
    for (std::size_t r = 0; r < big.R; ++r) mean += big.at(r, j);
    mean /= static_cast<double>(big.R);
    REQUIRE(std::abs(mean - 0.5) < 0.02);
  }
  for (double v : big.delta) {
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("pairwise differences are shift invariant") {
  auto gv = default_lattice_vector(2);
  auto shifts = random_shifts(2, 3, 5);
  auto plain = lattice_points(gv, 16, PointOrder::radical_inverse, nullptr);
  auto shifted = lattice_points(gv, 16, PointOrder::radical_inverse, &shifts);
  auto frac = [](double v) { return v - std::floor(v); };
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t k = 0; k < 16; ++k)
        for (std::size_t j = 0; j < 2; ++j) {
          double ds = frac(shifted.at(r, i, j) - shifted.at(r, k, j));
          double dp = frac(plain.at(0, i, j) - plain.at(0, k, j));
          REQUIRE(std::abs(ds - dp) < 1e-12);
        }
}

TEST_CASE("uniformly shifted lattice coordinates are marginally uniform") {
  auto gv = default_lattice_vector(2);
  auto shifts = random_shifts(2, 10000, 2024);
  auto b = lattice_points(gv, 4, PointOrder::radical_inverse, &shifts);
  // fix one point index and coordinate; across replications it is U[0,1)
  for (std::size_t i : {std::size_t{1}, std::size_t{3}}) {
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<double> samples(b.R);
      for (std::size_t r = 0; r < b.R; ++r) samples[r] = b.at(r, i, j);
      REQUIRE(oracle::uniformity_pvalue(samples, 32) > 0.001);
    }
  }
}

TEST_CASE("coordinates live in the half-open cube") {
  auto gv = default_lattice_vector(4);
  auto shifts = random_shifts(4, 8, 3);
  auto b = lattice_points(gv, 37, PointOrder::radical_inverse, &shifts);
  for (double v : b.x) {
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("default vector is rejected beyond d = 8") {
  REQUIRE_THROWS_AS(default_lattice_vector(9), std::invalid_argument);
}
