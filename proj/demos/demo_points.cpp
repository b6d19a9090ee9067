// Generate a few randomized point sets and print them.

#include <cstdio>

#include "qmc/dnet.hpp"
#include "qmc/halton.hpp"
#include "qmc/lattice.hpp"

int main() {
  using namespace qmc;

  auto gv = default_lattice_vector(2);
  auto shifts = random_shifts(2, 1, 42);
  auto lat = lattice_points(gv, 8, PointOrder::radical_inverse, &shifts);
  std::printf("shifted rank-1 lattice (d=2, n=8):\n");
  for (std::size_t i = 0; i < lat.n; ++i)
    std::printf("  %.6f  %.6f\n", lat.at(0, i, 0), lat.at(0, i, 1));

  DnetConfig net;
  net.d = 2;
  net.alpha = 2;
  net.rand = RandKind::lms_shift;
  net.seed = 42;
  auto dn = dnet_points(net, 8);
  std::printf("order-2 digital net with LMS + digital shift (d=2, n=8):\n");
  for (std::size_t i = 0; i < dn.n; ++i)
    std::printf("  %.6f  %.6f\n", dn.at(0, i, 0), dn.at(0, i, 1));

  HaltonConfig hal;
  hal.d = 2;
  hal.rand = RandKind::nus;
  hal.seed = 42;
  auto h = halton_points(hal, 8);
  std::printf("Halton with nested uniform scrambling (d=2, n=8):\n");
  for (std::size_t i = 0; i < h.n; ++i)
    std::printf("  %.6f  %.6f\n", h.at(0, i, 0), h.at(0, i, 1));
  return 0;
}
