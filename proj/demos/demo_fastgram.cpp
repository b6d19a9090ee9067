// Pair a digitally shifted net with a smoothness-2 kernel, then run the
// O(n log n) Gram operations and report solve residuals.

#include <cmath>
#include <cstdio>
#include <vector>

#include "qmc/dnet.hpp"
#include "qmc/fastgram.hpp"

int main() {
  using namespace qmc;

  DnetConfig cfg;
  cfg.d = 3;
  cfg.rand = RandKind::digital_shift;
  cfg.seed = 7;
  const std::size_t n = 1 << 10;
  auto pts = dnet_points(cfg, n);

  auto spec = KernelSpec::product(KernelFamily::dsi_walsh, {2, 2, 2}, 1.0, {1.0, 0.5, 0.25});
  auto G = gram_build(spec, pts);

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::cos(static_cast<double>(i));

  auto w = gram_solve(G, y);
  auto back = gram_matvec(G, w);
  double resid = 0;
  for (std::size_t i = 0; i < n; ++i) resid = std::max(resid, std::abs(back[i] - y[i]));
  std::printf("n=%zu  max |K K^{-1} y - y| = %.3e\n", n, resid);

  std::vector<double> equal(n, 1.0 / static_cast<double>(n));
  std::printf("discrepancy(equal weights)   = %.6e\n", discrepancy(G, equal));
  auto wopt = optimal_weights(G);
  std::printf("discrepancy(optimal weights) = %.6e\n", discrepancy(G, wopt));
  return 0;
}
