#pragma once

// Umbrella header: randomized low-discrepancy sequences, fast transforms,
// shift-invariant kernel algebra, and randomized QMC estimation.

#include "qmc/digits.hpp"
#include "qmc/dnet.hpp"
#include "qmc/errors.hpp"
#include "qmc/expr.hpp"
#include "qmc/fastgram.hpp"
#include "qmc/halton.hpp"
#include "qmc/kernels.hpp"
#include "qmc/lattice.hpp"
#include "qmc/lddata_io.hpp"
#include "qmc/point_batch.hpp"
#include "qmc/rng.hpp"
#include "qmc/rqmc.hpp"
#include "qmc/transforms.hpp"
