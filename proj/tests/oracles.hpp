// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#ifndef RCD_TESTS_ORACLES_HPP
#define RCD_TESTS_ORACLES_HPP

#include <complex>
#include <utility>
#include <vector>

#include "rcd/tda.hpp"
#include "rcd/types.hpp"

namespace rcd::oracles {

// Direct O(T^2) DFT with the 1/sqrt(T) normalization.
std::vector<std::complex<double>> dft_direct(const std::vector<double>& x);

// 1D sublevel H0 by sweeping thresholds in sorted value order and
// recomputing the maximal runs of {f <= a} from scratch at every step.
// Requires distinct values. Essential closed as (global min, global max).
PersistenceDiagram ph1d_sweep(const std::vector<double>& values);

// Full naive left-to-right boundary-matrix reduction over the whole filtered
// cubical complex (no clearing, dense column search).
std::pair<PersistenceDiagram, PersistenceDiagram> ph2d_full_reduction(
    const tda::ScalarField2D& field);

// Betti numbers of the sublevel complex at threshold a: b0 by union-find
// over present cells, b1 = b0 - (V - E + F).
std::pair<int, int> betti_at_threshold(const tda::ScalarField2D& field, double a);

// Exhaustive enumeration over all partial matchings with diagonal
// projections; feasible for diagrams with <= ~8 points.
double wasserstein_bruteforce(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                              int p = 2);

// Min-cost transportation by successive shortest augmenting paths
// (Bellman-Ford on the residual graph). supply and demand must have equal
// totals; cost is row-major |supply| x |demand|.
double transport_min_cost(const std::vector<double>& supply, const std::vector<double>& demand,
                          const std::vector<double>& cost);

}  // namespace rcd::oracles

#endif  // RCD_TESTS_ORACLES_HPP
