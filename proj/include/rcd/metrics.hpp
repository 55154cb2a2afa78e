#ifndef RCD_METRICS_HPP
#define RCD_METRICS_HPP

#include <string>
#include <vector>

#include "rcd/types.hpp"

namespace rcd::metrics {

enum class MetricFamily { l1_fn, l2_fn, w1_fn, w2_diagram };

struct MetricKind {
  MetricFamily family{MetricFamily::l1_fn};
  int dim{0};  // homology dimension, w2_diagram only

  bool is_diagram_metric() const { return family == MetricFamily::w2_diagram; }
  std::string name() const;
};

// Parses "L1", "L2", "W1_fn", "W2_diagram:H0", "W2_diagram:H1".
MetricKind parse_metric(const std::string& name);

// (sum |a-b|^p * delta)^{1/p} with delta the frequency cell width.
double fn_distance(const Spectrum& a, const Spectrum& b, int p);
// Same on the flattened (time x frequency) grid with product cell measure.
double fn_distance(const Spectrogram& a, const Spectrogram& b, int p);

// Closed-form 1D optimal transport between unit-mass-normalized spectra:
// W1 = sum_k |cumsum(a) - cumsum(b)| * delta_omega.
double emd_1d(const Spectrum& a, const Spectrum& b);

// p-Wasserstein between diagrams with Euclidean ground metric and diagonal
// projections allowed; the assignment problem is solved exactly.
double wasserstein_diagrams(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                            int p = 2);

// Exact dense assignment (Jonker-Volgenant style shortest augmenting paths);
// returns the minimal total cost over all perfect matchings of the square
// cost matrix (row-major, n x n).
double solve_assignment(const std::vector<double>& cost, int n);

}  // namespace rcd::metrics

#endif  // RCD_METRICS_HPP
