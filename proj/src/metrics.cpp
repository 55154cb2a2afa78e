#include "rcd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcd::metrics {

namespace {

double pow_p(double x, int p) { return p == 1 ? x : (p == 2 ? x * x : std::pow(x, p)); }

double root_p(double x, int p) { return p == 1 ? x : (p == 2 ? std::sqrt(x) : std::pow(x, 1.0 / p)); }

void check_p(int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("metric: p must be 1 or 2");
}

double grid_step(const Spectrum& s) { return s.fs_hz / s.series_length; }

void check_same_grid(const Spectrum& a, const Spectrum& b) {
  if (a.bins() != b.bins() || a.series_length != b.series_length || a.fs_hz != b.fs_hz) {
    throw std::invalid_argument("metric: spectrum grid mismatch");
  }
}

}  // namespace

std::string MetricKind::name() const {
  switch (family) {
    case MetricFamily::l1_fn:
      return "L1";
    case MetricFamily::l2_fn:
      return "L2";
    case MetricFamily::w1_fn:
      return "W1_fn";
    case MetricFamily::w2_diagram:
      return dim == 0 ? "W2_diagram:H0" : "W2_diagram:H1";
  }
  return "?";
}

MetricKind parse_metric(const std::string& name) {
  if (name == "L1") return {MetricFamily::l1_fn, 0};
  if (name == "L2") return {MetricFamily::l2_fn, 0};
  if (name == "W1_fn") return {MetricFamily::w1_fn, 0};
  if (name == "W2_diagram:H0") return {MetricFamily::w2_diagram, 0};
  if (name == "W2_diagram:H1") return {MetricFamily::w2_diagram, 1};
  throw std::invalid_argument("unknown metric '" + name + "'");
}

double fn_distance(const Spectrum& a, const Spectrum& b, int p) {
  check_p(p);
  check_same_grid(a, b);
  const double delta = grid_step(a);
  double acc = 0.0;
  for (int k = 0; k < a.bins(); ++k) {
    acc += pow_p(std::abs(a.power[k] - b.power[k]), p) * delta;
  }
  return root_p(acc, p);
}

double fn_distance(const Spectrogram& a, const Spectrogram& b, int p) {
  check_p(p);
  if (a.n_times() != b.n_times() || a.n_freqs() != b.n_freqs() || a.fs_hz != b.fs_hz ||
      a.half_window != b.half_window || a.hop != b.hop) {
    throw std::invalid_argument("metric: spectrogram grid mismatch");
  }
  const double dt = a.hop / a.fs_hz;
  const double dw = a.fs_hz / (2 * a.half_window + 1);
  const double delta = dt * dw;
  double acc = 0.0;
  for (size_t i = 0; i < a.power.size(); ++i) {
    acc += pow_p(std::abs(a.power[i] - b.power[i]), p) * delta;
  }
  return root_p(acc, p);
}

double emd_1d(const Spectrum& a, const Spectrum& b) {
  check_same_grid(a, b);
  double mass_a = 0.0, mass_b = 0.0;
  for (double x : a.power) mass_a += x;
  for (double x : b.power) mass_b += x;
  if (!(mass_a > 0.0) || !(mass_b > 0.0)) {
    throw std::invalid_argument("emd_1d: spectra must have positive total mass");
  }
  const double delta = grid_step(a);
  double ca = 0.0, cb = 0.0, acc = 0.0;
  for (int k = 0; k < a.bins(); ++k) {
    ca += a.power[k] / mass_a;
    cb += b.power[k] / mass_b;
    acc += std::abs(ca - cb) * delta;
  }
  return acc;
}

double solve_assignment(const std::vector<double>& cost, int n) {
  if (n == 0) return 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Shortest augmenting paths with potentials; 1-based bookkeeping arrays.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double best = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[static_cast<size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < best) {
          best = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += best;
          v[j] -= best;
        } else {
          minv[j] -= best;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    total += cost[static_cast<size_t>(match[j] - 1) * n + (j - 1)];
  }
  return total;
}

namespace {

// Deterministic argument order so the distance is exactly symmetric in spite
// of floating-point summation order inside the solver.
bool diagram_before(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (int i = 0; i < a.size(); ++i) {
    const auto& pa = a.points[i];
    const auto& pb = b.points[i];
    if (pa.birth != pb.birth) return pa.birth < pb.birth;
    if (pa.death != pb.death) return pa.death < pb.death;
  }
  return false;
}

}  // namespace

double wasserstein_diagrams(const PersistenceDiagram& d1_in, const PersistenceDiagram& d2_in,
                            int p) {
  check_p(p);
  if (d1_in.dim != d2_in.dim) {
    throw std::invalid_argument("wasserstein_diagrams: homology dimension mismatch");
  }
  const bool swap = diagram_before(d2_in, d1_in);
  const PersistenceDiagram& d1 = swap ? d2_in : d1_in;
  const PersistenceDiagram& d2 = swap ? d1_in : d2_in;
  const int n = d1.size();
  const int m = d2.size();
  if (n == 0 && m == 0) return 0.0;
  const int size = n + m;
  auto diag_cost = [&](const PersistencePoint& x) {
    return pow_p(x.persistence() / std::sqrt(2.0), p);
  };
  std::vector<double> cost(static_cast<size_t>(size) * size, 0.0);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      double c = 0.0;
      if (i < n && j < m) {
        const double db = d1.points[i].birth - d2.points[j].birth;
        const double dd = d1.points[i].death - d2.points[j].death;
        c = pow_p(std::sqrt(db * db + dd * dd), p);
      } else if (i < n) {
        c = diag_cost(d1.points[i]);  // point of d1 dropped to the diagonal
      } else if (j < m) {
        c = diag_cost(d2.points[j]);  // point of d2 dropped to the diagonal
      }
      cost[static_cast<size_t>(i) * size + j] = c;
    }
  }
  return root_p(solve_assignment(cost, size), p);
}

}  // namespace rcd::metrics
