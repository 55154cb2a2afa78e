#include "rcd/tda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace rcd::tda {

namespace {

void check_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("tda: non-finite field value");
  }
}

// Union-find tracking, per component, the order rank and value of its birth
// cell (elder rule: on a merge the later-born component dies).
class MergeForest {
 public:
  // Returns the index of the new node.
  int make(double birth_value, long long birth_rank) {
    parent_.push_back(static_cast<int>(parent_.size()));
    birth_value_.push_back(birth_value);
    birth_rank_.push_back(birth_rank);
    return static_cast<int>(parent_.size()) - 1;
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Merge the components of a and b at `death_value`. If they differ, the
  // younger one dies; its (birth, death) pair is appended to `out` when the
  // persistence is positive. Returns true when a merge happened.
  bool merge(int a, int b, double death_value, std::vector<PersistencePoint>& out) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    // Elder: smaller birth rank survives.
    if (birth_rank_[ra] > birth_rank_[rb]) std::swap(ra, rb);
    if (death_value > birth_value_[rb]) {
      out.push_back({birth_value_[rb], death_value});
    }
    parent_[rb] = ra;
    return true;
  }

  double birth_value(int x) { return birth_value_[find(x)]; }

 private:
  std::vector<int> parent_;
  std::vector<double> birth_value_;
  std::vector<long long> birth_rank_;
};

}  // namespace

PersistenceDiagram sublevel_ph_1d(const ScalarField1D& field) {
  const int n = static_cast<int>(field.values.size());
  if (n < 2) throw std::invalid_argument("sublevel_ph_1d: need at least 2 samples");
  check_finite(field.values);
  const auto& f = field.values;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return f[a] < f[b] || (f[a] == f[b] && a < b); });

  MergeForest forest;
  std::vector<int> node(n, -1);
  PersistenceDiagram dgm;
  dgm.dim = 0;
  for (int rank = 0; rank < n; ++rank) {
    const int i = order[rank];
    node[i] = forest.make(f[i], rank);
    // Joining an existing neighbor component happens at the value of the
    // entering vertex (the edge appears at the max of its endpoints).
    for (int j : {i - 1, i + 1}) {
      if (j < 0 || j >= n || node[j] < 0) continue;
      forest.merge(node[j], node[i], f[i], dgm.points);
    }
  }

  const double global_min = f[order.front()];
  const double global_max = f[order.back()];
  dgm.points.push_back({global_min, global_max});
  dgm.essential_closed = true;
  std::sort(dgm.points.begin(), dgm.points.end(), [](const auto& a, const auto& b) {
    return a.birth < b.birth || (a.birth == b.birth && a.death < b.death);
  });
  return dgm;
}

namespace {

// Cells of the cubical complex live on the doubled grid (2*rows+1) x
// (2*cols+1): even/even entries are vertices, odd/odd are pixels, the rest
// are edges. T-construction: a cell's value is the min of the pixels it is a
// face of.
struct CubicalComplex {
  int rows, cols;        // pixel grid
  int grows, gcols;      // doubled grid
  std::vector<double> value;  // per doubled-grid cell

  explicit CubicalComplex(const ScalarField2D& f)
      : rows(f.rows), cols(f.cols), grows(2 * f.rows + 1), gcols(2 * f.cols + 1) {
    value.assign(static_cast<size_t>(grows) * gcols, std::numeric_limits<double>::infinity());
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const double v = f.at(i, j);
        // The pixel and all of its faces.
        for (int a = 2 * i; a <= 2 * i + 2; ++a) {
          for (int b = 2 * j; b <= 2 * j + 2; ++b) {
            double& cell = value[static_cast<size_t>(a) * gcols + b];
            cell = std::min(cell, v);
          }
        }
      }
    }
  }

  int dim(int a, int b) const { return (a % 2) + (b % 2); }
  size_t index(int a, int b) const { return static_cast<size_t>(a) * gcols + b; }
};

}  // namespace

std::pair<PersistenceDiagram, PersistenceDiagram> sublevel_ph_2d(const ScalarField2D& field) {
  if (field.rows < 2 || field.cols < 2 ||
      field.values.size() != static_cast<size_t>(field.rows) * field.cols) {
    throw std::invalid_argument("sublevel_ph_2d: matrix must be at least 2x2");
  }
  check_finite(field.values);

  const CubicalComplex cx(field);

  // Filtration order over all cells: value, then dimension (faces precede
  // cofaces at ties), then lexicographic cell index.
  struct Cell {
    double value;
    int dim;
    int a, b;
  };
  std::vector<Cell> cells;
  cells.reserve(cx.value.size());
  for (int a = 0; a < cx.grows; ++a) {
    for (int b = 0; b < cx.gcols; ++b) {
      cells.push_back({cx.value[cx.index(a, b)], cx.dim(a, b), a, b});
    }
  }
  std::sort(cells.begin(), cells.end(), [&](const Cell& x, const Cell& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.dim != y.dim) return x.dim < y.dim;
    return cx.index(x.a, x.b) < cx.index(y.a, y.b);
  });

  // --- H0 by union-find over vertices, merges driven by edges. ---
  PersistenceDiagram h0;
  h0.dim = 0;
  {
    MergeForest forest;
    std::vector<int> vertex_node(cx.value.size(), -1);
    long long rank = 0;
    for (const Cell& c : cells) {
      ++rank;
      if (c.dim == 0) {
        vertex_node[cx.index(c.a, c.b)] = forest.make(c.value, rank);
      } else if (c.dim == 1) {
        const bool horizontal = (c.b % 2 == 1);
        const size_t u = horizontal ? cx.index(c.a, c.b - 1) : cx.index(c.a - 1, c.b);
        const size_t v = horizontal ? cx.index(c.a, c.b + 1) : cx.index(c.a + 1, c.b);
        forest.merge(vertex_node[u], vertex_node[v], c.value, h0.points);
      }
    }
    const double global_min = *std::min_element(field.values.begin(), field.values.end());
    const double global_max = *std::max_element(field.values.begin(), field.values.end());
    h0.points.push_back({global_min, global_max});
    h0.essential_closed = true;
  }

  // --- H1 by Z/2 boundary-matrix reduction of the 2-cell columns. ---
  PersistenceDiagram h1;
  h1.dim = 1;
  {
    std::vector<int> edge_rank(cx.value.size(), -1);
    std::vector<double> edge_value;
    int n_edges = 0;
    for (const Cell& c : cells) {
      if (c.dim == 1) {
        edge_rank[cx.index(c.a, c.b)] = n_edges++;
        edge_value.push_back(c.value);
      }
    }
    // low edge rank -> reduced column that has it as its lowest entry.
    std::unordered_map<int, std::vector<int>> low_to_column;
    std::vector<int> column;
    std::vector<int> merged;
    for (const Cell& c : cells) {
      if (c.dim != 2) continue;
      column = {edge_rank[cx.index(c.a - 1, c.b)], edge_rank[cx.index(c.a + 1, c.b)],
                edge_rank[cx.index(c.a, c.b - 1)], edge_rank[cx.index(c.a, c.b + 1)]};
      std::sort(column.begin(), column.end());
      while (!column.empty()) {
        auto it = low_to_column.find(column.back());
        if (it == low_to_column.end()) break;
        // Symmetric difference with the previously reduced column.
        const std::vector<int>& other = it->second;
        merged.clear();
        std::set_symmetric_difference(column.begin(), column.end(), other.begin(), other.end(),
                                      std::back_inserter(merged));
        column.swap(merged);
      }
      if (column.empty()) continue;
      const int low = column.back();
      if (c.value > edge_value[low]) {
        h1.points.push_back({edge_value[low], c.value});
      }
      low_to_column.emplace(low, column);
    }
  }

  auto by_birth = [](const PersistencePoint& a, const PersistencePoint& b) {
    return a.birth < b.birth || (a.birth == b.birth && a.death < b.death);
  };
  std::sort(h0.points.begin(), h0.points.end(), by_birth);
  std::sort(h1.points.begin(), h1.points.end(), by_birth);
  return {std::move(h0), std::move(h1)};
}

PersistenceDiagram filter_diagram(const PersistenceDiagram& d, double min_persistence) {
  if (min_persistence < 0.0) {
    throw std::invalid_argument("filter_diagram: min_persistence must be >= 0");
  }
  PersistenceDiagram out;
  out.dim = d.dim;
  out.essential_closed = d.essential_closed;
  for (const auto& p : d.points) {
    if (p.persistence() > min_persistence) out.points.push_back(p);
  }
  return out;
}

ScalarField1D to_field(const Spectrum& s) { return ScalarField1D{s.power}; }

ScalarField2D to_field(const Spectrogram& sg) {
  ScalarField2D f;
  f.rows = sg.n_times();
  f.cols = sg.n_freqs();
  f.values = sg.power;
  return f;
}

}  // namespace rcd::tda
