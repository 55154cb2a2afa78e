#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rcd::oracles {

std::vector<std::complex<double>> dft_direct(const std::vector<double>& x) {
  const size_t T = x.size();
  std::vector<std::complex<double>> out(T);
  const double norm = 1.0 / std::sqrt(static_cast<double>(T));
  for (size_t k = 0; k < T; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t t = 0; t < T; ++t) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * t / T;
      acc += x[t] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    out[k] = norm * acc;
  }
  return out;
}

PersistenceDiagram ph1d_sweep(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  struct Run {
    int lo, hi;
    double birth;
  };
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });

  std::vector<bool> active(n, false);
  std::vector<Run> runs;
  PersistenceDiagram dgm;
  dgm.dim = 0;

  for (int step = 0; step < n; ++step) {
    const int i = order[step];
    const double a = values[i];
    active[i] = true;
    // Recompute the maximal runs of {f <= a} from scratch.
    std::vector<std::pair<int, int>> intervals;
    for (int s = 0; s < n;) {
      if (!active[s]) {
        ++s;
        continue;
      }
      int e = s;
      while (e + 1 < n && active[e + 1]) ++e;
      intervals.emplace_back(s, e);
      s = e + 1;
    }
    // Match new intervals to previous runs by overlap.
    std::vector<Run> next;
    for (const auto& [lo, hi] : intervals) {
      std::vector<const Run*> overlapping;
      for (const Run& r : runs) {
        if (r.hi >= lo && r.lo <= hi) overlapping.push_back(&r);
      }
      if (overlapping.empty()) {
        next.push_back({lo, hi, a});  // new component born at this threshold
      } else if (overlapping.size() == 1) {
        next.push_back({lo, hi, overlapping.front()->birth});
      } else {
        // The inserted point merged two runs: the younger one dies here.
        double elder = overlapping.front()->birth;
        for (const Run* r : overlapping) elder = std::min(elder, r->birth);
        for (const Run* r : overlapping) {
          if (r->birth != elder && r->birth < a) dgm.points.push_back({r->birth, a});
        }
        next.push_back({lo, hi, elder});
      }
    }
    runs = std::move(next);
  }

  dgm.points.push_back({values[order.front()], values[order.back()]});
  dgm.essential_closed = true;
  std::sort(dgm.points.begin(), dgm.points.end(), [](const auto& x, const auto& y) {
    return x.birth < y.birth || (x.birth == y.birth && x.death < y.death);
  });
  return dgm;
}

namespace {

// Cells of the doubled grid with T-construction values; shared definition,
// independent reduction.
struct OracleComplex {
  int grows, gcols;
  std::vector<double> value;

  explicit OracleComplex(const tda::ScalarField2D& f)
      : grows(2 * f.rows + 1), gcols(2 * f.cols + 1) {
    value.assign(static_cast<size_t>(grows) * gcols, std::numeric_limits<double>::infinity());
    for (int i = 0; i < f.rows; ++i) {
      for (int j = 0; j < f.cols; ++j) {
        for (int a = 2 * i; a <= 2 * i + 2; ++a) {
          for (int b = 2 * j; b <= 2 * j + 2; ++b) {
            double& c = value[static_cast<size_t>(a) * gcols + b];
            c = std::min(c, f.at(i, j));
          }
        }
      }
    }
  }

  int dim(int a, int b) const { return (a % 2) + (b % 2); }
  size_t flat(int a, int b) const { return static_cast<size_t>(a) * gcols + b; }

  // Flat indices of the boundary cells.
  std::vector<size_t> boundary(int a, int b) const {
    const int d = dim(a, b);
    if (d == 0) return {};
    if (d == 1) {
      if (b % 2 == 1) return {flat(a, b - 1), flat(a, b + 1)};
      return {flat(a - 1, b), flat(a + 1, b)};
    }
    return {flat(a - 1, b), flat(a + 1, b), flat(a, b - 1), flat(a, b + 1)};
  }
};

}  // namespace

std::pair<PersistenceDiagram, PersistenceDiagram> ph2d_full_reduction(
    const tda::ScalarField2D& field) {
  const OracleComplex cx(field);
  const size_t n = cx.value.size();

  struct CellRef {
    double value;
    int dim;
    int a, b;
  };
  std::vector<CellRef> cells;
  cells.reserve(n);
  for (int a = 0; a < cx.grows; ++a) {
    for (int b = 0; b < cx.gcols; ++b) cells.push_back({cx.value[cx.flat(a, b)], cx.dim(a, b), a, b});
  }
  std::sort(cells.begin(), cells.end(), [&](const CellRef& x, const CellRef& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.dim != y.dim) return x.dim < y.dim;
    return cx.flat(x.a, x.b) < cx.flat(y.a, y.b);
  });
  std::vector<int> rank_of(n);
  for (size_t r = 0; r < n; ++r) rank_of[cells[r].a * cx.gcols + cells[r].b] = static_cast<int>(r);

  // Dense-ish reduction: columns as sorted rank vectors, linear search for a
  // previous column with the same low.
  std::vector<std::vector<int>> columns(n);
  std::vector<int> low_owner(n, -1);  // low rank -> column index
  std::vector<std::pair<int, int>> pairs;  // (birth rank, death rank)
  for (size_t j = 0; j < n; ++j) {
    std::vector<int> col;
    for (size_t cell : cx.boundary(cells[j].a, cells[j].b)) col.push_back(rank_of[cell]);
    std::sort(col.begin(), col.end());
    while (!col.empty() && low_owner[col.back()] >= 0) {
      const std::vector<int>& other = columns[low_owner[col.back()]];
      std::vector<int> merged;
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                    std::back_inserter(merged));
      col = std::move(merged);
    }
    if (!col.empty()) {
      low_owner[col.back()] = static_cast<int>(j);
      pairs.emplace_back(col.back(), static_cast<int>(j));
    }
    columns[j] = std::move(col);
  }

  PersistenceDiagram h0, h1;
  h0.dim = 0;
  h1.dim = 1;
  for (const auto& [bi, di] : pairs) {
    const double birth = cells[bi].value;
    const double death = cells[di].value;
    if (death <= birth) continue;
    if (cells[bi].dim == 0) h0.points.push_back({birth, death});
    if (cells[bi].dim == 1) h1.points.push_back({birth, death});
  }
  const double gmin = *std::min_element(field.values.begin(), field.values.end());
  const double gmax = *std::max_element(field.values.begin(), field.values.end());
  h0.points.push_back({gmin, gmax});
  h0.essential_closed = true;
  auto by_birth = [](const PersistencePoint& x, const PersistencePoint& y) {
    return x.birth < y.birth || (x.birth == y.birth && x.death < y.death);
  };
  std::sort(h0.points.begin(), h0.points.end(), by_birth);
  std::sort(h1.points.begin(), h1.points.end(), by_birth);
  return {std::move(h0), std::move(h1)};
}

std::pair<int, int> betti_at_threshold(const tda::ScalarField2D& field, double a) {
  const OracleComplex cx(field);
  const size_t n = cx.value.size();
  std::vector<char> present(n, 0);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < cx.grows; ++i) {
    for (int j = 0; j < cx.gcols; ++j) {
      if (cx.value[cx.flat(i, j)] <= a) {
        present[cx.flat(i, j)] = 1;
        ++counts[cx.dim(i, j)];
      }
    }
  }
  std::vector<int> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int i = 0; i < cx.grows; ++i) {
    for (int j = 0; j < cx.gcols; ++j) {
      if (!present[cx.flat(i, j)]) continue;
      for (size_t face : cx.boundary(i, j)) {
        if (present[face]) parent[find(static_cast<int>(cx.flat(i, j)))] = find(static_cast<int>(face));
      }
    }
  }
  int b0 = 0;
  for (size_t i = 0; i < n; ++i) {
    if (present[i] && find(static_cast<int>(i)) == static_cast<int>(i)) ++b0;
  }
  const int chi = counts[0] - counts[1] + counts[2];
  return {b0, b0 - chi};
}

namespace {

double point_cost(const PersistencePoint& x, const PersistencePoint& y, int p) {
  const double db = x.birth - y.birth;
  const double dd = x.death - y.death;
  const double d = std::sqrt(db * db + dd * dd);
  return p == 1 ? d : std::pow(d, p);
}

double diag_cost(const PersistencePoint& x, int p) {
  const double d = (x.death - x.birth) / std::sqrt(2.0);
  return p == 1 ? d : std::pow(d, p);
}

double match_rec(const std::vector<PersistencePoint>& a, const std::vector<PersistencePoint>& b,
                 size_t i, std::vector<bool>& used, int p) {
  if (i == a.size()) {
    double rest = 0.0;
    for (size_t j = 0; j < b.size(); ++j) {
      if (!used[j]) rest += diag_cost(b[j], p);
    }
    return rest;
  }
  double best = diag_cost(a[i], p) + match_rec(a, b, i + 1, used, p);
  for (size_t j = 0; j < b.size(); ++j) {
    if (used[j]) continue;
    used[j] = true;
    best = std::min(best, point_cost(a[i], b[j], p) + match_rec(a, b, i + 1, used, p));
    used[j] = false;
  }
  return best;
}

}  // namespace

double wasserstein_bruteforce(const PersistenceDiagram& d1, const PersistenceDiagram& d2, int p) {
  std::vector<bool> used(d2.points.size(), false);
  const double total = match_rec(d1.points, d2.points, 0, used, p);
  return p == 1 ? total : std::pow(total, 1.0 / p);
}

double transport_min_cost(const std::vector<double>& supply, const std::vector<double>& demand,
                          const std::vector<double>& cost) {
  // Min-cost flow by successive shortest augmenting paths with node
  // potentials (Dijkstra on reduced costs, which stay nonnegative).
  const int ns = static_cast<int>(supply.size());
  const int nd = static_cast<int>(demand.size());
  const int source = 0;
  const int sink = 1 + ns + nd;
  const int n_nodes = sink + 1;

  struct Edge {
    int to;
    double cap;
    double cost;
    int rev;  // index of the reverse edge in graph[to]
  };
  std::vector<std::vector<Edge>> graph(n_nodes);
  auto add_edge = [&](int u, int v, double cap, double c) {
    graph[u].push_back({v, cap, c, static_cast<int>(graph[v].size())});
    graph[v].push_back({u, 0.0, -c, static_cast<int>(graph[u].size()) - 1});
  };
  for (int i = 0; i < ns; ++i) add_edge(source, 1 + i, supply[i], 0.0);
  for (int j = 0; j < nd; ++j) add_edge(1 + ns + j, sink, demand[j], 0.0);
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nd; ++j) {
      add_edge(1 + i, 1 + ns + j, std::numeric_limits<double>::infinity(),
               cost[static_cast<size_t>(i) * nd + j]);
    }
  }

  constexpr double kEps = 1e-15;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> potential(n_nodes, 0.0);  // all raw costs are >= 0
  double total_cost = 0.0;
  while (true) {
    std::vector<double> dist(n_nodes, kInf);
    std::vector<int> prev_node(n_nodes, -1), prev_edge(n_nodes, -1);
    std::vector<char> done(n_nodes, 0);
    dist[source] = 0.0;
    for (;;) {
      int u = -1;
      for (int v = 0; v < n_nodes; ++v) {
        if (!done[v] && dist[v] < kInf && (u < 0 || dist[v] < dist[u])) u = v;
      }
      if (u < 0) break;
      done[u] = 1;
      for (int e = 0; e < static_cast<int>(graph[u].size()); ++e) {
        const Edge& ed = graph[u][e];
        if (ed.cap <= kEps || done[ed.to]) continue;
        // Reduced cost; clamp tiny negatives from float round-off.
        const double rc = std::max(0.0, ed.cost + potential[u] - potential[ed.to]);
        if (dist[u] + rc < dist[ed.to]) {
          dist[ed.to] = dist[u] + rc;
          prev_node[ed.to] = u;
          prev_edge[ed.to] = e;
        }
      }
    }
    if (dist[sink] == kInf) break;
    for (int v = 0; v < n_nodes; ++v) {
      if (dist[v] < kInf) potential[v] += dist[v];
    }
    double push = kInf;
    for (int v = sink; v != source; v = prev_node[v]) {
      push = std::min(push, graph[prev_node[v]][prev_edge[v]].cap);
    }
    if (!(push > kEps)) break;
    for (int v = sink; v != source; v = prev_node[v]) {
      Edge& ed = graph[prev_node[v]][prev_edge[v]];
      ed.cap -= push;
      graph[v][ed.rev].cap += push;
      total_cost += push * ed.cost;
    }
  }
  return total_cost;
}

}  // namespace rcd::oracles
