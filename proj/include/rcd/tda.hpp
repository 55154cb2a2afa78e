#ifndef RCD_TDA_HPP
#define RCD_TDA_HPP

#include <utility>
#include <vector>

#include "rcd/types.hpp"

namespace rcd::tda {

// 1D sampled function; sublevel filtration lives on the path graph whose
// vertices carry the values and whose edges appear at the max of their
// endpoints.
struct ScalarField1D {
  std::vector<double> values;
};

// 2D sampled function, row-major. Pixels are the top cells of the cubical
// complex (T-construction): lower-dimensional faces carry the minimum of
// their cofaces.
struct ScalarField2D {
  int rows{0};
  int cols{0};
  std::vector<double> values;  // rows * cols

  double at(int i, int j) const { return values[static_cast<size_t>(i) * cols + j]; }
  double& at(int i, int j) { return values[static_cast<size_t>(i) * cols + j]; }
};

// H0 persistence of the sublevel filtration; elder rule with ties broken by
// cell index. The essential component is closed as (global min, global max).
// Zero-persistence non-essential pairs are not emitted.
PersistenceDiagram sublevel_ph_1d(const ScalarField1D& field);

// H0 and H1 persistence of the filtered cubical complex. H1 via boundary
// matrix reduction; no essential H1 classes exist on a full rectangle.
std::pair<PersistenceDiagram, PersistenceDiagram> sublevel_ph_2d(const ScalarField2D& field);

// Keeps points with death - birth > min_persistence.
PersistenceDiagram filter_diagram(const PersistenceDiagram& d, double min_persistence);

// Convenience adapters from spectral estimates.
ScalarField1D to_field(const Spectrum& s);
ScalarField2D to_field(const Spectrogram& sg);

}  // namespace rcd::tda

#endif  // RCD_TDA_HPP
