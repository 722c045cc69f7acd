#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "novikov/geometry.hpp"

namespace novikov {

using FieldFn = std::function<double(Vec2)>;

/// Sampled scalar field on a parallelogram window, optionally identified as a
/// torus (periodic). values[i * ny + j] = field at origin + (i/nx) axis1 +
/// (j/ny) axis2.
struct ScalarGrid {
  Vec2 origin{}, axis1{}, axis2{};
  int nx = 0, ny = 0;
  std::vector<double> values;
  bool periodic = false;
  FieldFn sampler;  // optional; used to resolve marching-squares saddles

  double at(int i, int j) const { return values[std::size_t(i) * ny + j]; }
  Vec2 pos(double i, double j) const {
    return origin + axis1 * (i / nx) + axis2 * (j / ny);
  }
  std::pair<double, double> minmax() const;
};

/// Samples `field` over the window. For periodic grids the axes must be a
/// verified period pair (32 random probes, tol 1e-8); throws NotPeriodicError
/// otherwise.
ScalarGrid sample(const FieldFn& field, Vec2 origin, Vec2 axis1, Vec2 axis2, int nx,
                  int ny, bool periodic, int jobs = 1);

/// Contour polyline; on periodic grids closed contours carry their torus
/// winding class (p, q) in (axis1, axis2) units.
struct Polyline {
  std::vector<Vec2> pts;
  bool closed = false;
  std::optional<Vec2i> winding;
};

/// Marching squares at level c; saddle cells are disambiguated by evaluating
/// the true field at the cell center when a sampler is available. Polylines
/// are stitched across periodic edges.
std::vector<Polyline> extract_contours(const ScalarGrid& grid, double c);

struct ComponentStats {
  int cells = 0;
  double diameter = 0.0;  // plane-lifted; infinite for wrapping components
  int rank = 0;           // 0 bounded, 1 strip, 2 plane-filling
  Vec2i wrap{};           // primitive translation class for rank 1
  Vec2i bbox_min{}, bbox_max{};  // lifted sample-index bounds
};

struct ComponentLabeling {
  double level = 0.0;
  bool below = true;
  std::vector<int> labels;  // -1 outside the sign set, else component id
  std::vector<ComponentStats> components;

  bool any_wrapping() const;
};

/// 4-connected labeling of {V < c} (below) or its complement (above), with
/// torus wrapping classes tracked through translation-aware union-find.
ComponentLabeling label_components(const ScalarGrid& grid, double c, bool below);

enum class Situation { a_minus, a_plus, open, undetermined };

const char* to_string(Situation s);

/// Torus classification at level c per the wrapping of the two sign sets.
Situation classify_situation(const ScalarGrid& grid, double c);

struct CriticalLevelReport {
  double c_hat_1 = 0.0;
  double c_hat_2 = 0.0;
  double tol = 0.0;
  int nx = 0, ny = 0;
  bool degenerate = false;
  struct Evidence {
    double level;
    bool below;
    Vec2i wrap;
  };
  std::vector<Evidence> evidence;
};

/// Bisection for the A(-) / A(+) boundaries [c_hat_1, c_hat_2] on a sampled
/// periodic grid. tol <= 0 selects (max-min)*1e-4. Throws
/// NonMonotoneClassification if the classification order breaks.
CriticalLevelReport critical_interval(const ScalarGrid& grid, double tol);

/// Convenience: sample the field over the period parallelogram, then bisect.
CriticalLevelReport critical_interval(const FieldFn& field, Vec2 b1, Vec2 b2, int nx,
                                      int ny, double tol, int jobs = 1);

/// Exact sample-level percolation thresholds: first level whose below set
/// wraps and last level whose above set wraps. Independent route to the
/// bisection boundaries; also used to place the singular net level.
std::pair<double, double> percolation_thresholds(const ScalarGrid& grid);

struct SingularNet {
  double c0 = 0.0;
  std::vector<Polyline> net;
  CriticalLevelReport interval;
};

/// Critical net of an exactly symmetric periodic potential. symmetry_angle is
/// the potential's rotation angle about the origin (pi/2, 2pi/3 or pi/3);
/// throws IntervalNotDegenerate when the interval is fat (under-resolution).
SingularNet singular_net(const FieldFn& field, double symmetry_angle, Vec2 b1, Vec2 b2,
                         int nx, int ny, double tol, int jobs = 1);

/// Finite-window analogue of classify_situation for aperiodic potentials:
/// spanning components against the L_w/4 diameter heuristic.
Situation classify_window(const FieldFn& field, Vec2 center, double window_size,
                          int nx, int ny, double c, int jobs = 1);

/// Plane-lifted diameters of all non-wrapping components of the chosen sign.
std::vector<double> component_diameters(const ScalarGrid& grid, double c, bool below);

}  // namespace novikov
