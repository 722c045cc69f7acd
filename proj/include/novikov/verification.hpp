#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "novikov/lattice.hpp"
#include "novikov/levelsets.hpp"
#include "novikov/potential.hpp"

namespace novikov {

/// Grid / tolerance knobs shared by the verification harnesses.
struct ResolutionParams {
  int nx = 0;             // 0 = auto from samples_per_T
  int samples_per_T = 48;  // base sampling density per factor period
  int max_grid = 768;
  double tol = 0.0;  // 0 = (max-min)*1e-4
  int jobs = 1;
};

/// Linear cosine-family superposition (the bundled reference family).
SuperpositionSpec cosine_family(SymmetryOrder symmetry, double T, double alpha = 0.0,
                                Vec2 a = {});

/// Seeded random symmetric pair; u_period = 0 reuses T.
SuperpositionSpec seeded_family(std::uint64_t seed, SymmetryOrder symmetry, int cutoff,
                                double T, double u_period = 0.0);

struct IntervalWidthReport {
  MagicAngle angle;
  struct ShiftSample {
    Vec2 a;
    double c_hat_1 = 0.0, c_hat_2 = 0.0;
  };
  std::vector<ShiftSample> samples;
  double symmetric_width = 0.0;  // a = 0 representative
  double bound = 0.0;            // per-shift width bound
  double union_bound = 0.0;      // union-of-intervals bound
  double max_width = 0.0;
  double union_width = 0.0;
  double slack = 0.0;
  double tol = 0.0;
  int nx = 0;
  bool pass = false;
};

/// Per-shift critical intervals of `family` at a magic angle versus the
/// interval-width bounds; shifts drawn uniformly from the fundamental cell of
/// the equivalence lattice.
IntervalWidthReport verify_interval_width(const SuperpositionSpec& family,
                                          const MagicAngle& angle, int n_shifts,
                                          const ResolutionParams& res,
                                          std::uint64_t seed = 7);

struct DiameterReport {
  double c0 = 0.0;
  double C1 = 0.0;
  double L = 0.0;
  double D = 0.0;  // sqrt(5) C1 / 2 for order 4, C1 for orders 3/6
  struct Entry {
    double delta_c = 0.0;
    double bound = 0.0;
    double max_diameter = 0.0;  // over both sign sets; 0 when empty
    int wrapping_components = 0;
    bool pass = false;
  };
  std::vector<Entry> entries;
  double slack = 0.0;
  int nx = 0;
  bool pass = false;
};

/// Sublevel/superlevel component diameters of a symmetric periodic potential
/// at c0 -+ delta_c against the diameter bound sqrt(D L / delta_c) L.
DiameterReport verify_diameter_bound(const PotentialSpec& potential,
                                     const std::vector<double>& delta_c,
                                     const ResolutionParams& res);

struct ConvergenceReport {
  double alpha = 0.0;
  struct Bracket {
    std::int64_t m = 0, n = 0;     // magic-angle route
    Vec2i n_vec{}, m_vec{};        // incommensurate route
    double norm_n = 0.0;
    double c0 = 0.0;
    double delta = 0.0;
    int nx = 0;
    double width() const { return 2.0 * delta; }
  };
  std::vector<Bracket> brackets;
  int nesting_violations = 0;
  bool widths_decreasing = false;
  bool cauchy_consistent = false;
  bool pass = false;
};

/// Magic-angle approximant brackets I_{m,n} around c0(alpha_{m,n}, 0, 0);
/// a passing run has strictly decreasing widths and zero nesting violations.
ConvergenceReport verify_theorem_convergence(const SuperpositionSpec& family,
                                             double alpha, int depth,
                                             const ResolutionParams& res);

/// Dirichlet-approximant brackets for incommensurate periods T' < T.
ConvergenceReport verify_incommensurate(const SuperpositionSpec& family, double alpha,
                                        int s_max, const ResolutionParams& res);

nlohmann::ordered_json to_json(const IntervalWidthReport& r);
nlohmann::ordered_json to_json(const DiameterReport& r);
nlohmann::ordered_json to_json(const ConvergenceReport& r);

}  // namespace novikov
