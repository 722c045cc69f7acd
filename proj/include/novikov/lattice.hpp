#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "novikov/geometry.hpp"

namespace novikov {

/// Rotation symmetry order of the potential pair: 4 (square lattice),
/// 3 or 6 (triangular lattice).
enum class SymmetryOrder : int { four = 4, three = 3, six = 6 };

constexpr bool is_triangular(SymmetryOrder s) { return s != SymmetryOrder::four; }

/// Rotation angle of the potential's point symmetry (pi/2, 2pi/3 or pi/3).
double symmetry_rotation_angle(SymmetryOrder s);

/// Quadratic form |m e1 + n e2|^2 / T^2 of the underlying lattice:
/// m^2 + n^2 for the square lattice, m^2 + n^2 + mn for the triangular one.
std::int64_t pair_norm2(SymmetryOrder s, std::int64_t m, std::int64_t n);

/// Exact tangent of a magic angle: num/den, times sqrt(3) when sqrt3 is set.
struct TanValue {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool sqrt3 = false;

  double value() const;
  std::string str() const;
};

/// A commensurate ("magic") rotation angle, held exactly through the coprime
/// pair (m, n). Floating-point members are derived, never authoritative.
struct MagicAngle {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t m0 = 0;  // parity/gamma-reduced pair governing periods and steps
  std::int64_t n0 = 0;
  SymmetryOrder symmetry = SymmetryOrder::four;
  int sign = +1;  // -1 only for the order-3 negative series
  TanValue tan_value;
  double angle_radians = 0.0;

  std::int64_t norm2() const { return pair_norm2(symmetry, m, n); }
  std::int64_t reduced_norm2() const { return pair_norm2(symmetry, m0, n0); }

  static MagicAngle create(std::int64_t m, std::int64_t n, SymmetryOrder symmetry,
                           int sign = +1);
};

/// Reduced pair (m0, n0): parity rule for order 4, gamma = gcd(2n+m, m-n)
/// rule for orders 3/6. Rejects non-coprime input.
std::pair<std::int64_t, std::int64_t> reduce_pair(std::int64_t m, std::int64_t n,
                                                  SymmetryOrder symmetry);

/// All magic angles with m <= max_m, sorted ascending by angle.
std::vector<MagicAngle> enumerate_magic_angles(SymmetryOrder symmetry, int max_m);

/// Period lattice basis of one potential: |e1| = |e2| = T and e2 is e1
/// rotated by the lattice base angle (90 or 60 degrees).
struct LatticeBasis {
  Vec2 e1, e2;
  double period_T = 1.0;
  SymmetryOrder symmetry = SymmetryOrder::four;

  static LatticeBasis square(double T);
  static LatticeBasis triangular(double T);
  /// Canonical basis for the symmetry order (square for 4, triangular else).
  static LatticeBasis canonical(SymmetryOrder s, double T);

  LatticeBasis rotated(double alpha) const;
  LatticeBasis scaled(double f) const;
  Vec2 vec(double i, double j) const { return e1 * i + e2 * j; }
};

/// Periods of a magic-angle superposition. b1, b2 always hold a minimal pair;
/// `minimal` records whether the unreduced pair {base_b1, base_b2} was already
/// minimal (different parity for order 4, gamma = 1 for orders 3/6).
struct PeriodPair {
  Vec2 b1, b2;
  bool minimal = true;
  Vec2 base_b1, base_b2;
};

PeriodPair superposition_periods(const MagicAngle& angle, double T);

/// Lattice of shift vectors `a` leaving the superposition in one equivalence
/// class (plain) or moving it across exactly-symmetric configurations
/// (with_symmetry_centers). Basis is Gauss-reduced; step = |g1|.
struct EquivalenceLattice {
  Vec2 g1, g2;
  double step = 0.0;

  /// Nearest lattice vector to a (ties resolved toward the lexicographically
  /// smallest residual).
  Vec2 nearest(Vec2 a) const;
  /// Residual a - nearest(a).
  Vec2 reduce(Vec2 a) const { return a - nearest(a); }
};

EquivalenceLattice equivalence_lattice(const MagicAngle& angle, double T,
                                       bool with_symmetry_centers);

/// Reduce a shift modulo the (plain or symmetry-center) equivalence lattice.
Vec2 reduce_shift(Vec2 a, const MagicAngle& angle, double T, bool to_symmetric);

/// Magic angles approximating a generic angle through continued-fraction
/// convergents of the auxiliary variable; n strictly increases along the list.
/// Throws MagicAngleError if alpha is itself magic (within 1e-12 rad).
std::vector<MagicAngle> approximate_angle(double alpha, SymmetryOrder symmetry,
                                          int count);

/// Exact rational action of the magic rotation on lattice coordinates:
/// pi_{sign_dir * alpha}(p e1 + q e2) = (mat . (p,q)) / den in the e-basis.
struct RationalRotation {
  std::int64_t a = 1, b = 0, c = 0, d = 1;  // row-major 2x2
  std::int64_t den = 1;
  Vec2i apply_num(Vec2i v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
};

RationalRotation rational_rotation(const MagicAngle& angle, bool inverse);

struct DirichletPair {
  Vec2i m, n;
  double residual = 0.0;
};

/// Near-coincidence pair of two incommensurate lattices: integer vectors with
/// |m.e' - n.e| < sqrt(2) T / q and |m| <= 2q, by exhaustive search.
/// Throws CommensurateCollision on an exact relation.
DirichletPair dirichlet_pair(const LatticeBasis& basis1, const LatticeBasis& basis2,
                             int q);

/// One periodic approximant of an incommensurate superposition: the second
/// lattice is rotated by delta_alpha and stretched by 1 + delta_lambda so that
/// m.e' coincides with n.e exactly.
struct PeriodicApproximant {
  Vec2i n_vec, m_vec;
  double delta_alpha = 0.0;
  double delta_lambda = 0.0;
  double T_s = 0.0;     // |n| * T
  double norm_n = 0.0;  // quadratic-form norm of n_vec

  static PeriodicApproximant create(SymmetryOrder symmetry, Vec2i n_vec, Vec2i m_vec,
                                    double delta_alpha, double delta_lambda, double T);
};

/// Sequence of approximants with strictly increasing |n_s|. basis2 is the
/// second potential's own lattice; alpha is the plane rotation applied to it.
std::vector<PeriodicApproximant> build_approximant_sequence(const LatticeBasis& basis1,
                                                            const LatticeBasis& basis2,
                                                            double alpha, int s_max);

}  // namespace novikov
