#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "novikov/geometry.hpp"
#include "novikov/lattice.hpp"

namespace novikov {

struct FourierTerm {
  Vec2i k;                      // reciprocal-lattice index
  std::complex<double> c;      // coefficient
};

/// Finite Fourier series on a square or triangular lattice, real-valued and
/// exactly invariant under the symmetry rotation about the origin.
class PotentialSpec {
 public:
  PotentialSpec() = default;

  /// Closes the raw coefficients under conjugation (reality) and averages
  /// them over the rotation-group orbit, so the invariants hold exactly.
  static PotentialSpec symmetrized(SymmetryOrder symmetry, double T,
                                   const std::vector<FourierTerm>& raw);

  /// Verbatim terms; rejects inputs violating the reality or symmetry
  /// invariants beyond 1e-9. Used by deserialization for exact round-trips.
  static PotentialSpec exact(SymmetryOrder symmetry, double T,
                             std::vector<FourierTerm> terms);

  /// Seeded test-family draw: coefficients with cubic decay on all indices
  /// with norm2(k) <= cutoff^2, then symmetrized.
  static PotentialSpec random(std::uint64_t seed, SymmetryOrder symmetry, int cutoff,
                              double T);

  /// cos(g1.r) + cos(g2.r) for the square lattice, plus the third beam
  /// cos(g3.r) on the triangular one.
  static PotentialSpec cosine(SymmetryOrder symmetry, double T);

  double eval(Vec2 r) const;
  Vec2 grad(Vec2 r) const;

  SymmetryOrder symmetry() const { return symmetry_; }
  double period() const { return period_T_; }
  const std::vector<FourierTerm>& terms() const { return terms_; }
  const LatticeBasis& basis() const { return basis_; }

  /// sum |c_k| (bound on |V|).
  double value_bound() const;
  /// sum |c_k| |g_k| (bound on |grad V|).
  double gradient_bound() const;
  /// Shortest wavelength present (2pi / max |g_k|); period_T if empty.
  double min_wavelength() const;

  Vec2 reciprocal(Vec2i k) const;

 private:
  SymmetryOrder symmetry_ = SymmetryOrder::four;
  double period_T_ = 1.0;
  LatticeBasis basis_ = LatticeBasis::square(1.0);
  std::vector<FourierTerm> terms_;

  void set_lattice(SymmetryOrder symmetry, double T);
};

/// Smooth binary composition for pointwise superpositions: a bivariate
/// polynomial of degree <= 4.
struct QPolynomial {
  // monomials[(i, j)] = coefficient of u^i v^j
  std::map<std::pair<int, int>, double> monomials;

  double eval(double u, double v) const;
  double du(double u, double v) const;
  double dv(double u, double v) const;
  /// Bounds of |dQ/du|, |dQ/dv| on the box [-su, su] x [-sv, sv].
  std::pair<double, double> partial_bounds(double su, double sv) const;
};

enum class SuperposKind { linear, pointwise };

/// The pair (V1, U) with parameters (alpha, a, lambda):
///   V(r) = V1(r) (+ or Q) U(pi_{-alpha}(lambda r) - a).
struct SuperpositionSpec {
  PotentialSpec v1;
  PotentialSpec u;
  SuperposKind kind = SuperposKind::linear;
  double alpha = 0.0;
  Vec2 a{};
  double lambda = 1.0;
  std::optional<QPolynomial> Q;

  double eval(Vec2 r) const;
  Vec2 grad(Vec2 r) const;
  /// Second-factor argument map A(r) = pi_{-alpha}(lambda r) - a.
  Vec2 embed(Vec2 r) const;

  void validate() const;
};

/// The 4-periodic lift F(z1, z2, z3, z4) with F(r, A(r)) = V(r).
struct LiftedFunction {
  SuperpositionSpec spec;

  double eval(const std::array<double, 4>& z) const;
  std::array<double, 4> embed(Vec2 r) const;
};

LiftedFunction lift(const SuperpositionSpec& spec);

struct BoundConstants {
  double C1 = 0.0;  // bound on |grad_z F|
  double C2 = 0.0;  // bound on |d_alpha V| over the evaluation window
  double C3 = 0.0;  // bound on |d_lambda V| over the evaluation window
};

/// Certified coefficient-sum bounds. C2, C3 scale with the enclosing radius
/// of the evaluation window, since the embedding's angle and stretch
/// derivatives grow with |r|.
BoundConstants bound_constants(const SuperpositionSpec& spec, double window_radius = 0.0);

/// Checks the shift identities of the superposition family for basis index
/// `which` (1 or 2): a + e_i leaves V unchanged and a + lambda pi_{-alpha}(e_i)
/// translates the plane by e_i. Verified at `samples` random points, tol 1e-10.
bool shift_identity_check(const SuperpositionSpec& spec, int which,
                          std::uint64_t seed = 12345, int samples = 1000);

void to_json(nlohmann::ordered_json& j, const PotentialSpec& p);
void from_json(const nlohmann::json& j, PotentialSpec& p);
void to_json(nlohmann::ordered_json& j, const SuperpositionSpec& s);
void from_json(const nlohmann::json& j, SuperpositionSpec& s);

}  // namespace novikov
