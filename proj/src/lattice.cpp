#include "novikov/lattice.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <numeric>

#include "novikov/errors.hpp"

namespace novikov {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  return std::gcd(std::llabs(a), std::llabs(b));
}

// Extended gcd: returns g = gcd(a, b) and (s, t) with s*a + t*b = g.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& s, std::int64_t& t) {
  if (b == 0) {
    s = (a >= 0) ? 1 : -1;
    t = 0;
    return std::llabs(a);
  }
  std::int64_t s1 = 0, t1 = 0;
  const std::int64_t g = ext_gcd(b, a % b, s1, t1);
  s = t1;
  t = s1 - (a / b) * t1;
  return g;
}

}  // namespace

double symmetry_rotation_angle(SymmetryOrder s) {
  switch (s) {
    case SymmetryOrder::four: return kPi / 2;
    case SymmetryOrder::three: return 2 * kPi / 3;
    case SymmetryOrder::six: return kPi / 3;
  }
  return kPi / 2;
}

std::int64_t pair_norm2(SymmetryOrder s, std::int64_t m, std::int64_t n) {
  return is_triangular(s) ? m * m + n * n + m * n : m * m + n * n;
}

double TanValue::value() const {
  double v = static_cast<double>(num) / static_cast<double>(den);
  if (sqrt3) v *= std::sqrt(3.0);
  return v;
}

std::string TanValue::str() const {
  std::string s = std::to_string(num);
  if (sqrt3) s += "*sqrt(3)";
  if (den != 1) s += "/" + std::to_string(den);
  return s;
}

std::pair<std::int64_t, std::int64_t> reduce_pair(std::int64_t m, std::int64_t n,
                                                  SymmetryOrder symmetry) {
  if (m <= n || n < 0) throw ValidationError("reduce_pair: requires m > n >= 0");
  if (gcd64(m, n) != 1) throw ValidationError("reduce_pair: pair is not coprime");
  if (symmetry == SymmetryOrder::four) {
    if ((m + n) % 2 == 0) return {(m + n) / 2, (m - n) / 2};  // both odd
    return {m, n};
  }
  if ((m - n) % 3 == 0) return {(2 * n + m) / 3, (m - n) / 3};
  return {m, n};
}

MagicAngle MagicAngle::create(std::int64_t m, std::int64_t n, SymmetryOrder symmetry,
                              int sign) {
  if (sign != 1 && sign != -1) throw ValidationError("MagicAngle: sign must be +-1");
  if (sign == -1 && symmetry != SymmetryOrder::three)
    throw ValidationError("MagicAngle: negative series exists only for order 3");
  const std::int64_t nmin = (sign == -1) ? 0 : 1;
  if (m <= n || n < nmin) throw ValidationError("MagicAngle: requires m > n");
  if (gcd64(m, n) != 1) throw ValidationError("MagicAngle: pair is not coprime");

  MagicAngle a;
  a.m = m;
  a.n = n;
  a.symmetry = symmetry;
  a.sign = sign;
  std::tie(a.m0, a.n0) = reduce_pair(m, n, symmetry);

  if (symmetry == SymmetryOrder::four) {
    std::int64_t num = m * m - n * n, den = 2 * m * n;
    const std::int64_t g = gcd64(num, den);
    a.tan_value = {num / g, den / g, false};
  } else {
    std::int64_t num = m * m - n * n, den = m * m + n * n + 4 * m * n;
    const std::int64_t g = gcd64(num, den);
    a.tan_value = {num / g, den / g, true};
  }
  a.angle_radians = sign * std::atan(a.tan_value.value());
  return a;
}

std::vector<MagicAngle> enumerate_magic_angles(SymmetryOrder symmetry, int max_m) {
  if (max_m < 2) throw ValidationError("enumerate_magic_angles: max_m must be >= 2");
  std::vector<MagicAngle> out;
  for (std::int64_t m = 2; m <= max_m; ++m)
    for (std::int64_t n = 1; n < m; ++n)
      if (gcd64(m, n) == 1) out.push_back(MagicAngle::create(m, n, symmetry));
  if (symmetry == SymmetryOrder::three) {
    out.push_back(MagicAngle::create(1, 0, symmetry, -1));
    for (std::int64_t m = 2; m <= max_m; ++m)
      for (std::int64_t n = 1; n < m; ++n)
        if (gcd64(m, n) == 1) out.push_back(MagicAngle::create(m, n, symmetry, -1));
  }
  std::sort(out.begin(), out.end(),
            [](const MagicAngle& x, const MagicAngle& y) {
              return x.angle_radians < y.angle_radians;
            });
  return out;
}

LatticeBasis LatticeBasis::square(double T) {
  return {{T, 0.0}, {0.0, T}, T, SymmetryOrder::four};
}

LatticeBasis LatticeBasis::triangular(double T) {
  return {{T, 0.0}, {T / 2, T * std::sqrt(3.0) / 2}, T, SymmetryOrder::six};
}

LatticeBasis LatticeBasis::canonical(SymmetryOrder s, double T) {
  LatticeBasis b = is_triangular(s) ? triangular(T) : square(T);
  b.symmetry = s;
  return b;
}

LatticeBasis LatticeBasis::rotated(double alpha) const {
  return {rotate(e1, alpha), rotate(e2, alpha), period_T, symmetry};
}

LatticeBasis LatticeBasis::scaled(double f) const {
  return {e1 * f, e2 * f, period_T * f, symmetry};
}

PeriodPair superposition_periods(const MagicAngle& angle, double T) {
  const LatticeBasis basis = LatticeBasis::canonical(angle.symmetry, T);
  const std::int64_t m = angle.m, n = angle.n;
  PeriodPair pp;
  if (angle.symmetry == SymmetryOrder::four) {
    pp.base_b1 = basis.vec(double(m), double(-n));
    pp.base_b2 = basis.vec(double(n), double(m));
    pp.minimal = ((m + n) % 2 != 0);
    if (pp.minimal) {
      pp.b1 = pp.base_b1;
      pp.b2 = pp.base_b2;
    } else {
      pp.b1 = (pp.base_b1 - pp.base_b2) * 0.5;
      pp.b2 = (pp.base_b1 + pp.base_b2) * 0.5;
    }
    return pp;
  }
  const bool reduced = ((m - n) % 3 == 0);
  pp.minimal = !reduced;
  if (angle.sign > 0) {
    pp.base_b1 = basis.vec(double(m + n), double(-n));
    pp.base_b2 = basis.vec(double(n), double(m));
    if (reduced) {
      pp.b1 = basis.vec(double(n + 2 * m) / 3, double(-2 * n - m) / 3);
      pp.b2 = basis.vec(double(2 * n + m) / 3, double(m - n) / 3);
    } else {
      pp.b1 = pp.base_b1;
      pp.b2 = pp.base_b2;
    }
  } else {
    pp.base_b1 = basis.vec(double(m + n), double(-m));
    pp.base_b2 = basis.vec(double(m), double(n));
    if (reduced) {
      pp.b1 = basis.vec(double(2 * m + n) / 3, double(n - m) / 3);
      pp.b2 = basis.vec(double(m - n) / 3, double(2 * n + m) / 3);
    } else {
      pp.b1 = pp.base_b1;
      pp.b2 = pp.base_b2;
    }
  }
  return pp;
}

RationalRotation rational_rotation(const MagicAngle& angle, bool inverse) {
  const std::int64_t m = angle.m, n = angle.n;
  RationalRotation r;
  if (angle.symmetry == SymmetryOrder::four) {
    // cos = 2mn/N, sin = (m^2-n^2)/N on the orthonormal square basis.
    const std::int64_t N = m * m + n * n;
    std::int64_t c = 2 * m * n, s = m * m - n * n;
    if (inverse) s = -s;
    r = {c, -s, s, c, N};
  } else {
    // pi_{-alpha}(p,q) = [[m(m+2n), m^2-n^2], [n^2-m^2, n(n+2m)]] / N
    // in e-basis coordinates; pi_{+alpha} is the adjugate (det = 1).
    const std::int64_t N = m * m + n * n + m * n;
    const std::int64_t A = m * (m + 2 * n), B = m * m - n * n, D = n * (n + 2 * m);
    const bool want_inverse = inverse ^ (angle.sign < 0);
    if (want_inverse)
      r = {A, B, -B, D, N};
    else
      r = {D, -B, B, A, N};
  }
  const std::int64_t g = std::gcd(std::gcd(gcd64(r.a, r.b), gcd64(r.c, r.d)), r.den);
  r.a /= g; r.b /= g; r.c /= g; r.d /= g; r.den /= g;
  return r;
}

namespace {

// Hermite-style basis of the integer lattice spanned by `gens` (rank 2 assumed).
std::pair<Vec2i, Vec2i> integer_lattice_basis(std::vector<Vec2i> gens) {
  Vec2i u{0, 0};
  for (const Vec2i& v : gens) {
    if (v.x == 0) continue;
    if (u.x == 0) {
      u = v;
      continue;
    }
    std::int64_t s = 0, t = 0;
    const std::int64_t g = ext_gcd(u.x, v.x, s, t);
    u = {g, s * u.y + t * v.y};
  }
  std::int64_t gy = 0;
  for (Vec2i v : gens) {
    if (u.x != 0) v = v - Vec2i{(v.x / u.x) * u.x, (v.x / u.x) * u.y};
    gy = gcd64(gy, v.y);
  }
  if (u.x == 0 || gy == 0) throw Error("integer lattice is not full-rank");
  u.y %= gy;  // normalize
  return {u, {0, gy}};
}

// Lagrange reduction of a planar lattice basis to a shortest pair.
void gauss_reduce(Vec2& u, Vec2& w) {
  for (int it = 0; it < 64; ++it) {
    if (u.norm2() > w.norm2()) std::swap(u, w);
    const double k = std::round(w.dot(u) / u.norm2());
    if (k == 0.0) break;
    w -= u * k;
  }
  if (u.norm2() > w.norm2()) std::swap(u, w);
}

}  // namespace

EquivalenceLattice equivalence_lattice(const MagicAngle& angle, double T,
                                       bool with_symmetry_centers) {
  const LatticeBasis basis = LatticeBasis::canonical(angle.symmetry, T);
  const RationalRotation rot = rational_rotation(angle, /*inverse=*/true);
  const std::int64_t N = rot.den;
  const bool tri = is_triangular(angle.symmetry);

  std::vector<Vec2i> gens;
  std::int64_t den = N;
  if (!with_symmetry_centers) {
    gens = {{N, 0}, {0, N}, {rot.a, rot.c}, {rot.b, rot.d}};
  } else {
    // Symmetry centers of each factor: the half-integer checkerboard for the
    // square lattice, the third-points along e1+e2 for the triangular one.
    const std::int64_t f = tri ? 3 : 2;
    den = f * N;
    gens = {{f * N, 0}, {0, f * N}, {N, N},
            {f * rot.a, f * rot.c}, {f * rot.b, f * rot.d},
            {rot.a + rot.b, rot.c + rot.d}};
  }
  auto [u, w] = integer_lattice_basis(gens);
  const double d = static_cast<double>(den);
  Vec2 g1 = basis.vec(u.x / d, u.y / d);
  Vec2 g2 = basis.vec(w.x / d, w.y / d);
  gauss_reduce(g1, g2);
  return {g1, g2, g1.norm()};
}

Vec2 EquivalenceLattice::nearest(Vec2 a) const {
  const Vec2 c = solve2x2(g1, g2, a);
  const double r1 = std::round(c.x), r2 = std::round(c.y);
  Vec2 best{};
  double best_n2 = std::numeric_limits<double>::infinity();
  Vec2 best_res{};
  for (int di = -2; di <= 2; ++di)
    for (int dj = -2; dj <= 2; ++dj) {
      const Vec2 cand = g1 * (r1 + di) + g2 * (r2 + dj);
      const Vec2 res = a - cand;
      const double n2 = res.norm2();
      if (n2 < best_n2 - 1e-15 ||
          (n2 < best_n2 + 1e-15 && lex_less(res, best_res))) {
        best_n2 = n2;
        best = cand;
        best_res = res;
      }
    }
  return best;
}

Vec2 reduce_shift(Vec2 a, const MagicAngle& angle, double T, bool to_symmetric) {
  return equivalence_lattice(angle, T, to_symmetric).reduce(a);
}

std::vector<MagicAngle> approximate_angle(double alpha, SymmetryOrder symmetry,
                                          int count) {
  if (count < 1) throw ValidationError("approximate_angle: count must be >= 1");
  int sign = +1;
  double a = alpha;
  if (symmetry == SymmetryOrder::three && alpha < 0) {
    sign = -1;
    a = -alpha;
  }
  const double hi = (symmetry == SymmetryOrder::four) ? kPi / 2 : kPi / 3;
  if (!(a > 0.0 && a < hi))
    throw ValidationError("approximate_angle: alpha outside the generic range");

  const double t = std::tan(a);
  double x;
  if (symmetry == SymmetryOrder::four)
    x = std::sqrt(t * t + 1.0) + t;
  else
    x = (std::sqrt(3.0) * std::sqrt(t * t + 1.0) + 2.0 * t) / (std::sqrt(3.0) - t);

  const double quality =
      (symmetry == SymmetryOrder::four) ? 1.0 : 2.0 / std::sqrt(3.0);

  std::vector<MagicAngle> out;
  double rem = x;
  std::int64_t p_prev = 1, q_prev = 0, p_cur = 0, q_cur = 1;  // p_cur/q_cur after first step
  bool first = true;
  for (int it = 0; it < 128 && static_cast<int>(out.size()) < count; ++it) {
    const double flo = std::floor(rem);
    const auto ak = static_cast<std::int64_t>(flo);
    std::int64_t p, q;
    if (first) {
      p = ak;
      q = 1;
      p_prev = 1; q_prev = 0; p_cur = p; q_cur = q;
      first = false;
    } else {
      p = ak * p_cur + p_prev;
      q = ak * q_cur + q_prev;
      p_prev = p_cur; q_prev = q_cur; p_cur = p; q_cur = q;
    }
    if (p > (std::int64_t(1) << 30) || q > (std::int64_t(1) << 30)) break;

    if (p > q && q >= 1) {
      MagicAngle ma = MagicAngle::create(p, q, symmetry, sign);
      if (std::abs(ma.angle_radians - alpha) < 1e-12) throw MagicAngleError();
      const double bound = quality / (double(q) * double(q)) + 1e-12;
      if (std::abs(ma.angle_radians - alpha) < bound) {
        if (!out.empty() && out.back().n == q)
          out.back() = ma;  // better convergent with the same denominator
        else
          out.push_back(std::move(ma));
      }
    }
    const double frac = rem - flo;
    if (frac < 1e-14) break;  // x rational to machine precision
    rem = 1.0 / frac;
  }
  if (static_cast<int>(out.size()) < count) throw MagicAngleError();
  return out;
}

DirichletPair dirichlet_pair(const LatticeBasis& basis1, const LatticeBasis& basis2,
                             int q) {
  if (q < 1) throw ValidationError("dirichlet_pair: q must be >= 1");
  if (basis1.symmetry != basis2.symmetry &&
      is_triangular(basis1.symmetry) != is_triangular(basis2.symmetry))
    throw ValidationError("dirichlet_pair: bases must share the lattice type");
  const LatticeBasis* b1 = &basis1;
  const LatticeBasis* b2 = &basis2;
  if (b2->period_T > b1->period_T) std::swap(b1, b2);
  const double T = b1->period_T;
  const SymmetryOrder sym = b1->symmetry;

  const std::int64_t lim = 4ll * q * q;
  DirichletPair best;
  double best_res = std::numeric_limits<double>::infinity();
  std::int64_t best_mnorm = 0;
  for (std::int64_t i = -2 * q; i <= 2 * q; ++i) {
    for (std::int64_t j = -2 * q; j <= 2 * q; ++j) {
      if (i == 0 && j == 0) continue;
      if (i < 0 || (i == 0 && j < 0)) continue;  // +-m give mirror pairs
      const std::int64_t mn2 = pair_norm2(sym, i, j);
      if (mn2 > lim) continue;
      const Vec2 w = b2->vec(double(i), double(j));
      const Vec2 c = solve2x2(b1->e1, b1->e2, w);
      double res2 = std::numeric_limits<double>::infinity();
      Vec2i nbest{};
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const auto ni = static_cast<std::int64_t>(std::round(c.x)) + di;
          const auto nj = static_cast<std::int64_t>(std::round(c.y)) + dj;
          const double r2 = (w - b1->vec(double(ni), double(nj))).norm2();
          if (r2 < res2) {
            res2 = r2;
            nbest = {ni, nj};
          }
        }
      const double res = std::sqrt(res2);
      if (res < best_res - 1e-15 ||
          (res < best_res + 1e-15 &&
           (mn2 < best_mnorm || (mn2 == best_mnorm && Vec2i{i, j} < best.m)))) {
        best_res = res;
        best_mnorm = mn2;
        best = {{i, j}, nbest, res};
      }
    }
  }
  if (best_res < 1e-12 * T) throw CommensurateCollision();
  if (!(best_res < std::sqrt(2.0) * T / q))
    throw Error("dirichlet residual bound violated");
  return best;
}

PeriodicApproximant PeriodicApproximant::create(SymmetryOrder symmetry, Vec2i n_vec,
                                                Vec2i m_vec, double delta_alpha,
                                                double delta_lambda, double T) {
  PeriodicApproximant s;
  s.n_vec = n_vec;
  s.m_vec = m_vec;
  s.delta_alpha = delta_alpha;
  s.delta_lambda = delta_lambda;
  s.norm_n = std::sqrt(double(pair_norm2(symmetry, n_vec.x, n_vec.y)));
  s.T_s = s.norm_n * T;
  const double n2 = s.norm_n * s.norm_n;
  if (!(std::abs(delta_alpha) < 3.0 / n2))
    throw ValidationError("PeriodicApproximant: |delta_alpha| >= 3/|n|^2");
  if (!(std::abs(delta_lambda) < 2.0 * std::sqrt(2.0) / n2))
    throw ValidationError("PeriodicApproximant: |delta_lambda| >= 2*sqrt(2)/|n|^2");
  return s;
}

std::vector<PeriodicApproximant> build_approximant_sequence(const LatticeBasis& basis1,
                                                            const LatticeBasis& basis2,
                                                            double alpha, int s_max) {
  if (s_max < 1) throw ValidationError("build_approximant_sequence: s_max must be >= 1");
  const LatticeBasis plane2 = basis2.rotated(alpha);
  const SymmetryOrder sym = basis1.symmetry;
  std::vector<PeriodicApproximant> out;
  std::int64_t last_n2 = 0;
  for (int q = 3; q <= (1 << 14) && static_cast<int>(out.size()) < s_max; q *= 2) {
    const DirichletPair dp = dirichlet_pair(basis1, plane2, q);
    const std::int64_t n2 = pair_norm2(sym, dp.n.x, dp.n.y);
    if (n2 <= last_n2) continue;
    const Vec2 ne = basis1.vec(double(dp.n.x), double(dp.n.y));
    const Vec2 me = plane2.vec(double(dp.m.x), double(dp.m.y));
    const double dalpha = std::atan2(ne.cross(me), ne.dot(me));
    const double dlambda = me.norm() / ne.norm() - 1.0;
    try {
      out.push_back(PeriodicApproximant::create(sym, dp.n, dp.m, dalpha, dlambda,
                                                basis1.period_T));
      last_n2 = n2;
    } catch (const ValidationError&) {
      // paper bounds only hold for sufficiently large q; try a finer grid
    }
  }
  if (static_cast<int>(out.size()) < s_max)
    throw Error("approximant sequence exhausted before s_max");
  return out;
}

}  // namespace novikov
