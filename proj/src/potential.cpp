#include "novikov/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "novikov/errors.hpp"

namespace novikov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Action of the symmetry rotation on reciprocal indices.
Vec2i reciprocal_step(SymmetryOrder s, Vec2i k) {
  switch (s) {
    case SymmetryOrder::four: return {k.y, -k.x};
    case SymmetryOrder::six: return {k.x - k.y, k.x};
    case SymmetryOrder::three: return {-k.y, k.x - k.y};
  }
  return k;
}

int orbit_order(SymmetryOrder s) {
  return s == SymmetryOrder::four ? 4 : (s == SymmetryOrder::six ? 6 : 3);
}

std::int64_t reciprocal_norm2(SymmetryOrder s, Vec2i k) {
  // Proportional to |g_k|^2; the triangular reciprocal carries the conjugate
  // Eisenstein form.
  return is_triangular(s) ? k.x * k.x - k.x * k.y + k.y * k.y
                          : k.x * k.x + k.y * k.y;
}

}  // namespace

void PotentialSpec::set_lattice(SymmetryOrder symmetry, double T) {
  if (!(T > 0.0)) throw ValidationError("PotentialSpec: period must be positive");
  symmetry_ = symmetry;
  period_T_ = T;
  basis_ = LatticeBasis::canonical(symmetry, T);
}

Vec2 PotentialSpec::reciprocal(Vec2i k) const {
  const double f = kTwoPi / period_T_;
  if (!is_triangular(symmetry_)) return {f * double(k.x), f * double(k.y)};
  const double s3 = std::sqrt(3.0);
  return {f * double(k.x), f * (2.0 * double(k.y) - double(k.x)) / s3};
}

PotentialSpec PotentialSpec::symmetrized(SymmetryOrder symmetry, double T,
                                         const std::vector<FourierTerm>& raw) {
  if (raw.empty()) throw ValidationError("PotentialSpec: empty coefficient set");
  std::map<Vec2i, std::complex<double>> in;
  for (const FourierTerm& t : raw) in[t.k] += t.c;

  // Reality closure, then projection onto the rotation-invariant subspace.
  std::map<Vec2i, std::complex<double>> real_cl;
  for (const auto& [k, c] : in) {
    const auto it = in.find(-k);
    const std::complex<double> cm = (it != in.end()) ? it->second : 0.0;
    real_cl[k] = 0.5 * (c + std::conj(cm));
    real_cl[-k] = std::conj(real_cl[k]);
  }
  const int ord = orbit_order(symmetry);
  std::map<Vec2i, std::complex<double>> out;
  for (const auto& [k, c] : real_cl) {
    if (out.count(k)) continue;
    std::complex<double> avg = 0.0;
    Vec2i kk = k;
    for (int t = 0; t < ord; ++t) {
      const auto it = real_cl.find(kk);
      if (it != real_cl.end()) avg += it->second;
      kk = reciprocal_step(symmetry, kk);
    }
    avg /= double(ord);
    kk = k;
    for (int t = 0; t < ord; ++t) {
      out[kk] = avg;
      kk = reciprocal_step(symmetry, kk);
    }
  }

  double cmax = 0.0;
  for (const auto& [k, c] : out) cmax = std::max(cmax, std::abs(c));
  PotentialSpec p;
  p.set_lattice(symmetry, T);
  for (const auto& [k, c] : out)
    if (std::abs(c) > 1e-15 * std::max(1.0, cmax) && !(k.x == 0 && k.y == 0))
      p.terms_.push_back({k, c});
  if (p.terms_.empty()) throw ValidationError("PotentialSpec: empty coefficient set");
  return p;
}

PotentialSpec PotentialSpec::exact(SymmetryOrder symmetry, double T,
                                   std::vector<FourierTerm> terms) {
  PotentialSpec probe = symmetrized(symmetry, T, terms);
  std::map<Vec2i, std::complex<double>> want;
  for (const FourierTerm& t : probe.terms()) want[t.k] = t.c;
  std::map<Vec2i, std::complex<double>> got;
  for (const FourierTerm& t : terms) got[t.k] += t.c;
  for (const auto& [k, c] : want)
    if (std::abs((got.count(k) ? got.at(k) : 0.0) - c) > 1e-9)
      throw ValidationError("PotentialSpec: terms violate reality/symmetry invariants");
  for (const auto& [k, c] : got)
    if (!want.count(k) && std::abs(c) > 1e-9)
      throw ValidationError("PotentialSpec: terms violate reality/symmetry invariants");
  PotentialSpec p;
  p.set_lattice(symmetry, T);
  p.terms_ = std::move(terms);
  return p;
}

PotentialSpec PotentialSpec::random(std::uint64_t seed, SymmetryOrder symmetry,
                                    int cutoff, double T) {
  if (cutoff < 1) throw ValidationError("PotentialSpec::random: cutoff must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<FourierTerm> raw;
  const std::int64_t lim = std::int64_t(cutoff) * cutoff;
  for (std::int64_t x = -cutoff; x <= cutoff; ++x)
    for (std::int64_t y = -cutoff; y <= cutoff; ++y) {
      const Vec2i k{x, y};
      if (k.zero() || reciprocal_norm2(symmetry, k) > lim) continue;
      if (!(x > 0 || (x == 0 && y > 0))) continue;  // canonical half
      const double kn = std::sqrt(double(reciprocal_norm2(symmetry, k)));
      const double amp = unit(rng) / std::pow(1.0 + kn, 3.0);
      const double phase = kTwoPi * unit(rng);
      const std::complex<double> c = std::polar(amp, phase);
      raw.push_back({k, c});
      raw.push_back({-k, std::conj(c)});
    }
  return symmetrized(symmetry, T, raw);
}

PotentialSpec PotentialSpec::cosine(SymmetryOrder symmetry, double T) {
  std::vector<FourierTerm> raw;
  auto add = [&raw](std::int64_t x, std::int64_t y) {
    raw.push_back({{x, y}, 0.5});
    raw.push_back({{-x, -y}, 0.5});
  };
  add(1, 0);
  add(0, 1);
  if (is_triangular(symmetry)) add(1, 1);
  return symmetrized(symmetry, T, raw);
}

double PotentialSpec::eval(Vec2 r) const {
  double acc = 0.0;
  for (const FourierTerm& t : terms_) {
    const Vec2 g = reciprocal(t.k);
    const double ph = g.dot(r);
    acc += t.c.real() * std::cos(ph) - t.c.imag() * std::sin(ph);
  }
  return acc;
}

Vec2 PotentialSpec::grad(Vec2 r) const {
  Vec2 acc{};
  for (const FourierTerm& t : terms_) {
    const Vec2 g = reciprocal(t.k);
    const double ph = g.dot(r);
    const double d = -t.c.real() * std::sin(ph) - t.c.imag() * std::cos(ph);
    acc += g * d;
  }
  return acc;
}

double PotentialSpec::value_bound() const {
  double s = 0.0;
  for (const FourierTerm& t : terms_) s += std::abs(t.c);
  return s;
}

double PotentialSpec::gradient_bound() const {
  double s = 0.0;
  for (const FourierTerm& t : terms_) s += std::abs(t.c) * reciprocal(t.k).norm();
  return s;
}

double PotentialSpec::min_wavelength() const {
  double gmax = 0.0;
  for (const FourierTerm& t : terms_) gmax = std::max(gmax, reciprocal(t.k).norm());
  return gmax > 0.0 ? kTwoPi / gmax : period_T_;
}

double QPolynomial::eval(double u, double v) const {
  double acc = 0.0;
  for (const auto& [ij, c] : monomials)
    acc += c * std::pow(u, ij.first) * std::pow(v, ij.second);
  return acc;
}

double QPolynomial::du(double u, double v) const {
  double acc = 0.0;
  for (const auto& [ij, c] : monomials)
    if (ij.first > 0)
      acc += c * ij.first * std::pow(u, ij.first - 1) * std::pow(v, ij.second);
  return acc;
}

double QPolynomial::dv(double u, double v) const {
  double acc = 0.0;
  for (const auto& [ij, c] : monomials)
    if (ij.second > 0)
      acc += c * ij.second * std::pow(u, ij.first) * std::pow(v, ij.second - 1);
  return acc;
}

std::pair<double, double> QPolynomial::partial_bounds(double su, double sv) const {
  double bu = 0.0, bv = 0.0;
  for (const auto& [ij, c] : monomials) {
    const auto [i, j] = ij;
    if (i > 0) bu += std::abs(c) * i * std::pow(su, i - 1) * std::pow(sv, j);
    if (j > 0) bv += std::abs(c) * j * std::pow(su, i) * std::pow(sv, j - 1);
  }
  return {bu, bv};
}

void SuperpositionSpec::validate() const {
  if (is_triangular(v1.symmetry()) != is_triangular(u.symmetry()))
    throw ValidationError("SuperpositionSpec: factors must share the lattice type");
  if (!(lambda > 0.0)) throw ValidationError("SuperpositionSpec: lambda must be positive");
  if ((kind == SuperposKind::pointwise) != Q.has_value())
    throw ValidationError("SuperpositionSpec: Q present iff kind is pointwise");
  if (Q) {
    for (const auto& [ij, c] : Q->monomials)
      if (ij.first < 0 || ij.second < 0 || ij.first + ij.second > 4)
        throw ValidationError("SuperpositionSpec: Q degree must be <= 4");
  }
}

Vec2 SuperpositionSpec::embed(Vec2 r) const { return rotate(r * lambda, -alpha) - a; }

double SuperpositionSpec::eval(Vec2 r) const {
  const double a1 = v1.eval(r);
  const double a2 = u.eval(embed(r));
  return kind == SuperposKind::linear ? a1 + a2 : Q->eval(a1, a2);
}

Vec2 SuperpositionSpec::grad(Vec2 r) const {
  const Vec2 g1 = v1.grad(r);
  const Vec2 g2 = rotate(u.grad(embed(r)), alpha) * lambda;
  if (kind == SuperposKind::linear) return g1 + g2;
  const double a1 = v1.eval(r);
  const double a2 = u.eval(embed(r));
  return g1 * Q->du(a1, a2) + g2 * Q->dv(a1, a2);
}

double LiftedFunction::eval(const std::array<double, 4>& z) const {
  const double a1 = spec.v1.eval({z[0], z[1]});
  const double a2 = spec.u.eval({z[2], z[3]});
  return spec.kind == SuperposKind::linear ? a1 + a2 : spec.Q->eval(a1, a2);
}

std::array<double, 4> LiftedFunction::embed(Vec2 r) const {
  const Vec2 A = spec.embed(r);
  return {r.x, r.y, A.x, A.y};
}

LiftedFunction lift(const SuperpositionSpec& spec) {
  spec.validate();
  return {spec};
}

BoundConstants bound_constants(const SuperpositionSpec& spec, double window_radius) {
  const double b1 = spec.v1.gradient_bound();
  const double b2 = spec.u.gradient_bound();
  double pu = 1.0, pv = 1.0;
  if (spec.kind == SuperposKind::pointwise)
    std::tie(pu, pv) = spec.Q->partial_bounds(spec.v1.value_bound(), spec.u.value_bound());
  BoundConstants b;
  b.C1 = pu * b1 + pv * b2;
  b.C2 = pv * b2 * spec.lambda * window_radius;
  b.C3 = pv * b2 * window_radius;
  return b;
}

bool shift_identity_check(const SuperpositionSpec& spec, int which, std::uint64_t seed,
                          int samples) {
  if (which != 1 && which != 2) throw ValidationError("shift_identity_check: which in {1,2}");
  const Vec2 e = (which == 1) ? spec.v1.basis().e1 : spec.v1.basis().e2;
  SuperpositionSpec inv = spec;
  inv.a = spec.a + e;
  SuperpositionSpec trans = spec;
  trans.a = spec.a + rotate(e, -spec.alpha) * spec.lambda;

  std::mt19937_64 rng(seed);
  const double span = 3.0 * spec.v1.period();
  std::uniform_real_distribution<double> coord(-span, span);
  for (int i = 0; i < samples; ++i) {
    const Vec2 r{coord(rng), coord(rng)};
    if (std::abs(inv.eval(r) - spec.eval(r)) > 1e-10) return false;
    if (std::abs(trans.eval(r) - spec.eval(r - e)) > 1e-10) return false;
  }
  return true;
}

void to_json(nlohmann::ordered_json& j, const PotentialSpec& p) {
  j = nlohmann::ordered_json::object();
  j["symmetry"] = static_cast<int>(p.symmetry());
  j["period"] = p.period();
  auto terms = nlohmann::ordered_json::array();
  for (const FourierTerm& t : p.terms())
    terms.push_back({{"k", {t.k.x, t.k.y}}, {"re", t.c.real()}, {"im", t.c.imag()}});
  j["terms"] = std::move(terms);
}

void from_json(const nlohmann::json& j, PotentialSpec& p) {
  const int sym = j.at("symmetry").get<int>();
  if (sym != 3 && sym != 4 && sym != 6)
    throw ValidationError("potential json: symmetry must be 3, 4 or 6");
  std::vector<FourierTerm> terms;
  for (const auto& t : j.at("terms")) {
    FourierTerm ft;
    ft.k = {t.at("k").at(0).get<std::int64_t>(), t.at("k").at(1).get<std::int64_t>()};
    ft.c = {t.at("re").get<double>(), t.at("im").get<double>()};
    terms.push_back(ft);
  }
  p = PotentialSpec::exact(static_cast<SymmetryOrder>(sym),
                           j.at("period").get<double>(), std::move(terms));
}

void to_json(nlohmann::ordered_json& j, const SuperpositionSpec& s) {
  j = nlohmann::ordered_json::object();
  j["kind"] = s.kind == SuperposKind::linear ? "linear" : "pointwise";
  j["alpha"] = s.alpha;
  j["a"] = {s.a.x, s.a.y};
  j["lambda"] = s.lambda;
  if (s.Q) {
    auto q = nlohmann::ordered_json::array();
    for (const auto& [ij, c] : s.Q->monomials)
      q.push_back({{"i", ij.first}, {"j", ij.second}, {"c", c}});
    j["Q"] = {{"monomials", std::move(q)}};
  }
  nlohmann::ordered_json jv, ju;
  to_json(jv, s.v1);
  to_json(ju, s.u);
  j["v1"] = std::move(jv);
  j["u"] = std::move(ju);
}

void from_json(const nlohmann::json& j, SuperpositionSpec& s) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "linear" && kind != "pointwise")
    throw ValidationError("superposition json: kind must be linear or pointwise");
  s.kind = kind == "linear" ? SuperposKind::linear : SuperposKind::pointwise;
  s.alpha = j.at("alpha").get<double>();
  s.a = {j.at("a").at(0).get<double>(), j.at("a").at(1).get<double>()};
  s.lambda = j.value("lambda", 1.0);
  s.Q.reset();
  if (j.contains("Q")) {
    QPolynomial q;
    for (const auto& m : j.at("Q").at("monomials"))
      q.monomials[{m.at("i").get<int>(), m.at("j").get<int>()}] = m.at("c").get<double>();
    s.Q = std::move(q);
  }
  from_json(j.at("v1"), s.v1);
  from_json(j.at("u"), s.u);
  s.validate();
}

}  // namespace novikov
