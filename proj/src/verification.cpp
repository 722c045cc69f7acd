#include "novikov/verification.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include "novikov/errors.hpp"

namespace novikov {

namespace {

// first exception thrown by any worker, kept thread-safely
struct ErrorBox {
  std::mutex mu;
  std::exception_ptr err;
  void capture() {
    std::lock_guard<std::mutex> lk(mu);
    if (!err) err = std::current_exception();
  }
  void rethrow() {
    if (err) std::rethrow_exception(err);
  }
};

FieldFn field_of(const SuperpositionSpec& spec) {
  return [spec](Vec2 r) { return spec.eval(r); };
}

int auto_grid(const ResolutionParams& res, double periods_per_domain) {
  if (res.nx > 0) return res.nx;
  const int n = static_cast<int>(std::ceil(res.samples_per_T * periods_per_domain));
  return std::clamp(((n + 15) / 16) * 16, 64, res.max_grid);
}

double lemma_width_bound(const MagicAngle& angle, double T, double C1) {
  const double N0 = static_cast<double>(angle.reduced_norm2());
  if (angle.symmetry == SymmetryOrder::four) return C1 * T / std::sqrt(2.0 * N0);
  return C1 * T / std::sqrt(3.0 * N0);
}

double lemma_union_bound(const MagicAngle& angle, double T, double C1) {
  const double N0 = static_cast<double>(angle.reduced_norm2());
  if (angle.symmetry == SymmetryOrder::four) return std::sqrt(2.0) * C1 * T / std::sqrt(N0);
  return 2.0 * C1 * T / std::sqrt(3.0 * N0);
}

double diameter_constant(SymmetryOrder s, double C1) {
  return s == SymmetryOrder::four ? std::sqrt(5.0) * C1 / 2.0 : C1;
}

// Delta_{m,n}: the four-term bracket radius from the convergence argument.
double bracket_delta(const MagicAngle& angle, double T, double C1, double C2) {
  const double N0 = static_cast<double>(angle.reduced_norm2());
  const double n2 = static_cast<double>(angle.n) * static_cast<double>(angle.n);
  const double D = diameter_constant(angle.symmetry, C1);
  if (angle.symmetry == SymmetryOrder::four) {
    return D * T / std::pow(N0, 1.0 / 6.0) + C1 * std::pow(N0, 5.0 / 6.0) * T / n2 +
           C2 / n2 + C1 * T / std::sqrt(2.0 * N0);
  }
  const double q = 2.0 / std::sqrt(3.0);  // Lagrange factor of the angle bound
  return D * T / std::pow(N0, 1.0 / 6.0) +
         q * (C1 * std::pow(N0, 5.0 / 6.0) * T + C2) / n2 +
         C1 * T / std::sqrt(3.0 * N0);
}

template <typename Fn>
void parallel_indexed(int count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  const int workers = std::min(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

SuperpositionSpec cosine_family(SymmetryOrder symmetry, double T, double alpha, Vec2 a) {
  SuperpositionSpec s;
  s.v1 = PotentialSpec::cosine(symmetry, T);
  s.u = PotentialSpec::cosine(symmetry, T);
  s.kind = SuperposKind::linear;
  s.alpha = alpha;
  s.a = a;
  return s;
}

SuperpositionSpec seeded_family(std::uint64_t seed, SymmetryOrder symmetry, int cutoff,
                                double T, double u_period) {
  SuperpositionSpec s;
  s.v1 = PotentialSpec::random(seed, symmetry, cutoff, T);
  s.u = PotentialSpec::random(seed ^ 0x9E3779B97F4A7C15ull, symmetry, cutoff,
                              u_period > 0.0 ? u_period : T);
  s.kind = SuperposKind::linear;
  return s;
}

IntervalWidthReport verify_interval_width(const SuperpositionSpec& family,
                                          const MagicAngle& angle, int n_shifts,
                                          const ResolutionParams& res,
                                          std::uint64_t seed) {
  if (n_shifts < 1) throw ValidationError("verify_interval_width: n_shifts >= 1");
  const double T = family.v1.period();
  const PeriodPair pp = superposition_periods(angle, T);
  const EquivalenceLattice eq = equivalence_lattice(angle, T, false);
  const double C1 = bound_constants(family).C1;

  IntervalWidthReport rep;
  rep.angle = angle;
  rep.bound = lemma_width_bound(angle, T, C1);
  rep.union_bound = lemma_union_bound(angle, T, C1);

  const double periods = std::sqrt(double(angle.reduced_norm2()));
  const int nx = auto_grid(res, periods);
  rep.nx = nx;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec2> shifts(n_shifts + 1);
  shifts[0] = {0.0, 0.0};  // symmetric representative
  for (int i = 1; i <= n_shifts; ++i)
    shifts[i] = eq.g1 * unit(rng) + eq.g2 * unit(rng);

  std::vector<CriticalLevelReport> reports(shifts.size());
  ErrorBox errors;
  parallel_indexed(static_cast<int>(shifts.size()), res.jobs, [&](int i) {
    try {
      SuperpositionSpec s = family;
      s.alpha = angle.angle_radians;
      s.a = shifts[i];
      reports[i] = critical_interval(field_of(s), pp.b1, pp.b2, nx, nx, res.tol, 1);
    } catch (...) {
      errors.capture();
    }
  });
  errors.rethrow();

  rep.tol = reports[0].tol;
  rep.symmetric_width = reports[0].c_hat_2 - reports[0].c_hat_1;
  double lo = reports[1].c_hat_1, hi = reports[1].c_hat_2;
  for (int i = 1; i < static_cast<int>(shifts.size()); ++i) {
    const auto& r = reports[i];
    rep.samples.push_back({shifts[i], r.c_hat_1, r.c_hat_2});
    rep.max_width = std::max(rep.max_width, r.c_hat_2 - r.c_hat_1);
    lo = std::min(lo, r.c_hat_1);
    hi = std::max(hi, r.c_hat_2);
  }
  rep.union_width = hi - lo;
  const double cell = std::max(pp.b1.norm(), pp.b2.norm()) / nx * std::sqrt(2.0);
  rep.slack = 2.0 * rep.tol + C1 * cell;
  rep.pass = rep.max_width <= rep.bound + rep.slack &&
             rep.union_width <= rep.union_bound + rep.slack &&
             rep.symmetric_width <= 2.0 * rep.tol;
  return rep;
}

DiameterReport verify_diameter_bound(const PotentialSpec& potential,
                                     const std::vector<double>& delta_c,
                                     const ResolutionParams& res) {
  const double L = potential.period();
  const double C1 = potential.gradient_bound();
  DiameterReport rep;
  rep.L = L;
  rep.C1 = C1;
  rep.D = diameter_constant(potential.symmetry(), C1);

  // enough periods to hold the largest admissible component
  double max_bound = 0.0;
  for (double dc : delta_c)
    if (dc > 0.0) max_bound = std::max(max_bound, std::sqrt(rep.D * L / dc) * L);
  const int k = std::clamp(static_cast<int>(std::ceil(max_bound / L)) + 1, 2, 5);

  const LatticeBasis basis = potential.basis();
  const Vec2 A1 = basis.e1 * double(k), A2 = basis.e2 * double(k);
  const FieldFn field = [&potential](Vec2 r) { return potential.eval(r); };
  const int nx = (res.nx > 0)
                     ? res.nx
                     : std::clamp(((res.samples_per_T * k + 15) / 16) * 16, 128,
                                  res.max_grid);
  rep.nx = nx;

  const SingularNet net = singular_net(field, symmetry_rotation_angle(potential.symmetry()),
                                       A1, A2, nx, nx, res.tol, res.jobs);
  rep.c0 = net.c0;
  const ScalarGrid grid =
      sample(field, (A1 + A2) * -0.5, A1, A2, nx, nx, true, res.jobs);
  const double cell = std::max(A1.norm(), A2.norm()) / nx * std::sqrt(2.0);
  rep.slack = cell;

  rep.pass = true;
  for (double dc : delta_c) {
    DiameterReport::Entry e;
    e.delta_c = dc;
    e.bound = std::sqrt(rep.D * L / dc) * L;
    for (bool below : {true, false}) {
      const double c = below ? rep.c0 - dc : rep.c0 + dc;
      const ComponentLabeling lab = label_components(grid, c, below);
      for (const ComponentStats& s : lab.components) {
        if (s.rank >= 1)
          ++e.wrapping_components;
        else
          e.max_diameter = std::max(e.max_diameter, s.diameter);
      }
    }
    e.pass = (e.wrapping_components == 0) && (e.max_diameter <= e.bound + rep.slack);
    rep.pass = rep.pass && e.pass;
    rep.entries.push_back(e);
  }
  return rep;
}

ConvergenceReport verify_theorem_convergence(const SuperpositionSpec& family,
                                             double alpha, int depth,
                                             const ResolutionParams& res) {
  const SymmetryOrder sym = family.v1.symmetry();
  const double T = family.v1.period();
  std::vector<MagicAngle> approx = approximate_angle(alpha, sym, depth);
  for (const MagicAngle& a : approx)
    if (std::abs(a.angle_radians - alpha) < 1e-10) throw MagicAngleError();
  // desk-scale cap on the approximant fundamental domain
  std::erase_if(approx, [](const MagicAngle& a) { return a.reduced_norm2() > 200; });

  ConvergenceReport rep;
  rep.alpha = alpha;
  std::vector<ConvergenceReport::Bracket> brackets(approx.size());
  ErrorBox errors;
  parallel_indexed(static_cast<int>(approx.size()), res.jobs, [&](int i) {
    try {
      const MagicAngle& ang = approx[i];
      SuperpositionSpec s = family;
      s.alpha = ang.angle_radians;
      s.a = {0.0, 0.0};
      const PeriodPair pp = superposition_periods(ang, T);
      const double N0 = double(ang.reduced_norm2());
      const int nx = auto_grid(res, std::sqrt(N0));
      const SingularNet net =
          singular_net(field_of(s), symmetry_rotation_angle(sym), pp.b1, pp.b2, nx, nx,
                       res.tol, 1);
      const double radius = std::pow(N0, 5.0 / 6.0) * T;
      const BoundConstants bc = bound_constants(s, radius);
      ConvergenceReport::Bracket b;
      b.m = ang.m;
      b.n = ang.n;
      b.norm_n = std::sqrt(double(ang.norm2()));
      b.c0 = net.c0;
      b.delta = bracket_delta(ang, T, bc.C1, bc.C2);
      b.nx = nx;
      brackets[i] = b;
    } catch (...) {
      errors.capture();
    }
  });
  errors.rethrow();
  rep.brackets = std::move(brackets);

  rep.widths_decreasing = true;
  rep.cauchy_consistent = true;
  for (std::size_t i = 0; i + 1 < rep.brackets.size(); ++i) {
    const auto& a = rep.brackets[i];
    const auto& b = rep.brackets[i + 1];
    if (!(b.width() < a.width())) rep.widths_decreasing = false;
    if (std::abs(a.c0 - b.c0) > a.delta + b.delta) rep.cauchy_consistent = false;
    if (std::max(a.c0 - a.delta, b.c0 - b.delta) >
        std::min(a.c0 + a.delta, b.c0 + b.delta))
      throw BracketsDisjoint();
  }
  for (std::size_t i = 0; i < rep.brackets.size(); ++i)
    for (std::size_t j = i + 1; j < rep.brackets.size(); ++j) {
      const auto& a = rep.brackets[i];
      const auto& b = rep.brackets[j];
      if (b.c0 < a.c0 - a.delta - 2e-9 || b.c0 > a.c0 + a.delta + 2e-9)
        ++rep.nesting_violations;
    }
  rep.pass = rep.widths_decreasing && rep.cauchy_consistent &&
             rep.nesting_violations == 0 && !rep.brackets.empty();
  return rep;
}

ConvergenceReport verify_incommensurate(const SuperpositionSpec& family, double alpha,
                                        int s_max, const ResolutionParams& res) {
  const SymmetryOrder sym = family.v1.symmetry();
  const double T = family.v1.period();
  const double Tp = family.u.period();
  if (!(Tp < T)) throw ValidationError("verify_incommensurate: requires T' < T");
  {
    // rational-ratio guard: continued fraction of T'/T
    double x = Tp / T;
    std::int64_t p0 = 1, q0 = 0, p1 = static_cast<std::int64_t>(std::floor(x)), q1 = 1;
    double rem = x - std::floor(x);
    for (int it = 0; it < 64 && q1 <= 1000000; ++it) {
      if (std::abs(x - double(p1) / double(q1)) < 1e-12)
        throw ValidationError("verify_incommensurate: periods are commensurate");
      if (rem < 1e-15) break;
      const double inv = 1.0 / rem;
      const auto a = static_cast<std::int64_t>(std::floor(inv));
      const std::int64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
      p0 = p1; q0 = q1; p1 = p2; q1 = q2;
      rem = inv - std::floor(inv);
    }
  }

  const auto approxs = build_approximant_sequence(LatticeBasis::canonical(sym, T),
                                                  LatticeBasis::canonical(sym, Tp),
                                                  alpha, s_max);
  const double C1 = bound_constants(family).C1;
  const double C = diameter_constant(sym, C1);
  const double Chat = (3.0 + 2.0 * std::sqrt(2.0)) * C1;

  ConvergenceReport rep;
  rep.alpha = alpha;
  std::vector<ConvergenceReport::Bracket> brackets(approxs.size());
  ErrorBox errors;
  parallel_indexed(static_cast<int>(approxs.size()), res.jobs, [&](int i) {
    try {
      const PeriodicApproximant& ap = approxs[i];
      SuperpositionSpec s = family;
      s.alpha = alpha - ap.delta_alpha;
      s.lambda = family.lambda * (1.0 + ap.delta_lambda);
      s.a = {0.0, 0.0};
      const LatticeBasis basis = LatticeBasis::canonical(sym, T);
      const Vec2 P1 = basis.vec(double(ap.n_vec.x), double(ap.n_vec.y));
      const Vec2 P2 = (sym == SymmetryOrder::four)
                          ? basis.vec(double(-ap.n_vec.y), double(ap.n_vec.x))
                          : basis.vec(double(-ap.n_vec.y),
                                      double(ap.n_vec.x + ap.n_vec.y));
      const int nx = auto_grid(res, ap.norm_n);
      const SingularNet net = singular_net(field_of(s), symmetry_rotation_angle(sym),
                                           P1, P2, nx, nx, res.tol, 1);
      ConvergenceReport::Bracket b;
      b.n_vec = ap.n_vec;
      b.m_vec = ap.m_vec;
      b.norm_n = ap.norm_n;
      b.c0 = net.c0;
      b.delta = (C + Chat) * T / std::cbrt(ap.norm_n);
      b.nx = nx;
      brackets[i] = b;
    } catch (...) {
      errors.capture();
    }
  });
  errors.rethrow();
  rep.brackets = std::move(brackets);

  rep.widths_decreasing = true;
  rep.cauchy_consistent = true;
  for (std::size_t i = 0; i + 1 < rep.brackets.size(); ++i) {
    const auto& a = rep.brackets[i];
    const auto& b = rep.brackets[i + 1];
    if (!(b.width() < a.width())) rep.widths_decreasing = false;
    if (std::abs(a.c0 - b.c0) > a.delta + b.delta) rep.cauchy_consistent = false;
    if (std::max(a.c0 - a.delta, b.c0 - b.delta) >
        std::min(a.c0 + a.delta, b.c0 + b.delta))
      throw BracketsDisjoint();
  }
  rep.pass =
      rep.widths_decreasing && rep.cauchy_consistent && !rep.brackets.empty();
  return rep;
}

nlohmann::ordered_json to_json(const IntervalWidthReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "novikov.interval_width/1";
  j["symmetry"] = static_cast<int>(r.angle.symmetry);
  j["m"] = r.angle.m;
  j["n"] = r.angle.n;
  j["m0"] = r.angle.m0;
  j["n0"] = r.angle.n0;
  j["angle_radians"] = r.angle.angle_radians;
  j["nx"] = r.nx;
  j["tol"] = r.tol;
  j["bound"] = r.bound;
  j["union_bound"] = r.union_bound;
  j["max_width"] = r.max_width;
  j["union_width"] = r.union_width;
  j["symmetric_width"] = r.symmetric_width;
  j["slack"] = r.slack;
  j["pass"] = r.pass;
  auto samples = nlohmann::ordered_json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"a", {s.a.x, s.a.y}},
                       {"c_hat_1", s.c_hat_1},
                       {"c_hat_2", s.c_hat_2},
                       {"width", s.c_hat_2 - s.c_hat_1}});
  j["samples"] = std::move(samples);
  return j;
}

nlohmann::ordered_json to_json(const DiameterReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "novikov.diameter/1";
  j["c0"] = r.c0;
  j["C1"] = r.C1;
  j["L"] = r.L;
  j["D"] = r.D;
  j["nx"] = r.nx;
  j["slack"] = r.slack;
  j["pass"] = r.pass;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"delta_c", e.delta_c},
                       {"bound", e.bound},
                       {"max_diameter", e.max_diameter},
                       {"wrapping_components", e.wrapping_components},
                       {"pass", e.pass}});
  j["entries"] = std::move(entries);
  return j;
}

nlohmann::ordered_json to_json(const ConvergenceReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "novikov.convergence/1";
  j["alpha"] = r.alpha;
  j["nesting_violations"] = r.nesting_violations;
  j["widths_decreasing"] = r.widths_decreasing;
  j["cauchy_consistent"] = r.cauchy_consistent;
  j["pass"] = r.pass;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& b : r.brackets)
    arr.push_back({{"m", b.m},
                   {"n", b.n},
                   {"n_vec", {b.n_vec.x, b.n_vec.y}},
                   {"m_vec", {b.m_vec.x, b.m_vec.y}},
                   {"norm_n", b.norm_n},
                   {"c0", b.c0},
                   {"delta", b.delta},
                   {"width", b.width()},
                   {"nx", b.nx}});
  j["brackets"] = std::move(arr);
  return j;
}

}  // namespace novikov
