#include "novikov/levelsets.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "novikov/errors.hpp"

namespace novikov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int mod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

double effective_level(const ScalarGrid& grid, double c) {
  // Samples exactly at the level are pushed below by one ulp: removes
  // measure-zero ties deterministically.
  for (double v : grid.values)
    if (v == c) return std::nextafter(c, kInf);
  return c;
}

// Translation-aware union-find: tracks each node's domain copy relative to
// its root, so self-unions across the torus seam expose wrapping.
struct WindingUnionFind {
  std::vector<int> parent;
  std::vector<int> rnk;
  std::vector<Vec2i> off;

  explicit WindingUnionFind(int n) : parent(n), rnk(n, 0), off(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  int find(int x, Vec2i& phi) {
    thread_local std::vector<int> path;
    path.clear();
    while (parent[x] != x) {
      path.push_back(x);
      x = parent[x];
    }
    Vec2i acc{0, 0};
    for (int i = static_cast<int>(path.size()) - 1; i >= 0; --i) {
      acc = acc + off[path[i]];
      parent[path[i]] = x;
      off[path[i]] = acc;
    }
    phi = path.empty() ? Vec2i{0, 0} : off[path.front()];
    return x;
  }

  // Enforce phi(v) = phi(u) + t. Returns the loop translation when u and v
  // were already connected (nonzero means the component wraps).
  std::optional<Vec2i> unite(int u, int v, Vec2i t) {
    Vec2i pu, pv;
    const int ru = find(u, pu);
    const int rv = find(v, pv);
    if (ru == rv) return pu + t - pv;
    if (rnk[ru] < rnk[rv]) {
      parent[ru] = rv;
      off[ru] = pv - t - pu;
    } else {
      parent[rv] = ru;
      off[rv] = pu + t - pv;
      if (rnk[ru] == rnk[rv]) ++rnk[ru];
    }
    return std::nullopt;
  }
};

// Subgroup of Z^2 accumulated from observed loop translations.
struct WrapGroup {
  Vec2i g1{0, 0}, g2{0, 0};
  int rank = 0;

  static Vec2i primitive(Vec2i v) {
    const std::int64_t g = std::gcd(std::llabs(v.x), std::llabs(v.y));
    if (g > 1) v = {v.x / g, v.y / g};
    if (v.x < 0 || (v.x == 0 && v.y < 0)) v = -v;
    return v;
  }

  void add(Vec2i d) {
    if (d.zero() || rank == 2) return;
    if (rank == 0) {
      g1 = d;
      rank = 1;
      return;
    }
    if (g1.x * d.y - g1.y * d.x == 0) {
      // collinear: combine multiples of the common primitive direction
      const Vec2i p = primitive(g1);
      const std::int64_t a = (p.x != 0) ? g1.x / p.x : g1.y / p.y;
      const std::int64_t b = (p.x != 0) ? d.x / p.x : d.y / p.y;
      const std::int64_t g = std::gcd(std::llabs(a), std::llabs(b));
      g1 = {p.x * g, p.y * g};
    } else {
      g2 = d;
      rank = 2;
    }
  }
};

double hull_diameter(std::vector<Vec2> pts) {
  if (pts.size() < 2) return 0.0;
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 2) return 0.0;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && (hull[k - 1] - hull[k - 2]).cross(p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (k >= lower && (hull[k - 1] - hull[k - 2]).cross(*it - hull[k - 2]) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j)
      best = std::max(best, (hull[i] - hull[j]).norm2());
  return std::sqrt(best);
}

}  // namespace

std::pair<double, double> ScalarGrid::minmax() const {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi};
}

ScalarGrid sample(const FieldFn& field, Vec2 origin, Vec2 axis1, Vec2 axis2, int nx,
                  int ny, bool periodic, int jobs) {
  if (nx < 8 || ny < 8) throw ValidationError("sample: nx, ny must be >= 8");
  if (periodic) {
    std::mt19937_64 rng(0xA5A5u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 32; ++k) {
      const Vec2 r = origin + axis1 * unit(rng) + axis2 * unit(rng);
      const double v = field(r);
      if (std::abs(field(r + axis1) - v) > 1e-8 ||
          std::abs(field(r + axis2) - v) > 1e-8)
        throw NotPeriodicError();
    }
  }
  ScalarGrid g;
  g.origin = origin;
  g.axis1 = axis1;
  g.axis2 = axis2;
  g.nx = nx;
  g.ny = ny;
  g.periodic = periodic;
  g.sampler = field;
  g.values.resize(std::size_t(nx) * ny);

  auto fill_rows = [&](int i_begin, int i_end) {
    for (int i = i_begin; i < i_end; ++i)
      for (int j = 0; j < ny; ++j)
        g.values[std::size_t(i) * ny + j] = field(g.pos(i, j));
  };
  const int workers = std::clamp(jobs, 1, nx);
  if (workers <= 1) {
    fill_rows(0, nx);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (nx + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int b = w * chunk, e = std::min(nx, b + chunk);
      if (b < e) pool.emplace_back(fill_rows, b, e);
    }
    for (auto& t : pool) t.join();
  }
  return g;
}

ComponentLabeling label_components(const ScalarGrid& grid, double c, bool below) {
  const double ce = effective_level(grid, c);
  const auto pred = [&](double v) { return below ? (v < ce) : !(v < ce); };
  const int nx = grid.nx, ny = grid.ny;
  const auto idx = [ny](int i, int j) { return i * ny + j; };

  WindingUnionFind uf(nx * ny);
  std::vector<std::pair<int, Vec2i>> loops;

  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (!pred(grid.at(i, j))) continue;
      const int u = idx(i, j);
      // neighbor to the right (+axis1) and up (+axis2)
      if (i + 1 < nx || grid.periodic) {
        const int i2 = (i + 1 < nx) ? i + 1 : 0;
        if (pred(grid.at(i2, j))) {
          const Vec2i t{(i + 1 < nx) ? 0 : 1, 0};
          if (auto d = uf.unite(u, idx(i2, j), t); d && !d->zero())
            loops.emplace_back(u, *d);
        }
      }
      if (j + 1 < ny || grid.periodic) {
        const int j2 = (j + 1 < ny) ? j + 1 : 0;
        if (pred(grid.at(i, j2))) {
          const Vec2i t{0, (j + 1 < ny) ? 0 : 1};
          if (auto d = uf.unite(u, idx(i, j2), t); d && !d->zero())
            loops.emplace_back(u, *d);
        }
      }
    }
  }

  ComponentLabeling out;
  out.level = c;
  out.below = below;
  out.labels.assign(std::size_t(nx) * ny, -1);

  std::map<int, int> root_to_id;
  std::vector<std::vector<Vec2>> lifted;
  Vec2i phi;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      if (!pred(grid.at(i, j))) continue;
      const int r = uf.find(idx(i, j), phi);
      auto [it, fresh] = root_to_id.try_emplace(r, static_cast<int>(out.components.size()));
      if (fresh) {
        out.components.emplace_back();
        lifted.emplace_back();
      }
      const int id = it->second;
      out.labels[idx(i, j)] = id;
      ComponentStats& st = out.components[id];
      const Vec2i li{i + phi.x * nx, j + phi.y * ny};
      if (st.cells == 0) {
        st.bbox_min = st.bbox_max = li;
      } else {
        st.bbox_min = {std::min(st.bbox_min.x, li.x), std::min(st.bbox_min.y, li.y)};
        st.bbox_max = {std::max(st.bbox_max.x, li.x), std::max(st.bbox_max.y, li.y)};
      }
      ++st.cells;
      lifted[id].push_back(grid.pos(double(li.x), double(li.y)));
    }

  std::vector<WrapGroup> groups(out.components.size());
  for (const auto& [node, d] : loops) {
    const int r = uf.find(node, phi);
    groups[root_to_id.at(r)].add(d);
  }
  for (std::size_t id = 0; id < out.components.size(); ++id) {
    ComponentStats& st = out.components[id];
    st.rank = groups[id].rank;
    if (st.rank >= 1) {
      st.wrap = WrapGroup::primitive(groups[id].g1);
      st.diameter = kInf;
    } else {
      st.diameter = hull_diameter(std::move(lifted[id]));
    }
  }
  return out;
}

bool ComponentLabeling::any_wrapping() const {
  return std::any_of(components.begin(), components.end(),
                     [](const ComponentStats& s) { return s.rank >= 1; });
}

// ---------------------------------------------------------------------------
// marching squares

namespace {

// local edge slots of a cell
enum Slot : int { kBottom = 0, kRight = 1, kTop = 2, kLeft = 3 };

constexpr int opposite(int slot) {
  switch (slot) {
    case kBottom: return kTop;
    case kTop: return kBottom;
    case kLeft: return kRight;
    default: return kLeft;
  }
}

struct CellSegments {
  std::uint8_t count = 0;
  std::uint8_t a0 = 0, b0 = 0, a1 = 0, b1 = 0;  // slot pairs
};

struct Marching {
  const ScalarGrid& grid;
  double c, ce;
  int cnx, cny;  // cell counts

  Marching(const ScalarGrid& g, double level)
      : grid(g),
        c(level),
        ce(effective_level(g, level)),
        cnx(g.periodic ? g.nx : g.nx - 1),
        cny(g.periodic ? g.ny : g.ny - 1) {}

  bool below(double v) const { return v < ce; }

  double corner(int i, int j) const {
    return grid.at(mod(i, grid.nx), mod(j, grid.ny));
  }

  CellSegments cell(int i, int j) const {
    const double v00 = corner(i, j), v10 = corner(i + 1, j);
    const double v11 = corner(i + 1, j + 1), v01 = corner(i, j + 1);
    const int code = (below(v00) ? 1 : 0) | (below(v10) ? 2 : 0) |
                     (below(v11) ? 4 : 0) | (below(v01) ? 8 : 0);
    CellSegments s;
    auto seg = [&s](int a, int b) {
      if (s.count == 0) {
        s.a0 = a; s.b0 = b;
      } else {
        s.a1 = a; s.b1 = b;
      }
      ++s.count;
    };
    switch (code) {
      case 0: case 15: break;
      case 1: seg(kLeft, kBottom); break;
      case 14: seg(kLeft, kBottom); break;
      case 2: seg(kBottom, kRight); break;
      case 13: seg(kBottom, kRight); break;
      case 4: seg(kRight, kTop); break;
      case 11: seg(kRight, kTop); break;
      case 8: seg(kTop, kLeft); break;
      case 7: seg(kTop, kLeft); break;
      case 3: case 12: seg(kLeft, kRight); break;
      case 6: case 9: seg(kBottom, kTop); break;
      case 5: {  // below at 00 and 11
        if (center_below(i, j)) {
          seg(kBottom, kRight);  // cuts off the above corner 10
          seg(kTop, kLeft);      // cuts off the above corner 01
        } else {
          seg(kLeft, kBottom);
          seg(kRight, kTop);
        }
        break;
      }
      case 10: {  // below at 10 and 01
        if (center_below(i, j)) {
          seg(kLeft, kBottom);
          seg(kRight, kTop);
        } else {
          seg(kBottom, kRight);
          seg(kTop, kLeft);
        }
        break;
      }
    }
    return s;
  }

  bool center_below(int i, int j) const {
    double v;
    if (grid.sampler) {
      v = grid.sampler(grid.pos(i + 0.5, j + 0.5));
    } else {
      v = 0.25 * (corner(i, j) + corner(i + 1, j) + corner(i + 1, j + 1) +
                  corner(i, j + 1));
    }
    return below(v);
  }

  double corner64(std::int64_t i, std::int64_t j) const {
    return grid.at(int(((i % grid.nx) + grid.nx) % grid.nx),
                   int(((j % grid.ny) + grid.ny) % grid.ny));
  }

  // crossing position on a slot edge of (unwrapped) cell (ci, cj)
  Vec2 crossing(std::int64_t ci, std::int64_t cj, int slot) const {
    std::int64_t ei = ci, ej = cj;
    const bool horizontal = (slot == kBottom || slot == kTop);
    if (slot == kTop) ej = cj + 1;
    if (slot == kRight) ei = ci + 1;
    const double va = corner64(ei, ej);
    const double vb = horizontal ? corner64(ei + 1, ej) : corner64(ei, ej + 1);
    double t = 0.5;
    if (vb != va) t = std::clamp((c - va) / (vb - va), 0.0, 1.0);
    return horizontal ? grid.pos(double(ei) + t, double(ej))
                      : grid.pos(double(ei), double(ej) + t);
  }
};

}  // namespace

std::vector<Polyline> extract_contours(const ScalarGrid& grid, double c) {
  std::vector<Polyline> out;
  const auto [vmin, vmax] = grid.minmax();
  if (!(c > vmin && c < vmax)) return out;

  Marching ms(grid, c);
  const int cnx = ms.cnx, cny = ms.cny;
  std::vector<CellSegments> segs(std::size_t(cnx) * cny);
  for (int i = 0; i < cnx; ++i)
    for (int j = 0; j < cny; ++j) segs[std::size_t(i) * cny + j] = ms.cell(i, j);
  std::vector<std::uint8_t> visited(std::size_t(cnx) * cny, 0);

  const auto cell_at = [&](int i, int j) -> CellSegments& {
    return segs[std::size_t(i) * cny + j];
  };
  // segment in (canonical) cell with an endpoint on local slot, or -1
  const auto find_seg = [&](int i, int j, int slot) -> int {
    const CellSegments& s = cell_at(i, j);
    if (s.count >= 1 && (s.a0 == slot || s.b0 == slot)) return 0;
    if (s.count >= 2 && (s.a1 == slot || s.b1 == slot)) return 1;
    return -1;
  };

  const auto canon_i = [&](std::int64_t ci) { return int(((ci % cnx) + cnx) % cnx); };
  const auto canon_j = [&](std::int64_t cj) { return int(((cj % cny) + cny) % cny); };

  struct Cursor {
    std::int64_t ci, cj;  // unwrapped cell coords
    int seg;
    int enter_slot;
  };

  const auto slots_of = [&](const Cursor& cur) -> std::pair<int, int> {
    const CellSegments& s = cell_at(canon_i(cur.ci), canon_j(cur.cj));
    return (cur.seg == 0) ? std::pair<int, int>{s.a0, s.b0}
                          : std::pair<int, int>{s.a1, s.b1};
  };
  const auto exit_slot_of = [&](const Cursor& cur) {
    const auto [sa, sb] = slots_of(cur);
    return (sa == cur.enter_slot) ? sb : sa;
  };

  // advance across the exit slot; returns false at a window boundary
  const auto step = [&](Cursor& cur) -> bool {
    const int ex = exit_slot_of(cur);
    std::int64_t ni = cur.ci, nj = cur.cj;
    switch (ex) {
      case kBottom: nj -= 1; break;
      case kTop: nj += 1; break;
      case kLeft: ni -= 1; break;
      case kRight: ni += 1; break;
    }
    if (!grid.periodic && (ni < 0 || ni >= cnx || nj < 0 || nj >= cny)) return false;
    const int nseg = find_seg(canon_i(ni), canon_j(nj), opposite(ex));
    if (nseg < 0) return false;
    cur = {ni, nj, nseg, opposite(ex)};
    return true;
  };

  const auto mark = [&](const Cursor& cur) {
    visited[std::size_t(canon_i(cur.ci)) * cny + canon_j(cur.cj)] |=
        (cur.seg == 0) ? 1 : 2;
  };
  const auto is_visited = [&](int i, int j, int seg) {
    return (visited[std::size_t(i) * cny + j] & (seg == 0 ? 1 : 2)) != 0;
  };

  for (int i0 = 0; i0 < cnx; ++i0) {
    for (int j0 = 0; j0 < cny; ++j0) {
      const CellSegments s0 = cell_at(i0, j0);
      for (int k = 0; k < s0.count; ++k) {
        if (is_visited(i0, j0, k)) continue;
        const int sa = (k == 0) ? s0.a0 : s0.a1;
        const int sb = (k == 0) ? s0.b0 : s0.b1;

        Polyline pl;
        Cursor cur{i0, j0, k, sa};
        mark(cur);
        pl.pts.push_back(ms.crossing(i0, j0, sa));
        bool closed = false;
        Vec2i wind{0, 0};
        while (true) {
          pl.pts.push_back(ms.crossing(cur.ci, cur.cj, exit_slot_of(cur)));
          Cursor nxt = cur;
          if (!step(nxt)) break;
          if (canon_i(nxt.ci) == i0 && canon_j(nxt.cj) == j0 && nxt.seg == k &&
              nxt.enter_slot == sa) {
            closed = true;
            wind = {(nxt.ci - i0) / cnx, (nxt.cj - j0) / cny};
            break;
          }
          cur = nxt;
          mark(cur);
        }
        if (!closed) {
          // extend backwards from the start, exiting through slot sa
          std::vector<Vec2> back;
          Cursor bcur{i0, j0, k, sb};
          while (step(bcur)) {
            mark(bcur);
            back.push_back(ms.crossing(bcur.ci, bcur.cj, exit_slot_of(bcur)));
          }
          std::reverse(back.begin(), back.end());
          back.insert(back.end(), pl.pts.begin(), pl.pts.end());
          pl.pts = std::move(back);
        }
        pl.closed = closed;
        if (closed && grid.periodic) {
          if (wind.x < 0 || (wind.x == 0 && wind.y < 0)) wind = -wind;
          pl.winding = wind;
        }
        out.push_back(std::move(pl));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(Situation s) {
  switch (s) {
    case Situation::a_minus: return "A_MINUS";
    case Situation::a_plus: return "A_PLUS";
    case Situation::open: return "OPEN";
    case Situation::undetermined: return "UNDETERMINED";
  }
  return "UNDETERMINED";
}

namespace {

std::pair<Situation, std::vector<CriticalLevelReport::Evidence>> classify_full(
    const ScalarGrid& grid, double c) {
  if (!grid.periodic)
    throw ValidationError("classify_situation requires a periodic grid");
  const ComponentLabeling below = label_components(grid, c, true);
  const ComponentLabeling above = label_components(grid, c, false);
  std::vector<CriticalLevelReport::Evidence> ev;
  for (const ComponentStats& s : below.components)
    if (s.rank >= 1) ev.push_back({c, true, s.wrap});
  for (const ComponentStats& s : above.components)
    if (s.rank >= 1) ev.push_back({c, false, s.wrap});
  const bool bw = below.any_wrapping();
  const bool aw = above.any_wrapping();
  if (bw && aw) return {Situation::open, std::move(ev)};
  if (!bw && !aw) {
    for (const Polyline& p : extract_contours(grid, c))
      if (p.winding && !p.winding->zero()) {
        ev.push_back({c, true, *p.winding});
        return {Situation::open, std::move(ev)};
      }
    return {Situation::undetermined, std::move(ev)};
  }
  return {aw ? Situation::a_minus : Situation::a_plus, std::move(ev)};
}

int situation_rank(Situation s) {
  switch (s) {
    case Situation::a_minus: return 0;
    case Situation::a_plus: return 2;
    default: return 1;
  }
}

}  // namespace

Situation classify_situation(const ScalarGrid& grid, double c) {
  return classify_full(grid, c).first;
}

CriticalLevelReport critical_interval(const ScalarGrid& grid, double tol) {
  if (!grid.periodic)
    throw ValidationError("critical_interval requires a periodic grid");
  CriticalLevelReport rep;
  rep.nx = grid.nx;
  rep.ny = grid.ny;
  const auto [vmin, vmax] = grid.minmax();
  const double range = vmax - vmin;
  if (range <= 1e-13 * std::max(1.0, std::abs(vmax))) {
    // constant field: degenerate by convention
    rep.c_hat_1 = rep.c_hat_2 = vmin;
    rep.tol = std::max(tol, 0.0);
    rep.degenerate = true;
    return rep;
  }
  const double eps = (tol > 0.0) ? tol : range * 1e-4;
  rep.tol = eps;

  std::map<double, Situation> memo;
  const auto classify = [&](double c) {
    auto it = memo.find(c);
    if (it != memo.end()) return it->second;
    auto [sit, ev] = classify_full(grid, c);
    for (auto& e : ev)
      if (rep.evidence.size() < 64) rep.evidence.push_back(e);
    it = memo.emplace(c, sit).first;
    // classification must be monotone along c
    if (it != memo.begin() && situation_rank(std::prev(it)->second) > situation_rank(sit))
      throw NonMonotoneClassification();
    if (std::next(it) != memo.end() &&
        situation_rank(std::next(it)->second) < situation_rank(sit))
      throw NonMonotoneClassification();
    return sit;
  };

  // boundary of A(-) from below
  double lo = vmin, hi = vmax;
  if (classify(lo) != Situation::a_minus) {
    rep.c_hat_1 = lo;
  } else {
    for (int it = 0; it < 60 && hi - lo > eps; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (classify(mid) == Situation::a_minus)
        lo = mid;
      else
        hi = mid;
    }
    rep.c_hat_1 = 0.5 * (lo + hi);
  }
  // boundary of A(+) from above
  lo = vmin;
  hi = vmax;
  if (classify(hi) != Situation::a_plus) {
    rep.c_hat_2 = hi;
  } else {
    for (int it = 0; it < 60 && hi - lo > eps; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (classify(mid) == Situation::a_plus)
        hi = mid;
      else
        lo = mid;
    }
    rep.c_hat_2 = 0.5 * (lo + hi);
  }
  rep.degenerate = (rep.c_hat_2 - rep.c_hat_1) <= eps;
  return rep;
}

CriticalLevelReport critical_interval(const FieldFn& field, Vec2 b1, Vec2 b2, int nx,
                                      int ny, double tol, int jobs) {
  const ScalarGrid grid = sample(field, (b1 + b2) * -0.5, b1, b2, nx, ny, true, jobs);
  return critical_interval(grid, tol);
}

std::pair<double, double> percolation_thresholds(const ScalarGrid& grid) {
  if (!grid.periodic)
    throw ValidationError("percolation_thresholds requires a periodic grid");
  const int nx = grid.nx, ny = grid.ny;
  const int n = nx * ny;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return grid.values[a] < grid.values[b];
  });

  const auto sweep = [&](bool ascending) {
    WindingUnionFind uf(n);
    std::vector<std::uint8_t> active(n, 0);
    const auto relax = [&](int u, int i, int j) -> bool {
      const int neigh[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
      for (const auto& nb : neigh) {
        const int wi = mod(nb[0], nx), wj = mod(nb[1], ny);
        const int v = wi * ny + wj;
        if (!active[v]) continue;
        const Vec2i t{nb[0] == nx ? 1 : (nb[0] == -1 ? -1 : 0),
                      nb[1] == ny ? 1 : (nb[1] == -1 ? -1 : 0)};
        if (auto d = uf.unite(u, v, t); d && !d->zero()) return true;
      }
      return false;
    };
    for (int k = 0; k < n; ++k) {
      const int u = ascending ? order[k] : order[n - 1 - k];
      active[u] = 1;
      if (relax(u, u / ny, u % ny)) return grid.values[u];
    }
    return ascending ? grid.values[order[n - 1]] : grid.values[order[0]];
  };

  return {sweep(true), sweep(false)};
}

SingularNet singular_net(const FieldFn& field, double symmetry_angle, Vec2 b1, Vec2 b2,
                         int nx, int ny, double tol, int jobs) {
  {
    std::mt19937_64 rng(0x5117u);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double span = std::max(b1.norm(), b2.norm());
    for (int k = 0; k < 64; ++k) {
      const Vec2 r{span * unit(rng), span * unit(rng)};
      if (std::abs(field(rotate(r, symmetry_angle)) - field(r)) > 1e-8)
        throw ValidationError("singular_net: field lacks the required symmetry");
    }
  }
  const ScalarGrid grid = sample(field, (b1 + b2) * -0.5, b1, b2, nx, ny, true, jobs);
  SingularNet sn;
  sn.interval = critical_interval(grid, tol);
  if (sn.interval.c_hat_2 - sn.interval.c_hat_1 > 10.0 * sn.interval.tol)
    throw IntervalNotDegenerate();
  sn.c0 = 0.5 * (sn.interval.c_hat_1 + sn.interval.c_hat_2);

  // Trace the net just above the exact below-percolation threshold, where the
  // wrapping chain is guaranteed to exist on this grid.
  const auto [v_bw, v_aw] = percolation_thresholds(grid);
  double next = kInf;
  for (double v : grid.values)
    if (v > v_bw) next = std::min(next, v);
  const double c_net =
      std::isfinite(next) ? 0.5 * (v_bw + next) : v_bw + sn.interval.tol;

  for (Polyline& p : extract_contours(grid, c_net))
    if (p.winding && !p.winding->zero()) sn.net.push_back(std::move(p));
  return sn;
}

Situation classify_window(const FieldFn& field, Vec2 center, double window_size,
                          int nx, int ny, double c, int jobs) {
  const Vec2 origin = center - Vec2{window_size / 2, window_size / 2};
  const ScalarGrid grid = sample(field, origin, {window_size, 0.0}, {0.0, window_size},
                                 nx, ny, false, jobs);

  struct SideInfo {
    bool spans = false;
    bool interior_small = true;
  };
  const auto analyze = [&](bool below) {
    const ComponentLabeling lab = label_components(grid, c, below);
    std::vector<std::uint8_t> touch(lab.components.size(), 0);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const int id = lab.labels[std::size_t(i) * ny + j];
        if (id < 0) continue;
        if (i == 0) touch[id] |= 1;
        if (i == nx - 1) touch[id] |= 2;
        if (j == 0) touch[id] |= 4;
        if (j == ny - 1) touch[id] |= 8;
      }
    SideInfo info;
    for (std::size_t id = 0; id < lab.components.size(); ++id) {
      if (touch[id] == 15) info.spans = true;
      if (touch[id] == 0 && lab.components[id].diameter >= window_size / 4)
        info.interior_small = false;
    }
    return info;
  };

  const SideInfo below = analyze(true);
  const SideInfo above = analyze(false);
  if (below.spans && above.spans) return Situation::open;
  if (above.spans && below.interior_small && !below.spans) return Situation::a_minus;
  if (below.spans && above.interior_small && !above.spans) return Situation::a_plus;
  return Situation::undetermined;
}

std::vector<double> component_diameters(const ScalarGrid& grid, double c, bool below) {
  if (!grid.periodic)
    throw ValidationError("component_diameters requires a periodic grid");
  const ComponentLabeling lab = label_components(grid, c, below);
  std::vector<double> out;
  for (const ComponentStats& s : lab.components)
    if (s.rank == 0) out.push_back(s.diameter);
  return out;
}

}  // namespace novikov
