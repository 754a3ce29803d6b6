#include "plate/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "plate/par.hpp"

namespace plate {

double dist(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::string to_string(ShapeTag tag) {
  switch (tag) {
    case ShapeTag::rectangle: return "rectangle";
    case ShapeTag::disk: return "disk";
    case ShapeTag::annulus: return "annulus";
    case ShapeTag::l_shape: return "l_shape";
    case ShapeTag::dumbbell: return "dumbbell";
    case ShapeTag::custom: return "custom";
  }
  return "unknown";
}

namespace {

struct AnalyticShape {
  std::function<bool(const Point&)> inside;
  Point lo{}, hi{};
  double thinnest = 0.0;
};

AnalyticShape resolve_shape(const ShapeSpec& s) {
  AnalyticShape a;
  const int dim = s.dim;
  switch (s.tag) {
    case ShapeTag::rectangle: {
      const auto e = s.extent;
      a.inside = [e, dim](const Point& p) {
        for (int ax = 0; ax < dim; ++ax)
          if (!(p[ax] > 0.0 && p[ax] < e[ax])) return false;
        return true;
      };
      a.lo = {0, 0, 0};
      a.hi = {e[0], e[1], dim == 3 ? e[2] : 0.0};
      a.thinnest = e[0];
      for (int ax = 1; ax < dim; ++ax) a.thinnest = std::min(a.thinnest, e[ax]);
      break;
    }
    case ShapeTag::disk: {
      const double R = s.radius;
      a.inside = [R, dim](const Point& p) {
        double r2 = p[0] * p[0] + p[1] * p[1];
        if (dim == 3) r2 += p[2] * p[2];
        return r2 < R * R;
      };
      a.lo = {-R, -R, dim == 3 ? -R : 0.0};
      a.hi = {R, R, dim == 3 ? R : 0.0};
      a.thinnest = R;
      break;
    }
    case ShapeTag::annulus: {
      const double ri = s.radius_inner, ro = s.radius_outer;
      a.inside = [ri, ro, dim](const Point& p) {
        double r2 = p[0] * p[0] + p[1] * p[1];
        if (dim == 3) r2 += p[2] * p[2];
        return r2 > ri * ri && r2 < ro * ro;
      };
      a.lo = {-ro, -ro, dim == 3 ? -ro : 0.0};
      a.hi = {ro, ro, dim == 3 ? ro : 0.0};
      a.thinnest = ro - ri;
      break;
    }
    case ShapeTag::l_shape: {
      // [0, side]^dim with the x>=side/2, y>=side/2 corner prism removed.
      const double L = s.side;
      a.inside = [L, dim](const Point& p) {
        for (int ax = 0; ax < dim; ++ax)
          if (!(p[ax] > 0.0 && p[ax] < L)) return false;
        return p[0] < L / 2 || p[1] < L / 2;
      };
      a.lo = {0, 0, 0};
      a.hi = {L, L, dim == 3 ? L : 0.0};
      a.thinnest = L / 2;
      break;
    }
    case ShapeTag::dumbbell: {
      // Two lobes of side `lobe` joined by a corridor along the x axis.
      const double A = s.lobe, cl = s.corridor_length, cw = s.corridor_width;
      const double xo = cl / 2;  // corridor ends, lobes begin
      a.inside = [A, cl, cw, xo, dim](const Point& p) {
        const double z = dim == 3 ? p[2] : 0.0;
        auto in_box = [&](double x0, double x1, double half_y) {
          if (!(p[0] > x0 && p[0] < x1)) return false;
          if (!(p[1] > -half_y && p[1] < half_y)) return false;
          if (dim == 3 && !(z > -half_y && z < half_y)) return false;
          return true;
        };
        return in_box(-xo - A, -xo, A / 2) || in_box(xo, xo + A, A / 2) ||
               in_box(-cl / 2 - 1e-12, cl / 2 + 1e-12, cw / 2);
      };
      a.lo = {-xo - A, -A / 2, dim == 3 ? -A / 2 : 0.0};
      a.hi = {xo + A, A / 2, dim == 3 ? A / 2 : 0.0};
      a.thinnest = std::min(A, cw);
      break;
    }
    case ShapeTag::custom: {
      if (!s.inside) throw std::invalid_argument("custom shape needs an inside predicate");
      a.inside = s.inside;
      a.lo = s.lo;
      a.hi = s.hi;
      a.thinnest = std::numeric_limits<double>::infinity();
      for (int ax = 0; ax < dim; ++ax)
        a.thinnest = std::min(a.thinnest, s.hi[ax] - s.lo[ax]);
      break;
    }
  }
  return a;
}

}  // namespace

DomainMask build_domain(const ShapeSpec& spec) {
  if (spec.dim != 2 && spec.dim != 3)
    throw std::invalid_argument("dim must be 2 or 3");
  if (!(spec.h > 0.0)) throw std::invalid_argument("h must be positive");

  const AnalyticShape shape = resolve_shape(spec);
  if (shape.thinnest <= 2.0 * spec.h)
    throw std::invalid_argument("resolution too coarse");

  DomainMask m;
  m.dim = spec.dim;
  m.h = spec.h;
  m.shape_tag = spec.tag;

  for (int ax = 0; ax < 3; ++ax) {
    if (ax >= spec.dim) {
      m.origin[ax] = 0.0;
      m.extents[ax] = 1;
      continue;
    }
    m.origin[ax] = shape.lo[ax] - spec.h;
    const double span = shape.hi[ax] - shape.lo[ax];
    // nodes at origin + i*h covering [lo - h, hi + h]
    m.extents[ax] = static_cast<int>(std::ceil(span / spec.h - 1e-9)) + 3;
  }

  const std::size_t total = static_cast<std::size_t>(m.extents[0]) *
                            m.extents[1] * m.extents[2];
  m.interior.assign(total, 0);
  m.compact_id.assign(total, -1);

  for (int k = 0; k < m.extents[2]; ++k)
    for (int j = 0; j < m.extents[1]; ++j)
      for (int i = 0; i < m.extents[0]; ++i) {
        const int id = m.node_id(i, j, k);
        // keep the one-node margin unconditionally
        if (i == 0 || i == m.extents[0] - 1 || j == 0 ||
            j == m.extents[1] - 1 ||
            (m.dim == 3 && (k == 0 || k == m.extents[2] - 1)))
          continue;
        if (shape.inside(m.node_point(id))) {
          m.interior[id] = 1;
          m.compact_id[id] = static_cast<int>(m.cells.size());
          m.cells.push_back(id);
        }
      }

  if (m.cells.empty()) throw std::invalid_argument("degenerate domain");

  // wall: non-interior nodes with an interior face neighbor
  for (int k = 0; k < m.extents[2]; ++k)
    for (int j = 0; j < m.extents[1]; ++j)
      for (int i = 0; i < m.extents[0]; ++i) {
        const int id = m.node_id(i, j, k);
        if (m.interior[id]) continue;
        const bool adj = m.is_interior(i - 1, j, k) || m.is_interior(i + 1, j, k) ||
                         m.is_interior(i, j - 1, k) || m.is_interior(i, j + 1, k) ||
                         (m.dim == 3 && (m.is_interior(i, j, k - 1) ||
                                         m.is_interior(i, j, k + 1)));
        if (adj) m.wall.push_back(id);
      }

  // exact distance map: nearest wall node center minus half a cell
  std::vector<Point> wall_pts(m.wall.size());
  for (std::size_t w = 0; w < m.wall.size(); ++w)
    wall_pts[w] = m.node_point(m.wall[w]);
  m.cell_dist.assign(m.cells.size(), 0.0);
  par::parallel_for(m.cells.size(), [&](std::size_t c) {
    const Point p = m.node_point(m.cells[c]);
    double best = std::numeric_limits<double>::infinity();
    for (const Point& q : wall_pts) {
      const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    m.cell_dist[c] = std::max(0.0, std::sqrt(best) - m.h / 2);
  });

  // diameter from the surface nodes; extremal pairs lie on the surface
  std::vector<Point> surface;
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    const auto [i, j, k] = m.node_coords(m.cells[c]);
    const bool surf = !m.is_interior(i - 1, j, k) || !m.is_interior(i + 1, j, k) ||
                      !m.is_interior(i, j - 1, k) || !m.is_interior(i, j + 1, k) ||
                      (m.dim == 3 && (!m.is_interior(i, j, k - 1) ||
                                      !m.is_interior(i, j, k + 1)));
    if (surf) surface.push_back(m.node_point(m.cells[c]));
  }
  double best = 0.0;
  for (std::size_t a = 0; a < surface.size(); ++a)
    for (std::size_t b = a + 1; b < surface.size(); ++b)
      best = std::max(best, dist(surface[a], surface[b]));
  m.diameter = best + m.h;

  return m;
}

DomainMask make_rectangle(std::array<double, 3> extent, double h, int dim) {
  ShapeSpec s;
  s.tag = ShapeTag::rectangle;
  s.dim = dim;
  s.h = h;
  s.extent = extent;
  return build_domain(s);
}

DomainMask make_disk(double radius, double h, int dim) {
  ShapeSpec s;
  s.tag = ShapeTag::disk;
  s.dim = dim;
  s.h = h;
  s.radius = radius;
  return build_domain(s);
}

DomainMask make_annulus(double radius_inner, double radius_outer, double h,
                        int dim) {
  ShapeSpec s;
  s.tag = ShapeTag::annulus;
  s.dim = dim;
  s.h = h;
  s.radius_inner = radius_inner;
  s.radius_outer = radius_outer;
  return build_domain(s);
}

DomainMask make_lshape(double side, double h, int dim) {
  ShapeSpec s;
  s.tag = ShapeTag::l_shape;
  s.dim = dim;
  s.h = h;
  s.side = side;
  return build_domain(s);
}

DomainMask make_dumbbell(double lobe, double corridor_length,
                         double corridor_width, double h, int dim) {
  ShapeSpec s;
  s.tag = ShapeTag::dumbbell;
  s.dim = dim;
  s.h = h;
  s.lobe = lobe;
  s.corridor_length = corridor_length;
  s.corridor_width = corridor_width;
  return build_domain(s);
}

int DomainMask::cell_at(const Point& p) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int ax = 0; ax < dim; ++ax) {
    idx[ax] = static_cast<int>(std::lround((p[ax] - origin[ax]) / h));
    if (idx[ax] < 0 || idx[ax] >= extents[ax]) return -1;
  }
  const int id = node_id(idx[0], idx[1], idx[2]);
  return compact_id[id];
}

double DomainMask::volume() const {
  double w = h * h;
  if (dim == 3) w *= h;
  return static_cast<double>(cells.size()) * w;
}

double DomainMask::max_interior_distance() const {
  double best = 0.0;
  for (double d : cell_dist) best = std::max(best, d);
  return best;
}

double interior_distance(const DomainMask& mask, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  for (int id : mask.wall) {
    const Point q = mask.node_point(id);
    const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
    best = std::min(best, dx * dx + dy * dy + dz * dz);
  }
  if (!std::isfinite(best)) return 0.0;
  return std::max(0.0, std::sqrt(best) - mask.h / 2);
}

namespace {

std::vector<int> ball_cells_impl(const DomainMask& mask, const Ball& ball,
                                 bool require_contained) {
  if (!(ball.radius >= 0.0)) throw std::invalid_argument("negative radius");
  if (require_contained &&
      interior_distance(mask, ball.center) + mask.h / 2 < ball.radius)
    throw std::invalid_argument("ball not contained in domain");

  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int ax = 0; ax < 3; ++ax) {
    if (ax >= mask.dim) { lo[ax] = 0; hi[ax] = 0; continue; }
    lo[ax] = std::max(0, static_cast<int>(std::floor(
                             (ball.center[ax] - ball.radius - mask.origin[ax]) /
                             mask.h)));
    hi[ax] = std::min(mask.extents[ax] - 1,
                      static_cast<int>(std::ceil(
                          (ball.center[ax] + ball.radius - mask.origin[ax]) /
                          mask.h)));
  }
  const double r2 = ball.radius * ball.radius;
  std::vector<int> out;
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const int id = mask.node_id(i, j, k);
        if (!mask.interior[id]) continue;
        const Point p = mask.node_point(id);
        const double dx = p[0] - ball.center[0], dy = p[1] - ball.center[1],
                     dz = p[2] - ball.center[2];
        if (dx * dx + dy * dy + dz * dz <= r2)
          out.push_back(mask.compact_id[id]);
      }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<int> ball_cells(const DomainMask& mask, const Ball& ball) {
  return ball_cells_impl(mask, ball, true);
}

std::vector<int> ball_cells_clipped(const DomainMask& mask, const Ball& ball) {
  return ball_cells_impl(mask, ball, false);
}

namespace {

/// Emit chain centers along a polyline with hop length <= step.
std::vector<Point> space_along(const std::vector<Point>& poly, double step) {
  std::vector<Point> out;
  out.push_back(poly.front());
  double carried = 0.0;
  for (std::size_t s = 0; s + 1 < poly.size(); ++s) {
    const Point& a = poly[s];
    const Point& b = poly[s + 1];
    const double seg = dist(a, b);
    if (seg == 0.0) continue;
    double t = step - carried;
    while (t < seg - 1e-12) {
      const double f = t / seg;
      out.push_back({a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]),
                     a[2] + f * (b[2] - a[2])});
      t += step;
    }
    carried = seg - (t - step);
  }
  if (dist(out.back(), poly.back()) > 1e-12) out.push_back(poly.back());
  return out;
}

}  // namespace

ChainReport chain_of_balls(const DomainMask& mask, const Point& a,
                           const Point& b, double r) {
  if (!(r > 3.0 * mask.h))
    throw std::invalid_argument("chain not constructible at this radius: radius under 3h");
  if (interior_distance(mask, a) <= r || interior_distance(mask, b) <= r)
    throw std::invalid_argument("point out of range: endpoint shallower than r");

  ChainReport rep;
  rep.radius = r;
  const double step = r - mask.h;

  if (dist(a, b) <= 1e-15) {
    rep.centers = {a};
    rep.length = 0;
    return rep;
  }

  // try the straight segment first
  const double probe = mask.h / 4;
  const int nprobe = static_cast<int>(std::ceil(dist(a, b) / probe));
  bool straight = true;
  for (int s = 0; s <= nprobe; ++s) {
    const double f = static_cast<double>(s) / nprobe;
    const Point p{a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]),
                  a[2] + f * (b[2] - a[2])};
    if (interior_distance(mask, p) <= r) { straight = false; break; }
  }

  if (straight) {
    rep.centers = space_along({a, b}, step);
  } else {
    // breadth-first route through nodes deeper than r
    auto safe = [&](int cid) { return mask.cell_dist[cid] > r; };
    auto nearest_safe = [&](const Point& p) -> int {
      const int c0 = mask.cell_at(p);
      if (c0 >= 0 && safe(c0)) return c0;
      // scan a small window around p
      std::array<int, 3> at{0, 0, 0};
      for (int ax = 0; ax < mask.dim; ++ax)
        at[ax] = static_cast<int>(std::lround((p[ax] - mask.origin[ax]) / mask.h));
      int best = -1;
      double best_d = 2.0 * mask.h;
      const int w = 2;
      for (int dk = (mask.dim == 3 ? -w : 0); dk <= (mask.dim == 3 ? w : 0); ++dk)
        for (int dj = -w; dj <= w; ++dj)
          for (int di = -w; di <= w; ++di) {
            const int i = at[0] + di, j = at[1] + dj, k = at[2] + dk;
            if (!mask.in_grid(i, j, k)) continue;
            const int cid = mask.compact_id[mask.node_id(i, j, k)];
            if (cid < 0 || !safe(cid)) continue;
            const double d = dist(p, mask.node_point(mask.cells[cid]));
            if (d < best_d) { best_d = d; best = cid; }
          }
      return best;
    };

    const int start = nearest_safe(a);
    const int goal = nearest_safe(b);
    if (start < 0 || goal < 0)
      throw std::runtime_error("chain not constructible at this radius");

    std::vector<int> parent(mask.cells.size(), -2);
    std::deque<int> queue{start};
    parent[start] = -1;
    while (!queue.empty() && parent[goal] == -2) {
      const int c = queue.front();
      queue.pop_front();
      const auto [i, j, k] = mask.node_coords(mask.cells[c]);
      const std::array<std::array<int, 3>, 6> nb{{{i - 1, j, k}, {i + 1, j, k},
                                                  {i, j - 1, k}, {i, j + 1, k},
                                                  {i, j, k - 1}, {i, j, k + 1}}};
      const int nnb = mask.dim == 3 ? 6 : 4;
      for (int t = 0; t < nnb; ++t) {
        const auto& q = nb[t];
        if (!mask.in_grid(q[0], q[1], q[2])) continue;
        const int cid = mask.compact_id[mask.node_id(q[0], q[1], q[2])];
        if (cid < 0 || parent[cid] != -2 || !safe(cid)) continue;
        parent[cid] = c;
        queue.push_back(cid);
      }
    }
    if (parent[goal] == -2)
      throw std::runtime_error("chain not constructible at this radius");

    // Interpolated points stay on the safe-node polyline; the endpoints
    // attach with short hops (under 2h < step) so every center is either
    // r-deep by precondition or r - h/2 deep by the Lipschitz bound.
    std::vector<Point> poly;
    for (int c = goal; c != -1; c = parent[c])
      poly.push_back(mask.node_point(mask.cells[c]));
    std::reverse(poly.begin(), poly.end());
    std::vector<Point> mid = space_along(poly, step);
    rep.centers.clear();
    rep.centers.push_back(a);
    for (const Point& p : mid)
      if (dist(rep.centers.back(), p) > 1e-15) rep.centers.push_back(p);
    if (dist(rep.centers.back(), b) > 1e-15) rep.centers.push_back(b);
  }

  rep.length = static_cast<int>(rep.centers.size()) - 1;
  for (std::size_t s = 0; s + 1 < rep.centers.size(); ++s)
    assert(dist(rep.centers[s], rep.centers[s + 1]) < r);
#ifndef NDEBUG
  for (const Point& c : rep.centers)
    assert(interior_distance(mask, c) > r - mask.h / 2 - 1e-12);
#endif
  return rep;
}

bool check_interior_sphere(const DomainMask& mask, double r0) {
  // Lattice slack. The deep side gets one cell: interior_distance
  // under-estimates by h/2 by design and cell centers sit up to h/2 inside
  // the analytic boundary, so an exact-radius interior ball is only visible
  // on the lattice with that allowance. The reach side gets 2 sqrt(N)
  // cells: at a convex corner the nearest deep cell lies a factor sqrt(N)
  // farther along the diagonal than at a flat face, and without the
  // diagonal allowance every rectangle fails at its own corners. The
  // allowance is deliberately not proportional to r0, so pinched geometry
  // (corridors, thin annuli) still fails: certifying r0 much larger than
  // about 10h against sharp corners is beyond this surrogate.
  std::vector<Point> deep;
  for (std::size_t c = 0; c < mask.cells.size(); ++c)
    if (mask.cell_dist[c] >= r0 - mask.h)
      deep.push_back(mask.node_point(mask.cells[c]));
  if (deep.empty()) return false;

  const double reach = r0 + 2.0 * std::sqrt(double(mask.dim)) * mask.h;
  for (std::size_t c = 0; c < mask.cells.size(); ++c) {
    const auto [i, j, k] = mask.node_coords(mask.cells[c]);
    const bool bdry = !mask.is_interior(i - 1, j, k) || !mask.is_interior(i + 1, j, k) ||
                      !mask.is_interior(i, j - 1, k) || !mask.is_interior(i, j + 1, k) ||
                      (mask.dim == 3 && (!mask.is_interior(i, j, k - 1) ||
                                         !mask.is_interior(i, j, k + 1)));
    if (!bdry) continue;
    const Point p = mask.node_point(mask.cells[c]);
    bool covered = false;
    for (const Point& q : deep)
      if (dist(p, q) <= reach) { covered = true; break; }
    if (!covered) return false;
  }
  return true;
}

}  // namespace plate
