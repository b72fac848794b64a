// Delaunay triangulation and point location.  Predicates evaluate in double
// with a forward error bound; results inside the uncertainty band are
// recomputed in high-precision arithmetic, which is exact for coordinates in
// any realistic exponent range.

#include "vhcomp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include <mpfr.h>

namespace vhcomp {

namespace {

// Enough bits to make degree-4 products and sums of doubles exact unless
// exponents are pushed to the very edge of the double range.
constexpr mpfr_prec_t kExactPrec = 12288;

int exact_orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
  mpfr_t t0, t1, t2, t3, left, right;
  mpfr_inits2(kExactPrec, t0, t1, t2, t3, left, right, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_d(t0, ax, MPFR_RNDN);
  mpfr_sub_d(t0, t0, cx, MPFR_RNDN); // ax - cx
  mpfr_set_d(t1, by, MPFR_RNDN);
  mpfr_sub_d(t1, t1, cy, MPFR_RNDN); // by - cy
  mpfr_mul(left, t0, t1, MPFR_RNDN);
  mpfr_set_d(t2, ay, MPFR_RNDN);
  mpfr_sub_d(t2, t2, cy, MPFR_RNDN); // ay - cy
  mpfr_set_d(t3, bx, MPFR_RNDN);
  mpfr_sub_d(t3, t3, cx, MPFR_RNDN); // bx - cx
  mpfr_mul(right, t2, t3, MPFR_RNDN);
  int cmp = mpfr_cmp(left, right);
  mpfr_clears(t0, t1, t2, t3, left, right, static_cast<mpfr_ptr>(nullptr));
  return cmp > 0 ? 1 : cmp < 0 ? -1 : 0;
}

int exact_incircle(const std::array<double, 2>& a, const std::array<double, 2>& b,
                   const std::array<double, 2>& c, const std::array<double, 2>& d) {
  mpfr_t adx, ady, bdx, bdy, cdx, cdy, alift, blift, clift, m1, m2, det, tmp;
  mpfr_inits2(kExactPrec, adx, ady, bdx, bdy, cdx, cdy, alift, blift, clift, m1, m2,
              det, tmp, static_cast<mpfr_ptr>(nullptr));
  auto diff = [](mpfr_t out, double x, double y) {
    mpfr_set_d(out, x, MPFR_RNDN);
    mpfr_sub_d(out, out, y, MPFR_RNDN);
  };
  diff(adx, a[0], d[0]);
  diff(ady, a[1], d[1]);
  diff(bdx, b[0], d[0]);
  diff(bdy, b[1], d[1]);
  diff(cdx, c[0], d[0]);
  diff(cdy, c[1], d[1]);
  auto lift = [&](mpfr_t out, mpfr_t x, mpfr_t y) {
    mpfr_mul(out, x, x, MPFR_RNDN);
    mpfr_mul(tmp, y, y, MPFR_RNDN);
    mpfr_add(out, out, tmp, MPFR_RNDN);
  };
  lift(alift, adx, ady);
  lift(blift, bdx, bdy);
  lift(clift, cdx, cdy);
  mpfr_set_zero(det, 1);
  auto accumulate = [&](mpfr_t l, mpfr_t x1, mpfr_t y2, mpfr_t x2, mpfr_t y1) {
    // det += l * (x1*y2 - x2*y1)
    mpfr_mul(m1, x1, y2, MPFR_RNDN);
    mpfr_mul(m2, x2, y1, MPFR_RNDN);
    mpfr_sub(m1, m1, m2, MPFR_RNDN);
    mpfr_mul(m1, l, m1, MPFR_RNDN);
    mpfr_add(det, det, m1, MPFR_RNDN);
  };
  accumulate(alift, bdx, cdy, cdx, bdy);
  accumulate(blift, cdx, ady, adx, cdy);
  accumulate(clift, adx, bdy, bdx, ady);
  int sign = mpfr_sgn(det);
  mpfr_clears(adx, ady, bdx, bdy, cdx, cdy, alift, blift, clift, m1, m2, det, tmp,
              static_cast<mpfr_ptr>(nullptr));
  return sign > 0 ? 1 : sign < 0 ? -1 : 0;
}

struct Tri {
  std::array<int, 3> v;
  bool alive = true;
};

using Pt = std::array<double, 2>;

// Squared distance from p to segment (a, b).
double segment_dist_sq(const Pt& p, const Pt& a, const Pt& b) {
  double abx = b[0] - a[0], aby = b[1] - a[1];
  double apx = p[0] - a[0], apy = p[1] - a[1];
  double len_sq = abx * abx + aby * aby;
  double t = len_sq > 0.0 ? std::clamp((apx * abx + apy * aby) / len_sq, 0.0, 1.0) : 0.0;
  double dx = apx - t * abx, dy = apy - t * aby;
  return dx * dx + dy * dy;
}

} // namespace

int orient2d(const Pt& a, const Pt& b, const Pt& c) {
  double detleft = (a[0] - c[0]) * (b[1] - c[1]);
  double detright = (a[1] - c[1]) * (b[0] - c[0]);
  double det = detleft - detright;
  double detsum = std::abs(detleft) + std::abs(detright);
  double errbound = 3.3306690621773801e-16 * detsum;
  if (det > errbound) return 1;
  if (det < -errbound) return -1;
  return exact_orient2d(a[0], a[1], b[0], b[1], c[0], c[1]);
}

int incircle(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
  double adx = a[0] - d[0], ady = a[1] - d[1];
  double bdx = b[0] - d[0], bdy = b[1] - d[1];
  double cdx = c[0] - d[0], cdy = c[1] - d[1];
  double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  double cdxady = cdx * ady, adxcdy = adx * cdy;
  double adxbdy = adx * bdy, bdxady = bdx * ady;
  double alift = adx * adx + ady * ady;
  double blift = bdx * bdx + bdy * bdy;
  double clift = cdx * cdx + cdy * cdy;
  double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
               clift * (adxbdy - bdxady);
  double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                     (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                     (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  double errbound = 1.1102230246251565e-15 * permanent;
  if (det > errbound) return 1;
  if (det < -errbound) return -1;
  return exact_incircle(a, b, c, d);
}

Triangulation delaunay(const std::vector<Pt>& points) {
  const std::size_t n = points.size();
  if (n < 3) throw std::invalid_argument("delaunay: need at least 3 points");

  {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return points[i] < points[j];
    });
    for (std::size_t i = 1; i < n; ++i)
      if (points[order[i]] == points[order[i - 1]])
        throw std::invalid_argument("delaunay: duplicate point");
  }
  {
    bool non_collinear = false;
    for (std::size_t i = 2; i < n && !non_collinear; ++i)
      non_collinear = orient2d(points[0], points[1], points[i]) != 0;
    if (!non_collinear) throw std::invalid_argument("delaunay: all points collinear");
  }

  double min_x = points[0][0], max_x = min_x, min_y = points[0][1], max_y = min_y;
  for (const auto& p : points) {
    min_x = std::min(min_x, p[0]);
    max_x = std::max(max_x, p[0]);
    min_y = std::min(min_y, p[1]);
    max_y = std::max(max_y, p[1]);
  }
  double cx = 0.5 * (min_x + max_x), cy = 0.5 * (min_y + max_y);
  double span = std::max({max_x - min_x, max_y - min_y, 1.0});
  double big = 1e8 * span;

  std::vector<Pt> verts(points);
  verts.push_back({cx - 2.0 * big, cy - big});
  verts.push_back({cx + 2.0 * big, cy - big});
  verts.push_back({cx, cy + 2.0 * big});
  const int s0 = static_cast<int>(n), s1 = s0 + 1, s2 = s0 + 2;

  std::vector<Tri> tris;
  tris.push_back({{s0, s1, s2}, true});

  std::vector<std::size_t> bad;
  for (std::size_t ip = 0; ip < n; ++ip) {
    const Pt& p = verts[ip];
    bad.clear();
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!tris[t].alive) continue;
      const auto& v = tris[t].v;
      if (incircle(verts[static_cast<std::size_t>(v[0])], verts[static_cast<std::size_t>(v[1])],
                   verts[static_cast<std::size_t>(v[2])], p) > 0)
        bad.push_back(t);
    }
    if (bad.empty())
      throw std::runtime_error("delaunay: insertion point escaped every circumcircle");

    // Boundary of the union of bad triangles, with their orientation.
    std::map<std::pair<int, int>, int> seen;
    std::vector<std::pair<int, int>> boundary;
    for (std::size_t t : bad) {
      const auto& v = tris[t].v;
      for (int e = 0; e < 3; ++e) {
        int u = v[static_cast<std::size_t>(e)], w = v[static_cast<std::size_t>((e + 1) % 3)];
        auto key = std::minmax(u, w);
        seen[{key.first, key.second}] += 1;
      }
    }
    for (std::size_t t : bad) {
      const auto& v = tris[t].v;
      for (int e = 0; e < 3; ++e) {
        int u = v[static_cast<std::size_t>(e)], w = v[static_cast<std::size_t>((e + 1) % 3)];
        auto key = std::minmax(u, w);
        if (seen[{key.first, key.second}] == 1) boundary.push_back({u, w});
      }
      tris[t].alive = false;
    }
    for (auto [u, w] : boundary) tris.push_back({{u, w, static_cast<int>(ip)}, true});
  }

  Triangulation out;
  out.vertices = points;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= s0 || t.v[1] >= s0 || t.v[2] >= s0) continue;
    out.triangles.push_back(t.v);
  }
  if (out.triangles.empty())
    throw std::runtime_error("delaunay: no triangles survived scaffold removal");

  // Certification flips: enforce the empty-circumcircle property on the
  // final triangle set, which also heals any scaffold artifacts.
  auto rebuild_adjacency = [&]() {
    out.adjacency.assign(out.triangles.size(), {-1, -1, -1});
    std::map<std::pair<int, int>, std::pair<int, int>> edges; // -> (tri, edge)
    for (std::size_t t = 0; t < out.triangles.size(); ++t) {
      const auto& v = out.triangles[t];
      for (int e = 0; e < 3; ++e) {
        int u = v[static_cast<std::size_t>(e)], w = v[static_cast<std::size_t>((e + 1) % 3)];
        auto key = std::minmax(u, w);
        auto it = edges.find({key.first, key.second});
        if (it == edges.end()) {
          edges[{key.first, key.second}] = {static_cast<int>(t), e};
        } else {
          out.adjacency[t][static_cast<std::size_t>(e)] = it->second.first;
          out.adjacency[static_cast<std::size_t>(it->second.first)][static_cast<std::size_t>(it->second.second)] =
              static_cast<int>(t);
        }
      }
    }
  };
  rebuild_adjacency();

  long flips = 0;
  const long flip_cap =
      16 * static_cast<long>(out.triangles.size()) * static_cast<long>(out.triangles.size()) + 1024;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t t = 0; t < out.triangles.size(); ++t) {
      for (int e = 0; e < 3; ++e) {
        int nb = out.adjacency[t][static_cast<std::size_t>(e)];
        if (nb < 0 || static_cast<std::size_t>(nb) < t) continue;
        auto& tv = out.triangles[t];
        auto& nv = out.triangles[static_cast<std::size_t>(nb)];
        int u = tv[static_cast<std::size_t>(e)], w = tv[static_cast<std::size_t>((e + 1) % 3)];
        int a = tv[static_cast<std::size_t>((e + 2) % 3)];
        int b = -1;
        for (int k = 0; k < 3; ++k)
          if (nv[static_cast<std::size_t>(k)] != u && nv[static_cast<std::size_t>(k)] != w) b = nv[static_cast<std::size_t>(k)];
        if (incircle(verts[static_cast<std::size_t>(u)], verts[static_cast<std::size_t>(w)],
                     verts[static_cast<std::size_t>(a)], verts[static_cast<std::size_t>(b)]) > 0) {
          // Flip shared edge (u, w) to (a, b).
          tv = {u, b, a};
          nv = {w, a, b};
          rebuild_adjacency();
          changed = true;
          if (++flips > flip_cap)
            throw std::runtime_error("delaunay: flip pass failed to terminate");
        }
      }
    }
  }

  // Canonical order: triangles sorted by their sorted vertex triple, each
  // rotated so the smallest vertex leads (orientation preserved).
  for (auto& v : out.triangles) {
    int rot = 0;
    for (int k = 1; k < 3; ++k)
      if (v[static_cast<std::size_t>(k)] < v[static_cast<std::size_t>(rot)]) rot = k;
    std::rotate(v.begin(), v.begin() + rot, v.end());
  }
  std::sort(out.triangles.begin(), out.triangles.end());
  rebuild_adjacency();
  return out;
}

int locate_triangle(const Triangulation& tri, const Pt& p) {
  if (tri.triangles.empty()) return -1;
  const long cap = 4 * static_cast<long>(tri.triangles.size()) + 16;
  int t = 0;
  long steps = 0;
  bool resolved = false;
  while (steps++ < cap) {
    const auto& v = tri.triangles[static_cast<std::size_t>(t)];
    int exit_edge = -1;
    for (int e = 0; e < 3; ++e) {
      const Pt& a = tri.vertices[static_cast<std::size_t>(v[static_cast<std::size_t>(e)])];
      const Pt& b = tri.vertices[static_cast<std::size_t>(v[static_cast<std::size_t>((e + 1) % 3)])];
      if (orient2d(a, b, p) < 0) {
        exit_edge = e;
        break;
      }
    }
    if (exit_edge < 0) {
      resolved = true;
      break;
    }
    int nb = tri.adjacency[static_cast<std::size_t>(t)][static_cast<std::size_t>(exit_edge)];
    if (nb < 0) return -1;
    t = nb;
  }
  if (!resolved) {
    // Pathological walk; fall back to scanning, keeping the same containment
    // rule so results stay consistent.
    t = -1;
    for (std::size_t i = 0; i < tri.triangles.size(); ++i) {
      const auto& v = tri.triangles[i];
      bool inside = true;
      for (int e = 0; e < 3 && inside; ++e)
        inside = orient2d(tri.vertices[static_cast<std::size_t>(v[static_cast<std::size_t>(e)])],
                          tri.vertices[static_cast<std::size_t>(v[static_cast<std::size_t>((e + 1) % 3)])], p) >= 0;
      if (inside) {
        t = static_cast<int>(i);
        break;
      }
    }
    if (t < 0) return -1;
  }

  // Boundary hits may belong to several triangles; report the lowest index
  // among the connected containing set.
  int best = t;
  std::vector<int> stack{t};
  std::vector<char> visited(tri.triangles.size(), 0);
  visited[static_cast<std::size_t>(t)] = 1;
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    const auto& v = tri.triangles[static_cast<std::size_t>(cur)];
    for (int e = 0; e < 3; ++e) {
      const Pt& a = tri.vertices[static_cast<std::size_t>(v[static_cast<std::size_t>(e)])];
      const Pt& b = tri.vertices[static_cast<std::size_t>(v[static_cast<std::size_t>((e + 1) % 3)])];
      if (orient2d(a, b, p) != 0) continue;
      int nb = tri.adjacency[static_cast<std::size_t>(cur)][static_cast<std::size_t>(e)];
      if (nb < 0 || visited[static_cast<std::size_t>(nb)]) continue;
      const auto& nvv = tri.triangles[static_cast<std::size_t>(nb)];
      bool contains = true;
      for (int k = 0; k < 3 && contains; ++k)
        contains = orient2d(tri.vertices[static_cast<std::size_t>(nvv[static_cast<std::size_t>(k)])],
                            tri.vertices[static_cast<std::size_t>(nvv[static_cast<std::size_t>((k + 1) % 3)])], p) >= 0;
      visited[static_cast<std::size_t>(nb)] = 1;
      if (contains) {
        best = std::min(best, nb);
        stack.push_back(nb);
      }
    }
  }
  return best;
}

std::array<int, 3> comp_cluster_for_user(const Pt& p, const Triangulation& tri,
                                         bool* outside_hull) {
  if (tri.triangles.empty())
    throw std::invalid_argument("comp_cluster_for_user: empty triangulation");
  int t = locate_triangle(tri, p);
  if (outside_hull) *outside_hull = t < 0;
  if (t < 0) {
    double best_d = std::numeric_limits<double>::infinity();
    int best = 0;
    for (std::size_t i = 0; i < tri.triangles.size(); ++i) {
      const auto& v = tri.triangles[i];
      double d = std::min({segment_dist_sq(p, tri.vertices[static_cast<std::size_t>(v[0])],
                                           tri.vertices[static_cast<std::size_t>(v[1])]),
                           segment_dist_sq(p, tri.vertices[static_cast<std::size_t>(v[1])],
                                           tri.vertices[static_cast<std::size_t>(v[2])]),
                           segment_dist_sq(p, tri.vertices[static_cast<std::size_t>(v[2])],
                                           tri.vertices[static_cast<std::size_t>(v[0])])});
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    t = best;
  }
  return tri.triangles[static_cast<std::size_t>(t)];
}

} // namespace vhcomp
