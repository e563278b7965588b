#include "msfem/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

namespace msfem {

std::string to_string(Space s) { return s == Space::Lagrange ? "lin" : "cr"; }

std::string to_string(Oversampling o) {
  switch (o) {
    case Oversampling::None: return "none";
    case Oversampling::Extended: return "extended";
    case Oversampling::Continuous: return "continuous";
  }
  return "?";
}

namespace {

double tri_area(Point a, Point b, Point c) { return 0.5 * cross(b - a, c - a); }

}  // namespace

CoarseMesh build_coarse_mesh(int n) {
  if (n < 1) throw InvalidArgument("build_coarse_mesh: n must be >= 1");
  TriMesh m;
  m.n = n;
  const int nv = n + 1;
  auto vid = [nv](int i, int j) { return j * nv + i; };
  m.vertices.resize(static_cast<size_t>(nv) * nv);
  m.boundary_vertex.resize(m.vertices.size());
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      m.vertices[vid(i, j)] = {static_cast<double>(i) / n, static_cast<double>(j) / n};
      m.boundary_vertex[vid(i, j)] = (i == 0 || j == 0 || i == n || j == n);
    }

  const int nh = n * (n + 1);
  auto hface = [n](int i, int j) { return j * n + i; };
  auto vface = [n, nh](int i, int j) { return nh + j * (n + 1) + i; };
  auto dface = [n, nh](int i, int j) { return 2 * nh + j * n + i; };
  m.faces.resize(static_cast<size_t>(2 * nh + n * n));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) m.faces[hface(i, j)].v = {vid(i, j), vid(i + 1, j)};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= n; ++i) m.faces[vface(i, j)].v = {vid(i, j), vid(i, j + 1)};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m.faces[dface(i, j)].v = {vid(i, j), vid(i + 1, j + 1)};
  for (auto& f : m.faces) f.elems = {-1, -1};

  const size_t ne = 2 * static_cast<size_t>(n) * n;
  m.triangles.resize(ne);
  m.elem_faces.resize(ne);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int e = 2 * (j * n + i);
      m.triangles[e] = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)};
      m.elem_faces[e] = {vface(i + 1, j), dface(i, j), hface(i, j)};
      m.triangles[e + 1] = {vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)};
      m.elem_faces[e + 1] = {hface(i, j + 1), vface(i, j), dface(i, j)};
    }
  for (size_t e = 0; e < ne; ++e)
    for (int f : m.elem_faces[e]) {
      auto& el = m.faces[f].elems;
      (el[0] < 0 ? el[0] : el[1]) = static_cast<int>(e);
    }
  for (auto& f : m.faces) f.boundary = f.elems[1] < 0;

  m.centroids.resize(ne);
  m.areas.resize(ne);
  for (size_t e = 0; e < ne; ++e) {
    const auto c = m.corners(static_cast<int>(e));
    m.centroids[e] = (1.0 / 3.0) * (c[0] + c[1] + c[2]);
    m.areas[e] = tri_area(c[0], c[1], c[2]);
  }
  return m;
}

Submesh refine_triangle(const std::array<Point, 3>& tri, int r) {
  if (r < 1) throw InvalidArgument("refine_triangle: r must be >= 1");
  Submesh s;
  std::vector<int> offset(r + 2, 0);
  for (int b = 0; b <= r; ++b) offset[b + 1] = offset[b] + (r + 1 - b);
  auto idx = [&](int a, int b) { return offset[b] + a; };
  const Point e1 = tri[1] - tri[0], e2 = tri[2] - tri[0];
  for (int b = 0; b <= r; ++b)
    for (int a = 0; a + b <= r; ++a)
      s.points.push_back(tri[0] + (static_cast<double>(a) / r) * e1 +
                         (static_cast<double>(b) / r) * e2);
  for (int b = 0; b < r; ++b)
    for (int a = 0; a + b < r; ++a) {
      s.tris.push_back({idx(a, b), idx(a + 1, b), idx(a, b + 1)});
      if (a + b + 2 <= r) s.tris.push_back({idx(a + 1, b), idx(a + 1, b + 1), idx(a, b + 1)});
    }
  s.corner = {idx(0, 0), idx(r, 0), idx(0, r)};
  for (int t = 0; t <= r; ++t) {
    s.face_nodes[0].push_back(idx(r - t, t));
    s.face_nodes[1].push_back(idx(0, r - t));
    s.face_nodes[2].push_back(idx(t, 0));
  }
  return s;
}

FineMesh build_fine_mesh(const CoarseMesh& coarse, int r) {
  if (r < 1) throw InvalidArgument("build_fine_mesh: r must be >= 1");
  FineMesh f;
  static_cast<TriMesh&>(f) = build_coarse_mesh(coarse.n * r);
  f.r = r;
  const int n = coarse.n, N = f.n;
  f.owner.resize(f.triangles.size());
  f.sub.resize(coarse.triangles.size());

  std::vector<int> loc(static_cast<size_t>(r + 1) * (r + 1));
  for (int J = 0; J < n; ++J)
    for (int I = 0; I < n; ++I)
      for (int T = 0; T < 2; ++T) {
        const int K = 2 * (J * n + I) + T;
        Submesh& s = f.sub[K];
        s.owner = K;
        // Lower element: 0 <= b <= a <= r; upper element: 0 <= a <= b <= r.
        auto contains = [T](int a, int b) { return T == 0 ? b <= a : a <= b; };
        std::fill(loc.begin(), loc.end(), -1);
        for (int b = 0; b <= r; ++b)
          for (int a = 0; a <= r; ++a) {
            if (!contains(a, b)) continue;
            const int g = (J * r + b) * (N + 1) + I * r + a;
            loc[b * (r + 1) + a] = static_cast<int>(s.nodes.size());
            s.nodes.push_back(g);
            s.points.push_back(f.vertices[g]);
          }
        for (int b = 0; b < r; ++b)
          for (int a = 0; a < r; ++a)
            for (int t = 0; t < 2; ++t) {
              const bool mine = T == 0 ? (t == 0 ? b <= a : b < a) : (t == 1 ? b >= a : b > a);
              if (!mine) continue;
              const int e = 2 * ((J * r + b) * N + I * r + a) + t;
              s.elems.push_back(e);
              f.owner[e] = K;
              const int v00 = loc[b * (r + 1) + a], v10 = loc[b * (r + 1) + a + 1];
              const int v11 = loc[(b + 1) * (r + 1) + a + 1], v01 = loc[(b + 1) * (r + 1) + a];
              s.tris.push_back(t == 0 ? std::array<int, 3>{v00, v10, v11}
                                      : std::array<int, 3>{v00, v11, v01});
            }
        const std::array<std::array<int, 2>, 3> cab =
            T == 0 ? std::array<std::array<int, 2>, 3>{{{0, 0}, {r, 0}, {r, r}}}
                   : std::array<std::array<int, 2>, 3>{{{0, 0}, {r, r}, {0, r}}};
        for (int k = 0; k < 3; ++k) s.corner[k] = loc[cab[k][1] * (r + 1) + cab[k][0]];
        for (int k = 0; k < 3; ++k) {
          const auto& p = cab[(k + 1) % 3];
          const auto& q = cab[(k + 2) % 3];
          const int da = (q[0] - p[0]) / r, db = (q[1] - p[1]) / r;
          for (int t = 0; t <= r; ++t)
            s.face_nodes[k].push_back(loc[(p[1] + t * db) * (r + 1) + p[0] + t * da]);
        }
      }
  return f;
}

double polygon_area(const std::vector<Point>& poly) {
  double a = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

namespace {

// Drops repeated and collinear vertices of a closed loop.
std::vector<Point> tidy_loop(std::vector<Point> p, double tol) {
  bool changed = true;
  while (changed && p.size() >= 3) {
    changed = false;
    for (size_t i = 0; i < p.size(); ++i) {
      const Point a = p[(i + p.size() - 1) % p.size()], b = p[i], c = p[(i + 1) % p.size()];
      const double la = norm(b - a), lc = norm(c - b);
      const bool dup = la <= tol;
      const bool flat = !dup && lc > tol && std::abs(cross(b - a, c - b)) <= 1e-10 * la * lc;
      if (dup || flat) {
        p.erase(p.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  return p;
}

std::vector<Point> clip_halfplane(const std::vector<Point>& in, Point a, Point nrm, double tol) {
  std::vector<Point> out;
  if (in.empty()) return out;
  const size_t m = in.size();
  for (size_t i = 0; i < m; ++i) {
    const Point p = in[(i + m - 1) % m], q = in[i];
    const double dp = dot(nrm, p - a), dq = dot(nrm, q - a);
    const bool pin = dp >= -tol, qin = dq >= -tol;
    if (qin) {
      if (!pin) out.push_back(p + (dp / (dp - dq)) * (q - p));
      out.push_back(q);
    } else if (pin) {
      out.push_back(p + (dp / (dp - dq)) * (q - p));
    }
  }
  return out;
}

const std::vector<Point>& unit_square() {
  static const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  return sq;
}

}  // namespace

std::vector<Point> clip_polygon(const std::vector<Point>& subject,
                                const std::vector<Point>& window) {
  if (subject.size() < 3 || std::abs(polygon_area(subject)) <= 0.0)
    throw InvalidArgument("clip_polygon: degenerate subject");
  std::vector<Point> poly = subject;
  if (polygon_area(poly) < 0) std::reverse(poly.begin(), poly.end());
  for (size_t i = 0; i < window.size(); ++i) {
    const Point a = window[i], b = window[(i + 1) % window.size()];
    const Point d = b - a;
    const Point nrm = (1.0 / norm(d)) * Point{-d.y, d.x};
    poly = clip_halfplane(poly, a, nrm, 1e-14);
  }
  poly = tidy_loop(poly, 1e-12);
  if (poly.size() < 3 || polygon_area(poly) <= 0.0)
    throw Error("clip_polygon: empty intersection");
  // Canonical start: lowest y, then lowest x.
  auto first = std::min_element(poly.begin(), poly.end(), [](Point p, Point q) {
    return p.y < q.y || (p.y == q.y && p.x < q.x);
  });
  std::rotate(poly.begin(), first, poly.end());
  return poly;
}

std::vector<Point> clip_polygon(const std::vector<Point>& subject) {
  return clip_polygon(subject, unit_square());
}

double PatchGeometry::area() const {
  double a = 0.0;
  for (const auto& t : tris) a += tri_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
  return a;
}

namespace {

// Merges points that coincide up to a small absolute tolerance.
class PointIndex {
 public:
  explicit PointIndex(double q) : q_(q) {}

  int find(Point p) const {
    const int64_t kx = std::llround(p.x / q_), ky = std::llround(p.y / q_);
    for (int64_t dx = -1; dx <= 1; ++dx)
      for (int64_t dy = -1; dy <= 1; ++dy) {
        auto it = map_.find(key(kx + dx, ky + dy));
        if (it == map_.end()) continue;
        for (int id : it->second)
          if (norm(points[id] - p) <= q_) return id;
      }
    return -1;
  }

  int insert(Point p) {
    const int found = find(p);
    if (found >= 0) return found;
    const int id = static_cast<int>(points.size());
    points.push_back(p);
    map_[key(std::llround(p.x / q_), std::llround(p.y / q_))].push_back(id);
    return id;
  }

  std::vector<Point> points;

 private:
  static uint64_t key(int64_t x, int64_t y) {
    return (static_cast<uint64_t>(x + (int64_t(1) << 31)) << 32) ^
           static_cast<uint64_t>(y + (int64_t(1) << 31));
  }
  double q_;
  std::unordered_map<uint64_t, std::vector<int>> map_;
};

struct Line {
  Point a, dir, nrm;  // nrm points into the homothetic triangle
  double dist(Point p) const { return dot(nrm, p - a); }
};

bool on_box(Point p, double tol) {
  return std::abs(p.x) <= tol || std::abs(p.y) <= tol || std::abs(p.x - 1) <= tol ||
         std::abs(p.y - 1) <= tol;
}

// Index of the side of the unit square holding both points, or -1.
int box_side(Point p, Point q, double tol) {
  if (std::abs(p.x) <= tol && std::abs(q.x) <= tol) return 0;
  if (std::abs(p.y) <= tol && std::abs(q.y) <= tol) return 1;
  if (std::abs(p.x - 1) <= tol && std::abs(q.x - 1) <= tol) return 2;
  if (std::abs(p.y - 1) <= tol && std::abs(q.y - 1) <= tol) return 3;
  return -1;
}

// A boundary segment of the patch is dilated when it shrinks onto a face of
// K as the ratio goes to 1: either it lies on a side of the homothetic
// triangle, or it lies on the side of the square that carries a face of K.
int classify_segment(Point a, Point b, const std::array<Line, 3>& lines, bool use_lines,
                     const std::array<int, 3>& face_side) {
  if (use_lines)
    for (int k = 0; k < 3; ++k)
      if (std::abs(lines[k].dist(a)) <= 1e-10 && std::abs(lines[k].dist(b)) <= 1e-10) return k;
  const int side = box_side(a, b, 1e-10);
  if (side >= 0)
    for (int k = 0; k < 3; ++k)
      if (face_side[k] == side) return k;
  return side >= 0 ? -1 : -2;
}

void tag_boundary(PatchGeometry& P, const std::array<Line, 3>& lines, bool use_lines,
                  const std::array<int, 3>& face_side) {
  std::vector<std::array<int, 3>> edges;  // (min, max, orientation source)
  edges.reserve(P.tris.size() * 3);
  for (const auto& t : P.tris)
    for (int k = 0; k < 3; ++k) {
      const int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      edges.push_back({std::min(a, b), std::max(a, b), a});
    }
  std::sort(edges.begin(), edges.end());
  P.boundary_node.assign(P.nodes.size(), 0);
  for (size_t i = 0; i < edges.size();) {
    size_t j = i;
    while (j < edges.size() && edges[j][0] == edges[i][0] && edges[j][1] == edges[i][1]) ++j;
    if (j - i == 1) {
      const int a = edges[i][0], b = edges[i][1];
      P.bedges.push_back({a, b});
      P.boundary_node[a] = P.boundary_node[b] = 1;
      const int tag = classify_segment(P.nodes[a], P.nodes[b], lines, use_lines, face_side);
      if (tag == -2) throw Error("build_patch: boundary edge on neither a dilated face nor the domain boundary");
      P.bedge_tag.push_back(tag);
    }
    i = j;
  }
}

}  // namespace

PatchGeometry build_patch(const CoarseMesh& coarse, const FineMesh& fine, int K, double rho) {
  if (!(rho >= 1.0)) throw InvalidArgument("build_patch: homothety ratio must be >= 1");
  if (K < 0 || K >= coarse.num_elements()) throw InvalidArgument("build_patch: bad element id");
  if (fine.n != coarse.n * fine.r || fine.sub.size() != coarse.triangles.size())
    throw InvalidArgument("build_patch: meshes are not nested");

  const Submesh& S = fine.sub[K];
  PatchGeometry P;
  P.K = K;
  P.rho = rho;
  const auto tri = coarse.corners(K);
  P.xc = coarse.centroids[K];
  for (int k = 0; k < 3; ++k) P.outer[k] = P.xc + rho * (tri[k] - P.xc);

  std::array<Line, 3> lines;
  for (int k = 0; k < 3; ++k) {
    const Point a = P.outer[(k + 1) % 3], b = P.outer[(k + 2) % 3];
    const Point d = (1.0 / norm(b - a)) * (b - a);
    lines[k] = {a, d, {-d.y, d.x}};
  }

  std::array<int, 3> face_side;
  for (int k = 0; k < 3; ++k) face_side[k] = box_side(tri[(k + 1) % 3], tri[(k + 2) % 3], 1e-14);

  if (rho == 1.0) {
    P.polygon = {tri[0], tri[1], tri[2]};
    for (int k = 0; k < 3; ++k) P.dilated.push_back({tri[(k + 1) % 3], tri[(k + 2) % 3], k});
    P.nodes = S.points;
    P.tris = S.tris;
    P.embedding.resize(S.points.size());
    for (size_t i = 0; i < P.embedding.size(); ++i) P.embedding[i] = static_cast<int>(i);
    P.k_tris.resize(S.tris.size());
    for (size_t i = 0; i < P.k_tris.size(); ++i) P.k_tris[i] = static_cast<int>(i);
    tag_boundary(P, lines, true, face_side);
    return P;
  }

  P.polygon = clip_polygon({P.outer[0], P.outer[1], P.outer[2]});
  const size_t np = P.polygon.size();
  std::array<bool, 3> seen{false, false, false};
  for (size_t i = 0; i < np; ++i) {
    const Point a = P.polygon[i], b = P.polygon[(i + 1) % np];
    const int face = classify_segment(a, b, lines, true, face_side);
    if (face >= 0) {
      P.dilated.push_back({a, b, face});
      seen[face] = true;
    } else {
      P.additional.push_back({a, b, -1});
    }
  }
  if (!(seen[0] && seen[1] && seen[2]))
    throw PatchDegenerate("build_patch: fewer than 3 dilated faces survive clipping for element " +
                          std::to_string(K) + "; lower the homothety ratio");

  // Background grid: the fine cells overlapping the clipped polygon.
  const int N = fine.n;
  const double h = 1.0 / N;
  double x0 = 1, x1 = 0, y0 = 1, y1 = 0;
  for (const Point& p : P.polygon) {
    x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
  }
  const int i0 = std::max(0, static_cast<int>(std::floor(x0 * N - 1e-9)));
  const int i1 = std::min(N - 1, static_cast<int>(std::ceil(x1 * N + 1e-9)) - 1);
  const int j0 = std::max(0, static_cast<int>(std::floor(y0 * N - 1e-9)));
  const int j1 = std::min(N - 1, static_cast<int>(std::ceil(y1 * N + 1e-9)) - 1);
  const int W = i1 - i0 + 2;
  auto lid = [&](int i, int j) { return (j - j0) * W + (i - i0); };
  std::vector<Point> pos(static_cast<size_t>(W) * (j1 - j0 + 2));
  for (int j = j0; j <= j1 + 1; ++j)
    for (int i = i0; i <= i1 + 1; ++i) pos[lid(i, j)] = fine.vertices[j * (N + 1) + i];

  // Nodes within 0.4h of a dilated line are moved onto it, so clipping does
  // not leave slivers. Only done when the annulus is thick enough that K's
  // own nodes are never candidates.
  double gap = 1e300;
  for (int k = 0; k < 3; ++k) {
    const Point a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
    const Point d = (1.0 / norm(b - a)) * (b - a);
    gap = std::min(gap, (rho - 1.0) * dot(Point{-d.y, d.x}, P.xc - a));
  }
  if (gap > 1.5 * h) {
    std::vector<Point> snapped = pos;
    std::vector<int> moved(pos.size(), -1);
    for (int k = 0; k < 3; ++k)
      for (int j = j0; j <= j1 + 1; ++j)
        for (int i = i0; i <= i1 + 1; ++i) {
          const int id = lid(i, j);
          const double d = lines[k].dist(snapped[id]);
          if (d == 0.0 || std::abs(d) >= 0.4 * h) continue;
          const bool side_x = (i == 0 || i == N), side_y = (j == 0 || j == N);
          if (side_x && side_y) continue;
          Point dir{0, 0};
          if (moved[id] >= 0) {
            if (side_x || side_y) continue;
            dir = lines[moved[id]].dir;
          } else if (side_x) {
            dir = {0, 1};
          } else if (side_y) {
            dir = {1, 0};
          }
          Point step;
          if (dir.x == 0 && dir.y == 0) {
            step = -d * lines[k].nrm;
          } else {
            const double s = dot(lines[k].nrm, dir);
            if (std::abs(s) < 0.2) continue;
            const double t = -d / s;
            if (std::abs(t) > 0.6 * h) continue;
            step = t * dir;
          }
          snapped[id] = snapped[id] + step;
          moved[id] = k;
        }
    bool ok = true;
    for (int j = j0; j <= j1 && ok; ++j)
      for (int i = i0; i <= i1 && ok; ++i) {
        const Point a = snapped[lid(i, j)], b = snapped[lid(i + 1, j)];
        const Point c = snapped[lid(i + 1, j + 1)], d = snapped[lid(i, j + 1)];
        ok = tri_area(a, b, c) > 0.05 * h * h && tri_area(a, c, d) > 0.05 * h * h;
      }
    if (ok) pos.swap(snapped);
  }

  PointIndex index(1e-9);
  const double tol = 1e-12;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i)
      for (int t = 0; t < 2; ++t) {
        const std::array<int, 3> ids =
            t == 0 ? std::array<int, 3>{lid(i, j), lid(i + 1, j), lid(i + 1, j + 1)}
                   : std::array<int, 3>{lid(i, j), lid(i + 1, j + 1), lid(i, j + 1)};
        std::vector<Point> poly{pos[ids[0]], pos[ids[1]], pos[ids[2]]};
        bool inside = true, outside = false;
        for (int k = 0; k < 3; ++k) {
          int in = 0, out = 0;
          for (const Point& p : poly) {
            const double d = lines[k].dist(p);
            in += d >= -tol;
            out += d <= tol;
          }
          inside = inside && in == 3;
          outside = outside || out == 3;
        }
        if (inside) {
          P.tris.push_back({index.insert(poly[0]), index.insert(poly[1]), index.insert(poly[2])});
          continue;
        }
        if (outside) continue;
        for (int k = 0; k < 3; ++k) poly = clip_halfplane(poly, lines[k].a, lines[k].nrm, tol);
        poly = tidy_loop(poly, 1e-12);
        if (poly.size() < 3 || polygon_area(poly) < 1e-10 * h * h) continue;
        // Fan from the vertex that keeps the smallest triangle largest.
        const size_t m = poly.size();
        size_t best = 0;
        double best_min = -1;
        for (size_t s = 0; s < m; ++s) {
          double mn = 1e300;
          for (size_t q = 1; q + 1 < m; ++q)
            mn = std::min(mn, tri_area(poly[s], poly[(s + q) % m], poly[(s + q + 1) % m]));
          if (mn > best_min + 1e-15 * h * h) best_min = mn, best = s;
        }
        for (size_t q = 1; q + 1 < m; ++q)
          P.tris.push_back({index.insert(poly[best]), index.insert(poly[(best + q) % m]),
                            index.insert(poly[(best + q + 1) % m])});
      }
  P.nodes = index.points;

  P.embedding.resize(S.points.size());
  for (size_t l = 0; l < S.points.size(); ++l) {
    const int id = index.find(S.points[l]);
    if (id < 0) throw Error("build_patch: element node missing from the patch triangulation");
    P.embedding[l] = id;
  }
  std::unordered_map<uint64_t, int> tri_of;
  tri_of.reserve(P.tris.size());
  auto tkey = [](const std::array<int, 3>& t) {
    return (static_cast<uint64_t>(t[0]) << 42) ^ (static_cast<uint64_t>(t[1]) << 21) ^
           static_cast<uint64_t>(t[2]);
  };
  for (size_t q = 0; q < P.tris.size(); ++q) tri_of[tkey(P.tris[q])] = static_cast<int>(q);
  P.k_tris.resize(S.tris.size());
  for (size_t q = 0; q < S.tris.size(); ++q) {
    const auto& t = S.tris[q];
    auto it = tri_of.find(tkey({P.embedding[t[0]], P.embedding[t[1]], P.embedding[t[2]]}));
    if (it == tri_of.end()) throw Error("build_patch: element triangle missing from the patch");
    P.k_tris[q] = it->second;
  }
  tag_boundary(P, lines, true, face_side);
  for (size_t e = 0; e < P.bedges.size(); ++e)
    if (P.bedge_tag[e] < 0 && !(on_box(P.nodes[P.bedges[e][0]], 1e-12) &&
                                on_box(P.nodes[P.bedges[e][1]], 1e-12)))
      throw Error("build_patch: additional boundary edge off the domain boundary");
  return P;
}

}  // namespace msfem
