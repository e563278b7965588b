#include "msfem/homogenization.hpp"

#include <cmath>

namespace msfem {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

double CellData::eval(int alpha, Point y) const {
  const std::vector<double>& w = alpha == 0 ? w1 : w2;
  const double sx = y.x * n, sy = y.y * n;
  const double fx = std::floor(sx), fy = std::floor(sy);
  const double s = sx - fx, t = sy - fy;
  const int i = static_cast<int>(fx), j = static_cast<int>(fy);
  auto at = [&](int a, int b) { return w[wrap(a, n) + n * wrap(b, n)]; };
  if (t <= s) return (1 - s) * at(i, j) + (s - t) * at(i + 1, j) + t * at(i + 1, j + 1);
  return (1 - t) * at(i, j) + s * at(i + 1, j + 1) + (t - s) * at(i, j + 1);
}

CellData solve_cell_problems(const PeriodicSampler& A_per, int n, const SolveOptions& opt) {
  if (n < 2) throw InvalidArgument("cell resolution must be at least 2");
  const CoarseMesh mesh = build_coarse_mesh(n);
  CellData cell;
  cell.n = n;
  const int N = n * n;
  std::vector<int> dof(mesh.vertices.size());
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) dof[j * (n + 1) + i] = wrap(i, n) + n * wrap(j, n);

  cell.samples.resize(mesh.triangles.size());
  for (size_t e = 0; e < mesh.triangles.size(); ++e) cell.samples[e] = A_per(mesh.centroids[e]);

  CoefficientSampler sampler = [&A_per](Point x) {
    CoefSample c;
    c.A = A_per(x);
    return c;
  };
  const SparseMatrix A = assemble_p1(mesh.vertices, mesh.triangles, dof, N, sampler, diffusion_form());

  std::vector<std::vector<double>> rhs(2, std::vector<double>(N, 0.0));
  for (size_t e = 0; e < mesh.triangles.size(); ++e) {
    const auto& t = mesh.triangles[e];
    const ElementGeom g = element_geom(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    const std::array<Point, 3> grads{-1.0 * (g.g1 + g.g2), g.g1, g.g2};
    const Mat2& a = cell.samples[e];
    for (int beta = 0; beta < 2; ++beta) {
      const Point Ae = beta == 0 ? Point{a[0], a[2]} : Point{a[1], a[3]};
      for (int k = 0; k < 3; ++k) rhs[beta][dof[t[k]]] -= g.area * dot(Ae, grads[k]);
    }
  }

  ConstraintBlock cb;
  cb.C.assign(1, std::vector<double>(N, 1.0 / std::sqrt(static_cast<double>(N))));
  cb.g = {0.0};
  ConstrainedOptions co;
  co.symmetric = true;
  co.solve = opt;
  const auto sol = constrained_solve(A, rhs, cb, co);
  cell.w1 = sol[0].x;
  cell.w2 = sol[1].x;
  cell.Astar = homogenized_tensor(cell);
  return cell;
}

Mat2 homogenized_tensor(const CellData& cell) {
  const int n = cell.n;
  const CoarseMesh mesh = build_coarse_mesh(n);
  Mat2 out{0, 0, 0, 0};
  for (size_t e = 0; e < mesh.triangles.size(); ++e) {
    const auto& t = mesh.triangles[e];
    const ElementGeom g = element_geom(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    std::array<Point, 2> G;
    for (int a = 0; a < 2; ++a) {
      const std::vector<double>& w = a == 0 ? cell.w1 : cell.w2;
      std::array<double, 3> u;
      for (int k = 0; k < 3; ++k) {
        const Point p = mesh.vertices[t[k]];
        const int i = static_cast<int>(std::lround(p.x * n)) % n;
        const int j = static_cast<int>(std::lround(p.y * n)) % n;
        u[k] = w[i + n * j];
      }
      G[a] = g.grad(u);
      if (a == 0) G[a].x += 1.0;
      else G[a].y += 1.0;
    }
    const Mat2& A = cell.samples[e];
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) {
        const Vec2 AG = apply(A, {G[a].x, G[a].y});
        out[2 * b + a] += g.area * (G[b].x * AG[0] + G[b].y * AG[1]);
      }
  }
  return out;
}

Mat2 laminate_tensor(double a1, double a2) {
  return {2.0 / (1.0 / a1 + 1.0 / a2), 0, 0, 0.5 * (a1 + a2)};
}

Mat2 checkerboard_tensor(double a1, double a2) {
  const double s = std::sqrt(a1 * a2);
  return {s, 0, 0, s};
}

BrokenField two_scale_field(const FineMesh& fine, const std::vector<double>& u_star,
                            const CellData& cell, double eps) {
  if (u_star.size() != fine.vertices.size()) throw InvalidArgument("two_scale_field: size mismatch");
  if (!(eps > 0)) throw InvalidArgument("two_scale_field: eps must be positive");
  BrokenField out(fine.triangles.size());
  for (size_t e = 0; e < out.size(); ++e) {
    const auto& t = fine.triangles[e];
    const ElementGeom g = element_geom(fine.vertices[t[0]], fine.vertices[t[1]], fine.vertices[t[2]]);
    const Point du = g.grad({u_star[t[0]], u_star[t[1]], u_star[t[2]]});
    for (int k = 0; k < 3; ++k) {
      const Point x = fine.vertices[t[k]];
      const Point y{x.x / eps, x.y / eps};
      out[e][k] = u_star[t[k]] + eps * (du.x * cell.eval(0, y) + du.y * cell.eval(1, y));
    }
  }
  return out;
}

}  // namespace msfem
