#include "msfem/legacy_fem.hpp"

namespace msfem {

DofMap make_dofmap(const CoarseMesh& mesh, Space space) {
  DofMap d;
  d.space = space;
  if (space == Space::Lagrange) {
    d.dof_of_entity.assign(mesh.vertices.size(), -1);
    for (int v = 0; v < mesh.num_vertices(); ++v)
      if (!mesh.boundary_vertex[v]) {
        d.dof_of_entity[v] = d.ndof();
        d.entity_of_dof.push_back(v);
      }
  } else {
    d.dof_of_entity.assign(mesh.faces.size(), -1);
    for (int f = 0; f < mesh.num_faces(); ++f)
      if (!mesh.faces[f].boundary) {
        d.dof_of_entity[f] = d.ndof();
        d.entity_of_dof.push_back(f);
      }
  }
  return d;
}

LocalBasis local_basis(const CoarseMesh& mesh, Space space, int K) {
  LocalBasis b;
  b.space = space;
  const auto c = mesh.corners(K);
  b.geom = element_geom(c[0], c[1], c[2]);
  const std::array<Point, 3> gl{-1.0 * (b.geom.g1 + b.geom.g2), b.geom.g1, b.geom.g2};
  for (int k = 0; k < 3; ++k) {
    b.centroid_value[k] = 1.0 / 3.0;
    if (space == Space::Lagrange) {
      b.entity[k] = mesh.triangles[K][k];
      b.grad[k] = gl[k];
    } else {
      b.entity[k] = mesh.elem_faces[K][k];
      b.grad[k] = -2.0 * gl[k];
    }
  }
  return b;
}

double LocalBasis::value(int k, Point p) const {
  const double l = geom.barycentric(p)[k];
  return space == Space::Lagrange ? l : 1.0 - 2.0 * l;
}

std::vector<double> macro_rhs(const CoarseMesh& mesh, const DofMap& dofs, const ScalarField& f) {
  std::vector<double> rhs(dofs.ndof(), 0.0);
  std::vector<double> fv(mesh.vertices.size());
  for (int v = 0; v < mesh.num_vertices(); ++v) fv[v] = f(mesh.vertices[v]);
  for (int K = 0; K < mesh.num_elements(); ++K) {
    const LocalBasis lb = local_basis(mesh, dofs.space, K);
    const double area = mesh.areas[K];
    const auto& tv = mesh.triangles[K];
    for (int a = 0; a < 3; ++a) {
      const int j = dofs.dof_of_entity[lb.entity[a]];
      if (j < 0) continue;
      double s = 0.0;
      for (int v = 0; v < 3; ++v) {
        const double lam = area * (v == a ? 2.0 : 1.0) / 12.0;  // int lambda_v lambda_a
        s += fv[tv[v]] * (dofs.space == Space::Lagrange ? lam : area / 3.0 - 2.0 * lam);
      }
      rhs[j] += s;
    }
  }
  return rhs;
}

MacroSystem assemble_macro(const CoarseMesh& mesh, Space space, const EffectiveCoefficients& co,
                           const ScalarField& f, Quadrature quad) {
  const size_t ne = mesh.triangles.size();
  if (co.M.size() != ne || co.B1.size() != ne || co.B2.size() != ne || co.A.size() != ne)
    throw InvalidArgument("assemble_macro: coefficient count does not match the mesh");
  MacroSystem sys;
  sys.dofs = make_dofmap(mesh, space);
  std::vector<Triplet> trip;
  trip.reserve(ne * 9);
  for (int K = 0; K < static_cast<int>(ne); ++K) {
    const LocalBasis lb = local_basis(mesh, space, K);
    const double area = mesh.areas[K];
    for (int a = 0; a < 3; ++a) {  // test
      const int j = sys.dofs.dof_of_entity[lb.entity[a]];
      if (j < 0) continue;
      for (int b = 0; b < 3; ++b) {  // trial
        const int i = sys.dofs.dof_of_entity[lb.entity[b]];
        if (i < 0) continue;
        const Point gi = lb.grad[b], gj = lb.grad[a];
        double mass;
        if (quad == Quadrature::Centroid) {
          mass = lb.centroid_value[b] * lb.centroid_value[a];
        } else if (space == Space::Lagrange) {
          mass = (a == b ? 2.0 : 1.0) / 12.0;
        } else {
          mass = (a == b ? 1.0 : 0.0) / 3.0;
        }
        const Vec2 Agi = apply(co.A[K], {gi.x, gi.y});
        double s = co.M[K] * mass;
        s += lb.centroid_value[a] * (co.B1[K][0] * gi.x + co.B1[K][1] * gi.y);
        s += lb.centroid_value[b] * (co.B2[K][0] * gj.x + co.B2[K][1] * gj.y);
        s += gj.x * Agi[0] + gj.y * Agi[1];
        trip.push_back({j, i, area * s});
      }
    }
  }
  sys.A = csr_from_triplets(sys.dofs.ndof(), std::move(trip));
  sys.rhs = macro_rhs(mesh, sys.dofs, f);
  return sys;
}

CoarseSolution make_coarse_solution(const CoarseMesh& mesh, const DofMap& dofs,
                                    const std::vector<double>& x) {
  CoarseSolution s;
  s.space = dofs.space;
  s.values.assign(dofs.dof_of_entity.size(), 0.0);
  for (int i = 0; i < dofs.ndof(); ++i) s.values[dofs.entity_of_dof[i]] = x[i];
  const size_t ne = mesh.triangles.size();
  s.centroid_value.assign(ne, 0.0);
  s.gradient.assign(ne, {0, 0});
  for (int K = 0; K < static_cast<int>(ne); ++K) {
    const LocalBasis lb = local_basis(mesh, dofs.space, K);
    for (int k = 0; k < 3; ++k) {
      const double u = s.values[lb.entity[k]];
      s.centroid_value[K] += u * lb.centroid_value[k];
      s.gradient[K] = s.gradient[K] + u * lb.grad[k];
    }
  }
  return s;
}

CoarseSolution solve_macro(const CoarseMesh& mesh, const MacroSystem& sys, const SolveOptions& opt) {
  const std::vector<double> x = solve_coarse(sys.A, sys.rhs, opt);
  return make_coarse_solution(mesh, sys.dofs, x);
}

std::vector<double> reference_solve(const FineMesh& fine, const ProblemSpec& spec,
                                    const SolveOptions& opt) {
  std::vector<int> dof(fine.vertices.size(), -1);
  int nd = 0;
  for (int v = 0; v < fine.num_vertices(); ++v)
    if (!fine.boundary_vertex[v]) dof[v] = nd++;
  const FormOptions form = full_form(spec);
  const SparseMatrix A = assemble_p1(
      fine.vertices, fine.triangles, dof, nd,
      [&spec](Point x) { return eval_coefficient(spec, x); }, form);
  std::vector<double> fv(fine.vertices.size());
  for (int v = 0; v < fine.num_vertices(); ++v) fv[v] = eval_rhs(spec, fine.vertices[v]);
  std::vector<double> rhs(nd, 0.0);
  for (int e = 0; e < fine.num_elements(); ++e) {
    const auto& t = fine.triangles[e];
    const Mat3 M = element_mass(fine.areas[e]);
    for (int a = 0; a < 3; ++a) {
      if (dof[t[a]] < 0) continue;
      for (int b = 0; b < 3; ++b) rhs[dof[t[a]]] += M[a][b] * fv[t[b]];
    }
  }
  const std::vector<double> x =
      form.symmetric() ? cg_solve(A, rhs, opt) : bicgstab_solve(A, rhs, opt);
  std::vector<double> u(fine.vertices.size(), 0.0);
  for (int v = 0; v < fine.num_vertices(); ++v)
    if (dof[v] >= 0) u[v] = x[dof[v]];
  return u;
}

}  // namespace msfem
