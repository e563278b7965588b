#include "msfem/local.hpp"

#include <algorithm>

#include "msfem/legacy_fem.hpp"

namespace msfem {

namespace {

double average_along(const std::vector<Point>& pts, const std::vector<int>& nodes,
                     const std::vector<double>& v) {
  double s = 0.0, len = 0.0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double l = norm(pts[nodes[i + 1]] - pts[nodes[i]]);
    s += 0.5 * l * (v[nodes[i]] + v[nodes[i + 1]]);
    len += l;
  }
  return s / len;
}

bool in_unit_square(Point p) {
  const double t = 1e-12;
  return p.x >= -t && p.y >= -t && p.x <= 1 + t && p.y <= 1 + t;
}

}  // namespace

std::array<double, 3> dof_eval(Space space, const Submesh& K, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != K.num_nodes())
    throw InvalidArgument("dof_eval: field size does not match the submesh");
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k)
    out[k] = space == Space::Lagrange ? v[K.corner[k]]
                                      : average_along(K.points, K.face_nodes[k], v);
  return out;
}

std::array<int, 3> lagrange_patch_vertices(const PatchGeometry& P) {
  std::array<int, 3> ids{};
  for (int k = 0; k < 3; ++k) {
    Point target = P.outer[k];
    if (!in_unit_square(target)) {
      double best = 1e300;
      for (const Point& q : P.polygon)
        if (norm(q - P.outer[k]) < best) best = norm(q - P.outer[k]), target = q;
    }
    int id = -1;
    double best = 1e300;
    for (int i = 0; i < P.num_nodes(); ++i)
      if (norm(P.nodes[i] - target) < best) best = norm(P.nodes[i] - target), id = i;
    if (best > 1e-8) throw InvalidArgument("dof_eval: selected vertex is not a patch node");
    ids[k] = id;
  }
  return ids;
}

ConstraintBlock dilated_face_constraints(const PatchGeometry& P) {
  ConstraintBlock cb;
  cb.C.assign(3, std::vector<double>(P.nodes.size(), 0.0));
  cb.g.assign(3, 0.0);
  std::array<double, 3> len{0, 0, 0};
  for (size_t e = 0; e < P.bedges.size(); ++e) {
    const int k = P.bedge_tag[e];
    if (k < 0) continue;
    const int a = P.bedges[e][0], b = P.bedges[e][1];
    const double l = norm(P.nodes[b] - P.nodes[a]);
    cb.C[k][a] += 0.5 * l;
    cb.C[k][b] += 0.5 * l;
    len[k] += l;
  }
  for (int k = 0; k < 3; ++k) {
    if (!(len[k] > 0.0)) throw PatchDegenerate("dilated face without boundary edges");
    double nn = 0.0;
    for (double& c : cb.C[k]) nn += c * c;
    nn = std::sqrt(nn);
    for (double& c : cb.C[k]) c /= nn;
  }
  return cb;
}

std::array<double, 3> dof_eval_patch(Space space, const PatchGeometry& P,
                                     const std::vector<double>& v) {
  if (v.size() != P.nodes.size()) throw InvalidArgument("dof_eval_patch: size mismatch");
  std::array<double, 3> out{};
  if (space == Space::Lagrange) {
    const auto ids = lagrange_patch_vertices(P);
    for (int k = 0; k < 3; ++k) out[k] = v[ids[k]];
    return out;
  }
  std::array<double, 3> len{0, 0, 0};
  for (size_t e = 0; e < P.bedges.size(); ++e) {
    const int k = P.bedge_tag[e];
    if (k < 0) continue;
    const int a = P.bedges[e][0], b = P.bedges[e][1];
    const double l = norm(P.nodes[b] - P.nodes[a]);
    out[k] += 0.5 * l * (v[a] + v[b]);
    len[k] += l;
  }
  for (int k = 0; k < 3; ++k) out[k] /= len[k];
  return out;
}

FieldTriple affine_drivers(const std::vector<Point>& pts, Point xc) {
  FieldTriple d;
  for (auto& f : d) f.resize(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    d[0][i] = 1.0;
    d[1][i] = pts[i].x - xc.x;
    d[2][i] = pts[i].y - xc.y;
  }
  return d;
}

Mat3 affine_dof_matrix(Space space, const PatchGeometry& P) {
  const FieldTriple d = affine_drivers(P.nodes, P.xc);
  Mat3 M{};
  for (int c = 0; c < 3; ++c) {
    const auto col = dof_eval_patch(space, P, d[c]);
    for (int r = 0; r < 3; ++r) M[r][c] = col[r];
  }
  return M;
}

FieldTriple corrector_extended(const PatchGeometry& P, const ProblemSpec& spec, Space space,
                               const LocalOptions& opt) {
  const FormOptions form = opt.diffusion_sampling ? diffusion_form() : full_form(spec);
  const bool drive_constant = form.advection || form.reaction;
  const int nn = P.num_nodes();
  const FieldTriple drivers = affine_drivers(P.nodes, P.xc);
  FieldTriple V;
  for (auto& f : V) f.assign(nn, 0.0);
  auto coef = [&spec](Point x) { return eval_coefficient(spec, x); };

  std::vector<int> dof(nn, -1);
  int nd = 0;
  for (int i = 0; i < nn; ++i)
    if (space == Space::CR || !P.boundary_node[i]) dof[i] = nd++;

  // rhs_alpha = -s(driver_alpha, w) for every retained test function w.
  const int first = drive_constant ? 0 : 1;
  std::vector<std::vector<double>> rhs(3 - first, std::vector<double>(nd, 0.0));
  for (const auto& t : P.tris) {
    const ElementGeom g = element_geom(P.nodes[t[0]], P.nodes[t[1]], P.nodes[t[2]]);
    const Mat3 ke = element_matrix(g, coef(g.centroid), form);
    for (int a = 0; a < 3; ++a) {
      const int i = dof[t[a]];
      if (i < 0) continue;
      for (int al = first; al < 3; ++al) {
        double s = 0.0;
        for (int b = 0; b < 3; ++b) s += ke[a][b] * drivers[al][t[b]];
        rhs[al - first][i] -= s;
      }
    }
  }
  const SparseMatrix A = assemble_p1(P.nodes, P.tris, dof, nd, coef, form);

  std::vector<std::vector<double>> sol;
  if (space == Space::Lagrange && opt.direct) {
    sol = sparse_direct_solve(A, rhs, form.symmetric());
  } else if (space == Space::Lagrange) {
    for (const auto& b : rhs)
      sol.push_back(form.symmetric() ? cg_solve(A, b, opt.solve) : bicgstab_solve(A, b, opt.solve));
  } else {
    ConstrainedOptions co;
    co.symmetric = form.symmetric();
    co.solve = opt.solve;
    co.direct = opt.direct;
    for (auto& s : constrained_solve(A, rhs, dilated_face_constraints(P), co))
      sol.push_back(std::move(s.x));
  }
  for (int al = first; al < 3; ++al)
    for (int i = 0; i < nn; ++i)
      if (dof[i] >= 0) V[al][i] = sol[al - first][dof[i]];
  return V;
}

std::vector<double> restrict_to_element(const PatchGeometry& P, const std::vector<double>& field) {
  if (field.size() != P.nodes.size()) throw InvalidArgument("restrict_to_element: size mismatch");
  std::vector<double> out(P.embedding.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = field[P.embedding[i]];
  return out;
}

double det3(const Mat3& M) {
  return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
         M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
         M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
}

double glue_det_ratio(const Mat3& M) {
  double f = 0.0;
  for (const auto& r : M)
    for (double x : r) f += x * x;
  f = std::sqrt(f);
  return f > 0.0 ? std::abs(det3(M)) / (f * f * f) : 0.0;
}

std::array<double, 3> glue_solve(const Mat3& M, const std::array<double, 3>& rhs) {
  const double ratio = glue_det_ratio(M);
  if (!(ratio >= 1e-12))
    throw GlueSingular("glue system is singular (|det M| / ||M||^3 = " + std::to_string(ratio) + ")",
                       ratio);
  DenseMatrix D(3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) D(r, c) = M[r][c];
  const auto x = dense_lu_solve(D, std::vector<double>(rhs.begin(), rhs.end()));
  return {x[0], x[1], x[2]};
}

Mat3 glue_matrix(Space space, const Submesh& K, Point xc, const FieldTriple& ext) {
  const FieldTriple d = affine_drivers(K.points, xc);
  Mat3 M{};
  for (int b = 0; b < 3; ++b) {
    std::vector<double> W(K.points.size());
    for (size_t i = 0; i < W.size(); ++i) W[i] = d[b][i] + ext[b][i];
    const auto col = dof_eval(space, K, W);
    for (int r = 0; r < 3; ++r) M[r][b] = col[r];
  }
  return M;
}

FieldTriple corrector_continuous(const PatchGeometry& P, const Submesh& K, Space space,
                                 const FieldTriple& ext, Mat3* glue_out) {
  FieldTriple on_K;
  for (int a = 0; a < 3; ++a) on_K[a] = restrict_to_element(P, ext[a]);
  const Mat3 M = glue_matrix(space, K, P.xc, on_K);
  if (glue_out) *glue_out = M;
  const FieldTriple d = affine_drivers(P.nodes, P.xc);
  FieldTriple out;
  for (int a = 0; a < 3; ++a) {
    const auto c = glue_solve(M, dof_eval(space, K, on_K[a]));
    out[a] = ext[a];
    for (int b = 0; b < 3; ++b) {
      if (c[b] == 0.0) continue;
      for (size_t i = 0; i < out[a].size(); ++i) out[a][i] -= c[b] * (d[b][i] + ext[b][i]);
    }
  }
  return out;
}

CorrectorSet compute_correctors(const CoarseMesh& coarse, const FineMesh& fine, int K,
                                const ProblemSpec& spec, Space space, Oversampling os,
                                double rho, const LocalOptions& opt) {
  if (os == Oversampling::None) rho = 1.0;
  const PatchGeometry P = build_patch(coarse, fine, K, rho);
  const Submesh& S = fine.sub[K];
  CorrectorSet cs;
  cs.K = K;
  cs.space = space;
  cs.variant = os;
  FieldTriple fields = corrector_extended(P, spec, space, opt);
  if (os == Oversampling::Continuous) {
    fields = corrector_continuous(P, S, space, fields, &cs.glue);
    cs.glue_det_ratio = glue_det_ratio(cs.glue);
  }
  for (int a = 0; a < 3; ++a) cs.V[a] = restrict_to_element(P, fields[a]);
  if (opt.keep_patch_fields) cs.patch = std::move(fields);
  return cs;
}

std::vector<double> multiscale_basis(const CoarseMesh& coarse, const Submesh& sub, Space space,
                                     const CorrectorSet& cs, int k) {
  const LocalBasis lb = local_basis(coarse, space, cs.K);
  std::vector<double> phi(sub.points.size());
  const double c0 = lb.centroid_value[k];
  const Point gk = lb.grad[k];
  for (size_t i = 0; i < phi.size(); ++i)
    phi[i] = lb.value(k, sub.points[i]) + c0 * cs.V[0][i] + gk.x * cs.V[1][i] + gk.y * cs.V[2][i];
  return phi;
}

}  // namespace msfem
