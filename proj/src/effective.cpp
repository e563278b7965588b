#include "msfem/effective.hpp"

#include <algorithm>

namespace msfem {

FieldTriple enriched_drivers(const Submesh& sub, Point xc, const CorrectorSet& cs) {
  FieldTriple d = affine_drivers(sub.points, xc);
  for (int a = 0; a < 3; ++a)
    for (size_t i = 0; i < d[a].size(); ++i) d[a][i] += cs.V[a][i];
  return d;
}

Mat3 bilinear_table(const Submesh& sub, const ProblemSpec& spec, const FieldTriple& trial,
                    const FieldTriple& test) {
  const FormOptions form = full_form(spec);
  Mat3 T{};
  for (const auto& t : sub.tris) {
    const ElementGeom g = element_geom(sub.points[t[0]], sub.points[t[1]], sub.points[t[2]]);
    const CoefSample c = eval_coefficient(spec, g.centroid);
    for (int a = 0; a < 3; ++a) {
      const std::array<double, 3> u{trial[a][t[0]], trial[a][t[1]], trial[a][t[2]]};
      for (int b = 0; b < 3; ++b) {
        const std::array<double, 3> v{test[b][t[0]], test[b][t[1]], test[b][t[2]]};
        T[b][a] += element_bilinear(g, c, form, u, v);
      }
    }
  }
  return T;
}

double bilinear_on_element(const Submesh& sub, const ProblemSpec& spec,
                           const std::vector<double>& u, const std::vector<double>& v) {
  const FormOptions form = full_form(spec);
  double s = 0.0;
  for (const auto& t : sub.tris) {
    const ElementGeom g = element_geom(sub.points[t[0]], sub.points[t[1]], sub.points[t[2]]);
    s += element_bilinear(g, eval_coefficient(spec, g.centroid), form,
                          {u[t[0]], u[t[1]], u[t[2]]}, {v[t[0]], v[t[1]], v[t[2]]});
  }
  return s;
}

namespace {

ElementCoefficients from_table(const Mat3& T, double area) {
  ElementCoefficients c;
  c.M = T[0][0] / area;
  c.B1 = {T[0][1] / area, T[0][2] / area};
  c.B2 = {T[1][0] / area, T[2][0] / area};
  c.A = {T[1][1] / area, T[1][2] / area, T[2][1] / area, T[2][2] / area};
  return c;
}

}  // namespace

ElementCoefficients effective_pg(const CoarseMesh& coarse, const Submesh& sub,
                                 const CorrectorSet& cs, const ProblemSpec& spec) {
  const Point xc = coarse.centroids[cs.K];
  const Mat3 T = bilinear_table(sub, spec, enriched_drivers(sub, xc, cs),
                                affine_drivers(sub.points, xc));
  return from_table(T, coarse.areas[cs.K]);
}

ElementCoefficients effective_galerkin(const CoarseMesh& coarse, const Submesh& sub,
                                       const CorrectorSet& cs, const ProblemSpec& spec) {
  const Point xc = coarse.centroids[cs.K];
  const FieldTriple VV = enriched_drivers(sub, xc, cs);
  const Mat3 T = bilinear_table(sub, spec, VV, affine_drivers(sub.points, xc));
  const Mat3 C = bilinear_table(sub, spec, VV, cs.V);
  Mat3 S{};
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) S[b][a] = T[b][a] + C[b][a];
  return from_table(S, coarse.areas[cs.K]);
}

Mat2 galerkin_diffusion_direct(const CoarseMesh& coarse, const Submesh& sub,
                               const CorrectorSet& cs, const ProblemSpec& spec) {
  FieldTriple X;
  for (int a = 0; a < 3; ++a) X[a].assign(sub.points.size(), 0.0);
  for (size_t i = 0; i < sub.points.size(); ++i) {
    X[1][i] = sub.points[i].x + cs.V[1][i];
    X[2][i] = sub.points[i].y + cs.V[2][i];
  }
  ProblemSpec diff = spec;
  diff.advection = diff.reaction = false;
  const Mat3 T = bilinear_table(sub, diff, X, X);
  const double area = coarse.areas[cs.K];
  return {T[1][1] / area, T[1][2] / area, T[2][1] / area, T[2][2] / area};
}

void store(EffectiveCoefficients& into, int K, const ElementCoefficients& c) {
  into.M[K] = c.M;
  into.B1[K] = c.B1;
  into.B2[K] = c.B2;
  into.A[K] = c.A;
}

CoercivityReport coercivity_check(const EffectiveCoefficients& coeffs, double m) {
  CoercivityReport r;
  r.worst = 1e300;
  for (size_t K = 0; K < coeffs.A.size(); ++K) {
    const double e = min_sym_eig(coeffs.A[K]);
    r.min_eig.push_back(e);
    r.worst = std::min(r.worst, e);
    if (e < m - 1e-8) r.flagged.push_back(static_cast<int>(K));
  }
  return r;
}

}  // namespace msfem
