#pragma once

#include <array>
#include <limits>
#include <vector>

#include "msfem/linalg.hpp"
#include "msfem/mesh.hpp"
#include "msfem/problem.hpp"

namespace msfem {

using FieldTriple = std::array<std::vector<double>, 3>;

struct LocalOptions {
  bool diffusion_sampling = false;  // sample with the diffusion part of a_K only
  bool keep_patch_fields = false;
  bool direct = true;  // sparse factorization; false selects preconditioned Krylov solves
  SolveOptions solve;
};

struct CorrectorSet {
  int K = -1;
  Space space = Space::Lagrange;
  Oversampling variant = Oversampling::None;
  FieldTriple V;      // on K's submesh
  FieldTriple patch;  // patch-wide fields, only when requested
  Mat3 glue{};        // DOF-continuous only
  double glue_det_ratio = std::numeric_limits<double>::quiet_NaN();
};

// Gamma(K, v) for a field on K's submesh: vertex values or face averages
// (composite trapezoid along the fine boundary nodes).
std::array<double, 3> dof_eval(Space space, const Submesh& K, const std::vector<double>& v);

// Gamma(S_K, v) for a patch field. Lagrange uses the nodes returned by
// lagrange_patch_vertices; CR averages over the dilated faces.
std::array<double, 3> dof_eval_patch(Space space, const PatchGeometry& P,
                                     const std::vector<double>& v);
std::array<int, 3> lagrange_patch_vertices(const PatchGeometry& P);

// Face-average functionals of the dilated faces as unit-norm rows.
ConstraintBlock dilated_face_constraints(const PatchGeometry& P);

// DOFs of {1, x1 - xc1, x2 - xc2} on S_K (columns).
Mat3 affine_dof_matrix(Space space, const PatchGeometry& P);

// Drivers 1, x1 - xc1, x2 - xc2 at the given points.
FieldTriple affine_drivers(const std::vector<Point>& pts, Point xc);

FieldTriple corrector_extended(const PatchGeometry& P, const ProblemSpec& spec, Space space,
                               const LocalOptions& opt = {});

std::vector<double> restrict_to_element(const PatchGeometry& P, const std::vector<double>& field);

// Columns are Gamma(K, W^beta), with W^0 = 1 + V^0 and W^b = x^b - xc^b + V^b.
Mat3 glue_matrix(Space space, const Submesh& K, Point xc, const FieldTriple& ext_on_K);
double det3(const Mat3& M);
// |det M| / ||M||_F^3
double glue_det_ratio(const Mat3& M);
// Solves M c = rhs; throws GlueSingular when |det M| < 1e-12 ||M||_F^3.
std::array<double, 3> glue_solve(const Mat3& M, const std::array<double, 3>& rhs);

FieldTriple corrector_continuous(const PatchGeometry& P, const Submesh& K, Space space,
                                 const FieldTriple& ext, Mat3* glue_out = nullptr);

CorrectorSet compute_correctors(const CoarseMesh& coarse, const FineMesh& fine, int K,
                                const ProblemSpec& spec, Space space, Oversampling os,
                                double rho, const LocalOptions& opt = {});

// Local P1 function k of element K plus its corrector expansion, at the
// nodes of K's submesh.
std::vector<double> multiscale_basis(const CoarseMesh& coarse, const Submesh& sub, Space space,
                                     const CorrectorSet& cs, int k);

}  // namespace msfem
