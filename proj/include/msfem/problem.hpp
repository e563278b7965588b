#pragma once

#include <functional>
#include <string>
#include <vector>

#include "msfem/common.hpp"
#include "msfem/linalg.hpp"

namespace msfem {

enum class CoefficientKind { Constant, Periodic, Nonperiodic, Laminate, Checkerboard };
enum class RhsKind { Sin, One, Manufactured, Zero };

struct CoefSample {
  Mat2 A{1, 0, 0, 1};
  Vec2 b{0, 0};
  double sigma = 0.0;
};

struct ProblemSpec {
  CoefficientKind kind = CoefficientKind::Periodic;
  double eps = 0.0;             // microscale period
  Mat2 A0{1, 0, 0, 1};          // constant
  double a1 = 1.0, a2 = 4.0;    // laminate / checkerboard phases
  bool advection = false;
  Vec2 b{0, 0};
  bool reaction = false;
  double sigma = 0.0;
  bool skew = true;             // skew-symmetrized transport term
  RhsKind rhs = RhsKind::Sin;
  double m = 1.0, M = 101.0;    // coercivity and bound constants

  bool pure_diffusion() const { return !advection && !reaction; }
  // Canonical text of every parameter, used for cache keys.
  std::string canonical() const;
};

// Registry of named coefficients: constant(a11,a12,a21,a22), periodic,
// nonperiodic, laminate(a1,a2), checkerboard(a1,a2).
ProblemSpec make_problem(const std::string& name, const std::vector<double>& params, double eps);
std::string coefficient_name(CoefficientKind k);
RhsKind rhs_from_name(const std::string& name);
std::string rhs_name(RhsKind k);

CoefSample eval_coefficient(const ProblemSpec& spec, Point x);
double eval_rhs(const ProblemSpec& spec, Point x);
// The 1-periodic cell profile y -> A(eps * y); throws for nonperiodic data.
Mat2 periodic_profile(const ProblemSpec& spec, Point y);

struct FormOptions {
  bool advection = false;
  bool reaction = false;
  bool skew = true;
  bool symmetric() const { return !advection; }
};

FormOptions full_form(const ProblemSpec& spec);
FormOptions diffusion_form();

// Affine geometry of a triangle: gradients of the barycentric coordinates
// of vertices 1 and 2 (vertex 0 has -g1 - g2).
struct ElementGeom {
  Point p0;
  double area = 0.0;
  Point g1, g2;
  Point centroid;
  Point grad(const std::array<double, 3>& u) const {
    return (u[1] - u[0]) * g1 + (u[2] - u[0]) * g2;
  }
  std::array<double, 3> barycentric(Point p) const {
    const double l1 = dot(g1, p - p0), l2 = dot(g2, p - p0);
    return {1.0 - l1 - l2, l1, l2};
  }
};

ElementGeom element_geom(Point a, Point b, Point c);

// a_T(u, v) for P1 fields u (trial) and v (test) on one triangle, with the
// coefficients sampled once per triangle.
double element_bilinear(const ElementGeom& g, const CoefSample& c, const FormOptions& f,
                        const std::array<double, 3>& u, const std::array<double, 3>& v);
// Element matrix, row = test function, column = trial function.
Mat3 element_matrix(const ElementGeom& g, const CoefSample& c, const FormOptions& f);
Mat3 element_mass(double area);

using CoefficientSampler = std::function<CoefSample(Point)>;

// P1 matrix over a triangulation; dof[node] < 0 drops the node.
SparseMatrix assemble_p1(const std::vector<Point>& pts, const std::vector<std::array<int, 3>>& tris,
                         const std::vector<int>& dof, int ndof, const CoefficientSampler& coef,
                         const FormOptions& form);

}  // namespace msfem
