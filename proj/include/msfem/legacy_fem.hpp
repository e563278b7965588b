#pragma once

#include <functional>
#include <vector>

#include "msfem/linalg.hpp"
#include "msfem/mesh.hpp"
#include "msfem/problem.hpp"

namespace msfem {

// Piecewise-constant macroscopic data, one entry per coarse element.
struct EffectiveCoefficients {
  enum class Flavor { PG, Galerkin };
  Flavor flavor = Flavor::PG;
  std::vector<double> M;
  std::vector<Vec2> B1, B2;
  std::vector<Mat2> A;

  void resize(size_t n) {
    M.assign(n, 0.0);
    B1.assign(n, {0, 0});
    B2.assign(n, {0, 0});
    A.assign(n, {0, 0, 0, 0});
  }
  size_t size() const { return M.size(); }
};

// Global numbering of the P1 space: vertices (Lagrange) or faces (CR);
// boundary entities carry no unknown.
struct DofMap {
  Space space = Space::Lagrange;
  std::vector<int> dof_of_entity;
  std::vector<int> entity_of_dof;
  int ndof() const { return static_cast<int>(entity_of_dof.size()); }
};

DofMap make_dofmap(const CoarseMesh& mesh, Space space);

// The three local P1 functions on element K. Lagrange function k is the
// barycentric coordinate of vertex k; CR function k belongs to face k
// (opposite vertex k) and equals 1 - 2 lambda_k.
struct LocalBasis {
  Space space = Space::Lagrange;
  std::array<int, 3> entity;
  std::array<double, 3> centroid_value;
  std::array<Point, 3> grad;
  ElementGeom geom;
  double value(int k, Point p) const;
};

LocalBasis local_basis(const CoarseMesh& mesh, Space space, int K);

enum class Quadrature { Centroid, ExactP1 };

struct MacroSystem {
  DofMap dofs;
  SparseMatrix A;  // row = test function
  std::vector<double> rhs;
};

using ScalarField = std::function<double(Point)>;

MacroSystem assemble_macro(const CoarseMesh& mesh, Space space, const EffectiveCoefficients& coeffs,
                           const ScalarField& f, Quadrature quad = Quadrature::Centroid);
// rhs_j = integral of the vertex interpolant of f against phi_j, exactly.
std::vector<double> macro_rhs(const CoarseMesh& mesh, const DofMap& dofs, const ScalarField& f);

struct CoarseSolution {
  Space space = Space::Lagrange;
  std::vector<double> values;          // per entity; boundary entities are 0
  std::vector<double> centroid_value;  // per element
  std::vector<Point> gradient;         // per element
};

CoarseSolution solve_macro(const CoarseMesh& mesh, const MacroSystem& sys,
                           const SolveOptions& opt = {});
// Exports for an arbitrary DOF vector (used by solve_macro).
CoarseSolution make_coarse_solution(const CoarseMesh& mesh, const DofMap& dofs,
                                    const std::vector<double>& x);

// Plain P1 Lagrange solve on the fine mesh; returns nodal values.
std::vector<double> reference_solve(const FineMesh& fine, const ProblemSpec& spec,
                                    const SolveOptions& opt = {});

}  // namespace msfem
