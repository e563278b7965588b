#pragma once

#include <vector>

#include "msfem/legacy_fem.hpp"
#include "msfem/local.hpp"

namespace msfem {

struct ElementCoefficients {
  double M = 0.0;
  Vec2 B1{0, 0}, B2{0, 0};
  Mat2 A{0, 0, 0, 0};
};

// VV^0 = 1 + V^0 and VV^a = x^a - xc^a + V^a on K's submesh.
FieldTriple enriched_drivers(const Submesh& sub, Point xc, const CorrectorSet& cs);

// T[b][a] = a_K(trial[a], test[b]) by fine quadrature over K's submesh.
Mat3 bilinear_table(const Submesh& sub, const ProblemSpec& spec, const FieldTriple& trial,
                    const FieldTriple& test);
double bilinear_on_element(const Submesh& sub, const ProblemSpec& spec,
                           const std::vector<double>& u, const std::vector<double>& v);

ElementCoefficients effective_pg(const CoarseMesh& coarse, const Submesh& sub,
                                 const CorrectorSet& cs, const ProblemSpec& spec);
ElementCoefficients effective_galerkin(const CoarseMesh& coarse, const Submesh& sub,
                                       const CorrectorSet& cs, const ProblemSpec& spec);
// Diffusion tensor written directly as a_K(x^a + V^a, x^b + V^b) / |K|.
Mat2 galerkin_diffusion_direct(const CoarseMesh& coarse, const Submesh& sub,
                               const CorrectorSet& cs, const ProblemSpec& spec);

void store(EffectiveCoefficients& into, int K, const ElementCoefficients& c);

struct CoercivityReport {
  std::vector<double> min_eig;  // per element, of (A + A^T) / 2
  std::vector<int> flagged;     // elements with min_eig < m - 1e-8
  double worst = 0.0;
};

CoercivityReport coercivity_check(const EffectiveCoefficients& coeffs, double m);

}  // namespace msfem
