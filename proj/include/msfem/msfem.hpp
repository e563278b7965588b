#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msfem/effective.hpp"
#include "msfem/legacy_fem.hpp"
#include "msfem/local.hpp"

namespace msfem {

enum class Formulation { GalerkinIntrusive, PG, GalerkinNI };

std::string to_string(Formulation f);

struct MethodConfig {
  Space space = Space::Lagrange;
  Oversampling os = Oversampling::None;
  double rho = 1.0;
  Formulation form = Formulation::GalerkinIntrusive;
  bool diffusion_sampling = false;

  void validate() const;
  // "lin:none:G", "cr:continuous:G-ni", ...
  std::string token() const;
  static MethodConfig parse(const std::string& token, double rho);
};

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions are
// collected per index and rethrown together, ordered by index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct OfflineData {
  Space space = Space::Lagrange;
  Oversampling os = Oversampling::None;
  double rho = 1.0;
  std::vector<CorrectorSet> correctors;
  EffectiveCoefficients pg, galerkin;
};

OfflineData offline(const CoarseMesh& coarse, const FineMesh& fine, const ProblemSpec& spec,
                    const MethodConfig& cfg, int threads = 1, const LocalOptions& opt = {});

struct MultiscaleSolution {
  std::vector<std::vector<double>> local;  // per coarse element, on its submesh
  MethodConfig cfg;
  std::optional<CoarseSolution> macro;     // non-intrusive pipelines only
};

// Per fine element, the three vertex values of a (possibly discontinuous) field.
using BrokenField = std::vector<std::array<double, 3>>;

BrokenField to_broken(const FineMesh& fine, const MultiscaleSolution& u);
BrokenField to_broken(const FineMesh& fine, const std::vector<double>& nodal);
// The P1 function u_H sampled on the fine mesh.
MultiscaleSolution coarse_on_fine(const CoarseMesh& coarse, const FineMesh& fine,
                                  const CoarseSolution& u);

// u_H(xc) VV^0 + sum_a d_a u_H VV^a on each element, from the exported
// centroid values and gradients only.
MultiscaleSolution postprocess(const CoarseMesh& coarse, const FineMesh& fine,
                               const CoarseSolution& macro, const OfflineData& off);

// Offline data -> legacy assembly with effective coefficients -> legacy
// solve -> post-processing.
MultiscaleSolution run_nonintrusive(const CoarseMesh& coarse, const FineMesh& fine,
                                    const ProblemSpec& spec, const MethodConfig& cfg,
                                    const OfflineData& off);
SparseMatrix nonintrusive_matrix(const CoarseMesh& coarse, const ProblemSpec& spec,
                                 const MethodConfig& cfg, const OfflineData& off);

struct IntrusiveSystem {
  DofMap dofs;
  SparseMatrix A;  // row = test function
  std::vector<double> rhs;
};

// Galerkin: test functions are the multiscale basis; otherwise P1.
IntrusiveSystem assemble_intrusive(const CoarseMesh& coarse, const FineMesh& fine,
                                   const ProblemSpec& spec, Space space, const OfflineData& off,
                                   bool galerkin);
MultiscaleSolution run_intrusive_galerkin(const CoarseMesh& coarse, const FineMesh& fine,
                                          const ProblemSpec& spec, const MethodConfig& cfg,
                                          const OfflineData& off);
MultiscaleSolution run_intrusive_pg(const CoarseMesh& coarse, const FineMesh& fine,
                                    const ProblemSpec& spec, const MethodConfig& cfg,
                                    const OfflineData& off);

// Dispatches on cfg.form.
MultiscaleSolution run_method(const CoarseMesh& coarse, const FineMesh& fine,
                              const ProblemSpec& spec, const MethodConfig& cfg,
                              const OfflineData& off);

}  // namespace msfem
