// Non-intrusive pipelines. This file only talks to the legacy solver
// through effective coefficients in and centroid exports out.
#include "msfem/msfem.hpp"

namespace msfem {

namespace {

const EffectiveCoefficients& coefficients_for(const MethodConfig& cfg, const OfflineData& off) {
  if (cfg.form == Formulation::PG) return off.pg;
  if (cfg.form == Formulation::GalerkinNI) return off.galerkin;
  throw InvalidArgument("non-intrusive run needs the PG or G-ni formulation");
}

void check_offline(const MethodConfig& cfg, const OfflineData& off) {
  if (cfg.space != off.space || cfg.os != off.os)
    throw InvalidArgument("offline data was computed for a different method");
}

}  // namespace

MultiscaleSolution postprocess(const CoarseMesh& coarse, const FineMesh& fine,
                               const CoarseSolution& macro, const OfflineData& off) {
  MultiscaleSolution out;
  out.local.resize(coarse.triangles.size());
  for (int K = 0; K < coarse.num_elements(); ++K) {
    const FieldTriple VV = enriched_drivers(fine.sub[K], coarse.centroids[K], off.correctors[K]);
    const double u0 = macro.centroid_value[K];
    const Point g = macro.gradient[K];
    auto& v = out.local[K];
    v.resize(VV[0].size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = u0 * VV[0][i] + g.x * VV[1][i] + g.y * VV[2][i];
  }
  out.macro = macro;
  return out;
}

SparseMatrix nonintrusive_matrix(const CoarseMesh& coarse, const ProblemSpec& spec,
                                 const MethodConfig& cfg, const OfflineData& off) {
  check_offline(cfg, off);
  auto f = [&spec](Point x) { return eval_rhs(spec, x); };
  return assemble_macro(coarse, cfg.space, coefficients_for(cfg, off), f, Quadrature::Centroid).A;
}

MultiscaleSolution run_nonintrusive(const CoarseMesh& coarse, const FineMesh& fine,
                                    const ProblemSpec& spec, const MethodConfig& cfg,
                                    const OfflineData& off) {
  check_offline(cfg, off);
  auto f = [&spec](Point x) { return eval_rhs(spec, x); };
  const MacroSystem sys =
      assemble_macro(coarse, cfg.space, coefficients_for(cfg, off), f, Quadrature::Centroid);
  MultiscaleSolution out = postprocess(coarse, fine, solve_macro(coarse, sys), off);
  out.cfg = cfg;
  return out;
}

}  // namespace msfem
