// Intrusive assembly with the multiscale basis. Deliberately independent
// of the legacy macro assembly.
#include "msfem/msfem.hpp"

namespace msfem {

IntrusiveSystem assemble_intrusive(const CoarseMesh& coarse, const FineMesh& fine,
                                   const ProblemSpec& spec, Space space, const OfflineData& off,
                                   bool galerkin) {
  if (off.space != space) throw InvalidArgument("offline data was computed for another space");
  IntrusiveSystem sys;
  sys.dofs = make_dofmap(coarse, space);
  std::vector<Triplet> trip;
  if (galerkin) sys.rhs.assign(sys.dofs.ndof(), 0.0);
  for (int K = 0; K < coarse.num_elements(); ++K) {
    const Submesh& s = fine.sub[K];
    const CorrectorSet& cs = off.correctors[K];
    const LocalBasis lb = local_basis(coarse, space, K);
    FieldTriple trial, test;
    for (int k = 0; k < 3; ++k) {
      trial[k] = multiscale_basis(coarse, s, space, cs, k);
      if (galerkin) {
        test[k] = trial[k];
      } else {
        test[k].resize(s.points.size());
        for (size_t i = 0; i < s.points.size(); ++i) test[k][i] = lb.value(k, s.points[i]);
      }
    }
    const Mat3 T = bilinear_table(s, spec, trial, test);
    for (int a = 0; a < 3; ++a) {
      const int j = sys.dofs.dof_of_entity[lb.entity[a]];
      if (j < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int i = sys.dofs.dof_of_entity[lb.entity[b]];
        if (i >= 0) trip.push_back({j, i, T[a][b]});
      }
    }
    if (galerkin) {
      // Fine P1 interpolant of f against the multiscale test functions.
      std::vector<double> fv(s.points.size());
      for (size_t i = 0; i < fv.size(); ++i) fv[i] = eval_rhs(spec, s.points[i]);
      for (int a = 0; a < 3; ++a) {
        const int j = sys.dofs.dof_of_entity[lb.entity[a]];
        if (j < 0) continue;
        double acc = 0.0;
        for (const auto& t : s.tris) {
          const double area =
              0.5 * cross(s.points[t[1]] - s.points[t[0]], s.points[t[2]] - s.points[t[0]]);
          const Mat3 M = element_mass(area);
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) acc += M[p][q] * test[a][t[p]] * fv[t[q]];
        }
        sys.rhs[j] += acc;
      }
    }
  }
  sys.A = csr_from_triplets(sys.dofs.ndof(), std::move(trip));
  if (!galerkin) sys.rhs = macro_rhs(coarse, sys.dofs, [&spec](Point x) { return eval_rhs(spec, x); });
  return sys;
}

namespace {

MultiscaleSolution expand(const CoarseMesh& coarse, const FineMesh& fine, Space space,
                          const OfflineData& off, const IntrusiveSystem& sys) {
  const std::vector<double> x = solve_coarse(sys.A, sys.rhs);
  MultiscaleSolution out;
  out.local.resize(coarse.triangles.size());
  for (int K = 0; K < coarse.num_elements(); ++K) {
    const Submesh& s = fine.sub[K];
    const LocalBasis lb = local_basis(coarse, space, K);
    auto& v = out.local[K];
    v.assign(s.points.size(), 0.0);
    for (int k = 0; k < 3; ++k) {
      const int i = sys.dofs.dof_of_entity[lb.entity[k]];
      if (i < 0 || x[i] == 0.0) continue;
      const auto phi = multiscale_basis(coarse, s, space, off.correctors[K], k);
      for (size_t p = 0; p < v.size(); ++p) v[p] += x[i] * phi[p];
    }
  }
  return out;
}

}  // namespace

MultiscaleSolution run_intrusive_galerkin(const CoarseMesh& coarse, const FineMesh& fine,
                                          const ProblemSpec& spec, const MethodConfig& cfg,
                                          const OfflineData& off) {
  const IntrusiveSystem sys = assemble_intrusive(coarse, fine, spec, cfg.space, off, true);
  // Well-posedness is not known for this variant; refuse garbage.
  if (cfg.os == Oversampling::Extended) {
    const double c = condition_estimate(sys.A);
    if (!(c <= 1e14))
      throw SingularMatrix("Galerkin system with DOF-extended oversampling is ill-conditioned (estimate " +
                           std::to_string(c) + ")");
  }
  MultiscaleSolution out = expand(coarse, fine, cfg.space, off, sys);
  out.cfg = cfg;
  return out;
}

MultiscaleSolution run_intrusive_pg(const CoarseMesh& coarse, const FineMesh& fine,
                                    const ProblemSpec& spec, const MethodConfig& cfg,
                                    const OfflineData& off) {
  MultiscaleSolution out =
      expand(coarse, fine, cfg.space, off, assemble_intrusive(coarse, fine, spec, cfg.space, off, false));
  out.cfg = cfg;
  return out;
}

}  // namespace msfem
