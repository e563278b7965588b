#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "msfem/msfem.hpp"

namespace msfem {

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::GalerkinIntrusive: return "G";
    case Formulation::PG: return "PG";
    case Formulation::GalerkinNI: return "G-ni";
  }
  return "?";
}

void MethodConfig::validate() const {
  if (os == Oversampling::None && rho != 1.0)
    throw InvalidArgument("method without oversampling requires rho = 1");
  if (os != Oversampling::None && !(rho > 1.0))
    throw InvalidArgument("oversampling requires rho > 1");
}

std::string MethodConfig::token() const {
  return to_string(space) + ":" + to_string(os) + ":" + to_string(form);
}

MethodConfig MethodConfig::parse(const std::string& token, double rho) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t p = token.find(':', start);
    parts.push_back(token.substr(start, p == std::string::npos ? std::string::npos : p - start));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  if (parts.size() != 3) throw InvalidArgument("method '" + token + "': expected space:os:formulation");
  MethodConfig c;
  if (parts[0] == "lin") c.space = Space::Lagrange;
  else if (parts[0] == "cr") c.space = Space::CR;
  else throw InvalidArgument("method '" + token + "': unknown space");
  if (parts[1] == "none") c.os = Oversampling::None;
  else if (parts[1] == "extended") c.os = Oversampling::Extended;
  else if (parts[1] == "continuous") c.os = Oversampling::Continuous;
  else throw InvalidArgument("method '" + token + "': unknown oversampling");
  if (parts[2] == "G") c.form = Formulation::GalerkinIntrusive;
  else if (parts[2] == "PG") c.form = Formulation::PG;
  else if (parts[2] == "G-ni") c.form = Formulation::GalerkinNI;
  else throw InvalidArgument("method '" + token + "': unknown formulation");
  c.rho = c.os == Oversampling::None ? 1.0 : rho;
  c.validate();
  return c;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  std::vector<std::exception_ptr> errors(std::max(n, 0));
  auto guarded = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) guarded(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int nt = std::min(threads, n);
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) guarded(i);
      });
    for (auto& th : pool) th.join();
  }
  std::vector<int> failed;
  for (int i = 0; i < n; ++i)
    if (errors[i]) failed.push_back(i);
  if (failed.empty()) return;
  if (failed.size() == 1) std::rethrow_exception(errors[failed[0]]);
  std::string msg = "failures at indices";
  for (int i : failed) msg += " " + std::to_string(i);
  try {
    std::rethrow_exception(errors[failed[0]]);
  } catch (const std::exception& e) {
    msg += "; first: " + std::string(e.what());
  }
  throw Error(msg);
}

OfflineData offline(const CoarseMesh& coarse, const FineMesh& fine, const ProblemSpec& spec,
                    const MethodConfig& cfg, int threads, const LocalOptions& opt) {
  cfg.validate();
  OfflineData off;
  off.space = cfg.space;
  off.os = cfg.os;
  off.rho = cfg.rho;
  const int ne = coarse.num_elements();
  off.correctors.resize(ne);
  off.pg.resize(ne);
  off.pg.flavor = EffectiveCoefficients::Flavor::PG;
  off.galerkin.resize(ne);
  off.galerkin.flavor = EffectiveCoefficients::Flavor::Galerkin;
  LocalOptions lo = opt;
  lo.diffusion_sampling = lo.diffusion_sampling || cfg.diffusion_sampling;
  parallel_for(ne, threads, [&](int K) {
    CorrectorSet cs = compute_correctors(coarse, fine, K, spec, cfg.space, cfg.os, cfg.rho, lo);
    store(off.pg, K, effective_pg(coarse, fine.sub[K], cs, spec));
    store(off.galerkin, K, effective_galerkin(coarse, fine.sub[K], cs, spec));
    off.correctors[K] = std::move(cs);
  });
  return off;
}

BrokenField to_broken(const FineMesh& fine, const MultiscaleSolution& u) {
  BrokenField out(fine.triangles.size());
  for (size_t K = 0; K < fine.sub.size(); ++K) {
    const Submesh& s = fine.sub[K];
    const auto& v = u.local[K];
    for (size_t q = 0; q < s.elems.size(); ++q) {
      const auto& t = s.tris[q];
      out[s.elems[q]] = {v[t[0]], v[t[1]], v[t[2]]};
    }
  }
  return out;
}

BrokenField to_broken(const FineMesh& fine, const std::vector<double>& nodal) {
  if (nodal.size() != fine.vertices.size()) throw InvalidArgument("to_broken: size mismatch");
  BrokenField out(fine.triangles.size());
  for (size_t e = 0; e < out.size(); ++e) {
    const auto& t = fine.triangles[e];
    out[e] = {nodal[t[0]], nodal[t[1]], nodal[t[2]]};
  }
  return out;
}

MultiscaleSolution coarse_on_fine(const CoarseMesh& coarse, const FineMesh& fine,
                                  const CoarseSolution& u) {
  MultiscaleSolution out;
  out.local.resize(coarse.triangles.size());
  for (int K = 0; K < coarse.num_elements(); ++K) {
    const LocalBasis lb = local_basis(coarse, u.space, K);
    const Submesh& s = fine.sub[K];
    auto& v = out.local[K];
    v.assign(s.points.size(), 0.0);
    for (int k = 0; k < 3; ++k) {
      const double c = u.values[lb.entity[k]];
      if (c == 0.0) continue;
      for (size_t i = 0; i < v.size(); ++i) v[i] += c * lb.value(k, s.points[i]);
    }
  }
  out.macro = u;
  return out;
}

MultiscaleSolution run_method(const CoarseMesh& coarse, const FineMesh& fine,
                              const ProblemSpec& spec, const MethodConfig& cfg,
                              const OfflineData& off) {
  if (cfg.form == Formulation::GalerkinIntrusive)
    return run_intrusive_galerkin(coarse, fine, spec, cfg, off);
  return run_nonintrusive(coarse, fine, spec, cfg, off);
}

}  // namespace msfem
