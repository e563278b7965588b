#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msfem/msfem.hpp"

namespace msfem {

// Text format: one `key = value` per line, `#` starts a comment. Lists are
// separated by commas. Numbers accept the forms a, a/b, pi, pi/b, a*pi/b.
struct ExperimentConfig {
  std::string coefficient;
  std::vector<double> params;
  double eps = 0.0;
  std::string rhs = "sin";
  std::vector<int> coarse;
  int fine = 0;
  std::vector<std::string> methods;
  double rho = 3.0;
  bool has_advection = false;
  Vec2 advection{0, 0};
  bool has_reaction = false;
  double reaction = 0.0;
  bool skew = true;
  bool diffusion_sampling = false;
  double solver_tol = 1e-12;
  int solver_maxit = 200000;
  bool timings = true;
  std::string output;
  std::string cache;

  ProblemSpec problem() const;
  std::vector<MethodConfig> method_configs() const;
  bool operator==(const ExperimentConfig& o) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize(const ExperimentConfig& c);

struct H1Error {
  double absolute = 0.0;
  double relative = 0.0;  // divided by the norm of v
};

// Broken H1 norm of u - v, integrated exactly per fine element.
H1Error broken_h1_error(const BrokenField& u, const BrokenField& v, const TriMesh& mesh);
double broken_h1_norm(const BrokenField& u, const TriMesh& mesh);

struct ResultRow {
  int n = 0;
  MethodConfig method;
  double rel_err = 0.0;     // against the fine reference
  double rel_diff_G = 0.0;  // against the intrusive Galerkin run of the same space and variant
  double offline_seconds = 0.0;
  double online_seconds = 0.0;
  std::string error;
};

struct ExperimentHooks {
  std::function<void(int n, const MethodConfig&, const OfflineData&)> on_offline;
  std::function<void(const std::string&)> log;
};

std::vector<ResultRow> run_experiment(const ExperimentConfig& c, int threads = 1,
                                      const std::string& cache_dir = "",
                                      const ExperimentHooks& hooks = {});
std::string to_csv(const std::vector<ResultRow>& rows, bool timings);

// Corrector cache. One file per configuration hash and coarse size.
std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = 14695981039346656037ULL);
std::uint64_t offline_hash(const ProblemSpec& spec, const MethodConfig& cfg, int n, int fine,
                           const SolveOptions& opt);
std::string cache_path(const std::string& dir, std::uint64_t hash, const MethodConfig& cfg, int n);
void cache_write(const std::string& path, std::uint64_t hash, const OfflineData& off);
// nullopt when the file is absent or belongs to other parameters. A damaged
// file throws CorruptCache.
std::optional<OfflineData> cache_read(const std::string& path, std::uint64_t hash);

}  // namespace msfem
