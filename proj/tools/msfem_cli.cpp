// Command-line driver: solve, sweep, cell, compare.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <tuple>

#include "CLI11.hpp"
#include "msfem/bench.hpp"
#include "msfem/homogenization.hpp"

using namespace msfem;

namespace {

struct Common {
  std::string config;
  int threads = 1;
  std::string cache;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment configuration file")->required();
  sub->add_option("--threads", c.threads, "worker threads for the offline stage")->check(CLI::PositiveNumber);
  sub->add_option("--cache", c.cache, "corrector cache directory (overrides the config)");
  sub->add_option("--out", c.out, "output file (overrides the config; default stdout)");
}

// Writes to --out, then the config's output key, then stdout.
void emit(const std::string& text, const Common& c, const ExperimentConfig& cfg) {
  const std::string path = !c.out.empty() ? c.out : cfg.output;
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error("cannot write '" + path + "'");
}

ExperimentHooks stderr_log() {
  ExperimentHooks h;
  h.log = [](const std::string& s) { std::cerr << s << "\n"; };
  return h;
}

std::string cache_dir(const Common& c, const ExperimentConfig& cfg) {
  return c.cache.empty() ? cfg.cache : c.cache;
}

int cmd_solve(const Common& c, std::string method, int n) {
  ExperimentConfig cfg = load_config(c.config);
  if (!method.empty()) cfg.methods = {method};
  else cfg.methods.resize(1);
  if (n > 0) cfg.coarse = {n};
  else cfg.coarse.resize(1);
  cfg = parse_config(serialize(cfg));  // revalidates the narrowed config
  const auto rows = run_experiment(cfg, c.threads, cache_dir(c, cfg), stderr_log());
  std::string text;
  char buf[256];
  for (const auto& r : rows) {
    if (!r.error.empty()) throw Error(r.method.token() + ": " + r.error);
    std::snprintf(buf, sizeof buf, "%s H=1/%d rel_H1_err=%.6e rel_diff_G=%.6e offline=%.2fs online=%.2fs\n",
                  r.method.token().c_str(), r.n, r.rel_err, r.rel_diff_G, r.offline_seconds,
                  r.online_seconds);
    text += buf;
  }
  emit(text, c, cfg);
  return 0;
}

int cmd_sweep(const Common& c) {
  const ExperimentConfig cfg = load_config(c.config);
  const auto rows = run_experiment(cfg, c.threads, cache_dir(c, cfg), stderr_log());
  emit(to_csv(rows, cfg.timings), c, cfg);
  int failed = 0;
  for (const auto& r : rows) failed += !r.error.empty();
  if (failed) std::cerr << failed << " run(s) failed; see the error column\n";
  return failed ? 2 : 0;
}

int cmd_cell(const Common& c, int resolution) {
  const ExperimentConfig cfg = load_config(c.config);
  const ProblemSpec spec = cfg.problem();
  const CellData cell =
      solve_cell_problems([&](Point y) { return periodic_profile(spec, y); }, resolution);
  char buf[256];
  std::snprintf(buf, sizeof buf, "A* = [%.10e %.10e; %.10e %.10e]\n", cell.Astar[0], cell.Astar[1],
                cell.Astar[2], cell.Astar[3]);
  emit(buf, c, cfg);
  return 0;
}

int cmd_compare(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  std::vector<std::pair<Space, Oversampling>> variants;
  for (const auto& m : cfg.method_configs())
    if (std::find(variants.begin(), variants.end(), std::make_pair(m.space, m.os)) == variants.end())
      variants.push_back({m.space, m.os});
  cfg.methods.clear();
  for (const auto& [sp, os] : variants)
    for (const char* f : {"G", "PG", "G-ni"})
      cfg.methods.push_back((sp == Space::CR ? "cr:" : "lin:") + to_string(os) + ":" + f);
  const auto rows = run_experiment(cfg, c.threads, cache_dir(c, cfg), stderr_log());
  std::map<std::tuple<int, int, int>, std::map<Formulation, double>> table;
  for (const auto& r : rows)
    table[{static_cast<int>(r.method.space), static_cast<int>(r.method.os), r.n}][r.method.form] = r.rel_err;
  std::string text = "space,os,H,err_G,err_PG,err_G-ni,dev_G-ni_percent\n";
  char buf[256];
  for (const auto& [key, errs] : table) {
    const auto [sp, os, n] = key;
    const double g = errs.at(Formulation::GalerkinIntrusive), pg = errs.at(Formulation::PG),
                 gni = errs.at(Formulation::GalerkinNI);
    std::snprintf(buf, sizeof buf, "%s,%s,%.10e,%.6e,%.6e,%.6e,%.4f\n",
                  to_string(static_cast<Space>(sp)).c_str(), to_string(static_cast<Oversampling>(os)).c_str(),
                  1.0 / n, g, pg, gni, 100.0 * std::abs(gni - g) / g);
    text += buf;
  }
  emit(text, c, cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale finite element experiments"};
  app.require_subcommand(1);
  Common common;
  std::string method;
  int n = 0, resolution = 256;

  auto* solve = app.add_subcommand("solve", "run one method at one coarse size and print its errors");
  add_common(solve, common);
  solve->add_option("--method", method, "method token such as cr:continuous:PG (default: first in config)");
  solve->add_option("--n", n, "coarse size (default: first in config)");
  auto* sweep = app.add_subcommand("sweep", "run every method and coarse size; write the CSV");
  add_common(sweep, common);
  auto* cell = app.add_subcommand("cell", "homogenized tensor of the configured periodic coefficient");
  add_common(cell, common);
  cell->add_option("--resolution", resolution, "cell grid size")->check(CLI::Range(2, 1 << 14));
  auto* compare = app.add_subcommand("compare", "G vs PG vs G-ni errors for each configured variant");
  add_common(compare, common);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(common, method, n);
    if (*sweep) return cmd_sweep(common);
    if (*cell) return cmd_cell(common, resolution);
    if (*compare) return cmd_compare(common);
  } catch (const ParseError& e) {
    std::cerr << common.config << ":" << e.line << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
