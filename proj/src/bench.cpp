#include "msfem/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace msfem {

namespace {

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(v);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

bool plain_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

// a, a/b, pi, pi/b, a*pi, a*pi/b
double parse_number(const std::string& raw, int line) {
  const std::string s = trim(raw);
  double num = 1.0, den = 1.0;
  std::string head = s, tail;
  const size_t slash = s.find('/');
  if (slash != std::string::npos) {
    head = trim(s.substr(0, slash));
    tail = trim(s.substr(slash + 1));
    if (!plain_number(tail, den) || den == 0.0)
      throw ParseError("malformed number '" + s + "'", line);
  }
  const size_t pi = head.find("pi");
  if (pi != std::string::npos) {
    std::string factor = trim(head.substr(0, pi));
    if (trim(head.substr(pi + 2)) != "") throw ParseError("malformed number '" + s + "'", line);
    if (!factor.empty()) {
      if (factor.back() != '*') throw ParseError("malformed number '" + s + "'", line);
      factor = trim(factor.substr(0, factor.size() - 1));
      if (!plain_number(factor, num)) throw ParseError("malformed number '" + s + "'", line);
    }
    num *= std::numbers::pi;
  } else if (!plain_number(head, num)) {
    throw ParseError("malformed number '" + s + "'", line);
  }
  return num / den;
}

int parse_int(const std::string& s, int line) {
  const double v = parse_number(s, line);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ParseError("expected an integer, got '" + s + "'", line);
  return static_cast<int>(v);
}

bool parse_bool(const std::string& s, int line) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParseError("expected a boolean, got '" + s + "'", line);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ProblemSpec ExperimentConfig::problem() const {
  ProblemSpec p = make_problem(coefficient, params, eps);
  p.rhs = rhs_from_name(rhs);
  p.advection = has_advection;
  p.b = advection;
  p.reaction = has_reaction;
  p.sigma = reaction;
  p.skew = skew;
  return p;
}

std::vector<MethodConfig> ExperimentConfig::method_configs() const {
  std::vector<MethodConfig> out;
  for (const auto& m : methods) {
    MethodConfig c = MethodConfig::parse(m, rho);
    c.diffusion_sampling = diffusion_sampling;
    out.push_back(c);
  }
  return out;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return coefficient == o.coefficient && params == o.params && eps == o.eps && rhs == o.rhs &&
         coarse == o.coarse && fine == o.fine && methods == o.methods && rho == o.rho &&
         has_advection == o.has_advection && advection == o.advection &&
         has_reaction == o.has_reaction && reaction == o.reaction && skew == o.skew &&
         diffusion_sampling == o.diffusion_sampling && solver_tol == o.solver_tol &&
         solver_maxit == o.solver_maxit && timings == o.timings && output == o.output &&
         cache == o.cache;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::map<std::string, int> seen;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const size_t eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    const std::string key = trim(body.substr(0, eq));
    const std::string val = trim(body.substr(eq + 1));
    if (val.empty()) throw ParseError("missing value for '" + key + "'", line);
    if (seen.count(key)) throw ParseError("duplicate key '" + key + "'", line);
    seen[key] = line;
    if (key == "coefficient") {
      c.coefficient = val;
    } else if (key == "params") {
      for (const auto& t : split_list(val)) c.params.push_back(parse_number(t, line));
    } else if (key == "eps") {
      c.eps = parse_number(val, line);
    } else if (key == "rhs") {
      c.rhs = val;
      try {
        rhs_from_name(val);
      } catch (const Error& e) {
        throw ParseError(e.what(), line);
      }
    } else if (key == "coarse") {
      for (const auto& t : split_list(val)) c.coarse.push_back(parse_int(t, line));
    } else if (key == "fine") {
      c.fine = parse_int(val, line);
    } else if (key == "methods") {
      c.methods = split_list(val);
    } else if (key == "rho") {
      c.rho = parse_number(val, line);
    } else if (key == "advection") {
      const auto t = split_list(val);
      if (t.size() != 2) throw ParseError("advection needs two components", line);
      c.has_advection = true;
      c.advection = {parse_number(t[0], line), parse_number(t[1], line)};
    } else if (key == "reaction") {
      c.has_reaction = true;
      c.reaction = parse_number(val, line);
    } else if (key == "skew") {
      c.skew = parse_bool(val, line);
    } else if (key == "diffusion_sampling") {
      c.diffusion_sampling = parse_bool(val, line);
    } else if (key == "solver_tol") {
      c.solver_tol = parse_number(val, line);
    } else if (key == "solver_maxit") {
      c.solver_maxit = parse_int(val, line);
    } else if (key == "timings") {
      c.timings = parse_bool(val, line);
    } else if (key == "output") {
      c.output = val;
    } else if (key == "cache") {
      c.cache = val;
    } else {
      throw ParseError("unknown key '" + key + "'", line);
    }
  }
  auto at = [&](const std::string& k) { return seen.count(k) ? seen[k] : line; };
  if (c.coefficient.empty()) throw ParseError("missing required key 'coefficient'", line);
  try {
    make_problem(c.coefficient, c.params, c.coefficient == "constant" ? 1.0 : c.eps);
  } catch (const Error& e) {
    throw ParseError(e.what(), at("coefficient"));
  }
  if (c.coefficient != "constant" && !(c.eps > 0)) throw ParseError("eps must be positive", at("eps"));
  if (c.eps < 0) throw ParseError("eps must be positive", at("eps"));
  if (c.coarse.empty()) throw ParseError("missing required key 'coarse'", at("coarse"));
  if (c.fine <= 0) throw ParseError("fine must be a positive integer", at("fine"));
  for (int n : c.coarse) {
    if (n <= 0) throw ParseError("coarse sizes must be positive", at("coarse"));
    if (c.fine % n != 0)
      throw ParseError("fine size " + std::to_string(c.fine) + " is not divisible by " + std::to_string(n),
                       at("fine"));
  }
  if (c.methods.empty()) throw ParseError("missing required key 'methods'", at("methods"));
  try {
    c.method_configs();
  } catch (const Error& e) {
    throw ParseError(e.what(), at("methods"));
  }
  if (!(c.solver_tol > 0)) throw ParseError("solver_tol must be positive", at("solver_tol"));
  if (c.solver_maxit <= 0) throw ParseError("solver_maxit must be positive", at("solver_maxit"));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& c) {
  std::ostringstream o;
  auto list = [](const auto& v, auto f) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
    return s;
  };
  o << "coefficient = " << c.coefficient << "\n";
  if (!c.params.empty()) o << "params = " << list(c.params, fmt) << "\n";
  if (c.eps > 0) o << "eps = " << fmt(c.eps) << "\n";
  o << "rhs = " << c.rhs << "\n";
  o << "coarse = " << list(c.coarse, [](int n) { return std::to_string(n); }) << "\n";
  o << "fine = " << c.fine << "\n";
  o << "methods = " << list(c.methods, [](const std::string& s) { return s; }) << "\n";
  o << "rho = " << fmt(c.rho) << "\n";
  if (c.has_advection) o << "advection = " << fmt(c.advection[0]) << ", " << fmt(c.advection[1]) << "\n";
  if (c.has_reaction) o << "reaction = " << fmt(c.reaction) << "\n";
  o << "skew = " << (c.skew ? "true" : "false") << "\n";
  o << "diffusion_sampling = " << (c.diffusion_sampling ? "true" : "false") << "\n";
  o << "solver_tol = " << fmt(c.solver_tol) << "\n";
  o << "solver_maxit = " << c.solver_maxit << "\n";
  o << "timings = " << (c.timings ? "true" : "false") << "\n";
  if (!c.output.empty()) o << "output = " << c.output << "\n";
  if (!c.cache.empty()) o << "cache = " << c.cache << "\n";
  return o.str();
}

double broken_h1_norm(const BrokenField& u, const TriMesh& mesh) {
  return broken_h1_error(u, BrokenField(u.size(), {0.0, 0.0, 0.0}), mesh).absolute;
}

H1Error broken_h1_error(const BrokenField& u, const BrokenField& v, const TriMesh& mesh) {
  if (u.size() != v.size() || u.size() != mesh.triangles.size())
    throw InvalidArgument("broken_h1_error: field sizes do not match the mesh");
  double diff = 0.0, ref = 0.0;
  for (size_t e = 0; e < u.size(); ++e) {
    const auto& t = mesh.triangles[e];
    const ElementGeom g = element_geom(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    const Mat3 M = element_mass(g.area);
    auto sq = [&](const std::array<double, 3>& w) {
      double m = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m += M[i][j] * w[i] * w[j];
      const Point gw = g.grad(w);
      return m + g.area * dot(gw, gw);
    };
    diff += sq({u[e][0] - v[e][0], u[e][1] - v[e][1], u[e][2] - v[e][2]});
    ref += sq(v[e]);
  }
  H1Error r;
  r.absolute = std::sqrt(diff);
  r.relative = ref > 0 ? r.absolute / std::sqrt(ref) : std::numeric_limits<double>::infinity();
  return r;
}

// Cache ------------------------------------------------------------------

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'M', 'S', 'F', 'C'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
  std::string buf;
  template <class T>
  void put(const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    buf.append(p, p + sizeof(T));
  }
  void put_vec(const std::vector<double>& v) {
    put(static_cast<std::uint64_t>(v.size()));
    const char* p = reinterpret_cast<const char*>(v.data());
    buf.append(p, p + v.size() * sizeof(double));
  }
};

struct Reader {
  const std::string& buf;
  size_t pos = 0;
  template <class T>
  T get() {
    if (pos + sizeof(T) > buf.size()) throw CorruptCache("cache file is truncated");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
  std::vector<double> get_vec() {
    const auto n = get<std::uint64_t>();
    if (n > (buf.size() - pos) / sizeof(double)) throw CorruptCache("cache file is truncated");
    std::vector<double> v(n);
    std::memcpy(v.data(), buf.data() + pos, n * sizeof(double));
    pos += n * sizeof(double);
    return v;
  }
};

void put_coeffs(Writer& w, const EffectiveCoefficients& c) {
  for (size_t K = 0; K < c.size(); ++K) {
    w.put(c.M[K]);
    w.put(c.B1[K]);
    w.put(c.B2[K]);
    w.put(c.A[K]);
  }
}

void get_coeffs(Reader& r, EffectiveCoefficients& c, size_t ne) {
  c.resize(ne);
  for (size_t K = 0; K < ne; ++K) {
    c.M[K] = r.get<double>();
    c.B1[K] = r.get<Vec2>();
    c.B2[K] = r.get<Vec2>();
    c.A[K] = r.get<Mat2>();
  }
}

}  // namespace

std::uint64_t fnv1a64(const std::string& s, std::uint64_t h) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t offline_hash(const ProblemSpec& spec, const MethodConfig& cfg, int n, int fine,
                           const SolveOptions& opt) {
  std::ostringstream o;
  o << spec.canonical() << "|" << to_string(cfg.space) << ":" << to_string(cfg.os) << "|rho=" << fmt(cfg.rho)
    << "|ds=" << cfg.diffusion_sampling << "|n=" << n << "|fine=" << fine << "|tol=" << fmt(opt.tol)
    << "|maxit=" << opt.maxit << "|v=" << kVersion;
  return fnv1a64(o.str());
}

std::string cache_path(const std::string& dir, std::uint64_t hash, const MethodConfig& cfg, int n) {
  char name[128];
  std::snprintf(name, sizeof name, "msfc_%016llx_%s_%s_n%d.bin", static_cast<unsigned long long>(hash),
                to_string(cfg.space).c_str(), to_string(cfg.os).c_str(), n);
  return (std::filesystem::path(dir) / name).string();
}

void cache_write(const std::string& path, std::uint64_t hash, const OfflineData& off) {
  Writer w;
  w.buf.append(kMagic, kMagic + 4);
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(off.correctors.size()));
  w.put(hash);
  w.put(static_cast<std::uint8_t>(off.space));
  w.put(static_cast<std::uint8_t>(off.os));
  w.put(off.rho);
  for (const auto& cs : off.correctors) {
    w.put(static_cast<std::int32_t>(cs.K));
    for (int a = 0; a < 3; ++a) w.put_vec(cs.V[a]);
    w.put(cs.glue);
    w.put(cs.glue_det_ratio);
  }
  put_coeffs(w, off.pg);
  put_coeffs(w, off.galerkin);
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache file '" + tmp + "'");
    out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
    if (!out) throw Error("cannot write cache file '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::optional<OfflineData> cache_read(const std::string& path, std::uint64_t hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();
  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw CorruptCache("bad magic in '" + path + "'");
  Reader r{buf, 4};
  if (r.get<std::uint32_t>() != kVersion) throw CorruptCache("unsupported version in '" + path + "'");
  const auto ne = r.get<std::uint32_t>();
  if (r.get<std::uint64_t>() != hash) return std::nullopt;
  OfflineData off;
  const auto space = r.get<std::uint8_t>(), os = r.get<std::uint8_t>();
  if (space > 1 || os > 2) throw CorruptCache("bad method tag in '" + path + "'");
  off.space = static_cast<Space>(space);
  off.os = static_cast<Oversampling>(os);
  off.rho = r.get<double>();
  off.correctors.resize(ne);
  for (auto& cs : off.correctors) {
    cs.K = r.get<std::int32_t>();
    cs.space = off.space;
    cs.variant = off.os;
    for (int a = 0; a < 3; ++a) cs.V[a] = r.get_vec();
    cs.glue = r.get<Mat3>();
    cs.glue_det_ratio = r.get<double>();
  }
  get_coeffs(r, off.pg, ne);
  off.pg.flavor = EffectiveCoefficients::Flavor::PG;
  get_coeffs(r, off.galerkin, ne);
  off.galerkin.flavor = EffectiveCoefficients::Flavor::Galerkin;
  if (r.pos != buf.size()) throw CorruptCache("trailing bytes in '" + path + "'");
  return off;
}

// Experiments -------------------------------------------------------------

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string csv_field(const std::string& s) {
  std::string out;
  for (char ch : s) out += (ch == ',' || ch == '\n' || ch == '\r') ? ';' : ch;
  return out;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& c, int threads,
                                      const std::string& cache_dir, const ExperimentHooks& hooks) {
  auto log = [&](const std::string& s) {
    if (hooks.log) hooks.log(s);
  };
  const ProblemSpec spec = c.problem();
  const std::vector<MethodConfig> methods = c.method_configs();
  SolveOptions so;
  so.tol = c.solver_tol;
  so.maxit = c.solver_maxit;
  LocalOptions lo;
  lo.solve = so;

  log("reference solve on fine " + std::to_string(c.fine));
  const FineMesh ref_mesh = build_fine_mesh(build_coarse_mesh(1), c.fine);
  const BrokenField ref = to_broken(ref_mesh, reference_solve(ref_mesh, spec, so));
  const double ref_norm = broken_h1_norm(ref, ref_mesh);
  if (!(ref_norm > 0)) throw Error("reference solution has zero norm");

  // Groups of methods sharing one offline stage.
  std::vector<std::pair<Space, Oversampling>> groups;
  for (const auto& m : methods) {
    const auto key = std::make_pair(m.space, m.os);
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }

  std::vector<ResultRow> rows;
  for (int n : c.coarse) {
    const CoarseMesh coarse = build_coarse_mesh(n);
    const FineMesh fine = build_fine_mesh(coarse, c.fine / n);
    for (const auto& [space, os] : groups) {
      std::vector<MethodConfig> members;
      for (const auto& m : methods)
        if (m.space == space && m.os == os) members.push_back(m);
      MethodConfig base = members.front();
      base.form = Formulation::GalerkinIntrusive;
      auto fail_all = [&](const std::string& what) {
        for (const auto& m : members) {
          ResultRow r;
          r.n = n;
          r.method = m;
          r.rel_err = r.rel_diff_G = std::nan("");
          r.error = what;
          rows.push_back(r);
        }
      };
      log("n=" + std::to_string(n) + " offline " + to_string(space) + ":" + to_string(os));
      OfflineData off;
      double t_off = 0.0;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        std::optional<OfflineData> cached;
        std::string path;
        std::uint64_t hash = 0;
        if (!cache_dir.empty()) {
          hash = offline_hash(spec, base, n, c.fine, so);
          path = cache_path(cache_dir, hash, base, n);
          cached = cache_read(path, hash);
        }
        if (cached) {
          off = std::move(*cached);
        } else {
          off = offline(coarse, fine, spec, base, threads, lo);
          if (!path.empty()) cache_write(path, hash, off);
        }
        t_off = seconds_since(t0);
        if (hooks.on_offline) hooks.on_offline(n, base, off);
      } catch (const std::exception& e) {
        fail_all(std::string("offline: ") + e.what());
        continue;
      }
      std::optional<BrokenField> uG;
      std::string g_error;
      double t_G = 0.0;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        uG = to_broken(fine, run_intrusive_galerkin(coarse, fine, spec, base, off));
        t_G = seconds_since(t0);
      } catch (const std::exception& e) {
        g_error = e.what();
      }
      for (const auto& m : members) {
        ResultRow r;
        r.n = n;
        r.method = m;
        r.offline_seconds = t_off;
        try {
          BrokenField u;
          if (m.form == Formulation::GalerkinIntrusive) {
            if (!uG) throw Error(g_error);
            u = *uG;
            r.online_seconds = t_G;
          } else {
            const auto t0 = std::chrono::steady_clock::now();
            u = to_broken(fine, run_method(coarse, fine, spec, m, off));
            r.online_seconds = seconds_since(t0);
          }
          r.rel_err = broken_h1_error(u, ref, fine).absolute / ref_norm;
          r.rel_diff_G = uG ? broken_h1_error(*uG, u, fine).absolute / ref_norm : std::nan("");
        } catch (const std::exception& e) {
          r.rel_err = r.rel_diff_G = std::nan("");
          r.error = e.what();
        }
        rows.push_back(r);
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    const std::string ta = a.method.token(), tb = b.method.token();
    if (ta != tb) return ta < tb;
    return a.n > b.n;
  });
  return rows;
}

std::string to_csv(const std::vector<ResultRow>& rows, bool timings) {
  std::ostringstream o;
  o << "H,space,os,formulation,rho,rel_H1_err_vs_ref,rel_H1_diff_G_vs_variant,offline_seconds,"
       "online_seconds,error\n";
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    o << num(1.0 / r.n) << "," << to_string(r.method.space) << "," << to_string(r.method.os) << ","
      << to_string(r.method.form) << "," << fmt(r.method.rho) << "," << num(r.rel_err) << ","
      << num(r.rel_diff_G) << "," << num(timings ? r.offline_seconds : 0.0) << ","
      << num(timings ? r.online_seconds : 0.0) << "," << csv_field(r.error) << "\n";
  }
  return o.str();
}

}  // namespace msfem
