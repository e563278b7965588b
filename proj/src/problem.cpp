#include "msfem/problem.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>

namespace msfem {

namespace {

constexpr double kPi = std::numbers::pi;

double frac(double t) { return t - std::floor(t); }

double periodic_nu(double y1, double y2) {
  const double c = std::cos(kPi * y1), s = std::sin(kPi * y2);
  return 1.0 + 100.0 * c * c * s * s;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string coefficient_name(CoefficientKind k) {
  switch (k) {
    case CoefficientKind::Constant: return "constant";
    case CoefficientKind::Periodic: return "periodic";
    case CoefficientKind::Nonperiodic: return "nonperiodic";
    case CoefficientKind::Laminate: return "laminate";
    case CoefficientKind::Checkerboard: return "checkerboard";
  }
  return "?";
}

RhsKind rhs_from_name(const std::string& name) {
  if (name == "sin") return RhsKind::Sin;
  if (name == "one") return RhsKind::One;
  if (name == "manufactured") return RhsKind::Manufactured;
  if (name == "zero") return RhsKind::Zero;
  throw RegistryError("unknown right-hand side '" + name + "'");
}

std::string rhs_name(RhsKind k) {
  switch (k) {
    case RhsKind::Sin: return "sin";
    case RhsKind::One: return "one";
    case RhsKind::Manufactured: return "manufactured";
    case RhsKind::Zero: return "zero";
  }
  return "?";
}

std::string ProblemSpec::canonical() const {
  std::string s = coefficient_name(kind) + ";eps=" + fmt(eps) + ";A0=";
  for (double a : A0) s += fmt(a) + ",";
  s += ";a=" + fmt(a1) + "," + fmt(a2);
  s += ";adv=" + std::string(advection ? "1" : "0") + "," + fmt(b[0]) + "," + fmt(b[1]);
  s += ";react=" + std::string(reaction ? "1" : "0") + "," + fmt(sigma);
  s += ";skew=" + std::string(skew ? "1" : "0") + ";rhs=" + rhs_name(rhs);
  return s;
}

ProblemSpec make_problem(const std::string& name, const std::vector<double>& params, double eps) {
  ProblemSpec p;
  p.eps = eps;
  auto need = [&](size_t k) {
    if (params.size() != k)
      throw RegistryError("coefficient '" + name + "' takes " + std::to_string(k) + " parameters");
  };
  auto need_eps = [&] {
    if (!(eps > 0.0)) throw RegistryError("coefficient '" + name + "' needs eps > 0");
  };
  if (name == "constant") {
    if (params.empty()) {
      p.A0 = {1, 0, 0, 1};
    } else if (params.size() == 1) {
      p.A0 = {params[0], 0, 0, params[0]};
    } else {
      need(4);
      p.A0 = {params[0], params[1], params[2], params[3]};
    }
    p.kind = CoefficientKind::Constant;
    p.m = min_sym_eig(p.A0);
    const double a = p.A0[0], b = p.A0[1], c = p.A0[2], d = p.A0[3];
    p.M = std::sqrt(0.5 * (a * a + b * b + c * c + d * d) +
                    0.5 * std::sqrt(std::pow(a * a + b * b + c * c + d * d, 2) -
                                    4 * std::pow(a * d - b * c, 2)));
    if (!(p.m > 0.0)) throw RegistryError("constant coefficient is not coercive");
  } else if (name == "periodic") {
    need(0);
    need_eps();
    p.kind = CoefficientKind::Periodic;
    p.m = 1.0;
    p.M = 101.0;
  } else if (name == "nonperiodic") {
    need(0);
    need_eps();
    p.kind = CoefficientKind::Nonperiodic;
    p.m = 1.0;
    p.M = 202.0;
  } else if (name == "laminate" || name == "checkerboard") {
    if (params.empty()) {
      p.a1 = 1.0, p.a2 = 4.0;
    } else {
      need(2);
      p.a1 = params[0], p.a2 = params[1];
    }
    need_eps();
    if (!(p.a1 > 0.0 && p.a2 > 0.0)) throw RegistryError("phase values must be positive");
    p.kind = name == "laminate" ? CoefficientKind::Laminate : CoefficientKind::Checkerboard;
    p.m = std::min(p.a1, p.a2);
    p.M = std::max(p.a1, p.a2);
  } else {
    throw RegistryError("unknown coefficient '" + name + "'");
  }
  return p;
}

Mat2 periodic_profile(const ProblemSpec& spec, Point y) {
  switch (spec.kind) {
    case CoefficientKind::Constant: return spec.A0;
    case CoefficientKind::Periodic: {
      const double nu = periodic_nu(y.x, y.y);
      return {nu, 0, 0, nu};
    }
    case CoefficientKind::Laminate: {
      const double a = frac(y.x) < 0.5 ? spec.a1 : spec.a2;
      return {a, 0, 0, a};
    }
    case CoefficientKind::Checkerboard: {
      const bool sx = frac(y.x) < 0.5, sy = frac(y.y) < 0.5;
      const double a = (sx == sy) ? spec.a1 : spec.a2;
      return {a, 0, 0, a};
    }
    case CoefficientKind::Nonperiodic: break;
  }
  throw RegistryError("coefficient has no periodic profile");
}

CoefSample eval_coefficient(const ProblemSpec& spec, Point x) {
  CoefSample c;
  if (spec.kind == CoefficientKind::Constant) {
    c.A = spec.A0;
  } else if (spec.kind == CoefficientKind::Nonperiodic) {
    const double w = std::cos(2.0 * kPi * x.x);
    const double nu = (1.0 + w * w) * periodic_nu(x.x / spec.eps, x.y / spec.eps);
    c.A = {nu, 0, 0, nu};
  } else {
    c.A = periodic_profile(spec, {x.x / spec.eps, x.y / spec.eps});
  }
  if (spec.advection) c.b = spec.b;
  if (spec.reaction) c.sigma = spec.sigma;
  return c;
}

double eval_rhs(const ProblemSpec& spec, Point x) {
  switch (spec.rhs) {
    case RhsKind::Sin: return std::sin(x.x) * std::sin(x.y);
    case RhsKind::One: return 1.0;
    case RhsKind::Manufactured:
      return 2.0 * kPi * kPi * std::sin(kPi * x.x) * std::sin(kPi * x.y);
    case RhsKind::Zero: return 0.0;
  }
  return 0.0;
}

FormOptions full_form(const ProblemSpec& spec) { return {spec.advection, spec.reaction, spec.skew}; }
FormOptions diffusion_form() { return {false, false, true}; }

ElementGeom element_geom(Point a, Point b, Point c) {
  ElementGeom g;
  g.p0 = a;
  const Point e1 = b - a, e2 = c - a;
  const double det = cross(e1, e2);
  g.area = 0.5 * det;
  g.g1 = (1.0 / det) * Point{e2.y, -e2.x};
  g.g2 = (1.0 / det) * Point{-e1.y, e1.x};
  g.centroid = (1.0 / 3.0) * (a + b + c);
  return g;
}

double element_bilinear(const ElementGeom& g, const CoefSample& c, const FormOptions& f,
                        const std::array<double, 3>& u, const std::array<double, 3>& v) {
  const Point gu = g.grad(u), gv = g.grad(v);
  const Vec2 Agu = apply(c.A, {gu.x, gu.y});
  double s = g.area * (gv.x * Agu[0] + gv.y * Agu[1]);
  const double su = u[0] + u[1] + u[2], sv = v[0] + v[1] + v[2];
  if (f.reaction)
    s += c.sigma * g.area / 12.0 * (u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + su * sv);
  if (f.advection) {
    const double bgu = c.b[0] * gu.x + c.b[1] * gu.y;
    if (f.skew) {
      const double bgv = c.b[0] * gv.x + c.b[1] * gv.y;
      s += 0.5 * bgu * g.area * sv / 3.0 - 0.5 * bgv * g.area * su / 3.0;
    } else {
      s += bgu * g.area * sv / 3.0;
    }
  }
  return s;
}

Mat3 element_matrix(const ElementGeom& g, const CoefSample& c, const FormOptions& f) {
  const std::array<Point, 3> gr{-1.0 * (g.g1 + g.g2), g.g1, g.g2};
  Mat3 K{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Vec2 Agb = apply(c.A, {gr[b].x, gr[b].y});
      double s = g.area * (gr[a].x * Agb[0] + gr[a].y * Agb[1]);
      if (f.reaction) s += c.sigma * g.area * (a == b ? 2.0 : 1.0) / 12.0;
      if (f.advection) {
        const double bgb = c.b[0] * gr[b].x + c.b[1] * gr[b].y;
        if (f.skew) {
          const double bga = c.b[0] * gr[a].x + c.b[1] * gr[a].y;
          s += 0.5 * bgb * g.area / 3.0 - 0.5 * bga * g.area / 3.0;
        } else {
          s += bgb * g.area / 3.0;
        }
      }
      K[a][b] = s;
    }
  }
  return K;
}

Mat3 element_mass(double area) {
  Mat3 M{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) M[a][b] = area * (a == b ? 2.0 : 1.0) / 12.0;
  return M;
}

SparseMatrix assemble_p1(const std::vector<Point>& pts, const std::vector<std::array<int, 3>>& tris,
                         const std::vector<int>& dof, int ndof, const CoefficientSampler& coef,
                         const FormOptions& form) {
  CsrBuilder builder(ndof, tris, dof);
  for (const auto& t : tris) {
    const ElementGeom g = element_geom(pts[t[0]], pts[t[1]], pts[t[2]]);
    builder.add(t, element_matrix(g, coef(g.centroid), form));
  }
  return builder.take();
}

}  // namespace msfem
