#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace msfem {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

using Vec2 = std::array<double, 2>;
// Row-major 2x2: {a00, a01, a10, a11}.
using Mat2 = std::array<double, 4>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline Vec2 apply(const Mat2& A, const Vec2& v) {
  return {A[0] * v[0] + A[1] * v[1], A[2] * v[0] + A[3] * v[1]};
}

// Smallest eigenvalue of (A + A^T) / 2.
inline double min_sym_eig(const Mat2& A) {
  const double a = A[0], d = A[3], b = 0.5 * (A[1] + A[2]);
  const double m = 0.5 * (a + d);
  return m - std::sqrt(0.25 * (a - d) * (a - d) + b * b);
}

enum class Space { Lagrange, CR };
enum class Oversampling { None, Extended, Continuous };

std::string to_string(Space s);
std::string to_string(Oversampling o);

// Error hierarchy. Each failure mode of the library has its own type so
// callers (and tests) can tell them apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double residual, int iterations)
      : Error(what), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class ConstraintDegenerate : public Error {
 public:
  using Error::Error;
};

class PatchDegenerate : public Error {
 public:
  using Error::Error;
};

class GlueSingular : public Error {
 public:
  GlueSingular(const std::string& what, double det_ratio)
      : Error(what), det_ratio(det_ratio) {}
  double det_ratio;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error(what), line(line) {}
  int line;
};

class CorruptCache : public Error {
 public:
  using Error::Error;
};

}  // namespace msfem
