#include <gtest/gtest.h>

#include <cmath>

#include "msfem/homogenization.hpp"

using namespace msfem;

namespace {

const double kPi = 3.14159265358979323846;

Mat2 iso(double a) { return {a, 0, 0, a}; }

PeriodicSampler laminate(double a1, double a2) {
  return [=](Point y) { return iso(y.x < 0.5 ? a1 : a2); };
}

PeriodicSampler checkerboard(double a1, double a2) {
  return [=](Point y) {
    const int s = static_cast<int>(std::floor(2 * y.x)) + static_cast<int>(std::floor(2 * y.y));
    return iso(s % 2 == 0 ? a1 : a2);
  };
}

double frob(const Mat2& a, const Mat2& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double max_eig_sym(const Mat2& A) {
  const double m = 0.5 * (A[0] + A[3]), b = 0.5 * (A[1] + A[2]);
  return m + std::sqrt(0.25 * (A[0] - A[3]) * (A[0] - A[3]) + b * b);
}

}  // namespace

TEST(CellProblems, IdentityGivesIdentity) {
  const CellData c = solve_cell_problems([](Point) { return iso(1.0); }, 16);
  EXPECT_LT(frob(homogenized_tensor(c), iso(1.0)), 1e-10);
  for (double w : c.w1) EXPECT_LT(std::abs(w), 1e-10);
}

TEST(CellProblems, ConstantAnisotropicIsKept) {
  const Mat2 A{2.0, 0.5, 0.5, 3.0};
  const CellData c = solve_cell_problems([&](Point) { return A; }, 8);
  EXPECT_LT(frob(c.Astar, A), 1e-10);
}

TEST(CellProblems, LaminateMatchesClosedForm) {
  const Mat2 ref = laminate_tensor(1.0, 4.0);
  EXPECT_NEAR(ref[0], 1.6, 1e-15);
  EXPECT_NEAR(ref[3], 2.5, 1e-15);
  const CellData c = solve_cell_problems(laminate(1.0, 4.0), 64);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(c.Astar[i], ref[i], 0.01 * std::abs(ref[i]) + 1e-12);
  // Layers are invariant along y2: the second corrector vanishes.
  for (double w : c.w2) EXPECT_LT(std::abs(w), 1e-9);
}

TEST(CellProblems, CheckerboardMatchesGeometricMean) {
  const Mat2 ref = checkerboard_tensor(1.0, 4.0);
  EXPECT_LT(frob(ref, iso(2.0)), 1e-15);
  const CellData c = solve_cell_problems(checkerboard(1.0, 4.0), 128);
  EXPECT_LT(frob(c.Astar, ref), 0.02 * std::sqrt(8.0));
  EXPECT_NEAR(c.Astar[0], 2.0, 0.04);
  EXPECT_NEAR(c.Astar[3], 2.0, 0.04);
}

TEST(CellProblems, SmoothCoefficientIsSymmetricAndBounded) {
  const PeriodicSampler A = [](Point y) {
    const double a = 2 + std::sin(2 * kPi * y.x) * std::cos(2 * kPi * y.y);
    const double b = 0.3 * std::sin(2 * kPi * (y.x + y.y));
    return Mat2{a, b, b, a + 0.5};
  };
  const CellData c = solve_cell_problems(A, 32);
  EXPECT_NEAR(c.Astar[1], c.Astar[2], 1e-10);
  // Bounded by the arithmetic and harmonic averages of the samples.
  double lo = 1e300, hi = 0.0;
  for (const Mat2& s : c.samples) {
    lo = std::min(lo, min_sym_eig(s));
    hi = std::max(hi, max_eig_sym(s));
  }
  EXPECT_GE(min_sym_eig(c.Astar), lo);
  EXPECT_LE(max_eig_sym(c.Astar), hi);
}

TEST(CellProblems, ScalarCoefficientBetweenHarmonicAndArithmeticMeans) {
  const auto a = [](Point y) { return 1.5 + std::sin(2 * kPi * y.x) * std::sin(2 * kPi * y.y); };
  const int n = 32;
  const CellData c = solve_cell_problems([&](Point y) { return iso(a(y)); }, n);
  double arith = 0.0, harm = 0.0;
  for (const Mat2& s : c.samples) {
    arith += s[0];
    harm += 1.0 / s[0];
  }
  arith /= c.samples.size();
  harm = c.samples.size() / harm;
  EXPECT_GE(min_sym_eig(c.Astar), harm - 1e-12);
  EXPECT_LE(max_eig_sym(c.Astar), arith + 1e-12);
  EXPECT_NEAR(c.Astar[0], c.Astar[3], 1e-10);  // symmetric in y1 <-> y2
}

TEST(CellProblems, OscillatoryTestCoefficientStaysInItsBounds) {
  const ProblemSpec spec = make_problem("periodic", {}, kPi / 50);
  const CellData c = solve_cell_problems([&](Point y) { return periodic_profile(spec, y); }, 64);
  EXPECT_GE(min_sym_eig(c.Astar), spec.m);
  EXPECT_LE(max_eig_sym(c.Astar), spec.M);
  EXPECT_NEAR(c.Astar[1], c.Astar[2], 1e-10);
}

TEST(CellProblems, RefinementConverges) {
  const ProblemSpec spec = make_problem("periodic", {}, kPi / 50);
  const PeriodicSampler A = [&](Point y) { return periodic_profile(spec, y); };
  const Mat2 a = solve_cell_problems(A, 32).Astar;
  const Mat2 b = solve_cell_problems(A, 64).Astar;
  const Mat2 c = solve_cell_problems(A, 128).Astar;
  EXPECT_LT(frob(b, c), frob(a, b));
}

TEST(CellProblems, CorrectorsHaveZeroMeanAndArePeriodic) {
  const CellData c = solve_cell_problems(checkerboard(1.0, 3.0), 16);
  double m1 = 0.0, m2 = 0.0;
  for (size_t i = 0; i < c.w1.size(); ++i) {
    m1 += c.w1[i];
    m2 += c.w2[i];
  }
  EXPECT_LT(std::abs(m1), 1e-10);
  EXPECT_LT(std::abs(m2), 1e-10);
  for (Point y : {Point{0.13, 0.71}, Point{0.5, 0.5}, Point{0.999, 0.02}})
    for (int a : {0, 1}) {
      EXPECT_NEAR(c.eval(a, y), c.eval(a, y + Point{1, 0}), 1e-12);
      EXPECT_NEAR(c.eval(a, y), c.eval(a, y + Point{-2, 3}), 1e-12);
    }
  EXPECT_NEAR(c.eval(0, Point{3.0 / 16, 5.0 / 16}), c.w1[3 + 16 * 5], 1e-14);
}

TEST(CellProblems, RejectsTooCoarseGrid) {
  EXPECT_THROW(solve_cell_problems([](Point) { return iso(1.0); }, 1), InvalidArgument);
}

TEST(TwoScale, VanishingCorrectorsGiveTheMacroField) {
  const CoarseMesh coarse = build_coarse_mesh(2);
  const FineMesh fine = build_fine_mesh(coarse, 4);
  const CellData c = solve_cell_problems([](Point) { return iso(1.0); }, 8);
  std::vector<double> u(fine.num_vertices());
  for (int i = 0; i < fine.num_vertices(); ++i) u[i] = fine.vertices[i].x * fine.vertices[i].y;
  const BrokenField b = two_scale_field(fine, u, c, 0.1);
  const BrokenField ref = to_broken(fine, u);
  for (size_t e = 0; e < b.size(); ++e)
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(b[e][k], ref[e][k], 1e-12);
}

TEST(TwoScale, AffineMacroFieldAddsScaledCorrector) {
  const CoarseMesh coarse = build_coarse_mesh(2);
  const FineMesh fine = build_fine_mesh(coarse, 8);
  const CellData c = solve_cell_problems(laminate(1.0, 4.0), 16);
  std::vector<double> u(fine.num_vertices());
  for (int i = 0; i < fine.num_vertices(); ++i) u[i] = 2.0 * fine.vertices[i].x;
  const double eps = 0.25;
  const BrokenField b = two_scale_field(fine, u, c, eps);
  for (int e = 0; e < fine.num_elements(); ++e)
    for (int k = 0; k < 3; ++k) {
      const Point p = fine.vertices[fine.triangles[e][k]];
      EXPECT_NEAR(b[e][k], 2.0 * p.x + eps * 2.0 * c.eval(0, (1.0 / eps) * p), 1e-12);
    }
}
