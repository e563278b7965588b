#pragma once

#include <functional>
#include <vector>

#include "msfem/mesh.hpp"
#include "msfem/msfem.hpp"
#include "msfem/problem.hpp"

namespace msfem {

using PeriodicSampler = std::function<Mat2(Point)>;

// Cell correctors on the periodic unit cell, stored on an n x n grid of
// nodes (node (i, j) at (i/n, j/n), indices taken mod n).
struct CellData {
  int n = 0;
  std::vector<double> w1, w2;   // zero mean
  std::vector<Mat2> samples;    // coefficient at each cell triangle centroid
  Mat2 Astar{0, 0, 0, 0};

  // Periodic P1 interpolation of w_alpha at y.
  double eval(int alpha, Point y) const;
};

CellData solve_cell_problems(const PeriodicSampler& A_per, int n, const SolveOptions& opt = {});
// A*_{ba} = integral over the cell of (e_b + grad w_b) . A (e_a + grad w_a).
Mat2 homogenized_tensor(const CellData& cell);

// Closed forms for two-phase media with phases a1, a2 in equal parts.
Mat2 laminate_tensor(double a1, double a2);  // layers normal to y1
Mat2 checkerboard_tensor(double a1, double a2);

// u*(x) + eps sum_a d_a u*(x) w_a(x / eps), with the gradient of u* taken
// per fine element.
BrokenField two_scale_field(const FineMesh& fine, const std::vector<double>& u_star,
                            const CellData& cell, double eps);

}  // namespace msfem
