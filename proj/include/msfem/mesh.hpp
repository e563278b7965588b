#pragma once

#include <array>
#include <vector>

#include "msfem/common.hpp"

namespace msfem {

struct Face {
  std::array<int, 2> v;      // endpoint vertices, v[0] < v[1]
  std::array<int, 2> elems;  // elems[1] == -1 on the boundary
  bool boundary = false;
};

// Uniform triangulation of the unit square: n x n cells, each split along
// the diagonal from (i, j) to (i+1, j+1). Cell (i, j) holds element
// 2(jn + i) (below the diagonal) and 2(jn + i) + 1 (above).
struct TriMesh {
  int n = 0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<Face> faces;
  std::vector<std::array<int, 3>> elem_faces;  // face k is opposite vertex k
  std::vector<Point> centroids;
  std::vector<double> areas;
  std::vector<char> boundary_vertex;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_elements() const { return static_cast<int>(triangles.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  double h() const { return 1.0 / n; }
  std::array<Point, 3> corners(int e) const {
    const auto& t = triangles[e];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }
};

using CoarseMesh = TriMesh;

// The fine triangles tiling one coarse element, with a local numbering.
struct Submesh {
  int owner = -1;
  std::vector<int> nodes;  // global fine vertex ids (ascending); empty if standalone
  std::vector<int> elems;  // global fine element ids (ascending); empty if standalone
  std::vector<Point> points;
  std::vector<std::array<int, 3>> tris;  // local node indices, counterclockwise
  std::array<int, 3> corner{};           // local index of the element's vertex k
  // Local nodes along face k, from vertex (k+1)%3 to vertex (k+2)%3.
  std::array<std::vector<int>, 3> face_nodes;

  int num_nodes() const { return static_cast<int>(points.size()); }
};

// Uniform refinement of an arbitrary triangle into r^2 similar triangles.
Submesh refine_triangle(const std::array<Point, 3>& tri, int r);

struct FineMesh : TriMesh {
  int r = 1;
  std::vector<int> owner;    // fine element -> coarse element
  std::vector<Submesh> sub;  // per coarse element
};

CoarseMesh build_coarse_mesh(int n);
FineMesh build_fine_mesh(const CoarseMesh& coarse, int r);

// Intersection of a polygon with a convex counterclockwise window, by
// successive half-plane clipping. Throws if the intersection is empty.
std::vector<Point> clip_polygon(const std::vector<Point>& subject,
                                const std::vector<Point>& window);
std::vector<Point> clip_polygon(const std::vector<Point>& subject);  // unit square
double polygon_area(const std::vector<Point>& poly);

struct PatchSegment {
  Point a, b;
  int face = -1;  // face of K that this segment dilates; -1 for additional
};

struct PatchGeometry {
  int K = -1;
  double rho = 1.0;
  Point xc;                    // centroid of K
  std::array<Point, 3> outer;  // homothetic triangle, image of K's vertex k
  std::vector<Point> polygon;  // outer clipped to the unit square
  std::vector<PatchSegment> dilated;
  std::vector<PatchSegment> additional;

  // Triangulation of the patch.
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::array<int, 2>> bedges;
  std::vector<int> bedge_tag;  // dilated face id, or -1 for additional
  std::vector<char> boundary_node;
  std::vector<int> embedding;  // submesh node -> patch node
  std::vector<int> k_tris;     // submesh triangle -> patch triangle

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  double area() const;
};

PatchGeometry build_patch(const CoarseMesh& coarse, const FineMesh& fine, int K,
                          double rho);

}  // namespace msfem
