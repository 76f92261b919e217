#pragma once

#include "geode/surface.hpp"
#include "geode/types.hpp"

#include <vector>

namespace geode {

/// Structured triangulation substitute: an on-surface vertex grid with
/// 8-neighbor edge connectivity (diagonals included to reduce metric
/// anisotropy). Edge weights are Euclidean 3D distances.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<int> adjacency_offset;  // CSR offsets, size vertices+1
  std::vector<int> adjacency_vertex;
  std::vector<double> adjacency_length;
  int rows = 0;
  int cols = 0;
  bool wrap_cols = false;
  int resolution = 0;
  double max_edge_length = 0.0;
};

/// Sample the surface on a structured grid:
///  - graphs: (x, y) box from the domain hints (default [-1,1]^2);
///  - revolution surfaces: (v, azimuth) with azimuth wrapping;
///  - implicit star-shaped surfaces: latitude-longitude directions scaled to
///    the level set and Newton-projected.
/// Throws GeometryError when more than 0.1% of vertices fail to project.
SurfaceMesh mesh_surface(const Surface& surface, int resolution);

bool mesh_connected(const SurfaceMesh& mesh);

struct DijkstraResult {
  double length = 0.0;      // shortest edge-graph path between snapped vertices
  double snap_slack = 0.0;  // |a - nearest| + |b - nearest|
  int vertex_a = -1;
  int vertex_b = -1;
};

/// Shortest path in the edge graph between the vertices nearest to a and b.
/// Always at least the true geodesic distance minus the snap slack, and it
/// approaches the true distance from above as resolution grows (within the
/// 8-neighbor metric overshoot).
DijkstraResult dijkstra_query(const SurfaceMesh& mesh, const Vec3& a, const Vec3& b);
double dijkstra_distance(const SurfaceMesh& mesh, const Vec3& a, const Vec3& b);

}  // namespace geode
