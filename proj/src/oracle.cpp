#include "geode/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace geode {

namespace {

struct GridSpec {
  int rows, cols;
  bool wrap;
};

void build_edges(SurfaceMesh& mesh, const GridSpec& grid) {
  const auto index = [&](int i, int j) { return i * grid.cols + j; };
  std::vector<std::vector<std::pair<int, double>>> adj(mesh.vertices.size());
  const int di[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  const int dj[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  for (int i = 0; i < grid.rows; ++i) {
    for (int j = 0; j < grid.cols; ++j) {
      for (int k = 0; k < 8; ++k) {
        const int ni = i + di[k];
        int nj = j + dj[k];
        if (ni < 0 || ni >= grid.rows) continue;
        if (grid.wrap) {
          nj = (nj + grid.cols) % grid.cols;
        } else if (nj < 0 || nj >= grid.cols) {
          continue;
        }
        const int u = index(i, j), v = index(ni, nj);
        if (u >= v) continue;  // each undirected edge once
        const double len = (mesh.vertices[u] - mesh.vertices[v]).norm();
        if (len <= 0.0) throw GeometryError("mesh edge of zero length");
        adj[u].emplace_back(v, len);
        adj[v].emplace_back(u, len);
        mesh.max_edge_length = std::max(mesh.max_edge_length, len);
      }
    }
  }
  mesh.adjacency_offset.assign(mesh.vertices.size() + 1, 0);
  for (std::size_t u = 0; u < adj.size(); ++u)
    mesh.adjacency_offset[u + 1] = mesh.adjacency_offset[u] + static_cast<int>(adj[u].size());
  mesh.adjacency_vertex.resize(mesh.adjacency_offset.back());
  mesh.adjacency_length.resize(mesh.adjacency_offset.back());
  for (std::size_t u = 0; u < adj.size(); ++u) {
    int at = mesh.adjacency_offset[u];
    for (const auto& [v, len] : adj[u]) {
      mesh.adjacency_vertex[at] = v;
      mesh.adjacency_length[at] = len;
      ++at;
    }
  }
}

std::array<double, 2> hint_or(const std::optional<std::array<double, 2>>& hint,
                              std::array<double, 2> fallback) {
  return hint ? *hint : fallback;
}

/// Scale t > 0 with F(t * dir) = 0 for a star-shaped implicit level set.
std::optional<double> radial_scale(const Surface& s, const Vec3& dir) {
  double t_in = 1e-3;
  double f_in;
  try {
    f_in = s.level_at(t_in * dir);
  } catch (const DomainError&) {
    return std::nullopt;
  }
  for (double t_out = 0.25; t_out <= 64.0; t_out *= 2.0) {
    double f_out;
    try {
      f_out = s.level_at(t_out * dir);
    } catch (const DomainError&) {
      return std::nullopt;
    }
    if (f_in == 0.0) return t_in;
    if ((f_in < 0.0) != (f_out < 0.0)) {
      double lo = t_in, hi = t_out;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = s.level_at(mid * dir);
        if ((f_mid < 0.0) == (f_in < 0.0))
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    t_in = t_out;
    f_in = f_out;
  }
  return std::nullopt;
}

}  // namespace

SurfaceMesh mesh_surface(const Surface& surface, int resolution) {
  if (resolution < 2) throw GeometryError("mesh_surface: resolution must be at least 2");
  SurfaceMesh mesh;
  mesh.resolution = resolution;
  GridSpec grid{};
  std::size_t failures = 0;

  switch (surface.family()) {
    case Surface::Family::Graph: {
      const auto xr = hint_or(surface.domain().x, {-1.0, 1.0});
      const auto yr = hint_or(surface.domain().y, {-1.0, 1.0});
      grid = {resolution + 1, resolution + 1, false};
      mesh.vertices.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
      const auto& zeta = surface.graph_surface().zeta;
      for (int i = 0; i < grid.rows; ++i) {
        const double x = xr[0] + (xr[1] - xr[0]) * i / resolution;
        for (int j = 0; j < grid.cols; ++j) {
          const double y = yr[0] + (yr[1] - yr[0]) * j / resolution;
          mesh.vertices.emplace_back(x, y, eval_value(zeta, Vec3(x, y, 0.0)));
        }
      }
      break;
    }
    case Surface::Family::Revolution: {
      const auto vr = hint_or(surface.domain().v, {0.1, 1.0});
      grid = {resolution + 1, 2 * resolution, true};
      mesh.vertices.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
      const auto& rev = surface.revolution_surface();
      if (!rev.z_of_v)
        throw GeometryError("mesh_surface: revolution surface needs a profile z_of_v");
      for (int i = 0; i < grid.rows; ++i) {
        const double v = vr[0] + (vr[1] - vr[0]) * i / resolution;
        const double z = eval_value1(*rev.z_of_v, Var::V, v);
        for (int j = 0; j < grid.cols; ++j) {
          const double phi = 2.0 * M_PI * j / grid.cols;
          mesh.vertices.emplace_back(v * std::cos(phi), v * std::sin(phi), z);
        }
      }
      break;
    }
    case Surface::Family::Implicit: {
      grid = {resolution, 2 * resolution, true};
      mesh.vertices.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
      for (int i = 0; i < grid.rows; ++i) {
        const double theta = M_PI * (i + 1) / (grid.rows + 1);
        for (int j = 0; j < grid.cols; ++j) {
          const double phi = 2.0 * M_PI * j / grid.cols;
          const Vec3 dir(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                         std::cos(theta));
          Vec3 vertex = dir;
          bool ok = false;
          if (const auto t = radial_scale(surface, dir)) {
            try {
              vertex = surface.project(*t * dir);
              ok = true;
            } catch (const Error&) {
            }
          }
          if (!ok) ++failures;
          mesh.vertices.push_back(vertex);
        }
      }
      break;
    }
    default:
      throw GeometryError(
          "mesh_surface: needs a graph, revolution, or implicit surface");
  }

  if (failures * 1000 > mesh.vertices.size())
    throw GeometryError("mesh_surface: more than 0.1% of vertices failed to project");

  mesh.rows = grid.rows;
  mesh.cols = grid.cols;
  mesh.wrap_cols = grid.wrap;
  build_edges(mesh, grid);
  return mesh;
}

bool mesh_connected(const SurfaceMesh& mesh) {
  if (mesh.vertices.empty()) return false;
  std::vector<char> seen(mesh.vertices.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int e = mesh.adjacency_offset[u]; e < mesh.adjacency_offset[u + 1]; ++e) {
      const int v = mesh.adjacency_vertex[e];
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == mesh.vertices.size();
}

DijkstraResult dijkstra_query(const SurfaceMesh& mesh, const Vec3& a, const Vec3& b) {
  if (mesh.vertices.empty()) throw GeometryError("dijkstra: empty mesh");
  DijkstraResult out;
  double best_a = std::numeric_limits<double>::infinity();
  double best_b = best_a;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const double da = (mesh.vertices[i] - a).norm();
    const double db = (mesh.vertices[i] - b).norm();
    if (da < best_a) {
      best_a = da;
      out.vertex_a = static_cast<int>(i);
    }
    if (db < best_b) {
      best_b = db;
      out.vertex_b = static_cast<int>(i);
    }
  }
  out.snap_slack = best_a + best_b;

  std::vector<double> dist(mesh.vertices.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[out.vertex_a] = 0.0;
  queue.emplace(0.0, out.vertex_a);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    if (u == out.vertex_b) break;
    for (int e = mesh.adjacency_offset[u]; e < mesh.adjacency_offset[u + 1]; ++e) {
      const int v = mesh.adjacency_vertex[e];
      const double nd = d + mesh.adjacency_length[e];
      if (nd < dist[v]) {
        dist[v] = nd;
        queue.emplace(nd, v);
      }
    }
  }
  out.length = dist[out.vertex_b];
  if (!std::isfinite(out.length))
    throw GeometryError("dijkstra: endpoints lie in disconnected mesh components");
  return out;
}

double dijkstra_distance(const SurfaceMesh& mesh, const Vec3& a, const Vec3& b) {
  return dijkstra_query(mesh, a, b).length;
}

}  // namespace geode
