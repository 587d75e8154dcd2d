#pragma once

// Structured finite-difference meshes of a rectangle [0,lx]x[0,ly] and of a
// disk B_R (polar grid with one shared centre node).
//
// Besides node coordinates a mesh carries everything the energy quadrature
// needs: a dual-cell area per node, an arc-length weight and outward normal
// per boundary node, and the edge list of the five-point (Cartesian) or
// finite-volume (polar) stencil.  The Dirichlet integral of a nodal function u
// is approximated by  sum_e coupling_e * (u_a - u_b)^2 , where coupling is the
// dual face length divided by the edge length.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "s2lab/core.hpp"

namespace s2lab {

enum class MeshKind { rectangle, disk };

inline std::string to_string(MeshKind k) { return k == MeshKind::rectangle ? "rectangle" : "disk"; }

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  double coupling = 0.0;
};

struct RectGrid {
  std::size_t nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  double hx = 0.0, hy = 0.0;
};

struct DiskGrid {
  std::size_t nr = 0, ntheta = 0;
  double radius = 0.0;
  double dr = 0.0, dtheta = 0.0;
};

class Mesh {
 public:
  [[nodiscard]] MeshKind kind() const { return kind_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }

  [[nodiscard]] std::span<const Point2> nodes() const { return nodes_; }
  [[nodiscard]] std::span<const double> area_weights() const { return area_; }
  /// Arc-length weight per node; zero on interior nodes.
  [[nodiscard]] std::span<const double> arc_weights() const { return arc_; }
  /// Outward unit normal per node; zero on interior nodes.
  [[nodiscard]] std::span<const Point2> normals() const { return normal_; }
  [[nodiscard]] std::span<const std::size_t> interior() const { return interior_; }
  [[nodiscard]] std::span<const std::size_t> boundary() const { return boundary_; }
  [[nodiscard]] std::span<const Edge> edges() const { return edges_; }
  [[nodiscard]] bool is_boundary(std::size_t node) const { return on_boundary_[node] != 0; }

  [[nodiscard]] const RectGrid& rect() const { return rect_; }
  [[nodiscard]] const DiskGrid& disk() const { return disk_; }

  /// Analytic |Omega|.
  [[nodiscard]] double area() const
  {
    if (kind_ == MeshKind::disk) return std::numbers::pi * disk_.radius * disk_.radius;
    return rect_.lx * rect_.ly;
  }
  /// Analytic |dOmega|.
  [[nodiscard]] double perimeter() const
  {
    if (kind_ == MeshKind::disk) return 2.0 * std::numbers::pi * disk_.radius;
    return 2.0 * (rect_.lx + rect_.ly);
  }
  /// Largest grid spacing (dr, or R*dtheta at the rim, or max(hx, hy)).
  [[nodiscard]] double max_spacing() const
  {
    if (kind_ == MeshKind::disk) return std::max(disk_.dr, disk_.radius * disk_.dtheta);
    return std::max(rect_.hx, rect_.hy);
  }

  // Polar indexing: node 0 is the centre, ring i >= 1 holds ntheta nodes.
  [[nodiscard]] std::size_t polar_index(std::size_t ring, std::size_t ray) const
  {
    if (ring == 0) return 0;
    return 1 + (ring - 1) * disk_.ntheta + (ray % disk_.ntheta);
  }
  [[nodiscard]] std::size_t ring_of(std::size_t node) const
  {
    return node == 0 ? 0 : 1 + (node - 1) / disk_.ntheta;
  }
  [[nodiscard]] std::size_t ray_of(std::size_t node) const { return node == 0 ? 0 : (node - 1) % disk_.ntheta; }

  [[nodiscard]] std::size_t grid_index(std::size_t i, std::size_t j) const { return j * (rect_.nx + 1) + i; }

  friend Mesh build_rectangle_mesh(std::size_t nx, std::size_t ny, double lx, double ly);
  friend Mesh build_disk_mesh(std::size_t nr, std::size_t ntheta, double radius);

 private:
  void finish()
  {
    on_boundary_.assign(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (arc_[i] > 0.0) {
        on_boundary_[i] = 1;
        boundary_.push_back(i);
      } else {
        interior_.push_back(i);
      }
    }
  }

  MeshKind kind_ = MeshKind::rectangle;
  std::vector<Point2> nodes_;
  std::vector<double> area_;
  std::vector<double> arc_;
  std::vector<Point2> normal_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  std::vector<char> on_boundary_;
  std::vector<Edge> edges_;
  RectGrid rect_;
  DiskGrid disk_;
};

/// Cartesian grid with (nx+1)(ny+1) nodes and trapezoidal weights.
inline Mesh build_rectangle_mesh(std::size_t nx, std::size_t ny, double lx, double ly)
{
  if (nx < 3 || ny < 3) throw ValidationError("rectangle mesh needs nx, ny >= 3");
  if (!(lx > 0.0) || !(ly > 0.0)) throw ValidationError("rectangle side lengths must be positive");

  Mesh m;
  m.kind_ = MeshKind::rectangle;
  const double hx = lx / static_cast<double>(nx);
  const double hy = ly / static_cast<double>(ny);
  m.rect_ = RectGrid{nx, ny, lx, ly, hx, hy};

  const std::size_t n = (nx + 1) * (ny + 1);
  m.nodes_.resize(n);
  m.area_.resize(n);
  m.arc_.assign(n, 0.0);
  m.normal_.assign(n, Point2{});

  auto half_if = [](bool edge) { return edge ? 0.5 : 1.0; };
  for (std::size_t j = 0; j <= ny; ++j) {
    for (std::size_t i = 0; i <= nx; ++i) {
      const std::size_t k = m.grid_index(i, j);
      const bool left = i == 0, right = i == nx, bottom = j == 0, top = j == ny;
      m.nodes_[k] = {static_cast<double>(i) * hx, static_cast<double>(j) * hy};
      m.area_[k] = hx * hy * half_if(left || right) * half_if(bottom || top);

      double arc = 0.0;
      Point2 nrm{};
      if (bottom || top) {
        arc += hx * half_if(left || right);
        nrm.y += bottom ? -1.0 : 1.0;
      }
      if (left || right) {
        arc += hy * half_if(bottom || top);
        nrm.x += left ? -1.0 : 1.0;
      }
      if (arc > 0.0) {
        const double len = std::hypot(nrm.x, nrm.y);
        m.arc_[k] = arc;
        m.normal_[k] = {nrm.x / len, nrm.y / len};
      }
    }
  }

  for (std::size_t j = 0; j <= ny; ++j) {
    const double face_y = hy * half_if(j == 0 || j == ny);
    for (std::size_t i = 0; i < nx; ++i) m.edges_.push_back({m.grid_index(i, j), m.grid_index(i + 1, j), face_y / hx});
  }
  for (std::size_t i = 0; i <= nx; ++i) {
    const double face_x = hx * half_if(i == 0 || i == nx);
    for (std::size_t j = 0; j < ny; ++j) m.edges_.push_back({m.grid_index(i, j), m.grid_index(i, j + 1), face_x / hy});
  }

  m.finish();
  return m;
}

/// Polar grid r_i = i*dr, theta_j = j*dtheta.  Area weights are the
/// finite-volume dual cells: a disk of radius dr/2 around the centre, annular
/// sectors of width dr on inner rings and of width dr/2 on the rim.
inline Mesh build_disk_mesh(std::size_t nr, std::size_t ntheta, double radius)
{
  if (nr < 3) throw ValidationError("disk mesh needs nr >= 3");
  if (ntheta < 8) throw ValidationError("disk mesh needs ntheta >= 8");
  if (ntheta % 2 != 0) throw ValidationError("disk mesh needs an even ntheta");
  if (!(radius > 0.0)) throw ValidationError("disk radius must be positive");

  Mesh m;
  m.kind_ = MeshKind::disk;
  const double dr = radius / static_cast<double>(nr);
  const double dth = 2.0 * std::numbers::pi / static_cast<double>(ntheta);
  m.disk_ = DiskGrid{nr, ntheta, radius, dr, dth};

  const std::size_t n = 1 + nr * ntheta;
  m.nodes_.resize(n);
  m.area_.resize(n);
  m.arc_.assign(n, 0.0);
  m.normal_.assign(n, Point2{});

  m.nodes_[0] = {0.0, 0.0};
  m.area_[0] = std::numbers::pi * 0.25 * dr * dr;
  for (std::size_t i = 1; i <= nr; ++i) {
    const double r = static_cast<double>(i) * dr;
    for (std::size_t j = 0; j < ntheta; ++j) {
      const std::size_t k = m.polar_index(i, j);
      const double th = static_cast<double>(j) * dth;
      m.nodes_[k] = {r * std::cos(th), r * std::sin(th)};
      if (i < nr) {
        m.area_[k] = r * dr * dth;
      } else {
        m.area_[k] = 0.5 * (radius * radius - (radius - 0.5 * dr) * (radius - 0.5 * dr)) * dth;
        m.arc_[k] = radius * dth;
        m.normal_[k] = {std::cos(th), std::sin(th)};
      }
    }
  }

  // Radial edges: face is the arc at the mid radius.
  for (std::size_t j = 0; j < ntheta; ++j) m.edges_.push_back({0, m.polar_index(1, j), 0.5 * dr * dth / dr});
  for (std::size_t i = 1; i < nr; ++i) {
    const double rmid = (static_cast<double>(i) + 0.5) * dr;
    for (std::size_t j = 0; j < ntheta; ++j)
      m.edges_.push_back({m.polar_index(i, j), m.polar_index(i + 1, j), rmid * dth / dr});
  }
  // Angular edges: face is the radial extent of the dual cell.
  for (std::size_t i = 1; i <= nr; ++i) {
    const double r = static_cast<double>(i) * dr;
    const double face = i < nr ? dr : 0.5 * dr;
    for (std::size_t j = 0; j < ntheta; ++j)
      m.edges_.push_back({m.polar_index(i, j), m.polar_index(i, j + 1), face / (r * dth)});
  }

  m.finish();
  return m;
}

/// Exact diameter from the domain descriptor.
inline double mesh_diameter(const Mesh& mesh)
{
  if (mesh.kind() == MeshKind::disk) return 2.0 * mesh.disk().radius;
  return std::hypot(mesh.rect().lx, mesh.rect().ly);
}

/// Quadrature of a nodal function over Omega.
inline double integrate(const Mesh& mesh, std::span<const double> values)
{
  std::vector<double> terms(mesh.size());
  const auto w = mesh.area_weights();
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = w[i] * values[i];
  return pairwise_sum(terms);
}

/// Quadrature of a nodal function over the boundary.
inline double integrate_boundary(const Mesh& mesh, std::span<const double> values)
{
  std::vector<double> terms;
  terms.reserve(mesh.boundary().size());
  const auto w = mesh.arc_weights();
  for (std::size_t b : mesh.boundary()) terms.push_back(w[b] * values[b]);
  return pairwise_sum(terms);
}

/// Discrete Dirichlet integral  sum_e coupling (u_a - u_b)^2.
inline double dirichlet_form(const Mesh& mesh, std::span<const double> u)
{
  std::vector<double> terms;
  terms.reserve(mesh.edges().size());
  for (const Edge& e : mesh.edges()) {
    const double d = u[e.a] - u[e.b];
    terms.push_back(e.coupling * d * d);
  }
  return pairwise_sum(terms);
}

}  // namespace s2lab
