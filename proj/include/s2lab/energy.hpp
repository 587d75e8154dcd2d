#pragma once

// Discrete penalized energy
//
//   E(m) = int |grad m|^2 + kappa^2 int (m.e3)^2 + gamma^-2 int_dOmega |m x e3|^2
//
// for sphere-valued nodal fields, and its lifted scalar version for phase
// fields psi, where m = (sin psi, 0, cos psi).  The Dirichlet integral uses the
// mesh edge stencil; for phases the edge difference is the chord length of the
// lifted field, 4 sin^2((psi_a - psi_b)/2), so both evaluators agree to
// rounding on meridian fields.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "s2lab/core.hpp"
#include "s2lab/mesh.hpp"

namespace s2lab {

using SphereField = std::vector<Vec3>;
using PhaseField = std::vector<double>;

struct EnergyBreakdown {
  double dirichlet = 0.0;
  double anisotropy = 0.0;
  double boundary = 0.0;
  double total = 0.0;

  EnergyBreakdown& operator+=(const EnergyBreakdown& o)
  {
    dirichlet += o.dirichlet;
    anisotropy += o.anisotropy;
    boundary += o.boundary;
    total += o.total;
    return *this;
  }
};

namespace detail {

inline void check_size(const Mesh& mesh, std::size_t n, const char* what)
{
  if (n != mesh.size()) throw ValidationError(std::string(what) + " size does not match the mesh");
}

inline EnergyBreakdown make_breakdown(double dir, double aniso, double bnd)
{
  return EnergyBreakdown{dir, aniso, bnd, dir + aniso + bnd};
}

// Tolerance for "equals +-e3" / "sin(psi) = 0" on Dirichlet boundary nodes.
inline constexpr double dirichlet_tolerance = 1e-9;

inline void check_dirichlet(const Mesh& mesh, std::span<const Vec3> m)
{
  for (std::size_t b : mesh.boundary()) {
    const Vec3& v = m[b];
    if (std::hypot(v[0], v[1]) > dirichlet_tolerance || std::abs(std::abs(v[2]) - 1.0) > dirichlet_tolerance)
      throw DirichletViolation("gamma = 0 requires m = +-e3 on the boundary");
  }
}

inline void check_dirichlet(const Mesh& mesh, std::span<const double> psi)
{
  for (std::size_t b : mesh.boundary())
    if (std::abs(std::sin(psi[b])) > dirichlet_tolerance)
      throw DirichletViolation("gamma = 0 requires sin(psi) = 0 on the boundary");
}

inline double chord2(double a, double b)
{
  const double s = std::sin(0.5 * (a - b));
  return 4.0 * s * s;
}

}  // namespace detail

inline EnergyBreakdown energy_sphere_field(const Mesh& mesh, std::span<const Vec3> m, const Params& params)
{
  params.validate();
  detail::check_size(mesh, m.size(), "field");
  if (params.dirichlet()) detail::check_dirichlet(mesh, m);

  std::vector<double> terms;
  terms.reserve(mesh.edges().size());
  for (const Edge& e : mesh.edges()) {
    const Vec3 d = m[e.a] - m[e.b];
    terms.push_back(e.coupling * dot(d, d));
  }
  const double dir = pairwise_sum(terms);

  terms.assign(mesh.size(), 0.0);
  const auto w = mesh.area_weights();
  for (std::size_t i = 0; i < mesh.size(); ++i) terms[i] = w[i] * m[i][2] * m[i][2];
  const double aniso = params.kappa2() * pairwise_sum(terms);

  double bnd = 0.0;
  if (const double alpha = params.boundary_weight(); alpha > 0.0) {
    terms.clear();
    const auto l = mesh.arc_weights();
    // |m x e3|^2 = m1^2 + m2^2
    for (std::size_t b : mesh.boundary()) terms.push_back(l[b] * (m[b][0] * m[b][0] + m[b][1] * m[b][1]));
    bnd = alpha * pairwise_sum(terms);
  }
  return detail::make_breakdown(dir, aniso, bnd);
}

inline EnergyBreakdown energy_phase(const Mesh& mesh, std::span<const double> psi, const Params& params)
{
  params.validate();
  detail::check_size(mesh, psi.size(), "phase");
  if (params.dirichlet()) detail::check_dirichlet(mesh, psi);

  std::vector<double> terms;
  terms.reserve(mesh.edges().size());
  for (const Edge& e : mesh.edges()) terms.push_back(e.coupling * detail::chord2(psi[e.a], psi[e.b]));
  const double dir = pairwise_sum(terms);

  terms.assign(mesh.size(), 0.0);
  const auto w = mesh.area_weights();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double c = std::cos(psi[i]);
    terms[i] = w[i] * c * c;
  }
  const double aniso = params.kappa2() * pairwise_sum(terms);

  double bnd = 0.0;
  if (const double alpha = params.boundary_weight(); alpha > 0.0) {
    terms.clear();
    const auto l = mesh.arc_weights();
    for (std::size_t b : mesh.boundary()) {
      const double s = std::sin(psi[b]);
      terms.push_back(l[b] * s * s);
    }
    bnd = alpha * pairwise_sum(terms);
  }
  return detail::make_breakdown(dir, aniso, bnd);
}

/// Phase energy restricted to a node set O: bulk terms over O, boundary term
/// over O intersected with the boundary.  Each edge contributes half of its
/// Dirichlet term to each endpoint, which makes the functional additive over
/// disjoint node sets.
inline EnergyBreakdown localized_energy_phase(const Mesh& mesh, std::span<const double> psi, const Params& params,
                                              std::span<const char> region)
{
  params.validate();
  detail::check_size(mesh, psi.size(), "phase");
  detail::check_size(mesh, region.size(), "region mask");

  std::vector<double> node_dir(mesh.size(), 0.0);
  for (const Edge& e : mesh.edges()) {
    const double half = 0.5 * e.coupling * detail::chord2(psi[e.a], psi[e.b]);
    node_dir[e.a] += half;
    node_dir[e.b] += half;
  }

  std::vector<double> dir, aniso, bnd;
  const auto w = mesh.area_weights();
  const auto l = mesh.arc_weights();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    if (!region[i]) continue;
    dir.push_back(node_dir[i]);
    const double c = std::cos(psi[i]);
    aniso.push_back(w[i] * c * c);
    if (mesh.is_boundary(i)) {
      const double s = std::sin(psi[i]);
      bnd.push_back(l[i] * s * s);
    }
  }
  return detail::make_breakdown(pairwise_sum(dir), params.kappa2() * pairwise_sum(aniso),
                                params.boundary_weight() * pairwise_sum(bnd));
}

struct ConstantStateEnergies {
  double e3_energy = 0.0;
  /// Absent in Dirichlet mode, where in-plane states are not admissible.
  std::optional<double> inplane_energy;
};

/// kappa^2 |Omega| for +-e3 and |dOmega| / gamma^2 for constant in-plane fields.
inline ConstantStateEnergies constant_state_energies(const Mesh& mesh, const Params& params)
{
  params.validate();
  ConstantStateEnergies out;
  out.e3_energy = params.kappa2() * mesh.area();
  if (params.gamma > 0.0) out.inplane_energy = mesh.perimeter() / (params.gamma * params.gamma);
  return out;
}

// ---------------------------------------------------------------------------
// Derivatives used by the minimizers.

/// Nodal gradient dE/dm_i (ambient R^3, no projection).  Pinned Dirichlet
/// nodes are not special-cased here.
inline void energy_gradient(const Mesh& mesh, std::span<const Vec3> m, const Params& params, std::span<Vec3> grad)
{
  for (auto& g : grad) g = Vec3{};
  for (const Edge& e : mesh.edges()) {
    const Vec3 d = (2.0 * e.coupling) * (m[e.a] - m[e.b]);
    grad[e.a] = grad[e.a] + d;
    grad[e.b] = grad[e.b] - d;
  }
  const auto w = mesh.area_weights();
  const double k2 = params.kappa2();
  for (std::size_t i = 0; i < mesh.size(); ++i) grad[i][2] += 2.0 * k2 * w[i] * m[i][2];
  if (const double alpha = params.boundary_weight(); alpha > 0.0) {
    const auto l = mesh.arc_weights();
    for (std::size_t b : mesh.boundary()) {
      grad[b][0] += 2.0 * alpha * l[b] * m[b][0];
      grad[b][1] += 2.0 * alpha * l[b] * m[b][1];
    }
  }
}

/// E(next) - E(prev) evaluated term by term as (a-b)(a+b), free of the
/// cancellation that subtracting two totals would suffer.
inline double energy_difference(const Mesh& mesh, std::span<const Vec3> prev, std::span<const Vec3> next,
                                const Params& params)
{
  std::vector<double> terms;
  terms.reserve(mesh.edges().size() + 2 * mesh.size());
  for (const Edge& e : mesh.edges()) {
    const Vec3 a = next[e.a] - next[e.b];
    const Vec3 b = prev[e.a] - prev[e.b];
    terms.push_back(e.coupling * dot(a - b, a + b));
  }
  const auto w = mesh.area_weights();
  const double k2 = params.kappa2();
  for (std::size_t i = 0; i < mesh.size(); ++i)
    terms.push_back(k2 * w[i] * (next[i][2] - prev[i][2]) * (next[i][2] + prev[i][2]));
  if (const double alpha = params.boundary_weight(); alpha > 0.0) {
    const auto l = mesh.arc_weights();
    for (std::size_t b : mesh.boundary())
      terms.push_back(alpha * l[b] *
                      ((next[b][0] - prev[b][0]) * (next[b][0] + prev[b][0]) +
                       (next[b][1] - prev[b][1]) * (next[b][1] + prev[b][1])));
  }
  return pairwise_sum(terms);
}

inline void phase_energy_gradient(const Mesh& mesh, std::span<const double> psi, const Params& params,
                                  std::span<double> grad)
{
  for (auto& g : grad) g = 0.0;
  for (const Edge& e : mesh.edges()) {
    const double d = 2.0 * e.coupling * std::sin(psi[e.a] - psi[e.b]);
    grad[e.a] += d;
    grad[e.b] -= d;
  }
  const auto w = mesh.area_weights();
  const double k2 = params.kappa2();
  for (std::size_t i = 0; i < mesh.size(); ++i) grad[i] -= k2 * w[i] * std::sin(2.0 * psi[i]);
  if (const double alpha = params.boundary_weight(); alpha > 0.0) {
    const auto l = mesh.arc_weights();
    for (std::size_t b : mesh.boundary()) grad[b] += alpha * l[b] * std::sin(2.0 * psi[b]);
  }
}

inline double phase_energy_difference(const Mesh& mesh, std::span<const double> prev, std::span<const double> next,
                                      const Params& params)
{
  // sin^2 a - sin^2 b = sin(a+b) sin(a-b),  cos^2 a - cos^2 b = -sin(a+b) sin(a-b)
  auto dsin2 = [](double a, double b) { return std::sin(a + b) * std::sin(a - b); };
  std::vector<double> terms;
  terms.reserve(mesh.edges().size() + 2 * mesh.size());
  for (const Edge& e : mesh.edges()) {
    const double a = 0.5 * (next[e.a] - next[e.b]);
    const double b = 0.5 * (prev[e.a] - prev[e.b]);
    terms.push_back(4.0 * e.coupling * dsin2(a, b));
  }
  const auto w = mesh.area_weights();
  const double k2 = params.kappa2();
  for (std::size_t i = 0; i < mesh.size(); ++i) terms.push_back(-k2 * w[i] * dsin2(next[i], prev[i]));
  if (const double alpha = params.boundary_weight(); alpha > 0.0) {
    const auto l = mesh.arc_weights();
    for (std::size_t b : mesh.boundary()) terms.push_back(alpha * l[b] * dsin2(next[b], prev[b]));
  }
  return pairwise_sum(terms);
}

// ---------------------------------------------------------------------------
// Euler-Lagrange residuals.

struct ElResidual {
  double interior = 0.0;
  double boundary = 0.0;
};

namespace detail {

// |grad m|^2 at a non-boundary node from centred differences.  The disk
// centre uses the mean squared increment to the first ring.
inline double nodal_gradient_sq(const Mesh& mesh, std::span<const Vec3> m, std::size_t k)
{
  if (mesh.kind() == MeshKind::rectangle) {
    const auto& g = mesh.rect();
    const std::size_t i = k % (g.nx + 1), j = k / (g.nx + 1);
    const Vec3 dx = (0.5 / g.hx) * (m[mesh.grid_index(i + 1, j)] - m[mesh.grid_index(i - 1, j)]);
    const Vec3 dy = (0.5 / g.hy) * (m[mesh.grid_index(i, j + 1)] - m[mesh.grid_index(i, j - 1)]);
    return dot(dx, dx) + dot(dy, dy);
  }
  const auto& g = mesh.disk();
  if (k == 0) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.ntheta; ++j) {
      const Vec3 d = m[mesh.polar_index(1, j)] - m[0];
      s += dot(d, d);
    }
    return 2.0 * s / (static_cast<double>(g.ntheta) * g.dr * g.dr);
  }
  const std::size_t i = mesh.ring_of(k), j = mesh.ray_of(k);
  const double r = static_cast<double>(i) * g.dr;
  const Vec3 dr = (0.5 / g.dr) * (m[mesh.polar_index(i + 1, j)] - m[mesh.polar_index(i - 1, j)]);
  const Vec3 dt =
      (0.5 / (r * g.dtheta)) * (m[mesh.polar_index(i, j + 1)] - m[mesh.polar_index(i, j + g.ntheta - 1)]);
  return dot(dr, dr) + dot(dt, dt);
}

// One-sided second-order normal derivative; nullopt at rectangle corners.
inline std::optional<Vec3> normal_derivative(const Mesh& mesh, std::span<const Vec3> m, std::size_t b)
{
  if (mesh.kind() == MeshKind::disk) {
    const auto& g = mesh.disk();
    const std::size_t j = mesh.ray_of(b);
    const Vec3& u0 = m[b];
    const Vec3& u1 = m[mesh.polar_index(g.nr - 1, j)];
    const Vec3& u2 = m[mesh.polar_index(g.nr - 2, j)];
    return (0.5 / g.dr) * (3.0 * u0 - 4.0 * u1 + u2);
  }
  const auto& g = mesh.rect();
  const std::size_t i = b % (g.nx + 1), j = b / (g.nx + 1);
  const bool xb = i == 0 || i == g.nx, yb = j == 0 || j == g.ny;
  if (xb && yb) return std::nullopt;
  std::size_t n1, n2;
  double h;
  if (xb) {
    const std::size_t i1 = i == 0 ? 1 : g.nx - 1, i2 = i == 0 ? 2 : g.nx - 2;
    n1 = mesh.grid_index(i1, j);
    n2 = mesh.grid_index(i2, j);
    h = g.hx;
  } else {
    const std::size_t j1 = j == 0 ? 1 : g.ny - 1, j2 = j == 0 ? 2 : g.ny - 2;
    n1 = mesh.grid_index(i, j1);
    n2 = mesh.grid_index(i, j2);
    h = g.hy;
  }
  return (0.5 / h) * (3.0 * m[b] - 4.0 * m[n1] + m[n2]);
}

}  // namespace detail

/// Discrete L^2 norms of the strong Euler-Lagrange equation in the interior
/// and of the nonlinear Robin condition (or of m -+ e3 when gamma = 0) on the
/// boundary.
inline ElResidual el_residual(const Mesh& mesh, std::span<const Vec3> m, const Params& params)
{
  params.validate();
  detail::check_size(mesh, m.size(), "field");

  // -Laplacian from the finite-volume stencil: (K m)_i / w_i.
  std::vector<Vec3> km(mesh.size(), Vec3{});
  for (const Edge& e : mesh.edges()) {
    const Vec3 d = e.coupling * (m[e.a] - m[e.b]);
    km[e.a] = km[e.a] + d;
    km[e.b] = km[e.b] - d;
  }
  const auto w = mesh.area_weights();
  const double k2 = params.kappa2();

  std::vector<double> terms;
  for (std::size_t k : mesh.interior()) {
    const double m3 = m[k][2];
    const double lambda = detail::nodal_gradient_sq(mesh, m, k) + k2 * m3 * m3;
    const Vec3 r = (1.0 / w[k]) * km[k] + (k2 * m3) * e3 - lambda * m[k];
    terms.push_back(w[k] * dot(r, r));
  }
  ElResidual out;
  out.interior = std::sqrt(pairwise_sum(terms));

  terms.clear();
  const auto l = mesh.arc_weights();
  const double alpha = params.boundary_weight();
  for (std::size_t b : mesh.boundary()) {
    Vec3 r{};
    if (params.dirichlet()) {
      r = m[b] - (m[b][2] >= 0.0 ? e3 : -1.0 * e3);
    } else {
      const auto dn = detail::normal_derivative(mesh, m, b);
      if (!dn) continue;
      const double m3 = m[b][2];
      r = *dn - alpha * (m3 * e3 - (m3 * m3) * m[b]);
    }
    terms.push_back(l[b] * dot(r, r));
  }
  out.boundary = std::sqrt(pairwise_sum(terms));
  return out;
}

/// Pointwise meridian field (sin psi, 0, cos psi).
inline SphereField meridian_field(std::span<const double> psi)
{
  SphereField m(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) m[i] = {std::sin(psi[i]), 0.0, std::cos(psi[i])};
  return m;
}

}  // namespace s2lab
