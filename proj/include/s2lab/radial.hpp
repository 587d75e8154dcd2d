#pragma once

// Radial profiles m(x) = (sin(u/2), 0, cos(u/2)) with u = u(|x|) on the ball
// B_R in R^N.  Stationarity reduces to
//
//   u'' + (N-1)/r u' + kappa^2 sin u = 0,   u'(0) = 0,
//
// closed at r = R by u(R) = 0 (gamma = 0) or u'(R) + sin u(R) / gamma^2 = 0.
// Solved by shooting in the launch value u0 = u(0).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include "s2lab/core.hpp"
#include "s2lab/energy.hpp"
#include "s2lab/field_io.hpp"
#include "s2lab/minimize.hpp"

namespace s2lab {

struct RadialProfile {
  double radius = 1.0;
  int dimension = 2;
  double dr = 0.0;
  double u0 = 0.0;
  Params params;
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> du;
};

struct RadialRoot {
  double u0 = 0.0;
  double closure = 0.0;
  double energy = 0.0;
};

struct RadialSolution {
  RadialProfile profile;
  /// Every closure root found, ascending in u0.
  std::vector<RadialRoot> roots;
  Classification classification = Classification::constant_e3;
};

struct RadialOptions {
  /// Step; the actual step is R / ceil(R / dr).
  double dr = 1e-3;
  std::size_t scan_points = 200;
  double closure_tolerance = 1e-10;

  void validate() const
  {
    if (!(dr > 0.0)) throw ValidationError("radial step must be > 0");
    if (scan_points < 2) throw ValidationError("need at least two scan points");
    if (!(closure_tolerance > 0.0)) throw ValidationError("closure tolerance must be > 0");
  }
};

/// |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2).
inline double sphere_area(int n)
{
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Integrates from the origin.  The first ten steps follow the series
///   u = u0 + a r^2 + b r^4,  a = -kappa^2 sin(u0) / (2N),
///   b = -kappa^2 cos(u0) a / (4 (N+2)),
/// after which classical RK4 takes over.
inline RadialProfile shoot(double u0, const Params& params, double radius, int n, double dr)
{
  params.validate();
  if (!(u0 >= -1e-12 && u0 <= std::numbers::pi + 1e-12)) throw ValidationError("launch value must lie in [0, pi]");
  if (!(radius > 0.0)) throw ValidationError("radius must be > 0");
  if (n < 1) throw ValidationError("dimension must be >= 1");
  if (!(dr > 0.0) || dr > radius / 100.0 * (1.0 + 1e-12)) throw ValidationError("need 0 < dr <= R/100");

  const auto steps = static_cast<std::size_t>(std::ceil(radius / dr - 1e-9));
  RadialProfile p;
  p.radius = radius;
  p.dimension = n;
  p.dr = radius / static_cast<double>(steps);
  p.u0 = u0;
  p.params = params;
  p.params.dimension = n;
  p.r.resize(steps + 1);
  p.u.resize(steps + 1);
  p.du.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) p.r[k] = static_cast<double>(k) * p.dr;

  // sin(pi) is not 0 in floating point; the equilibria are set exactly.
  if (u0 == 0.0 || u0 == std::numbers::pi) {
    std::fill(p.u.begin(), p.u.end(), u0);
    std::fill(p.du.begin(), p.du.end(), 0.0);
    return p;
  }

  const double k2 = params.kappa2();
  const double nn = n;
  const double a = -k2 * std::sin(u0) / (2.0 * nn);
  const double b = -k2 * std::cos(u0) * a / (4.0 * (nn + 2.0));
  const std::size_t launch = std::min<std::size_t>(10, steps);
  for (std::size_t k = 0; k <= launch; ++k) {
    const double r = p.r[k];
    p.u[k] = u0 + a * r * r + b * r * r * r * r;
    p.du[k] = 2.0 * a * r + 4.0 * b * r * r * r;
  }

  auto rhs = [&](double r, double u, double v) { return -(nn - 1.0) / r * v - k2 * std::sin(u); };
  const double h = p.dr;
  for (std::size_t k = launch; k < steps; ++k) {
    const double r = p.r[k], u = p.u[k], v = p.du[k];
    const double ku1 = v, kv1 = rhs(r, u, v);
    const double ku2 = v + 0.5 * h * kv1, kv2 = rhs(r + 0.5 * h, u + 0.5 * h * ku1, v + 0.5 * h * kv1);
    const double ku3 = v + 0.5 * h * kv2, kv3 = rhs(r + 0.5 * h, u + 0.5 * h * ku2, v + 0.5 * h * kv2);
    const double ku4 = v + h * kv3, kv4 = rhs(r + h, u + h * ku3, v + h * kv3);
    p.u[k + 1] = u + h / 6.0 * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4);
    p.du[k + 1] = v + h / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
    if (!std::isfinite(p.u[k + 1]) || p.u[k + 1] < -std::numbers::pi || p.u[k + 1] > 2.0 * std::numbers::pi)
      throw DivergenceError("shot left [-pi, 2pi] at r = " + format_double(p.r[k + 1]));
  }
  return p;
}

/// u(R) for gamma = 0, u'(R) + sin(u(R)) / gamma^2 otherwise.
inline double closure_residual(const RadialProfile& p)
{
  if (p.params.dirichlet()) return p.u.back();
  return p.du.back() + p.params.boundary_weight() * std::sin(p.u.back());
}

namespace detail {

/// Composite Simpson; a trailing 3/8 panel absorbs an odd interval count.
inline double simpson(std::span<const double> f, double h)
{
  const std::size_t m = f.size() - 1;
  if (m == 0) return 0.0;
  if (m == 1) return 0.5 * h * (f[0] + f[1]);
  std::size_t simpson_end = m;
  double tail = 0.0;
  if (m % 2 == 1) {
    simpson_end = m - 3;
    tail = 3.0 * h / 8.0 * (f[m - 3] + 3.0 * f[m - 2] + 3.0 * f[m - 1] + f[m]);
  }
  std::vector<double> terms;
  terms.reserve(simpson_end + 1);
  for (std::size_t k = 0; k <= simpson_end; ++k) {
    const double c = (k == 0 || k == simpson_end) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    terms.push_back(c * f[k]);
  }
  return h / 3.0 * pairwise_sum(terms) + tail;
}

}  // namespace detail

/// Energy of the radial extension:
///   |S^{N-1}| int_0^R [(u'/2)^2 + kappa^2 cos^2(u/2)] r^{N-1} dr
///   + |S^{N-1}| R^{N-1} sin^2(u(R)/2) / gamma^2.
inline EnergyBreakdown radial_energy(const RadialProfile& p, const Params& params)
{
  params.validate();
  const double area = sphere_area(p.dimension);
  std::vector<double> fd(p.u.size()), fa(p.u.size());
  for (std::size_t k = 0; k < p.u.size(); ++k) {
    const double w = std::pow(p.r[k], p.dimension - 1);
    const double c = std::cos(0.5 * p.u[k]);
    fd[k] = 0.25 * p.du[k] * p.du[k] * w;
    fa[k] = c * c * w;
  }
  EnergyBreakdown e;
  e.dirichlet = area * detail::simpson(fd, p.dr);
  e.anisotropy = params.kappa2() * area * detail::simpson(fa, p.dr);
  if (const double alpha = params.boundary_weight(); alpha > 0.0) {
    const double s = std::sin(0.5 * p.u.back());
    e.boundary = alpha * area * std::pow(p.radius, p.dimension - 1) * s * s;
  }
  e.total = e.dirichlet + e.anisotropy + e.boundary;
  return e;
}

inline EnergyBreakdown radial_energy(const RadialProfile& p) { return radial_energy(p, p.params); }

/// Scans the closure on midpoints pi (k + 1/2) / scan_points, bisects every
/// sign change and keeps the least-energy root.  u0 = 0 is always a root and
/// u0 = pi is one whenever gamma > 0.
inline RadialSolution solve_radial_bvp(const Params& params, double radius, int n, const RadialOptions& opts = {})
{
  params.validate();
  opts.validate();
  const double dr = std::min(opts.dr, radius / 100.0);
  auto g = [&](double u0) { return closure_residual(shoot(u0, params, radius, n, dr)); };

  std::vector<RadialRoot> roots;
  auto add_root = [&](double u0) {
    RadialProfile p = shoot(u0, params, radius, n, dr);
    roots.push_back({u0, closure_residual(p), radial_energy(p, params).total});
  };
  add_root(0.0);

  const std::size_t m = opts.scan_points;
  std::vector<double> grid(m), vals(m);
  for (std::size_t k = 0; k < m; ++k) {
    grid[k] = std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(m);
    vals[k] = g(grid[k]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (vals[k] == 0.0) {
      add_root(grid[k]);
      continue;
    }
    if (k + 1 == m || vals[k + 1] == 0.0 || (vals[k] > 0.0) == (vals[k + 1] > 0.0)) continue;
    double lo = grid[k], hi = grid[k + 1], glo = vals[k];
    double mid = 0.5 * (lo + hi), gm = g(mid);
    while (std::abs(gm) > opts.closure_tolerance && hi - lo > 4.0 * std::numeric_limits<double>::epsilon()) {
      if ((gm > 0.0) == (glo > 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
      mid = 0.5 * (lo + hi);
      gm = g(mid);
    }
    add_root(mid);
  }
  if (!params.dirichlet()) add_root(std::numbers::pi);

  RadialSolution sol;
  std::size_t best = 0;
  for (std::size_t k = 1; k < roots.size(); ++k)
    if (roots[k].energy < roots[best].energy) best = k;
  sol.profile = shoot(roots[best].u0, params, radius, n, dr);
  if (roots[best].u0 == 0.0)
    sol.classification = Classification::constant_e3;
  else if (roots[best].u0 == std::numbers::pi)
    sol.classification = Classification::constant_inplane;
  else
    sol.classification = Classification::nonconstant;
  std::sort(roots.begin(), roots.end(), [](const RadialRoot& x, const RadialRoot& y) { return x.u0 < y.u0; });
  sol.roots = std::move(roots);
  return sol;
}

struct MonotoneCheck {
  bool monotone = true;
  double max_violation = 0.0;
};

/// Largest increase u(r_{k+1}) - u(r_k); monotone iff it is <= 1e-9.
inline MonotoneCheck check_monotone(const RadialProfile& p)
{
  MonotoneCheck c;
  for (std::size_t k = 0; k + 1 < p.u.size(); ++k) c.max_violation = std::max(c.max_violation, p.u[k + 1] - p.u[k]);
  c.monotone = c.max_violation <= 1e-9;
  return c;
}

/// Max-norm residual of the radial equation at samples with r >= r_min,
/// using sixth-order central differences of the u' samples for u'' (a
/// fourth-order stencil's own error is comparable to dr^4 at kappa ~ 4).
inline double radial_ode_residual(const RadialProfile& p, double r_min)
{
  const double h = p.dr, nn = p.dimension, k2 = p.params.kappa2();
  const auto& d = p.du;
  double worst = 0.0;
  for (std::size_t k = 3; k + 3 < p.u.size(); ++k) {
    if (p.r[k] < r_min) continue;
    const double upp =
        (-d[k - 3] + 9.0 * d[k - 2] - 45.0 * d[k - 1] + 45.0 * d[k + 1] - 9.0 * d[k + 2] + d[k + 3]) / (60.0 * h);
    worst = std::max(worst, std::abs(upp + (nn - 1.0) / p.r[k] * p.du[k] + k2 * std::sin(p.u[k])));
  }
  return worst;
}

/// Samples the profile at arbitrary radius by cubic Hermite interpolation.
inline double profile_at(const RadialProfile& p, double r)
{
  if (r <= 0.0) return p.u.front();
  if (r >= p.radius) return p.u.back();
  const auto k = std::min(static_cast<std::size_t>(r / p.dr), p.u.size() - 2);
  const double h = p.dr, t = (r - p.r[k]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * p.u[k] + h10 * h * p.du[k] + h01 * p.u[k + 1] + h11 * h * p.du[k + 1];
}

/// Phase psi = u/2 of the radial extension at every mesh node (disk meshes).
inline PhaseField radial_phase_on_mesh(const RadialProfile& p, const Mesh& mesh)
{
  PhaseField psi(mesh.size());
  const auto nodes = mesh.nodes();
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = 0.5 * profile_at(p, std::hypot(nodes[i].x, nodes[i].y));
  return psi;
}

inline void write_profile_csv(std::ostream& os, const RadialProfile& p)
{
  os << "r,u,u_prime,phi,m1,m3\n";
  for (std::size_t k = 0; k < p.u.size(); ++k) {
    const double phi = 0.5 * p.u[k];
    os << format_double(p.r[k]) << ',' << format_double(p.u[k]) << ',' << format_double(p.du[k]) << ','
       << format_double(phi) << ',' << format_double(std::sin(phi)) << ',' << format_double(std::cos(phi)) << '\n';
  }
}

}  // namespace s2lab
