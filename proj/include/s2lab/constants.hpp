#pragma once

// Threshold constants for the constant-state regimes, and numerical checks of
// the two functional inequalities behind them:
//
//   delta (c - delta) int u^2 <= int |grad u|^2 + delta int_dOmega u^2,
//   c_trace^2 int_dOmega u^2 <= int |grad u|^2 + int u^2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "s2lab/core.hpp"
#include "s2lab/energy.hpp"
#include "s2lab/field_io.hpp"
#include "s2lab/mesh.hpp"

namespace s2lab {

struct KappaThreshold {
  double c_omega = 0.0;
  double delta_gamma = 0.0;
  double kappa_gamma = 0.0;
};

/// c = N / diam with N = 2, delta = min(c/2, 1/gamma^2),
/// kappa_gamma = sqrt(delta (c - delta)).  For gamma = 0 the boundary is
/// pinned and kappa_0 = c.
inline KappaThreshold kappa_threshold(double gamma, const Mesh& mesh)
{
  if (!std::isfinite(gamma) || gamma < 0.0) throw ValidationError("gamma must be finite and >= 0");
  KappaThreshold t;
  t.c_omega = 2.0 / mesh_diameter(mesh);
  if (gamma == 0.0) {
    t.delta_gamma = 0.5 * t.c_omega;
    t.kappa_gamma = t.c_omega;
    return t;
  }
  t.delta_gamma = std::min(0.5 * t.c_omega, 1.0 / (gamma * gamma));
  t.kappa_gamma = std::sqrt(t.delta_gamma * (t.c_omega - t.delta_gamma));
  return t;
}

/// 1 / (c_trace min(1, kappa)).
inline double gamma_threshold(double kappa, double c_trace)
{
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ValidationError("gamma threshold needs kappa > 0");
  if (!(c_trace > 0.0)) throw ValidationError("trace constant must be > 0");
  return 1.0 / (c_trace * std::min(1.0, kappa));
}

namespace detail {

/// Sparse  K + mass_weight M + boundary_weight B  on all nodes.
inline Eigen::SparseMatrix<double> assemble(const Mesh& mesh, double mass_weight, double boundary_weight)
{
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * mesh.edges().size() + mesh.size());
  for (const Edge& e : mesh.edges()) {
    const auto a = static_cast<Eigen::Index>(e.a), b = static_cast<Eigen::Index>(e.b);
    trip.emplace_back(a, a, e.coupling);
    trip.emplace_back(b, b, e.coupling);
    trip.emplace_back(a, b, -e.coupling);
    trip.emplace_back(b, a, -e.coupling);
  }
  const auto w = mesh.area_weights();
  const auto l = mesh.arc_weights();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double d = mass_weight * w[i] + boundary_weight * l[i];
    if (d != 0.0) trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), d);
  }
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

/// int u^2 over the boundary with the mesh arc weights.
inline double boundary_mass(const Mesh& mesh, std::span<const double> u)
{
  std::vector<double> sq(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) sq[i] = u[i] * u[i];
  return integrate_boundary(mesh, sq);
}

inline double interior_mass(const Mesh& mesh, std::span<const double> u)
{
  std::vector<double> sq(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) sq[i] = u[i] * u[i];
  return integrate(mesh, sq);
}

}  // namespace detail

/// Discrete  (int |grad u|^2 + int u^2) / int_dOmega u^2.
inline double trace_quotient(const Mesh& mesh, std::span<const double> u)
{
  detail::check_size(mesh, u.size(), "test function");
  const double den = detail::boundary_mass(mesh, u);
  if (!(den > 0.0)) throw ValidationError("test function vanishes on the boundary");
  return (dirichlet_form(mesh, u) + detail::interior_mass(mesh, u)) / den;
}

struct TraceEstimate {
  double c_trace = 0.0;
  double eigenvalue = 0.0;  // c_trace^2
  std::size_t iterations = 0;
  std::vector<double> eigenvector;
};

/// Smallest eigenvalue of (K + M) u = lambda B u by inverse power iteration,
/// started from the constant function; B is the boundary mass, so iterates
/// are harmonic-type extensions of their boundary values.
inline TraceEstimate estimate_trace_constant(const Mesh& mesh, double rel_tol = 1e-10,
                                             std::size_t max_iterations = 10000)
{
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(detail::assemble(mesh, 1.0, 0.0));
  if (llt.info() != Eigen::Success) throw Error("trace operator factorization failed");
  const auto l = mesh.arc_weights();
  const auto n = static_cast<Eigen::Index>(mesh.size());

  Eigen::VectorXd u = Eigen::VectorXd::Ones(n), rhs(n);
  std::vector<double> buf(mesh.size());
  double lambda = std::numeric_limits<double>::infinity();
  TraceEstimate est;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) rhs[i] = l[static_cast<std::size_t>(i)] * u[i];
    u = llt.solve(rhs);
    u /= u.cwiseAbs().maxCoeff();
    std::copy(u.data(), u.data() + n, buf.begin());
    const double next = trace_quotient(mesh, buf);
    if (std::abs(next - lambda) < rel_tol * next) {
      est.eigenvalue = next;
      est.c_trace = std::sqrt(next);
      est.iterations = it;
      est.eigenvector = buf;
      return est;
    }
    lambda = next;
  }
  throw ConvergenceError("trace eigenvalue did not settle after " + std::to_string(max_iterations) +
                         " iterations; last quotient " + std::to_string(lambda));
}

/// Exact c_trace of the ball B_R in R^N for the norm (int |grad u|^2 + int
/// u^2)^{1/2}: the minimiser is radial, r^{1-N/2} I_{N/2-1}(r), and the
/// eigenvalue is I_{N/2}(R) / I_{N/2-1}(R).
inline double ball_trace_constant(double radius, int n)
{
  if (!(radius > 0.0) || n < 1) throw ValidationError("need R > 0 and N >= 1");
  const double nu = 0.5 * n - 1.0;
  // I_{-1/2}(R) = sqrt(2/(pi R)) cosh R is outside cyl_bessel_i's domain.
  const double lower = nu < 0.0 ? std::sqrt(2.0 / (std::numbers::pi * radius)) * std::cosh(radius)
                                : std::cyl_bessel_i(nu, radius);
  return std::sqrt(std::cyl_bessel_i(nu + 1.0, radius) / lower);
}

namespace detail {

/// Random polynomial of degree <= 3 plus three Fourier modes, evaluated at
/// the nodes.  Coordinates are scaled by the diameter.
inline std::vector<double> random_test_function(const Mesh& mesh, std::mt19937_64& rng)
{
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double s = 1.0 / mesh_diameter(mesh);
  double c[10];
  for (double& x : c) x = gauss(rng);
  struct Mode {
    double amp, wx, wy, b;
  } modes[3];
  for (auto& m : modes) m = {gauss(rng), 3.0 * gauss(rng), 3.0 * gauss(rng), phase(rng)};

  std::vector<double> u(mesh.size());
  const auto p = mesh.nodes();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = s * p[i].x, y = s * p[i].y;
    double v = c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y + c[6] * x * x * x +
               c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y;
    for (const auto& m : modes) v += m.amp * std::cos(m.wx * x + m.wy * y + m.b);
    u[i] = v;
  }
  return u;
}

}  // namespace detail

/// Slack  int |grad u|^2 + delta int_dOmega u^2 - delta (c - delta) int u^2,
/// c = 2 / diam, for a given nodal function.
inline double poincare_slack(const Mesh& mesh, std::span<const double> u, double delta)
{
  detail::check_size(mesh, u.size(), "test function");
  const double c = 2.0 / mesh_diameter(mesh);
  return dirichlet_form(mesh, u) + delta * detail::boundary_mass(mesh, u) -
         delta * (c - delta) * detail::interior_mass(mesh, u);
}

/// Minimum slack over random smooth test functions.
inline double verify_poincare_inequality(const Mesh& mesh, double delta, std::size_t trials, std::uint64_t seed)
{
  if (!(delta > 0.0)) throw ValidationError("delta must be > 0");
  if (trials == 0) throw ValidationError("need at least one trial");
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t)
    worst = std::min(worst, poincare_slack(mesh, detail::random_test_function(mesh, rng), delta));
  return worst;
}

/// Random smooth nodal functions, exposed for sampling checks.
inline std::vector<double> random_test_function(const Mesh& mesh, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  return detail::random_test_function(mesh, rng);
}

struct ThresholdReport {
  std::string mesh;
  double kappa = 0.0;
  double gamma = 0.0;
  double c_omega = 0.0;
  double delta_gamma = 0.0;
  double kappa_gamma = 0.0;
  double c_trace = 0.0;
  /// Absent for kappa = 0, where the formula is undefined.
  std::optional<double> gamma_kappa;
};

inline std::string describe(const Mesh& mesh)
{
  if (mesh.kind() == MeshKind::disk) {
    const auto& d = mesh.disk();
    return "disk R=" + format_double(d.radius) + " " + std::to_string(d.nr) + "x" + std::to_string(d.ntheta);
  }
  const auto& r = mesh.rect();
  return "rectangle " + format_double(r.lx) + "x" + format_double(r.ly) + " " + std::to_string(r.nx) + "x" +
         std::to_string(r.ny);
}

inline ThresholdReport threshold_report(const Mesh& mesh, const Params& params)
{
  params.validate();
  ThresholdReport rep;
  rep.mesh = describe(mesh);
  rep.kappa = params.kappa;
  rep.gamma = params.gamma;
  const auto kt = kappa_threshold(params.gamma, mesh);
  rep.c_omega = kt.c_omega;
  rep.delta_gamma = kt.delta_gamma;
  rep.kappa_gamma = kt.kappa_gamma;
  rep.c_trace = estimate_trace_constant(mesh).c_trace;
  if (params.kappa > 0.0) rep.gamma_kappa = gamma_threshold(params.kappa, rep.c_trace);
  return rep;
}

}  // namespace s2lab
