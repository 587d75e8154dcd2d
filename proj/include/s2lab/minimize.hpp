#pragma once

// Projected descent for the discrete energy over sphere-valued fields and
// over phase fields.
//
// Each iteration takes the tangential gradient G_t (gradient minus its
// component along m at every node) and builds a search direction in the
// metric of the H^1-type operator A = 2(K + mu M + alpha B) (K edge
// stiffness, M lumped mass, B boundary mass): limited-memory quasi-Newton
// updates on top of A^-1, projected back onto the tangent planes.  Whenever
// that fails to descend, the plain preconditioned gradient -P A^-1 G_t is
// used; it always descends because <G_t, P A^-1 G_t> = <G_t, A^-1 G_t> > 0.
// Steps are Armijo backtracking followed by nodewise renormalisation.

#include <algorithm>
#include <cmath>
#include <cstddef>
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
#include "s2lab/symmetry.hpp"

namespace s2lab {

enum class InitKind { constant_e3, constant_inplane, random_uniform, radial_seed, file };

inline std::string to_string(InitKind k)
{
  switch (k) {
    case InitKind::constant_e3: return "constant-e3";
    case InitKind::constant_inplane: return "constant-inplane";
    case InitKind::random_uniform: return "random-uniform";
    case InitKind::radial_seed: return "radial-seed";
    case InitKind::file: return "file";
  }
  return "?";
}

inline InitKind parse_init_kind(const std::string& s)
{
  if (s == "constant-e3") return InitKind::constant_e3;
  if (s == "constant-inplane") return InitKind::constant_inplane;
  if (s == "random-uniform" || s == "random") return InitKind::random_uniform;
  if (s == "radial-seed") return InitKind::radial_seed;
  if (s == "file") return InitKind::file;
  throw ValidationError("unknown init kind '" + s + "'");
}

struct SolveOptions {
  std::size_t max_iterations = 20000;
  /// Stop when the projected-gradient norm drops below
  /// max(relative_tolerance * initial norm, absolute_tolerance).
  double relative_tolerance = 1e-8;
  double absolute_tolerance = 1e-10;
  double initial_step = 1.0;
  double backtracking = 0.5;
  double armijo = 1e-4;
  std::uint64_t rng_seed = 0;
  InitKind init = InitKind::random_uniform;
  std::string init_file;

  void validate() const
  {
    if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0)) throw ValidationError("tolerances must be > 0");
    if (!(backtracking > 0.0 && backtracking < 1.0)) throw ValidationError("backtracking factor must lie in (0,1)");
    if (!(initial_step > 0.0)) throw ValidationError("initial step must be > 0");
    if (max_iterations == 0) throw ValidationError("max_iterations must be >= 1");
  }
};

enum class Classification { constant_e3, constant_inplane, nonconstant, non_converged };

inline std::string to_string(Classification c)
{
  switch (c) {
    case Classification::constant_e3: return "constant-e3";
    case Classification::constant_inplane: return "constant-inplane";
    case Classification::nonconstant: return "nonconstant";
    case Classification::non_converged: return "non-converged";
  }
  return "?";
}

struct SolveReport {
  std::size_t iterations = 0;
  bool converged = false;
  EnergyBreakdown energy;
  double gradient_norm = 0.0;
  double initial_gradient_norm = 0.0;
  /// Totals per accepted iterate.  Entries after the first accumulate the
  /// cancellation-free decrements, so they are exactly non-increasing.
  std::vector<double> energy_trace;
  Classification classification = Classification::non_converged;
  ElResidual residual;
};

template <class Field>
struct SolveResult {
  Field field;
  SolveReport report;
};

/// Thresholds: constant-e3 if min|m3| >= 0.999, in-plane if max|m3| <= 1e-3.
inline Classification classify_m3(std::span<const double> m3)
{
  double lo = 1.0, hi = 0.0;
  for (double v : m3) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  if (lo >= 0.999) return Classification::constant_e3;
  if (hi <= 1e-3) return Classification::constant_inplane;
  return Classification::nonconstant;
}

inline Classification classify_field(std::span<const Vec3> m)
{
  std::vector<double> m3(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) m3[i] = m[i][2];
  return classify_m3(m3);
}

namespace detail {

/// Cholesky factor of 2(K + mu M + alpha B) on the free nodes.
class Preconditioner {
 public:
  Preconditioner(const Mesh& mesh, const Params& params, std::span<const char> pinned) : n_(mesh.size())
  {
    map_.assign(n_, -1);
    Eigen::Index nfree = 0;
    for (std::size_t i = 0; i < n_; ++i)
      if (!pinned[i]) map_[i] = nfree++;

    const double mu = 1.0 + params.kappa2();
    const double alpha = params.boundary_weight();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * mesh.edges().size() + n_);
    for (const Edge& e : mesh.edges()) {
      const auto a = map_[e.a], b = map_[e.b];
      const double c = 2.0 * e.coupling;
      if (a >= 0) trip.emplace_back(a, a, c);
      if (b >= 0) trip.emplace_back(b, b, c);
      if (a >= 0 && b >= 0) {
        trip.emplace_back(a, b, -c);
        trip.emplace_back(b, a, -c);
      }
    }
    const auto w = mesh.area_weights();
    const auto l = mesh.arc_weights();
    for (std::size_t i = 0; i < n_; ++i)
      if (map_[i] >= 0) trip.emplace_back(map_[i], map_[i], 2.0 * (mu * w[i] + alpha * l[i]));

    Eigen::SparseMatrix<double> a(nfree, nfree);
    a.setFromTriplets(trip.begin(), trip.end());
    llt_.compute(a);
    if (llt_.info() != Eigen::Success) throw Error("preconditioner factorization failed");
    rhs_.resize(nfree);
  }

  /// out = A^-1 in on free nodes, 0 on pinned nodes.
  void solve(std::span<const double> in, std::span<double> out)
  {
    for (std::size_t i = 0; i < n_; ++i)
      if (map_[i] >= 0) rhs_[map_[i]] = in[i];
    Eigen::VectorXd x = llt_.solve(rhs_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = map_[i] >= 0 ? x[map_[i]] : 0.0;
  }

 private:
  std::size_t n_;
  std::vector<Eigen::Index> map_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
  Eigen::VectorXd rhs_;
};

inline std::vector<char> pinned_nodes(const Mesh& mesh, const Params& params)
{
  std::vector<char> pinned(mesh.size(), 0);
  if (params.dirichlet())
    for (std::size_t b : mesh.boundary()) pinned[b] = 1;
  return pinned;
}

inline double radial_seed_angle(const Mesh& mesh, std::size_t i)
{
  const auto p = mesh.nodes()[i];
  double rho;
  if (mesh.kind() == MeshKind::disk) {
    rho = std::hypot(p.x, p.y) / mesh.disk().radius;
  } else {
    const auto& g = mesh.rect();
    rho = std::hypot(p.x - 0.5 * g.lx, p.y - 0.5 * g.ly) / (0.5 * std::hypot(g.lx, g.ly));
  }
  return 0.25 * std::numbers::pi * (1.0 + std::cos(std::numbers::pi * std::min(rho, 1.0)));
}

// Isotropic random field built from random Fourier features with a
// correlation length of about half the domain diameter.  The value at each
// node is a centred isotropic Gaussian in R^3, so its direction is uniform on
// S^2.  Nodewise white noise is avoided: it seeds lattice-scale defects that
// the discrete energy can pin.
inline SphereField random_smooth_field(const Mesh& mesh, std::uint64_t seed, std::size_t features = 12)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  double diam;
  if (mesh.kind() == MeshKind::disk)
    diam = 2.0 * mesh.disk().radius;
  else
    diam = std::hypot(mesh.rect().lx, mesh.rect().ly);
  const double freq = 4.0 / diam;

  struct Feature {
    Vec3 amp;
    double wx, wy, b;
  };
  std::vector<Feature> f(features);
  for (auto& ft : f) {
    ft.amp = {gauss(rng), gauss(rng), gauss(rng)};
    ft.wx = freq * gauss(rng);
    ft.wy = freq * gauss(rng);
    ft.b = phase(rng);
  }
  SphereField m(mesh.size());
  const auto p = mesh.nodes();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Vec3 v{};
    for (const auto& ft : f) v = v + std::cos(ft.wx * p[i].x + ft.wy * p[i].y + ft.b) * ft.amp;
    m[i] = norm(v) > 1e-12 ? normalized(v) : e3;
  }
  return m;
}

using Vector = std::vector<double>;

inline double inner(std::span<const double> a, std::span<const double> b)
{
  std::vector<double> t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) t[i] = a[i] * b[i];
  return pairwise_sum(t);
}

// Descent loop shared by both solvers: limited-memory BFGS directions whose
// initial inverse Hessian is the (scaled) preconditioner, safeguarded by a
// fallback to the preconditioned gradient, and Armijo backtracking.
//
// `State` works on flattened coefficient vectors and supplies
//   energy_total(), gradient(g), gradient_norm(g), precondition(in, out),
//   project(v), largest_component(d), trial(t, d), difference(), accept(),
//   displacement(s).
template <class State>
SolveReport descend(State& s, const SolveOptions& opts)
{
  constexpr std::size_t memory = 8;
  constexpr double max_turn = 0.5;
  SolveReport rep;
  rep.energy_trace.push_back(s.energy_total());

  const std::size_t n = s.dimension();
  Vector g(n), g_prev(n), d(n), q(n), r(n);
  std::vector<Vector> ss, ys;
  std::vector<double> rho;
  double t = opts.initial_step;
  double g0 = 0.0;
  bool have_prev = false;

  for (std::size_t it = 0;; ++it) {
    s.gradient(g);
    const double gn = s.gradient_norm(g);
    if (it == 0) g0 = gn;
    rep.gradient_norm = gn;
    rep.iterations = it;
    if (gn <= std::max(opts.relative_tolerance * g0, opts.absolute_tolerance)) {
      rep.converged = true;
      break;
    }
    if (it >= opts.max_iterations) break;

    if (have_prev) {
      // Curvature pair in the current tangent space.
      Vector sv(n), yv(n);
      s.displacement(sv);
      s.project(g_prev);
      for (std::size_t i = 0; i < n; ++i) yv[i] = g[i] - g_prev[i];
      const double sy = inner(sv, yv);
      if (sy > 1e-12 * std::sqrt(inner(sv, sv) * inner(yv, yv))) {
        if (ss.size() == memory) {
          ss.erase(ss.begin());
          ys.erase(ys.begin());
          rho.erase(rho.begin());
        }
        ss.push_back(std::move(sv));
        ys.push_back(std::move(yv));
        rho.push_back(1.0 / sy);
      }
    }
    for (auto& v : ss) s.project(v);
    for (auto& v : ys) s.project(v);

    // Two-loop recursion.
    q = g;
    std::vector<double> a(ss.size());
    for (std::size_t k = ss.size(); k-- > 0;) {
      a[k] = rho[k] * inner(ss[k], q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= a[k] * ys[k][i];
    }
    s.precondition(q, r);
    if (!ss.empty()) {
      Vector hy(n);
      s.precondition(ys.back(), hy);
      const double scale = (1.0 / rho.back()) / inner(ys.back(), hy);
      for (double& x : r) x *= scale;
    }
    for (std::size_t k = 0; k < ss.size(); ++k) {
      const double b = rho[k] * inner(ys[k], r);
      for (std::size_t i = 0; i < n; ++i) r[i] += ss[k][i] * (a[k] - b);
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = -r[i];
    s.project(d);
    double slope = inner(g, d);
    const bool quasi_newton = !ss.empty();
    if (!(slope < 0.0)) {
      ss.clear();
      ys.clear();
      rho.clear();
      s.precondition(g, r);
      for (std::size_t i = 0; i < n; ++i) d[i] = -r[i];
      s.project(d);
      slope = inner(g, d);
    }
    if (quasi_newton) t = 1.0;
    // No node may turn by more than about half a radian in one step; longer
    // moves can wind the field around a grid cell and trap a defect.
    t = std::min(t, max_turn / s.largest_component(d));

    for (;;) {
      s.trial(t, d);
      const double de = s.difference();
      if (de < 0.0 && de <= opts.armijo * t * slope) {
        s.accept();
        rep.energy_trace.push_back(rep.energy_trace.back() + de);
        break;
      }
      t *= opts.backtracking;
      if (t < 1e-16 * opts.initial_step)
        throw StagnationError("line search step underflow after " + std::to_string(it) + " iterations");
    }
    g_prev = g;
    have_prev = true;
    if (!quasi_newton) t = std::min(2.0 * t, 1e3 * opts.initial_step);
  }
  rep.initial_gradient_norm = g0;
  return rep;
}

// Sphere fields are stored as 3n coefficients (m1, m2, m3 per node).
class SphereState {
 public:
  SphereState(const Mesh& mesh, const Params& params, SphereField init)
      : mesh_(mesh),
        params_(params),
        pinned_(pinned_nodes(mesh, params)),
        pre_(mesh, params, pinned_),
        m_(std::move(init)),
        prev_(m_),
        trial_(m_.size()),
        delta_(m_.size()),
        full_grad_(m_.size()),
        tmp_in_(m_.size()),
        tmp_out_(m_.size())
  {
  }

  [[nodiscard]] std::size_t dimension() const { return 3 * m_.size(); }
  [[nodiscard]] double energy_total() const { return energy_sphere_field(mesh_, m_, params_).total; }

  /// Tangential gradient; zero on pinned nodes.
  void gradient(std::span<double> g)
  {
    energy_gradient(mesh_, m_, params_, full_grad_);
    for (std::size_t i = 0; i < m_.size(); ++i) {
      Vec3 gt{};
      if (!pinned_[i]) gt = full_grad_[i] - dot(full_grad_[i], m_[i]) * m_[i];
      for (int c = 0; c < 3; ++c) g[3 * i + c] = gt[c];
    }
  }

  /// Area-weighted L^2 norm of the gradient density g_i / w_i.
  [[nodiscard]] double gradient_norm(std::span<const double> g) const
  {
    const auto w = mesh_.area_weights();
    std::vector<double> terms(m_.size());
    for (std::size_t i = 0; i < m_.size(); ++i)
      terms[i] = (g[3 * i] * g[3 * i] + g[3 * i + 1] * g[3 * i + 1] + g[3 * i + 2] * g[3 * i + 2]) / w[i];
    return std::sqrt(pairwise_sum(terms));
  }

  void precondition(std::span<const double> in, std::span<double> out)
  {
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < m_.size(); ++i) tmp_in_[i] = in[3 * i + c];
      pre_.solve(tmp_in_, tmp_out_);
      for (std::size_t i = 0; i < m_.size(); ++i) out[3 * i + c] = tmp_out_[i];
    }
  }

  void project(std::span<double> v) const
  {
    for (std::size_t i = 0; i < m_.size(); ++i) {
      if (pinned_[i]) {
        v[3 * i] = v[3 * i + 1] = v[3 * i + 2] = 0.0;
        continue;
      }
      const double p = v[3 * i] * m_[i][0] + v[3 * i + 1] * m_[i][1] + v[3 * i + 2] * m_[i][2];
      for (int c = 0; c < 3; ++c) v[3 * i + c] -= p * m_[i][c];
    }
  }

  [[nodiscard]] double largest_component(std::span<const double> d) const
  {
    double mx = 1e-300;
    for (std::size_t i = 0; i < m_.size(); ++i)
      mx = std::max(mx, std::sqrt(d[3 * i] * d[3 * i] + d[3 * i + 1] * d[3 * i + 1] + d[3 * i + 2] * d[3 * i + 2]));
    return mx;
  }

  /// Trial point normalize(m + t d).  The increment delta is formed in closed
  /// form, (t d - t^2|d|^2/(1+s) m)/s with s = sqrt(1 + t^2|d|^2), so the
  /// energy change can be evaluated without rounding noise from the stored
  /// unit vectors.
  void trial(double t, std::span<const double> d)
  {
    for (std::size_t i = 0; i < m_.size(); ++i) {
      if (pinned_[i]) {
        delta_[i] = Vec3{};
        trial_[i] = m_[i];
        continue;
      }
      const Vec3 td{t * d[3 * i], t * d[3 * i + 1], t * d[3 * i + 2]};
      const double q2 = dot(td, td);
      const double sq = std::sqrt(1.0 + q2);
      delta_[i] = (1.0 / sq) * (td - (q2 / (1.0 + sq)) * m_[i]);
      trial_[i] = normalized(m_[i] + td);
    }
  }

  /// E(m + delta) - E(m) = Q(delta) + <grad E(m), delta> for the quadratic E.
  [[nodiscard]] double difference() const
  {
    std::vector<double> terms;
    terms.reserve(mesh_.edges().size() + 2 * m_.size());
    for (const Edge& e : mesh_.edges()) {
      const Vec3 dd = delta_[e.a] - delta_[e.b];
      terms.push_back(e.coupling * dot(dd, dd));
    }
    const auto w = mesh_.area_weights();
    const double k2 = params_.kappa2();
    for (std::size_t i = 0; i < m_.size(); ++i)
      terms.push_back(k2 * w[i] * delta_[i][2] * delta_[i][2] + dot(full_grad_[i], delta_[i]));
    if (const double alpha = params_.boundary_weight(); alpha > 0.0) {
      const auto l = mesh_.arc_weights();
      for (std::size_t b : mesh_.boundary())
        terms.push_back(alpha * l[b] * (delta_[b][0] * delta_[b][0] + delta_[b][1] * delta_[b][1]));
    }
    return pairwise_sum(terms);
  }

  void accept()
  {
    prev_ = m_;
    std::swap(m_, trial_);
  }

  /// Last accepted displacement projected onto the current tangent spaces.
  void displacement(std::span<double> out) const
  {
    for (std::size_t i = 0; i < m_.size(); ++i)
      for (int c = 0; c < 3; ++c) out[3 * i + c] = m_[i][c] - prev_[i][c];
    project(out);
  }

  SphereField& field() { return m_; }

 private:
  const Mesh& mesh_;
  Params params_;
  std::vector<char> pinned_;
  Preconditioner pre_;
  SphereField m_, prev_, trial_;
  std::vector<Vec3> delta_, full_grad_;
  std::vector<double> tmp_in_, tmp_out_;
};

class PhaseState {
 public:
  PhaseState(const Mesh& mesh, const Params& params, PhaseField init)
      : mesh_(mesh),
        params_(params),
        pinned_(pinned_nodes(mesh, params)),
        pre_(mesh, params, pinned_),
        psi_(std::move(init)),
        prev_(psi_),
        trial_(psi_.size())
  {
  }

  [[nodiscard]] std::size_t dimension() const { return psi_.size(); }
  [[nodiscard]] double energy_total() const { return energy_phase(mesh_, psi_, params_).total; }

  void gradient(std::span<double> g)
  {
    phase_energy_gradient(mesh_, psi_, params_, g);
    for (std::size_t i = 0; i < psi_.size(); ++i)
      if (pinned_[i]) g[i] = 0.0;
  }

  [[nodiscard]] double gradient_norm(std::span<const double> g) const
  {
    const auto w = mesh_.area_weights();
    std::vector<double> terms(psi_.size());
    for (std::size_t i = 0; i < psi_.size(); ++i) terms[i] = g[i] * g[i] / w[i];
    return std::sqrt(pairwise_sum(terms));
  }

  void precondition(std::span<const double> in, std::span<double> out) { pre_.solve(in, out); }

  void project(std::span<double> v) const
  {
    for (std::size_t i = 0; i < psi_.size(); ++i)
      if (pinned_[i]) v[i] = 0.0;
  }

  [[nodiscard]] double largest_component(std::span<const double> d) const
  {
    double mx = 1e-300;
    for (double x : d) mx = std::max(mx, std::abs(x));
    return mx;
  }

  void trial(double t, std::span<const double> d)
  {
    for (std::size_t i = 0; i < psi_.size(); ++i) trial_[i] = psi_[i] + t * d[i];
  }

  [[nodiscard]] double difference() const { return phase_energy_difference(mesh_, psi_, trial_, params_); }

  void accept()
  {
    prev_ = psi_;
    std::swap(psi_, trial_);
  }

  void displacement(std::span<double> out) const
  {
    for (std::size_t i = 0; i < psi_.size(); ++i) out[i] = psi_[i] - prev_[i];
  }

  PhaseField& field() { return psi_; }

 private:
  const Mesh& mesh_;
  Params params_;
  std::vector<char> pinned_;
  Preconditioner pre_;
  PhaseField psi_, prev_, trial_;
};

}  // namespace detail

/// Initial sphere field for the given options (Dirichlet pinning not applied).
inline SphereField initial_sphere_field(const Mesh& mesh, const SolveOptions& opts)
{
  SphereField m(mesh.size());
  switch (opts.init) {
    case InitKind::constant_e3: std::fill(m.begin(), m.end(), e3); break;
    case InitKind::constant_inplane: std::fill(m.begin(), m.end(), e1); break;
    case InitKind::random_uniform: m = detail::random_smooth_field(mesh, opts.rng_seed); break;
    case InitKind::radial_seed:
      for (std::size_t i = 0; i < m.size(); ++i) {
        const double a = detail::radial_seed_angle(mesh, i);
        m[i] = {std::sin(a), 0.0, std::cos(a)};
      }
      break;
    case InitKind::file: {
      m = load_field_binary(opts.init_file);
      detail::check_size(mesh, m.size(), "initial field");
      for (auto& v : m) v = normalized(v);
      break;
    }
  }
  return m;
}

inline PhaseField initial_phase_field(const Mesh& mesh, const SolveOptions& opts)
{
  PhaseField psi(mesh.size());
  switch (opts.init) {
    case InitKind::constant_e3: std::fill(psi.begin(), psi.end(), 0.0); break;
    case InitKind::constant_inplane: std::fill(psi.begin(), psi.end(), 0.5 * std::numbers::pi); break;
    case InitKind::random_uniform: {
      std::mt19937_64 rng(opts.rng_seed);
      std::uniform_real_distribution<double> u(0.0, 0.5 * std::numbers::pi);
      for (auto& v : psi) v = u(rng);
      break;
    }
    case InitKind::radial_seed:
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = detail::radial_seed_angle(mesh, i);
      break;
    case InitKind::file: {
      const SphereField m = initial_sphere_field(mesh, opts);
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::atan2(std::hypot(m[i][0], m[i][1]), m[i][2]);
      break;
    }
  }
  return psi;
}

inline SolveResult<SphereField> minimize_sphere_field(const Mesh& mesh, const Params& params,
                                                      const SolveOptions& opts, SphereField init)
{
  params.validate();
  opts.validate();
  detail::check_size(mesh, init.size(), "initial field");
  if (opts.init == InitKind::random_uniform && !(params.boundary_weight() > 0.0 && params.boundary_weight() <= 1.0)) {
    // Stiff boundaries freeze patches of +e3 and -e3 along the rim, and the
    // walls between them pinch off into lattice-pinned defects.  Relaxing
    // first against a soft boundary (gamma = 1) lets them leave the domain.
    Params soft = params;
    soft.gamma = 1.0;
    soft.boundary_term = true;
    SolveOptions pre = opts;
    pre.relative_tolerance = 1e-3;
    pre.max_iterations = std::min<std::size_t>(opts.max_iterations, 500);
    detail::SphereState warm(mesh, soft, std::move(init));
    detail::descend(warm, pre);
    init = std::move(warm.field());
    // Then start the rim at the pole it leans towards.
    std::vector<double> m3(init.size());
    for (std::size_t i = 0; i < m3.size(); ++i) m3[i] = init[i][2];
    const Vec3 pole = integrate_boundary(mesh, m3) < 0.0 ? Vec3{0.0, 0.0, -1.0} : e3;
    for (std::size_t b : mesh.boundary()) init[b] = pole;
  }
  if (params.dirichlet())
    for (std::size_t b : mesh.boundary()) init[b] = e3;

  detail::SphereState state(mesh, params, std::move(init));
  SolveResult<SphereField> out;
  out.report = detail::descend(state, opts);
  out.field = std::move(state.field());
  out.report.energy = energy_sphere_field(mesh, out.field, params);
  out.report.residual = el_residual(mesh, out.field, params);
  out.report.classification =
      out.report.converged ? classify_field(out.field) : Classification::non_converged;
  return out;
}

inline SolveResult<SphereField> minimize_sphere_field(const Mesh& mesh, const Params& params,
                                                      const SolveOptions& opts)
{
  return minimize_sphere_field(mesh, params, opts, initial_sphere_field(mesh, opts));
}

/// Discrete residuals of  Laplacian(2 psi) + kappa^2 sin(2 psi) = 0  (interior)
/// and of  d_n psi + sin(2 psi) / (2 gamma^2) = 0  (boundary, gamma > 0) or
/// sin(psi) = 0 (gamma = 0).
inline ElResidual phase_el_residual(const Mesh& mesh, std::span<const double> psi, const Params& params)
{
  std::vector<double> kpsi(mesh.size(), 0.0);
  for (const Edge& e : mesh.edges()) {
    const double d = e.coupling * (psi[e.a] - psi[e.b]);
    kpsi[e.a] += d;
    kpsi[e.b] -= d;
  }
  const auto w = mesh.area_weights();
  std::vector<double> terms;
  for (std::size_t k : mesh.interior()) {
    const double r = -2.0 * kpsi[k] / w[k] + params.kappa2() * std::sin(2.0 * psi[k]);
    terms.push_back(w[k] * r * r);
  }
  ElResidual out;
  out.interior = std::sqrt(pairwise_sum(terms));

  terms.clear();
  SphereField wrapped(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) wrapped[i] = {psi[i], 0.0, 0.0};
  const auto l = mesh.arc_weights();
  for (std::size_t b : mesh.boundary()) {
    double r;
    if (params.dirichlet()) {
      r = std::sin(psi[b]);
    } else {
      const auto dn = detail::normal_derivative(mesh, wrapped, b);
      if (!dn) continue;
      r = (*dn)[0] + 0.5 * params.boundary_weight() * std::sin(2.0 * psi[b]);
    }
    terms.push_back(l[b] * r * r);
  }
  out.boundary = std::sqrt(pairwise_sum(terms));
  return out;
}

inline SolveResult<PhaseField> minimize_phase(const Mesh& mesh, const Params& params, const SolveOptions& opts,
                                              PhaseField init)
{
  params.validate();
  opts.validate();
  detail::check_size(mesh, init.size(), "initial phase");
  if (params.dirichlet())
    for (std::size_t b : mesh.boundary()) init[b] = 0.0;

  detail::PhaseState state(mesh, params, std::move(init));
  SolveResult<PhaseField> out;
  out.report = detail::descend(state, opts);
  out.field = std::move(state.field());
  out.report.energy = energy_phase(mesh, out.field, params);
  out.report.residual = phase_el_residual(mesh, out.field, params);
  if (out.report.converged) {
    std::vector<double> m3(out.field.size());
    for (std::size_t i = 0; i < m3.size(); ++i) m3[i] = std::cos(out.field[i]);
    out.report.classification = classify_m3(m3);
  }
  return out;
}

inline SolveResult<PhaseField> minimize_phase(const Mesh& mesh, const Params& params, const SolveOptions& opts)
{
  return minimize_phase(mesh, params, opts, initial_phase_field(mesh, opts));
}

/// [E(other) - E(base)] - [sum_e c m1_a m1_b |u_a - u_b|^2 + kappa^2 int (v.e3)^2]
/// with v = other - base and u = v / m1.  `base` must be a critical point with
/// m1 > 0 at interior nodes; both fields must agree on the boundary.
inline double stability_gap(const Mesh& mesh, std::span<const Vec3> base, std::span<const Vec3> other,
                            const Params& params)
{
  params.validate();
  detail::check_size(mesh, base.size(), "base field");
  detail::check_size(mesh, other.size(), "other field");
  for (std::size_t b : mesh.boundary())
    if (norm(other[b] - base[b]) > 1e-12) throw ValidationError("fields differ on the boundary");
  for (std::size_t k : mesh.interior())
    if (!(base[k][0] > 0.0)) throw ValidationError("base field needs m1 > 0 at every interior node");

  std::vector<Vec3> u(mesh.size(), Vec3{});
  for (std::size_t k : mesh.interior()) u[k] = (1.0 / base[k][0]) * (other[k] - base[k]);

  std::vector<double> terms;
  terms.reserve(mesh.edges().size() + mesh.size());
  for (const Edge& e : mesh.edges()) {
    const Vec3 d = u[e.a] - u[e.b];
    terms.push_back(e.coupling * base[e.a][0] * base[e.b][0] * dot(d, d));
  }
  const auto w = mesh.area_weights();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double v3 = other[i][2] - base[i][2];
    terms.push_back(params.kappa2() * w[i] * v3 * v3);
  }
  const double lower = pairwise_sum(terms);
  return energy_difference(mesh, base, other, params) - lower;
}

}  // namespace s2lab
