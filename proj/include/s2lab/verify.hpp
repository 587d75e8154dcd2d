#pragma once

// Executable checks on computed minimizers: meridian form, sign constancy of
// components, radial symmetry, coincidence up to O(3,e3), ordering of radial
// solutions in the parameters, and a (kappa, gamma) phase-diagram sweep.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "s2lab/constants.hpp"
#include "s2lab/core.hpp"
#include "s2lab/energy.hpp"
#include "s2lab/field_io.hpp"
#include "s2lab/mesh.hpp"
#include "s2lab/minimize.hpp"
#include "s2lab/radial.hpp"
#include "s2lab/symmetry.hpp"

namespace s2lab {

namespace detail {

inline double weighted_l2(const Mesh& mesh, std::span<const double> sq)
{
  return std::sqrt(integrate(mesh, sq));
}

}  // namespace detail

/// ||m2|| / ||(m1, m2)|| in area-weighted L^2 after canonicalization; 0 when
/// the in-plane part is below 1e-12 everywhere.
inline double meridian_deviation(const Mesh& mesh, std::span<const Vec3> field)
{
  const SphereField m = canonicalize(mesh, field).field;
  std::vector<double> m2(m.size()), plane(m.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    m2[i] = m[i][1] * m[i][1];
    plane[i] = m[i][0] * m[i][0] + m2[i];
    peak = std::max(peak, std::sqrt(plane[i]));
  }
  if (peak < 1e-12) return 0.0;
  return detail::weighted_l2(mesh, m2) / detail::weighted_l2(mesh, plane);
}

struct SignCheck {
  /// One strict sign on all interior nodes, or vanishing (<= 1e-6) there.
  bool constant_sign = false;
  bool vanishes = false;
  /// Smallest interior |component| in the strict-sign case, 0 otherwise.
  double min_abs = 0.0;
};

inline SignCheck sign_consistency(const Mesh& mesh, std::span<const Vec3> field, Axis axis)
{
  detail::check_size(mesh, field.size(), "field");
  const auto k = static_cast<std::size_t>(axis);
  SignCheck c;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool pos = false, neg = false;
  for (std::size_t i : mesh.interior()) {
    const double v = field[i][k];
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
    pos = pos || v > 0.0;
    neg = neg || v < 0.0;
  }
  if (hi <= 1e-6) {
    c.constant_sign = c.vanishes = true;
    return c;
  }
  if (lo > 0.0 && !(pos && neg)) {
    c.constant_sign = true;
    c.min_abs = lo;
  }
  return c;
}

/// sqrt(area-weighted mean over rings of the angular variance of phi),
/// divided by the range of phi; 0 if the range is below 1e-12.
inline double radial_deviation(const Mesh& mesh, std::span<const double> phase)
{
  if (mesh.kind() != MeshKind::disk) throw UnsupportedDomain("radial deviation needs a disk mesh");
  detail::check_size(mesh, phase.size(), "phase");
  const auto [lo, hi] = std::minmax_element(phase.begin(), phase.end());
  const double range = *hi - *lo;
  if (range < 1e-12) return 0.0;

  const auto& d = mesh.disk();
  const auto w = mesh.area_weights();
  std::vector<double> weighted, weights;
  for (std::size_t ring = 1; ring <= d.nr; ++ring) {
    double mean = 0.0;
    for (std::size_t j = 0; j < d.ntheta; ++j) mean += phase[mesh.polar_index(ring, j)];
    mean /= static_cast<double>(d.ntheta);
    double var = 0.0;
    for (std::size_t j = 0; j < d.ntheta; ++j) {
      const double e = phase[mesh.polar_index(ring, j)] - mean;
      var += e * e;
    }
    var /= static_cast<double>(d.ntheta);
    const double ring_area = w[mesh.polar_index(ring, 0)] * static_cast<double>(d.ntheta);
    weighted.push_back(ring_area * var);
    weights.push_back(ring_area);
  }
  return std::sqrt(pairwise_sum(weighted) / pairwise_sum(weights)) / range;
}

/// Polar angle phi = atan2(|(m1, m2)|, m3) in [0, pi].
inline PhaseField lift_phase(std::span<const Vec3> field)
{
  PhaseField phi(field.size());
  for (std::size_t i = 0; i < field.size(); ++i)
    phi[i] = std::atan2(std::hypot(field[i][0], field[i][1]), field[i][2]);
  return phi;
}

/// Area-weighted L^2 distance between two fields.
inline double field_distance(const Mesh& mesh, std::span<const Vec3> a, std::span<const Vec3> b)
{
  detail::check_size(mesh, a.size(), "field");
  detail::check_size(mesh, b.size(), "field");
  std::vector<double> sq(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec3 e = a[i] - b[i];
    sq[i] = dot(e, e);
  }
  return detail::weighted_l2(mesh, sq);
}

/// min over sigma in O(3,e3) of ||sigma(a) - b||: for each of the four sign
/// choices of (m2, m3), a 64-point scan over the rotation angle followed by
/// golden-section refinement.
inline double aligned_distance(const Mesh& mesh, std::span<const Vec3> a, std::span<const Vec3> b)
{
  double best = std::numeric_limits<double>::infinity();
  const Symmetry flips[4] = {
      Symmetry(), Symmetry::from_matrix({{{1, 0, 0}, {0, -1, 0}, {0, 0, 1}}}), Symmetry::e3_reflection(),
      Symmetry::from_matrix({{{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}})};
  for (const Symmetry& f : flips) {
    const SphereField fa = apply_symmetry(a, f);
    auto dist = [&](double th) { return field_distance(mesh, apply_symmetry(fa, Symmetry::rotation(th)), b); };
    constexpr int scan = 64;
    const double step = 2.0 * std::numbers::pi / scan;
    int arg = 0;
    double val = std::numeric_limits<double>::infinity();
    for (int k = 0; k < scan; ++k) {
      const double v = dist(-std::numbers::pi + k * step);
      if (v < val) {
        val = v;
        arg = k;
      }
    }
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = -std::numbers::pi + (arg - 1) * step, hi = -std::numbers::pi + (arg + 1) * step;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = dist(x1), f2 = dist(x2);
    while (hi - lo > 1e-12) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - invphi * (hi - lo);
        f1 = dist(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + invphi * (hi - lo);
        f2 = dist(x2);
      }
    }
    best = std::min({best, val, f1, f2});
  }
  return best;
}

/// Largest pairwise aligned distance between canonicalized fields.
inline double uniqueness_check(const Mesh& mesh, const std::vector<SphereField>& fields)
{
  if (fields.size() < 2) throw ValidationError("uniqueness check needs at least two fields");
  std::vector<SphereField> canon;
  for (const auto& f : fields) canon.push_back(canonicalize(mesh, f).field);
  double worst = 0.0;
  for (std::size_t i = 0; i < canon.size(); ++i)
    for (std::size_t j = i + 1; j < canon.size(); ++j)
      worst = std::max(worst, aligned_distance(mesh, canon[i], canon[j]));
  return worst;
}

enum class Ordering { equal_zero, equal_pi, strict, violated };

inline std::string to_string(Ordering o)
{
  switch (o) {
    case Ordering::equal_zero: return "equal-0";
    case Ordering::equal_pi: return "equal-pi";
    case Ordering::strict: return "strict";
    case Ordering::violated: return "violated";
  }
  return "?";
}

struct Comparison {
  Ordering ordering = Ordering::violated;
  /// min over r < R of phi2 - phi1.
  double min_margin = 0.0;
  /// phi2(R) - phi1(R).
  double boundary_margin = 0.0;
};

/// Orders phi = u/2 of two radial solutions whose parameters satisfy
/// kappa1 <= kappa2, gamma1 <= gamma2, not both equal.  Strict means a margin
/// above 1e-9 at every r < R, and also at r = R when gamma2 > 0.
inline Comparison compare_solutions(const RadialProfile& p1, const RadialProfile& p2)
{
  const Params& a = p1.params;
  const Params& b = p2.params;
  if (p1.radius != p2.radius || p1.dimension != p2.dimension)
    throw ValidationError("profiles live on different balls");
  if (!(a.kappa <= b.kappa && a.gamma <= b.gamma) || (a.kappa == b.kappa && a.gamma == b.gamma))
    throw ValidationError("comparison needs kappa1 <= kappa2, gamma1 <= gamma2 and distinct parameters");

  auto constant = [](const RadialProfile& p, double v) {
    return std::all_of(p.u.begin(), p.u.end(), [v](double x) { return std::abs(x - v) <= 1e-12; });
  };
  Comparison c;
  if (constant(p1, 0.0) && constant(p2, 0.0)) {
    c.ordering = Ordering::equal_zero;
    return c;
  }
  if (constant(p1, std::numbers::pi) && constant(p2, std::numbers::pi)) {
    c.ordering = Ordering::equal_pi;
    return c;
  }
  c.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < p2.u.size(); ++k)
    c.min_margin = std::min(c.min_margin, 0.5 * (p2.u[k] - profile_at(p1, p2.r[k])));
  c.boundary_margin = 0.5 * (p2.u.back() - p1.u.back());
  const bool inside = c.min_margin > 1e-9;
  const bool rim = b.gamma == 0.0 || c.boundary_margin > 1e-9;
  c.ordering = inside && rim ? Ordering::strict : Ordering::violated;
  return c;
}

/// max over nodes of |phi_2D(x) - u(|x|)/2|.
inline double radial_mismatch(const Mesh& mesh, std::span<const double> phase, const RadialProfile& p)
{
  const PhaseField ref = radial_phase_on_mesh(p, mesh);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(phase[i] - ref[i]));
  return worst;
}

// ---------------------------------------------------------------------------
// Phase diagram.

struct PhaseCell {
  double kappa = 0.0;
  double gamma = 0.0;
  Classification classification = Classification::non_converged;
  double e_min = std::numeric_limits<double>::quiet_NaN();
  double e_e3 = 0.0;
  /// +inf in Dirichlet mode.
  double e_inplane = std::numeric_limits<double>::infinity();
  double kappa_gamma = 0.0;
  std::optional<double> gamma_kappa;
  /// Launch value (radial mode) or NaN.
  double u0 = std::numeric_limits<double>::quiet_NaN();
  std::string error;
  /// Least-energy field (2D mode with keep_fields), or empty.
  SphereField field;
};

struct PhaseDiagram {
  std::vector<double> kappa_grid;
  std::vector<double> gamma_grid;
  /// Row-major in gamma: cells[g * kappa_grid.size() + k].
  std::vector<PhaseCell> cells;
  std::vector<std::string> soundness_violations;

  [[nodiscard]] const PhaseCell& at(std::size_t ki, std::size_t gi) const
  {
    return cells[gi * kappa_grid.size() + ki];
  }
};

struct SweepOptions {
  std::size_t seeds = 3;
  std::uint64_t base_seed = 0;
  SolveOptions solve;
  RadialOptions radial;
  std::size_t jobs = 1;
  /// Safety factors of the soundness inclusions.
  double e3_factor = 0.8;
  double inplane_factor = 1.25;
  /// Retain the least-energy field of every 2D cell.
  bool keep_fields = false;
};

namespace detail {

template <class Fn>
void run_cells(std::size_t count, std::size_t jobs, Fn&& fn)
{
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < std::max<std::size_t>(1, jobs); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

inline void check_soundness(PhaseDiagram& d, const SweepOptions& opts)
{
  for (const PhaseCell& c : d.cells) {
    if (!c.error.empty()) continue;
    const std::string where = "kappa=" + format_double(c.kappa) + " gamma=" + format_double(c.gamma);
    if (c.kappa <= opts.e3_factor * c.kappa_gamma && c.classification != Classification::constant_e3)
      d.soundness_violations.push_back(where + ": expected constant-e3, found " + to_string(c.classification));
    if (c.gamma_kappa && c.gamma >= opts.inplane_factor * *c.gamma_kappa &&
        c.classification != Classification::constant_inplane)
      d.soundness_violations.push_back(where + ": expected constant-inplane, found " + to_string(c.classification));
  }
}

inline void check_grids(const std::vector<double>& kappas, const std::vector<double>& gammas)
{
  if (kappas.empty() || gammas.empty()) throw ValidationError("sweep grids must be nonempty");
}

}  // namespace detail

/// Radial sweep on the ball B_R in R^N; one shooting solve per cell.
inline PhaseDiagram phase_diagram_sweep(double radius, int n, const std::vector<double>& kappas,
                                        const std::vector<double>& gammas, const SweepOptions& opts = {})
{
  detail::check_grids(kappas, gammas);
  PhaseDiagram d{kappas, gammas, std::vector<PhaseCell>(kappas.size() * gammas.size()), {}};
  const double volume = sphere_area(n) * std::pow(radius, n) / n;
  const double surface = sphere_area(n) * std::pow(radius, n - 1);
  const double c_omega = n / (2.0 * radius);
  const double c_trace = ball_trace_constant(radius, n);

  detail::run_cells(d.cells.size(), opts.jobs, [&](std::size_t idx) {
    PhaseCell& c = d.cells[idx];
    c.kappa = kappas[idx % kappas.size()];
    c.gamma = gammas[idx / kappas.size()];
    c.e_e3 = c.kappa * c.kappa * volume;
    if (c.gamma > 0.0) c.e_inplane = surface / (c.gamma * c.gamma);
    if (c.gamma == 0.0) {
      c.kappa_gamma = c_omega;
    } else {
      const double delta = std::min(0.5 * c_omega, 1.0 / (c.gamma * c.gamma));
      c.kappa_gamma = std::sqrt(delta * (c_omega - delta));
    }
    if (c.kappa > 0.0) c.gamma_kappa = gamma_threshold(c.kappa, c_trace);
    try {
      const RadialSolution s = solve_radial_bvp(Params{c.kappa, c.gamma, n}, radius, n, opts.radial);
      c.classification = s.classification;
      c.u0 = s.profile.u0;
      c.e_min = radial_energy(s.profile).total;
    } catch (const Error& e) {
      c.error = e.what();
    }
  });
  detail::check_soundness(d, opts);
  return d;
}

/// Two-dimensional sweep: per cell, `opts.seeds` random-start solves plus
/// both constant states; the least energy decides the label.
inline PhaseDiagram phase_diagram_sweep(const Mesh& mesh, const std::vector<double>& kappas,
                                        const std::vector<double>& gammas, const SweepOptions& opts = {})
{
  detail::check_grids(kappas, gammas);
  PhaseDiagram d{kappas, gammas, std::vector<PhaseCell>(kappas.size() * gammas.size()), {}};
  const double c_trace = estimate_trace_constant(mesh).c_trace;

  detail::run_cells(d.cells.size(), opts.jobs, [&](std::size_t idx) {
    PhaseCell& c = d.cells[idx];
    c.kappa = kappas[idx % kappas.size()];
    c.gamma = gammas[idx / kappas.size()];
    const Params params{c.kappa, c.gamma};
    c.kappa_gamma = kappa_threshold(c.gamma, mesh).kappa_gamma;
    if (c.kappa > 0.0) c.gamma_kappa = gamma_threshold(c.kappa, c_trace);
    try {
      const SphereField up(mesh.size(), e3);
      c.e_e3 = energy_sphere_field(mesh, up, params).total;
      c.e_min = c.e_e3;
      c.classification = Classification::constant_e3;
      if (!params.dirichlet()) {
        const SphereField flat(mesh.size(), e1);
        c.e_inplane = energy_sphere_field(mesh, flat, params).total;
        if (c.e_inplane < c.e_min) {
          c.e_min = c.e_inplane;
          c.classification = Classification::constant_inplane;
        }
      }
      for (std::size_t s = 0; s < opts.seeds; ++s) {
        SolveOptions so = opts.solve;
        so.init = InitKind::random_uniform;
        so.rng_seed = opts.base_seed + s;
        const auto r = minimize_sphere_field(mesh, params, so);
        if (!r.report.converged) continue;
        if (r.report.energy.total < c.e_min) {
          c.e_min = r.report.energy.total;
          c.classification = r.report.classification;
          if (opts.keep_fields) c.field = r.field;
        }
      }
      if (opts.keep_fields && c.field.empty())
        c.field.assign(mesh.size(), c.classification == Classification::constant_inplane ? e1 : e3);
    } catch (const Error& e) {
      c.error = e.what();
      c.classification = Classification::non_converged;
    }
  });
  detail::check_soundness(d, opts);
  return d;
}

inline void write_phase_diagram_csv(std::ostream& os, const PhaseDiagram& d)
{
  os << "kappa,gamma,class,E_min,E_e3,E_inplane,kappa_gamma,gamma_kappa\n";
  for (const PhaseCell& c : d.cells) {
    os << format_double(c.kappa) << ',' << format_double(c.gamma) << ',' << to_string(c.classification) << ','
       << format_double(c.e_min) << ',' << format_double(c.e_e3) << ',' << format_double(c.e_inplane) << ','
       << format_double(c.kappa_gamma) << ',' << (c.gamma_kappa ? format_double(*c.gamma_kappa) : "") << '\n';
  }
}

}  // namespace s2lab
