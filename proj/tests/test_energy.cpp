#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "s2lab/energy.hpp"
#include "s2lab/symmetry.hpp"
#include "support.hpp"

using namespace s2lab;
using s2test::rel;

namespace {

constexpr double pi = std::numbers::pi;

const Mesh& unit_disk()
{
  static const Mesh m = build_disk_mesh(16, 32, 1.0);
  return m;
}

}  // namespace

TEST(SphereEnergy, ConstantUp)
{
  const SphereField m(unit_disk().size(), e3);
  const auto e = energy_sphere_field(unit_disk(), m, Params{2.0, 1.0});
  EXPECT_NEAR(e.total, 4.0 * pi, 1e-12);
  EXPECT_EQ(e.dirichlet, 0.0);
  EXPECT_EQ(e.boundary, 0.0);
}

TEST(SphereEnergy, ConstantInPlane)
{
  const SphereField m(unit_disk().size(), e1);
  const auto e = energy_sphere_field(unit_disk(), m, Params{2.0, 0.5});
  EXPECT_NEAR(e.total, 8.0 * pi, 1e-12);
  EXPECT_EQ(e.dirichlet, 0.0);
  EXPECT_EQ(e.anisotropy, 0.0);
}

TEST(SphereEnergy, BreakdownSumsAndIsNonnegative)
{
  std::mt19937_64 rng(3);
  const auto m = s2test::random_unit_field(unit_disk().size(), rng);
  const auto e = energy_sphere_field(unit_disk(), m, Params{1.3, 0.7});
  EXPECT_GE(e.dirichlet, 0.0);
  EXPECT_GE(e.anisotropy, 0.0);
  EXPECT_GE(e.boundary, 0.0);
  EXPECT_NEAR(e.total, e.dirichlet + e.anisotropy + e.boundary, 1e-12 * e.total);
}

TEST(SphereEnergy, DirichletModeRejectsFreeBoundary)
{
  SphereField m(unit_disk().size(), e3);
  EXPECT_NO_THROW(energy_sphere_field(unit_disk(), m, Params{1.0, 0.0}));
  for (std::size_t b : unit_disk().boundary()) m[b] = Vec3{0.0, 0.0, -1.0};
  EXPECT_NO_THROW(energy_sphere_field(unit_disk(), m, Params{1.0, 0.0}));
  m[unit_disk().boundary()[3]] = e1;
  EXPECT_THROW(energy_sphere_field(unit_disk(), m, Params{1.0, 0.0}), DirichletViolation);
}

TEST(PhaseEnergy, Constants)
{
  const Mesh& m = unit_disk();
  EXPECT_NEAR(energy_phase(m, PhaseField(m.size(), 0.0), Params{1.0, 1.0}).total, pi, 1e-12);
  EXPECT_NEAR(energy_phase(m, PhaseField(m.size(), pi / 2), Params{3.0, 0.5}).total, 8.0 * pi, 1e-12);
}

TEST(PhaseEnergy, LinearPhaseDirichletIntegral)
{
  // psi = x on the unit square with the boundary term switched off.  Each
  // x-edge contributes 4 sin^2(h/2) / h^2 times its face length; the y-edges
  // contribute nothing, so the sum is 4 sin^2(h/2) / h^2 = 1 - h^2/12 + ...
  const std::size_t n = 200;
  const Mesh m = build_rectangle_mesh(n, n, 1.0, 1.0);
  PhaseField psi(m.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = m.nodes()[i].x;
  Params p{0.0, 1.0};
  p.boundary_term = false;
  const auto e = energy_phase(m, psi, p);
  const double h = 1.0 / n;
  const double s = std::sin(h / 2);
  EXPECT_NEAR(e.dirichlet, 4.0 * s * s / (h * h), 1e-12);
  EXPECT_NEAR(e.dirichlet, 1.0, h * h / 12.0 * 1.01);
  EXPECT_EQ(e.boundary, 0.0);
}

TEST(PhaseEnergy, DirichletModeRejectsNonzeroBoundary)
{
  PhaseField psi(unit_disk().size(), 0.0);
  EXPECT_NO_THROW(energy_phase(unit_disk(), psi, Params{1.0, 0.0}));
  psi[unit_disk().boundary()[0]] = 0.1;
  EXPECT_THROW(energy_phase(unit_disk(), psi, Params{1.0, 0.0}), DirichletViolation);
}

TEST(PhaseEnergy, MatchesSphereEnergyOfMeridianField)
{
  for (const Mesh& m : {unit_disk(), build_rectangle_mesh(12, 9, 1.5, 1.0)}) {
    for (int k = 0; k < 5; ++k) {
      const PhaseField psi = s2test::smooth_phase(m, 0.3 * k, 0.7, -0.4 * k, 1.1);
      const Params p{0.5 + k, 0.2 + 0.3 * k};
      const auto a = energy_phase(m, psi, p);
      const auto b = energy_sphere_field(m, meridian_field(psi), p);
      EXPECT_LT(rel(b.total, a.total), 1e-10);
      EXPECT_LT(rel(b.dirichlet, a.dirichlet), 1e-10);
    }
  }
}

TEST(LocalizedEnergy, FullEmptyAndComplementary)
{
  const Mesh& m = unit_disk();
  const PhaseField psi = s2test::smooth_phase(m, 0.2, 0.5, 0.3, 0.8);
  const Params p{1.7, 0.6};
  const auto global = energy_phase(m, psi, p);

  const auto full = localized_energy_phase(m, psi, p, std::vector<char>(m.size(), 1));
  EXPECT_NEAR(full.total, global.total, 1e-12 * global.total);

  const auto none = localized_energy_phase(m, psi, p, std::vector<char>(m.size(), 0));
  EXPECT_EQ(none.total, 0.0);

  std::vector<char> left(m.size()), right(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    left[i] = m.nodes()[i].x < 0.1;
    right[i] = !left[i];
  }
  const auto a = localized_energy_phase(m, psi, p, left);
  const auto b = localized_energy_phase(m, psi, p, right);
  EXPECT_NEAR(a.dirichlet + b.dirichlet, global.dirichlet, 1e-12 * global.total);
  EXPECT_NEAR(a.anisotropy + b.anisotropy, global.anisotropy, 1e-12 * global.total);
  EXPECT_NEAR(a.boundary + b.boundary, global.boundary, 1e-12 * global.total);
  EXPECT_NEAR(a.total + b.total, global.total, 1e-12 * global.total);
}

TEST(ConstantStates, Examples)
{
  auto a = constant_state_energies(unit_disk(), Params{2.0, 1.0});
  EXPECT_NEAR(a.e3_energy, 4 * pi, 1e-12);
  EXPECT_NEAR(*a.inplane_energy, 2 * pi, 1e-12);
  a = constant_state_energies(unit_disk(), Params{0.0, 0.1});
  EXPECT_EQ(a.e3_energy, 0.0);
  EXPECT_NEAR(*a.inplane_energy, 200 * pi, 1e-9);
  a = constant_state_energies(build_rectangle_mesh(4, 4, 1, 1), Params{1.0, 2.0});
  EXPECT_NEAR(a.e3_energy, 1.0, 1e-15);
  EXPECT_NEAR(*a.inplane_energy, 1.0, 1e-15);
  EXPECT_FALSE(constant_state_energies(unit_disk(), Params{1.0, 0.0}).inplane_energy.has_value());
}

TEST(ElResidual, ConstantStatesAreStationary)
{
  for (const Mesh& m : {unit_disk(), build_rectangle_mesh(10, 8, 1.0, 0.8)}) {
    for (const Params& p : {Params{0.5, 0.3}, Params{2.0, 1.0}, Params{3.0, 4.0}}) {
      const auto up = el_residual(m, SphereField(m.size(), e3), p);
      EXPECT_LE(up.interior, 1e-12);
      EXPECT_LE(up.boundary, 1e-12);
      const auto flat = el_residual(m, SphereField(m.size(), e1), p);
      EXPECT_LE(flat.interior, 1e-12);
      EXPECT_LE(flat.boundary, 1e-12);
    }
  }
}

TEST(Symmetry, QuarterTurnMapsE1ToE2)
{
  const SphereField m(10, e1);
  for (const Vec3& v : apply_symmetry(m, Symmetry::rotation(pi / 2))) {
    EXPECT_NEAR(v[0], 0.0, 1e-15);
    EXPECT_NEAR(v[1], 1.0, 1e-15);
    EXPECT_EQ(v[2], 0.0);
  }
}

TEST(Symmetry, IdentityLeavesFieldUnchanged)
{
  std::mt19937_64 rng(1);
  const auto m = s2test::random_unit_field(50, rng);
  EXPECT_EQ(apply_symmetry(m, Symmetry()), m);
}

TEST(Symmetry, RejectsMapsOutsideGroup)
{
  EXPECT_THROW(Symmetry::from_matrix({{{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}}), ValidationError);
  EXPECT_THROW(Symmetry::from_matrix({{{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}}), ValidationError);
  EXPECT_NO_THROW(Symmetry::from_matrix({{{0, 1, 0}, {1, 0, 0}, {0, 0, -1}}}));
}

TEST(Symmetry, EnergyInvariance)
{
  std::mt19937_64 rng(11);
  const Mesh& m = unit_disk();
  const Params p{1.9, 0.4};
  for (int k = 0; k < 100; ++k) {
    const auto f = s2test::random_unit_field(m.size(), rng);
    const auto sigma = s2test::random_symmetry(rng);
    const double a = energy_sphere_field(m, f, p).total;
    const double b = energy_sphere_field(m, apply_symmetry(f, sigma), p).total;
    EXPECT_LT(rel(b, a), 1e-12);
  }
}

TEST(Symmetry, UnitNormPreserved)
{
  std::mt19937_64 rng(12);
  const auto f = s2test::random_unit_field(200, rng);
  for (int k = 0; k < 10; ++k)
    for (const Vec3& v : apply_symmetry(f, s2test::random_symmetry(rng))) EXPECT_NEAR(norm(v), 1.0, 1e-15);
}

TEST(Folding, LowerHemisphereFieldFoldsToItsReflection)
{
  // With m3 < 0 everywhere, folding along e3 is the e3-reflection.
  const Mesh& m = unit_disk();
  PhaseField psi = s2test::smooth_phase(m, 2.2, 0.2, 0.3, 0.4);
  const SphereField f = meridian_field(psi);
  const SphereField folded = fold_positive(f, Axis::e3);
  for (const Vec3& v : folded) EXPECT_GE(v[2], 0.0);
  const Params p{2.0, 0.5};
  EXPECT_LT(rel(energy_sphere_field(m, folded, p).total, energy_sphere_field(m, f, p).total), 1e-12);
}

TEST(Folding, EnergyInvariantAlongEachAxisWithoutSignChanges)
{
  const Mesh& m = unit_disk();
  const Params p{1.4, 0.8};
  // Components of one sign on every node: exact invariance on each axis.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int axis = 0; axis < 3; ++axis) {
    SphereField f(m.size());
    for (auto& v : f) {
      v = normalized(Vec3{g(rng), g(rng), g(rng)});
      v[static_cast<std::size_t>(axis)] = -std::abs(v[static_cast<std::size_t>(axis)]) - 1e-3;
      v = normalized(v);
    }
    const auto folded = fold_positive(f, static_cast<Axis>(axis));
    EXPECT_LT(rel(energy_sphere_field(m, folded, p).total, energy_sphere_field(m, f, p).total), 1e-12);
  }
}

TEST(Folding, NeverIncreasesEnergy)
{
  std::mt19937_64 rng(6);
  const Mesh& m = unit_disk();
  const Params p{1.4, 0.8};
  for (int k = 0; k < 20; ++k) {
    const auto f = s2test::random_unit_field(m.size(), rng);
    for (Axis a : {Axis::e1, Axis::e2, Axis::e3})
      EXPECT_LE(energy_sphere_field(m, fold_positive(f, a), p).total,
                energy_sphere_field(m, f, p).total * (1 + 1e-12));
  }
}

TEST(Canonicalize, Examples)
{
  const Mesh& m = unit_disk();
  const SphereField down(m.size(), Vec3{0.0, 0.0, -1.0});
  const auto c1 = canonicalize(m, down);
  EXPECT_TRUE(c1.reflected);
  EXPECT_TRUE(c1.applied.flips_e3());
  for (const Vec3& v : c1.field) EXPECT_EQ(v, e3);

  const PhaseField psi = s2test::smooth_phase(m, 0.4, 0.3, 0.0, 0.2);
  SphereField rotated(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) rotated[i] = {0.0, std::sin(psi[i]), std::cos(psi[i])};
  const auto c2 = canonicalize(m, rotated);
  EXPECT_NEAR(c2.rotation_angle, -pi / 2, 1e-14);
  EXPECT_FALSE(c2.reflected);
  const SphereField meridian = meridian_field(psi);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(c2.field[i][k], meridian[i][k], 1e-14);

  const auto c3 = canonicalize(m, meridian);
  EXPECT_EQ(c3.rotation_angle, 0.0);
  EXPECT_FALSE(c3.reflected);
  EXPECT_EQ(c3.field, meridian);
}

TEST(Gradient, MatchesCentralDifferencesAlongTangentDirections)
{
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (const Mesh& m : {unit_disk(), build_rectangle_mesh(9, 7, 1.2, 1.0)}) {
    const Params p{1.7, 0.45};
    const auto f = s2test::random_unit_field(m.size(), rng);
    std::vector<Vec3> grad(m.size());
    energy_gradient(m, f, p, grad);
    for (int k = 0; k < 20; ++k) {
      SphereField v(m.size());
      double slope = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i) {
        const Vec3 r{g(rng), g(rng), g(rng)};
        v[i] = r - dot(r, f[i]) * f[i];
        slope += dot(grad[i], v[i]);
      }
      const double eps = 1e-5;
      SphereField fp(f), fm(f);
      for (std::size_t i = 0; i < m.size(); ++i) {
        fp[i] = f[i] + eps * v[i];
        fm[i] = f[i] - eps * v[i];
      }
      const double fd = (energy_sphere_field(m, fp, p).total - energy_sphere_field(m, fm, p).total) / (2 * eps);
      EXPECT_LT(rel(fd, slope), 1e-6);
    }
  }
}

TEST(Gradient, PhaseGradientMatchesCentralDifferences)
{
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g;
  const Mesh& m = unit_disk();
  const Params p{2.2, 0.3};
  const PhaseField psi = s2test::smooth_phase(m, 0.5, 0.4, -0.2, 0.6);
  std::vector<double> grad(m.size());
  phase_energy_gradient(m, psi, p, grad);
  for (int k = 0; k < 20; ++k) {
    PhaseField v(m.size()), pp(psi), pm(psi);
    double slope = 0.0;
    const double eps = 1e-5;
    for (std::size_t i = 0; i < m.size(); ++i) {
      v[i] = g(rng);
      slope += grad[i] * v[i];
      pp[i] += eps * v[i];
      pm[i] -= eps * v[i];
    }
    const double fd = (energy_phase(m, pp, p).total - energy_phase(m, pm, p).total) / (2 * eps);
    EXPECT_LT(rel(fd, slope), 1e-6);
  }
}

TEST(EnergyDifference, AgreesWithDirectSubtraction)
{
  std::mt19937_64 rng(23);
  const Mesh& m = unit_disk();
  const Params p{1.1, 0.9};
  const auto a = s2test::random_unit_field(m.size(), rng);
  const auto b = s2test::random_unit_field(m.size(), rng);
  const double direct = energy_sphere_field(m, b, p).total - energy_sphere_field(m, a, p).total;
  EXPECT_NEAR(energy_difference(m, a, b, p), direct, 1e-10 * std::abs(direct));
}
