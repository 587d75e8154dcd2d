#pragma once

// Shared fixtures for the test programs.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "s2lab/core.hpp"
#include "s2lab/energy.hpp"
#include "s2lab/mesh.hpp"
#include "s2lab/symmetry.hpp"

namespace s2test {

using namespace s2lab;

/// Nodewise independent unit vectors, uniform on S^2.
inline SphereField random_unit_field(std::size_t n, std::mt19937_64& rng)
{
  std::normal_distribution<double> g;
  SphereField m(n);
  for (auto& v : m) v = normalized(Vec3{g(rng), g(rng), g(rng)});
  return m;
}

/// Random element of O(3,e3): rotation about e3, optionally composed with
/// the in-plane reflection m2 -> -m2 and/or the e3-reflection.
inline Symmetry random_symmetry(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::bernoulli_distribution coin;
  Symmetry s = Symmetry::rotation(angle(rng));
  if (coin(rng)) s = s.compose(Symmetry::from_matrix({{{1, 0, 0}, {0, -1, 0}, {0, 0, 1}}}));
  if (coin(rng)) s = s.compose(Symmetry::e3_reflection());
  return s;
}

/// Smooth test phase psi(x, y) = a + b x + c y + d sin(x) cos(2 y).
inline PhaseField smooth_phase(const Mesh& mesh, double a, double b, double c, double d)
{
  PhaseField psi(mesh.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto p = mesh.nodes()[i];
    psi[i] = a + b * p.x + c * p.y + d * std::sin(p.x) * std::cos(2.0 * p.y);
  }
  return psi;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace s2test
