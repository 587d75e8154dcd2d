#pragma once

// The target-space symmetry group O(3, e3): orthogonal maps sending e3 to
// +-e3.  Such a map is block diagonal, an O(2) block acting on (m1, m2) and a
// sign on m3.

#include <array>
#include <cmath>
#include <span>
#include <string>

#include "s2lab/core.hpp"
#include "s2lab/energy.hpp"
#include "s2lab/mesh.hpp"

namespace s2lab {

enum class Axis { e1 = 0, e2 = 1, e3 = 2 };

class Symmetry {
 public:
  using Matrix = std::array<std::array<double, 3>, 3>;

  Symmetry() = default;

  static Symmetry rotation(double angle)
  {
    const double c = std::cos(angle), s = std::sin(angle);
    return Symmetry(Matrix{{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}});
  }
  /// m3 -> -m3.
  static Symmetry e3_reflection() { return Symmetry(Matrix{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, -1.0}}}); }

  /// Validates that `a` is orthogonal and maps e3 to +-e3.
  static Symmetry from_matrix(const Matrix& a, double tol = 1e-12)
  {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += a[k][i] * a[k][j];
        if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol) throw ValidationError("matrix is not orthogonal");
      }
    if (std::abs(a[0][2]) > tol || std::abs(a[1][2]) > tol || std::abs(std::abs(a[2][2]) - 1.0) > tol)
      throw ValidationError("matrix does not preserve the e3 axis");
    return Symmetry(a);
  }

  [[nodiscard]] const Matrix& matrix() const { return a_; }
  [[nodiscard]] bool flips_e3() const { return a_[2][2] < 0.0; }

  [[nodiscard]] Vec3 apply(const Vec3& v) const
  {
    return {a_[0][0] * v[0] + a_[0][1] * v[1] + a_[0][2] * v[2], a_[1][0] * v[0] + a_[1][1] * v[1] + a_[1][2] * v[2],
            a_[2][0] * v[0] + a_[2][1] * v[1] + a_[2][2] * v[2]};
  }

  /// (this o other)(v) = this(other(v)).
  [[nodiscard]] Symmetry compose(const Symmetry& other) const
  {
    Matrix c{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) c[i][j] += a_[i][k] * other.a_[k][j];
    return Symmetry(c);
  }

 private:
  explicit Symmetry(const Matrix& a) : a_(a) {}
  Matrix a_{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
};

inline SphereField apply_symmetry(std::span<const Vec3> field, const Symmetry& sigma)
{
  SphereField out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = sigma.apply(field[i]);
  return out;
}

/// Replaces the chosen component by its absolute value.
inline SphereField fold_positive(std::span<const Vec3> field, Axis axis)
{
  const auto k = static_cast<std::size_t>(axis);
  SphereField out(field.begin(), field.end());
  for (auto& v : out) v[k] = std::abs(v[k]);
  return out;
}

struct Canonical {
  SphereField field;
  Symmetry applied;
  double rotation_angle = 0.0;
  bool reflected = false;
};

/// Picks the representative of the O(3,e3)-orbit whose area-weighted mean has
/// m3 >= 0 and an in-plane part along +e1.  A vanishing in-plane mean
/// (< 1e-12) leaves the rotation at the identity.
inline Canonical canonicalize(const Mesh& mesh, std::span<const Vec3> field)
{
  detail::check_size(mesh, field.size(), "field");
  const auto w = mesh.area_weights();
  std::vector<double> t1(field.size()), t2(field.size()), t3(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    t1[i] = w[i] * field[i][0];
    t2[i] = w[i] * field[i][1];
    t3[i] = w[i] * field[i][2];
  }
  const double area = pairwise_sum(w);
  const double mx = pairwise_sum(t1) / area, my = pairwise_sum(t2) / area, mz = pairwise_sum(t3) / area;

  Canonical c;
  Symmetry sigma;
  if (mz < 0.0) {
    sigma = Symmetry::e3_reflection();
    c.reflected = true;
  }
  if (std::hypot(mx, my) >= 1e-12) {
    c.rotation_angle = -std::atan2(my, mx);
    sigma = Symmetry::rotation(c.rotation_angle).compose(sigma);
  }
  c.field = apply_symmetry(field, sigma);
  c.applied = sigma;
  return c;
}

}  // namespace s2lab
