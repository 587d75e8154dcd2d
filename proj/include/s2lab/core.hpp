#pragma once

// Shared vocabulary for the s2lab headers: small vector type, parameter
// block, error hierarchy and deterministic summation.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace s2lab {

using Vec3 = std::array<double, 3>;

inline constexpr Vec3 e1{1.0, 0.0, 0.0};
inline constexpr Vec3 e2{0.0, 1.0, 0.0};
inline constexpr Vec3 e3{0.0, 0.0, 1.0};

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3 normalized(const Vec3& a)
{
  const double n = norm(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (maps to CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// gamma = 0 with boundary values that are not +-e3.
class DirichletViolation : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to meet its stopping rule (CLI exit code 3).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Backtracking shrank the step below its floor without an energy decrease.
class StagnationError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// A radial shot left the admissible band.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDomain : public Error {
 public:
  using Error::Error;
};

/// Model parameters.  gamma == 0 selects the Dirichlet problem (boundary
/// pinned to +-e3).  `boundary_term = false` drops the boundary integral
/// altogether; it exists only to test the bulk integrands in isolation.
struct Params {
  double kappa = 0.0;
  double gamma = 1.0;
  int dimension = 2;
  bool boundary_term = true;

  static Params from_kappa2(double kappa2, double gamma)
  {
    if (!(kappa2 >= 0.0)) throw ValidationError("kappa^2 must be >= 0");
    return Params{std::sqrt(kappa2), gamma};
  }

  [[nodiscard]] double kappa2() const { return kappa * kappa; }
  [[nodiscard]] bool dirichlet() const { return boundary_term && gamma == 0.0; }
  /// Weight 1/gamma^2 of the boundary integral; 0 when it is absent.
  [[nodiscard]] double boundary_weight() const
  {
    if (!boundary_term || gamma == 0.0) return 0.0;
    return 1.0 / (gamma * gamma);
  }

  void validate() const
  {
    if (!std::isfinite(kappa) || kappa < 0.0) throw ValidationError("kappa must be finite and >= 0");
    if (!std::isfinite(gamma) || gamma < 0.0) throw ValidationError("gamma must be finite and >= 0");
    if (dimension < 1) throw ValidationError("dimension must be >= 1");
  }
};

/// Pairwise (cascade) summation; fixed order, so results are reproducible.
inline double pairwise_sum(std::span<const double> v)
{
  constexpr std::size_t block = 64;
  if (v.size() <= block) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace s2lab
