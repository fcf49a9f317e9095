#pragma once

#include "mddl/core.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>

namespace mddl {

/// f(x, y) = (1.5 - x + xy)^2 + (2.25 - x + xy^2)^2 + (2.625 - x + xy^3)^2.
///
/// Global minimum f(3, 0.5) = 0. The residuals are evaluated with fused
/// multiply-adds and an exact split of y^2, y^3 so that the gradient stays
/// accurate to ~1e-16 relative near the minimizer, where the naive form
/// loses everything to cancellation.
class Beale final : public Problem {
 public:
  std::size_t dimension() const override { return 2; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double value_and_gradient(const Vector& x, Vector& grad) const override;

  static Vector minimizer() { return make_vector({3.0, 0.5}); }
  static Vector standard_start() { return make_vector({1.0, 0.8}); }
};

/// f(x) = 1/2 x^T A x + b^T x with A symmetric positive definite, stored
/// either as its diagonal or as a dense matrix.
class QuadraticProblem final : public Problem {
 public:
  /// Diagonal A; every entry must be finite and > 0.
  QuadraticProblem(Vector diagonal, Vector b);
  /// Dense A; must be symmetric positive definite.
  QuadraticProblem(Matrix a, Vector b);

  std::size_t dimension() const override {
    return static_cast<std::size_t>(b_.size());
  }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double value_and_gradient(const Vector& x, Vector& grad) const override;

  bool is_diagonal() const { return diagonal_.has_value(); }
  const Vector& diagonal() const { return *diagonal_; }
  const Matrix& dense() const { return *dense_; }
  const Vector& b() const { return b_; }
  /// A x, regardless of storage.
  Vector apply(const Vector& x) const;

 private:
  std::optional<Vector> diagonal_;
  std::optional<Matrix> dense_;
  Vector b_;
};

/// The 25-dimensional diagonal instance with its fixed a and b.
QuadraticProblem apq_fixed25();

/// x0 = (1, ..., 1) for apq_fixed25.
Vector apq_fixed25_start();

/// Diagonal entries uniform on [0.5, 10.5], b uniform on [-10, 0].
QuadraticProblem apq_random(std::size_t dim, std::uint64_t seed);

/// Start point uniform on [0, 1)^dim from a stream independent of the
/// instance drawn by apq_random with the same seed.
Vector apq_random_start(std::size_t dim, std::uint64_t seed);

/// -A^{-1} b. Throws Error(SingularMatrix) for a zero diagonal entry.
Vector analytic_minimizer(const QuadraticProblem& problem);
Vector analytic_minimizer(const Vector& diagonal, const Vector& b);

/// {"dim": n, "a": [...], "b": [...]} for diagonal instances; dense ones
/// carry "A" as an array of rows instead of "a".
nlohmann::json to_json(const QuadraticProblem& problem);
QuadraticProblem quadratic_from_json(const nlohmann::json& doc);

}  // namespace mddl
