#pragma once

#include "mddl/core.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <memory>

namespace mddl::cs {

/// How the penalty weight mu is derived from ||A^T b||_inf.
enum class MuRule {
  Scaled,   ///< mu = 0.001 ||A^T b||_inf
  Floored,  ///< mu = max(2^-7, 0.001 ||A^T b||_inf)
};

/// Sparse recovery instance b = A x_true + w.
struct CsInstance {
  Matrix a;  // m x n, i.i.d. standard normal
  Vector b;
  Vector x_true;
  int m = 0;
  int n = 0;
  int k = 0;
  double mu = 0.0;
  double lambda = 0.0;
  double noise_std = 0.1;
  std::uint64_t seed = 0;
};

/// Huber smoothing of |u|: u^2/(2 lambda) below lambda, |u| - lambda/2 above.
double huber_value(double u, double lambda);
/// Derivative of huber_value: u/lambda below lambda, sgn(u) above.
double huber_grad_component(double u, double lambda);

/// Draws an instance. Order of draws from Xoshiro256(seed): A row by row,
/// the k support positions (partial Fisher-Yates), the k nonzero values,
/// then the m noise samples. Requires 0 <= k < m < n.
CsInstance generate_instance(int m, int n, int k, std::uint64_t seed,
                             MuRule mu_rule = MuRule::Scaled,
                             double noise_std = 0.1);

/// f(x) = 1/2 ||Ax - b||^2 + mu * sum_i huber(|x_i|), with gradient
/// A^T (Ax - b) + mu * grad huber. A^T A is never formed.
class SmoothedObjective final : public Problem {
 public:
  explicit SmoothedObjective(std::shared_ptr<const CsInstance> instance);

  std::size_t dimension() const override;
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double value_and_gradient(const Vector& x, Vector& grad) const override;

  const CsInstance& instance() const { return *inst_; }

 private:
  std::shared_ptr<const CsInstance> inst_;
};

/// (1/n) sum (x_i - ref_i)^2. Throws Error(LengthMismatch).
double mse(const Vector& x, const Vector& x_ref);

/// ||x_recovered - x_true|| / ||x_true||. Throws Error(ZeroReference).
double rel_err(const Vector& x_recovered, const Vector& x_true);

inline constexpr double kMseTarget = 1e-5;

struct Recovery {
  SolveResult result;
  double mse = 0.0;
  double rel_err = 0.0;  // NaN when x_true = 0
  // One entry per completed iteration, measured at x_1, x_2, ...
  std::vector<double> mse_series;
  std::vector<double> rel_err_series;
};

/// Minimizes the smoothed objective from x0 = A^T b until
/// mse(x, x_true) <= mse_target.
Recovery recover(const CsInstance& instance, const SolverParams& params,
                 double mse_target = kMseTarget);

/// {m, n, k, seed, A (row-major, flat), b, x_true, mu, lambda, noise_std}.
nlohmann::json to_json(const CsInstance& instance);
CsInstance instance_from_json(const nlohmann::json& doc);

/// CSV with header `index,true,recovered`.
void write_signal_csv(std::ostream& out, const Vector& x_true,
                      const Vector& x_recovered);

}  // namespace mddl::cs
