#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace mddl {

/// Dense column vector used for iterates, gradients and search directions.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorKind {
  InvalidArgument,
  NotDescentDirection,
  MaxEvaluationsExceeded,
  DegenerateStep,
  DegenerateInnerProduct,
  NonFiniteValue,
  SingularMatrix,
  ZeroReference,
  LengthMismatch,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Builds a vector from literal data, rejecting NaN and infinities.
Vector make_vector(std::initializer_list<double> values);
Vector make_vector(const std::vector<double>& values);

bool all_finite(const Vector& v);

/// max_i |v_i|. Requires a nonempty vector.
double inf_norm(const Vector& v);

/// Smooth objective f: R^n -> R.
///
/// Implementations must be immutable after construction so that a single
/// instance can be evaluated from several threads. The convergence theory
/// additionally assumes a bounded level set {f <= f(x0)} and a Lipschitz
/// gradient on a neighbourhood of it; neither is checked here.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  /// Value and gradient in one pass. Override when the two share work.
  virtual double value_and_gradient(const Vector& x, Vector& grad) const {
    grad = gradient(x);
    return value(x);
  }
};

enum class ThetaVariant { R, N };

enum class BetaRule {
  MDDL,  ///< modified descent Dai-Liao (default)
  ZDK,   ///< modified-secant spectral baseline (MSCG)
  HS,    ///< Hestenes-Stiefel
  HZ,    ///< Hager-Zhang
  DL,    ///< classic Dai-Liao with fixed SolverParams::dl_t
};

const char* to_string(ThetaVariant v);
const char* to_string(BetaRule rule);

struct SolverParams {
  double delta = 0.01;   // Armijo constant
  double sigma = 0.1;    // curvature constant
  double eta = 0.001;    // descent margin above 1/(4p) + |q|
  double tau = 10.0;     // upper clamp for theta
  double r = 1.0;        // exponent of ||g|| in the modified secant vector
  double nu = 0.001;
  double p = 0.4;
  double q = 0.2;
  double epsilon = 1e-6;  // stop when ||g||_inf < epsilon
  ThetaVariant theta_variant = ThetaVariant::R;
  BetaRule beta_rule = BetaRule::MDDL;
  double dl_t = 0.1;  // only read by BetaRule::DL
  int max_iterations = 10000;
  int max_line_search_evals = 60;
  bool record_path = false;  // keep every iterate in SolveResult::path

  /// Lower end of the admissible theta interval: 1/(4p) + |q| + eta.
  double theta_lower() const;
};

/// Returns one message per violated constraint; empty means valid.
std::vector<std::string> validate_params(const SolverParams& params);

/// Throws Error(InvalidArgument) listing every violation.
void require_valid(const SolverParams& params);

struct IterationRecord {
  int index = 0;
  double f_value = 0.0;
  double grad_inf_norm = 0.0;
  double step_alpha = 0.0;
  double theta = 1.0;
  double beta = 0.0;
  double wall_time = 0.0;  // seconds since the solve started
  // -<g, d> / ||g||^2 for the direction leaving this iterate.
  double descent_margin = 0.0;
  bool restarted = false;  // direction was reset to -g after this iteration
};

enum class TerminationReason {
  GradientTolerance,
  MaxIterations,
  LineSearchFailure,
  CustomCriterion,
};

const char* to_string(TerminationReason reason);

struct SolveResult {
  Vector final_x;
  double final_f = 0.0;
  double final_grad_inf_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  TerminationReason termination_reason = TerminationReason::MaxIterations;
  std::vector<IterationRecord> trace;
  std::vector<Vector> path;  // x_0, x_1, ... when SolverParams::record_path
  int function_evaluations = 0;
  double wall_time = 0.0;
};

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace mddl
