#pragma once

#include "mddl/core.hpp"

#include <functional>
#include <optional>
#include <span>

namespace mddl {

/// Decides when the iteration stops.
///
/// The default rule is ||grad f(x)||_inf < epsilon with epsilon taken from
/// SolverParams. A custom predicate sees the current iterate and the trace
/// of completed iterations; it replaces the gradient test.
class StoppingRule {
 public:
  using Predicate =
      std::function<bool(const Vector& x, std::span<const IterationRecord> trace)>;

  static StoppingRule grad_inf_norm() { return StoppingRule(); }
  static StoppingRule grad_inf_norm(double epsilon);
  static StoppingRule custom(Predicate predicate);

  bool is_custom() const { return static_cast<bool>(predicate_); }
  /// Overrides SolverParams::epsilon when set.
  std::optional<double> epsilon() const { return epsilon_; }

  bool satisfied(const Vector& x, const Vector& g, double default_epsilon,
                 std::span<const IterationRecord> trace) const;

 private:
  std::optional<double> epsilon_;
  Predicate predicate_;
};

/// Steepest-descent reset used after a failed line search or a degenerate
/// conjugate parameter.
Vector restart_direction(const Vector& g);

/// Minimizes `problem` from `x0` with the spectral conjugate gradient
/// iteration selected by params.beta_rule (MDDLSCG by default).
///
/// Line-search failures and degenerate denominators trigger one reset to
/// d = -g; a second consecutive failure ends the run with
/// TerminationReason::LineSearchFailure. This safeguard is not part of the
/// textbook iteration.
///
/// Throws Error(InvalidArgument) for bad parameters or a wrong-sized x0 and
/// Error(NonFiniteValue) if the problem returns NaN/Inf at an accepted point.
SolveResult minimize(const Problem& problem, const Vector& x0,
                     const SolverParams& params,
                     const StoppingRule& stop = StoppingRule::grad_inf_norm());

}  // namespace mddl
