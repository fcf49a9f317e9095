#pragma once

#include "mddl/core.hpp"

namespace mddl {

struct LineSearchOutcome {
  double alpha = 0.0;
  double f_new = 0.0;
  Vector x_new;
  Vector g_new;
  int evaluations = 0;
};

/// Bracket growth factor used while the step still decreases f.
inline constexpr double kBracketGrowth = 2.0;
/// Smallest zoom interval width before giving up.
inline constexpr double kZoomFloor = 1e-16;
inline constexpr double kMinInitialStep = 1e-12;
inline constexpr double kMaxInitialStep = 1e12;

/// Finds alpha > 0 satisfying the strong Wolfe conditions
///
///   f(x + a d) <= f(x) + delta * a * <g, d>
///   |<grad f(x + a d), d>| <= -sigma * <g, d>
///
/// by bracketing followed by cubic-interpolation zoom with a bisection
/// fallback. `alpha_init` is clamped to [1e-12, 1e12].
///
/// Throws Error(NotDescentDirection) when <g_x, d> >= 0 and
/// Error(MaxEvaluationsExceeded) when no acceptable step is found within
/// params.max_line_search_evals evaluations or the zoom interval collapses.
LineSearchOutcome strong_wolfe(const Problem& problem, const Vector& x,
                               const Vector& d, double f_x, const Vector& g_x,
                               const SolverParams& params,
                               double alpha_init = 1.0);

/// True when (alpha, f_new, g_new) satisfies both strong Wolfe inequalities.
bool satisfies_strong_wolfe(double f_x, const Vector& g_x, const Vector& d,
                            double alpha, double f_new, const Vector& g_new,
                            double delta, double sigma);

}  // namespace mddl
