#include "mddl/solver.hpp"

#include "mddl/directions.hpp"
#include "mddl/linesearch.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace mddl {

StoppingRule StoppingRule::grad_inf_norm(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "stopping tolerance must be positive");
  }
  StoppingRule rule;
  rule.epsilon_ = epsilon;
  return rule;
}

StoppingRule StoppingRule::custom(Predicate predicate) {
  if (!predicate) {
    throw Error(ErrorKind::InvalidArgument, "custom stopping rule needs a predicate");
  }
  StoppingRule rule;
  rule.predicate_ = std::move(predicate);
  return rule;
}

bool StoppingRule::satisfied(const Vector& x, const Vector& g,
                             double default_epsilon,
                             std::span<const IterationRecord> trace) const {
  if (predicate_) return predicate_(x, trace);
  return inf_norm(g) < epsilon_.value_or(default_epsilon);
}

Vector restart_direction(const Vector& g) { return -g; }

namespace {

void require_finite(double f, const Vector& g, const char* where) {
  if (!std::isfinite(f) || !all_finite(g)) {
    throw Error(ErrorKind::NonFiniteValue,
                std::string("objective or gradient is not finite at ") + where);
  }
}

#ifndef NDEBUG
// <g, d> <= -eta ||g||^2, up to rounding in the two terms that form d.
bool descent_certificate(const Vector& g, const Vector& d_prev,
                         const DirectionState& st, double eta) {
  const double gg = g.squaredNorm();
  const double slack =
      1e-9 * (st.theta * gg + std::abs(st.beta) * std::abs(g.dot(d_prev)));
  return g.dot(st.d_next) <= -eta * gg + slack;
}
#endif

}  // namespace

SolveResult minimize(const Problem& problem, const Vector& x0,
                     const SolverParams& params, const StoppingRule& stop) {
  require_valid(params);
  if (static_cast<std::size_t>(x0.size()) != problem.dimension()) {
    throw Error(ErrorKind::LengthMismatch,
                "x0 has length " + std::to_string(x0.size()) +
                    " but the problem has dimension " +
                    std::to_string(problem.dimension()));
  }

  const auto start = Clock::now();
  SolveResult result;

  Vector x = x0;
  Vector g;
  double f = problem.value_and_gradient(x, g);
  result.function_evaluations = 1;
  require_finite(f, g, "the initial point");
  if (params.record_path) result.path.push_back(x);

  Vector d = restart_direction(g);
  double alpha_guess = 1.0;
  // Set while d is a reset direction issued after a failure; one more
  // failure in that state ends the run.
  bool pending_restart = false;
  int n = 0;

  for (;;) {
    if (stop.satisfied(x, g, params.epsilon, result.trace)) {
      result.converged = true;
      result.termination_reason = stop.is_custom()
                                      ? TerminationReason::CustomCriterion
                                      : TerminationReason::GradientTolerance;
      break;
    }
    if (n >= params.max_iterations) {
      result.termination_reason = TerminationReason::MaxIterations;
      break;
    }

    LineSearchOutcome ls;
    try {
      ls = strong_wolfe(problem, x, d, f, g, params, alpha_guess);
      result.function_evaluations += ls.evaluations;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::MaxEvaluationsExceeded &&
          e.kind() != ErrorKind::NotDescentDirection) {
        throw;
      }
      if (pending_restart) {
        result.termination_reason = TerminationReason::LineSearchFailure;
        break;
      }
      d = restart_direction(g);
      alpha_guess = 1.0;
      pending_restart = true;
      if (!result.trace.empty()) result.trace.back().restarted = true;
      continue;
    }
    require_finite(ls.f_new, ls.g_new, "an accepted step");
    pending_restart = false;

    StepPair pair{ls.x_new - x, ls.g_new - g, g.norm()};
    x = std::move(ls.x_new);
    f = ls.f_new;
    g = std::move(ls.g_new);

    IterationRecord rec;
    rec.index = n + 1;
    rec.step_alpha = ls.alpha;
    try {
      DirectionState st = update_direction(pair, g, d, params);
      assert(params.beta_rule != BetaRule::MDDL ||
             descent_certificate(g, d, st, params.eta));
      rec.theta = st.theta;
      rec.beta = st.beta;
      d = std::move(st.d_next);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateStep &&
          e.kind() != ErrorKind::DegenerateInnerProduct) {
        throw;
      }
      d = restart_direction(g);
      rec.theta = 1.0;
      rec.beta = 0.0;
      rec.restarted = true;
      pending_restart = true;
    }

    alpha_guess = std::clamp(ls.alpha, 1e-12, 1e12);
    ++n;
    rec.f_value = f;
    rec.grad_inf_norm = inf_norm(g);
    rec.wall_time = seconds_since(start);
    if (const double gg = g.squaredNorm(); gg > 0.0) rec.descent_margin = -g.dot(d) / gg;
    result.trace.push_back(rec);
    if (params.record_path) result.path.push_back(x);
  }

  result.iterations = n;
  result.final_x = std::move(x);
  result.final_f = f;
  result.final_grad_inf_norm = inf_norm(g);
  result.wall_time = seconds_since(start);
  return result;
}

}  // namespace mddl
