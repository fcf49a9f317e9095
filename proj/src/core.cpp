#include "mddl/core.hpp"

#include <cmath>
#include <sstream>

namespace mddl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotDescentDirection: return "NotDescentDirection";
    case ErrorKind::MaxEvaluationsExceeded: return "MaxEvaluationsExceeded";
    case ErrorKind::DegenerateStep: return "DegenerateStep";
    case ErrorKind::DegenerateInnerProduct: return "DegenerateInnerProduct";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::ZeroReference: return "ZeroReference";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

const char* to_string(ThetaVariant v) {
  return v == ThetaVariant::R ? "R" : "N";
}

const char* to_string(BetaRule rule) {
  switch (rule) {
    case BetaRule::MDDL: return "MDDL";
    case BetaRule::ZDK: return "ZDK";
    case BetaRule::HS: return "HS";
    case BetaRule::HZ: return "HZ";
    case BetaRule::DL: return "DL";
  }
  return "Unknown";
}

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::GradientTolerance: return "GradientTolerance";
    case TerminationReason::MaxIterations: return "MaxIterations";
    case TerminationReason::LineSearchFailure: return "LineSearchFailure";
    case TerminationReason::CustomCriterion: return "CustomCriterion";
  }
  return "Unknown";
}

Vector make_vector(std::initializer_list<double> values) {
  return make_vector(std::vector<double>(values));
}

Vector make_vector(const std::vector<double>& values) {
  if (values.empty()) {
    throw Error(ErrorKind::InvalidArgument, "vector must have at least one element");
  }
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::NonFiniteValue,
                  "non-finite element at index " + std::to_string(i));
    }
    v[static_cast<Eigen::Index>(i)] = values[i];
  }
  return v;
}

bool all_finite(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

double inf_norm(const Vector& v) {
  if (v.size() == 0) {
    throw Error(ErrorKind::InvalidArgument, "inf_norm of an empty vector");
  }
  return v.cwiseAbs().maxCoeff();
}

double SolverParams::theta_lower() const {
  return 1.0 / (4.0 * p) + std::abs(q) + eta;
}

std::vector<std::string> validate_params(const SolverParams& params) {
  std::vector<std::string> out;
  auto check = [&](bool ok, const char* msg) {
    if (!ok) out.emplace_back(msg);
  };

  check(params.delta > 0.0, "delta > 0");
  check(params.delta < params.sigma, "delta < sigma");
  check(params.sigma < 1.0, "sigma < 1");
  check(params.p > 0.25, "p > 1/4");
  check(params.q < 0.25, "q < 1/4");
  check(params.eta > 0.0, "eta > 0");
  check(params.r > 0.0, "r > 0");
  check(params.nu > 0.0, "nu > 0");
  check(params.epsilon > 0.0, "epsilon > 0");
  check(params.max_iterations > 0, "max_iterations > 0");
  check(params.max_line_search_evals > 0, "max_line_search_evals > 0");
  if (params.beta_rule == BetaRule::DL) {
    check(params.dl_t >= 0.0, "dl_t >= 0");
  }

  // Only meaningful once p is in range; 1/(4p) is undefined at p = 0.
  if (params.p > 0.0) {
    const double lower = params.theta_lower();
    check(params.tau > lower, "tau > 1/(4p) + |q| + eta");
    check(lower <= 1.0, "1/(4p) + |q| + eta <= 1");
    check(params.tau >= 1.0, "tau >= 1");
  }

  for (double v : {params.delta, params.sigma, params.eta, params.tau, params.r,
                   params.nu, params.p, params.q, params.epsilon}) {
    if (!std::isfinite(v)) {
      out.emplace_back("all parameters finite");
      break;
    }
  }
  return out;
}

void require_valid(const SolverParams& params) {
  const auto violations = validate_params(params);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid solver parameters:";
  for (const auto& v : violations) msg << " [" << v << "]";
  throw Error(ErrorKind::InvalidArgument, msg.str());
}

}  // namespace mddl
