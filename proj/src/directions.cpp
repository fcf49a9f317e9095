#include "mddl/directions.hpp"

#include <cmath>
#include <limits>

namespace mddl {
namespace {

void require_same_length(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch, "direction operands differ in length");
  }
}

double guarded_denominator(double value, const char* what) {
  if (!(std::abs(value) >= kDenominatorFloor)) {
    throw Error(ErrorKind::DegenerateInnerProduct,
                std::string(what) + " is numerically zero");
  }
  return value;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Vector modified_secant_z(const StepPair& pair, double r, double nu) {
  require_same_length(pair.s, pair.y);
  const double ss = pair.s.squaredNorm();
  if (!(ss > 0.0)) throw Error(ErrorKind::DegenerateStep, "step s is zero");
  if (!(pair.g_prev_norm > 0.0)) {
    throw Error(ErrorKind::DegenerateStep, "previous gradient norm is zero");
  }
  const double g_pow = std::pow(pair.g_prev_norm, r);
  const double curvature = pair.s.dot(pair.y) / ss;
  // h * ||g||^r expanded so the max term is not scaled up and back down.
  const double coeff = nu * g_pow + std::max(-curvature, 0.0);
  return pair.y + coeff * pair.s;
}

double dai_liao_t(const Vector& s, const Vector& z, double p, double q) {
  require_same_length(s, z);
  const double ss = s.squaredNorm();
  if (!(ss > 0.0)) throw Error(ErrorKind::DegenerateStep, "step s is zero");
  const double sz = s.dot(z);
  if (!(sz > 0.0)) {
    throw Error(ErrorKind::DegenerateInnerProduct, "<s,z> is not positive");
  }
  return p * z.squaredNorm() / sz - q * sz / ss;
}

double beta_mddl(const Vector& g_next, const Vector& s, const Vector& z,
                 const Vector& d, double t) {
  require_same_length(g_next, z);
  require_same_length(s, d);
  const double dz = guarded_denominator(d.dot(z), "<d,z>");
  return g_next.dot(z) / dz - t * g_next.dot(s) / dz;
}

double theta_raw(const Vector& g_next, const Vector& s, const Vector& z,
                 double t, ThetaVariant variant) {
  require_same_length(g_next, s);
  require_same_length(s, z);
  const double sg = s.dot(g_next);
  if (sg == 0.0) return 1.0;
  const double zg = z.dot(g_next);
  if (zg == 0.0) return kNaN;
  const double factor = variant == ThetaVariant::R ? t - 1.0 : t;
  return 1.0 - factor * sg / zg;
}

double clamp_theta(double theta_raw, double p, double q, double eta, double tau) {
  const double lower = 1.0 / (4.0 * p) + std::abs(q) + eta;
  if (theta_raw >= lower && theta_raw <= tau) return theta_raw;
  return 1.0;
}

Vector next_direction(const Vector& g_next, const Vector& d_prev, double theta,
                      double beta) {
  require_same_length(g_next, d_prev);
  return -theta * g_next + beta * d_prev;
}

double beta_zdk(const Vector& g_next, const Vector& z, const Vector& d) {
  require_same_length(g_next, z);
  require_same_length(z, d);
  const double dz = guarded_denominator(d.dot(z), "<d,z>");
  return g_next.dot(z) / dz - (z.squaredNorm() / dz) * g_next.dot(d) / dz;
}

double theta_mscg(const Vector& g_next, const Vector& z, const Vector& d,
                  double p, double q, double eta, double tau) {
  require_same_length(g_next, z);
  require_same_length(z, d);
  const double gd = g_next.dot(d);
  if (gd == 0.0) return clamp_theta(1.0, p, q, eta, tau);
  const double dz = d.dot(z);
  const double gz = g_next.dot(z);
  double raw = kNaN;
  if (dz != 0.0 && gz != 0.0) raw = 1.0 - (z.squaredNorm() / dz) * gd / gz;
  return clamp_theta(raw, p, q, eta, tau);
}

double beta_hs(const Vector& g_next, const Vector& y, const Vector& d) {
  require_same_length(g_next, y);
  require_same_length(y, d);
  return g_next.dot(y) / guarded_denominator(d.dot(y), "<d,y>");
}

double beta_hz(const Vector& g_next, const Vector& y, const Vector& d) {
  require_same_length(g_next, y);
  require_same_length(y, d);
  const double dy = guarded_denominator(d.dot(y), "<d,y>");
  return g_next.dot(y) / dy - 2.0 * (y.squaredNorm() / dy) * g_next.dot(d) / dy;
}

double beta_dl(const Vector& g_next, const Vector& y, const Vector& s,
               const Vector& d, double t) {
  require_same_length(g_next, y);
  require_same_length(s, d);
  const double dy = guarded_denominator(d.dot(y), "<d,y>");
  return g_next.dot(y) / dy - t * g_next.dot(s) / dy;
}

DirectionState update_direction(const StepPair& pair, const Vector& g_next,
                                const Vector& d_prev,
                                const SolverParams& params) {
  DirectionState st;
  switch (params.beta_rule) {
    case BetaRule::MDDL:
      st.z = modified_secant_z(pair, params.r, params.nu);
      st.t = dai_liao_t(pair.s, st.z, params.p, params.q);
      st.beta = beta_mddl(g_next, pair.s, st.z, d_prev, st.t);
      st.theta_raw = theta_raw(g_next, pair.s, st.z, st.t, params.theta_variant);
      st.theta = clamp_theta(st.theta_raw, params.p, params.q, params.eta,
                             params.tau);
      break;
    case BetaRule::ZDK:
      st.z = modified_secant_z(pair, params.r, params.nu);
      st.beta = beta_zdk(g_next, st.z, d_prev);
      st.theta = theta_mscg(g_next, st.z, d_prev, params.p, params.q,
                            params.eta, params.tau);
      st.theta_raw = st.theta;
      break;
    case BetaRule::HS:
      st.beta = beta_hs(g_next, pair.y, d_prev);
      break;
    case BetaRule::HZ:
      st.beta = beta_hz(g_next, pair.y, d_prev);
      break;
    case BetaRule::DL:
      st.t = params.dl_t;
      st.beta = beta_dl(g_next, pair.y, pair.s, d_prev, params.dl_t);
      break;
  }
  if (!std::isfinite(st.beta)) {
    throw Error(ErrorKind::DegenerateInnerProduct, "conjugate parameter is not finite");
  }
  st.d_next = next_direction(g_next, d_prev, st.theta, st.beta);
  return st;
}

}  // namespace mddl
