#pragma once

#include "mddl/core.hpp"

namespace mddl {

/// Smallest |<d, z>| accepted as a denominator in the conjugate parameters.
inline constexpr double kDenominatorFloor = 1e-300;

/// Data from one accepted step: s = x_{n+1} - x_n, y = g_{n+1} - g_n, and
/// the Euclidean norm of the gradient at x_n.
struct StepPair {
  Vector s;
  Vector y;
  double g_prev_norm = 0.0;
};

/// Everything computed while building d_{n+1}.
struct DirectionState {
  Vector z;
  double t = 0.0;
  double beta = 0.0;
  double theta_raw = 1.0;
  double theta = 1.0;
  Vector d_next;
};

/// z = y + h * ||g_prev||^r * s with
/// h = nu + max(-<s,y>/||s||^2, 0) * ||g_prev||^-r.
///
/// <z, s> >= nu * ||g_prev||^r * ||s||^2 for any line search. Throws
/// Error(DegenerateStep) when s = 0 or g_prev_norm = 0.
Vector modified_secant_z(const StepPair& pair, double r, double nu);

/// t = p ||z||^2 / <s,z> - q <s,z> / ||s||^2.
double dai_liao_t(const Vector& s, const Vector& z, double p, double q);

/// beta = (<g,z> - t <g,s>) / <d,z>.
double beta_mddl(const Vector& g_next, const Vector& s, const Vector& z,
                 const Vector& d, double t);

/// Unclamped spectral parameter.
///   R: 1 - (t - 1) <s,g> / <z,g>
///   N: 1 - t <s,g> / <z,g>
/// Returns NaN when <z,g> = 0; clamp_theta maps that to the fallback 1.
double theta_raw(const Vector& g_next, const Vector& s, const Vector& z,
                 double t, ThetaVariant variant);

/// theta_raw if it lies in [1/(4p) + |q| + eta, tau], otherwise 1.
double clamp_theta(double theta_raw, double p, double q, double eta, double tau);

/// d_next = -theta g_next + beta d_prev.
Vector next_direction(const Vector& g_next, const Vector& d_prev, double theta,
                      double beta);

/// Conjugate parameter of the modified-secant spectral CG baseline (MSCG):
/// <g,z>/<d,z> - (||z||^2/<d,z>) <g,d>/<d,z>.
double beta_zdk(const Vector& g_next, const Vector& z, const Vector& d);

/// Clamped MSCG spectral parameter built from
/// 1 - (||z||^2/<d,z>) <g,d>/<g,z>; undefined ratios fall back to 1.
double theta_mscg(const Vector& g_next, const Vector& z, const Vector& d,
                  double p, double q, double eta, double tau);

// Classic parameters built on the unmodified y.
double beta_hs(const Vector& g_next, const Vector& y, const Vector& d);
double beta_hz(const Vector& g_next, const Vector& y, const Vector& d);
double beta_dl(const Vector& g_next, const Vector& y, const Vector& s,
               const Vector& d, double t);

/// Runs the whole update for the configured beta rule.
///
/// MDDL: z -> t -> beta_mddl, theta from theta_raw + clamp_theta.
/// ZDK:  z -> beta_zdk, theta from theta_mscg.
/// HS/HZ/DL: beta from y, theta = 1.
///
/// Throws Error(DegenerateStep) or Error(DegenerateInnerProduct); the solver
/// answers both with a steepest-descent restart.
DirectionState update_direction(const StepPair& pair, const Vector& g_next,
                                const Vector& d_prev,
                                const SolverParams& params);

}  // namespace mddl
