#include "mddl/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mddl {
namespace {

struct Trial {
  double alpha = 0.0;
  double phi = 0.0;   // f(x + alpha d)
  double dphi = 0.0;  // <grad f(x + alpha d), d>
  Vector x;
  Vector g;

  bool finite() const { return std::isfinite(phi) && std::isfinite(dphi); }
};

class Search {
 public:
  Search(const Problem& problem, const Vector& x, const Vector& d, double f_x,
         double slope, const SolverParams& params)
      : problem_(problem), x_(x), d_(d), phi0_(f_x), dphi0_(slope),
        params_(params) {}

  LineSearchOutcome run(double alpha_init) {
    Trial prev;
    prev.alpha = 0.0;
    prev.phi = phi0_;
    prev.dphi = dphi0_;

    double alpha = std::clamp(alpha_init, kMinInitialStep, kMaxInitialStep);
    for (bool first = true;; first = false) {
      Trial cur = evaluate(alpha);
      if (!cur.finite() || !armijo(cur) || (!first && cur.phi > prev.phi)) {
        return zoom(std::move(prev), std::move(cur));
      }
      if (curvature(cur)) return accept(cur);
      if (cur.dphi >= 0.0) return zoom(std::move(cur), std::move(prev));
      prev = std::move(cur);
      alpha = prev.alpha * kBracketGrowth;
      if (!std::isfinite(alpha) || alpha > std::numeric_limits<double>::max() / 4) {
        fail("step grew without bound");
      }
    }
  }

 private:
  Trial evaluate(double alpha) {
    if (evaluations_ >= params_.max_line_search_evals) {
      fail("evaluation budget exhausted");
    }
    ++evaluations_;
    Trial t;
    t.alpha = alpha;
    t.x = x_ + alpha * d_;
    t.phi = problem_.value_and_gradient(t.x, t.g);
    t.dphi = t.g.dot(d_);
    return t;
  }

  bool armijo(const Trial& t) const {
    return t.phi <= phi0_ + params_.delta * t.alpha * dphi0_;
  }

  bool curvature(const Trial& t) const {
    return std::abs(t.dphi) <= -params_.sigma * dphi0_;
  }

  // Invariant: `lo` satisfies Armijo and has the lowest f seen so far;
  // dphi(lo) * (hi - lo) < 0, so a strong Wolfe point lies between them.
  // Ties in f are settled by the derivative, which stays informative when
  // f differences have dropped below rounding.
  LineSearchOutcome zoom(Trial lo, Trial hi) {
    for (;;) {
      const double width = std::abs(hi.alpha - lo.alpha);
      if (width < kZoomFloor) fail("zoom interval collapsed");

      double alpha = interpolate(lo, hi);
      if (alpha == lo.alpha || alpha == hi.alpha) fail("zoom interval collapsed");

      Trial cur = evaluate(alpha);
      if (!cur.finite() || !armijo(cur) || cur.phi > lo.phi) {
        hi = std::move(cur);
        continue;
      }
      if (curvature(cur)) return accept(cur);
      if (cur.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = std::move(lo);
      lo = std::move(cur);
    }
  }

  // Minimizer of the cubic through both endpoints, kept at least 10% of the
  // interval away from either end; bisection when the cubic is unusable.
  static double interpolate(const Trial& lo, const Trial& hi) {
    const double a = lo.alpha;
    const double b = hi.alpha;
    const double mid = 0.5 * (a + b);
    if (!lo.finite() || !hi.finite()) return mid;

    const double d1 = lo.dphi + hi.dphi - 3.0 * (lo.phi - hi.phi) / (a - b);
    const double disc = d1 * d1 - lo.dphi * hi.dphi;
    if (!(disc >= 0.0) || !std::isfinite(disc)) return mid;
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = hi.dphi - lo.dphi + 2.0 * d2;
    if (denom == 0.0 || !std::isfinite(denom)) return mid;
    const double c = b - (b - a) * (hi.dphi + d2 - d1) / denom;

    const double left = std::min(a, b);
    const double right = std::max(a, b);
    const double margin = 0.1 * (right - left);
    if (!std::isfinite(c) || c < left + margin || c > right - margin) return mid;
    return c;
  }

  LineSearchOutcome accept(Trial& t) {
    LineSearchOutcome out;
    out.alpha = t.alpha;
    out.f_new = t.phi;
    out.x_new = std::move(t.x);
    out.g_new = std::move(t.g);
    out.evaluations = evaluations_;
    return out;
  }

  [[noreturn]] void fail(const char* why) const {
    throw Error(ErrorKind::MaxEvaluationsExceeded,
                std::string("strong Wolfe line search failed: ") + why +
                    " after " + std::to_string(evaluations_) + " evaluations");
  }

  const Problem& problem_;
  const Vector& x_;
  const Vector& d_;
  double phi0_;
  double dphi0_;
  const SolverParams& params_;
  int evaluations_ = 0;
};

}  // namespace

LineSearchOutcome strong_wolfe(const Problem& problem, const Vector& x,
                               const Vector& d, double f_x, const Vector& g_x,
                               const SolverParams& params, double alpha_init) {
  if (x.size() != d.size() || x.size() != g_x.size()) {
    throw Error(ErrorKind::LengthMismatch, "line search operands differ in length");
  }
  const double slope = g_x.dot(d);
  if (!(slope < 0.0)) {
    throw Error(ErrorKind::NotDescentDirection,
                "search direction is not a descent direction (<g,d> = " +
                    std::to_string(slope) + ")");
  }
  return Search(problem, x, d, f_x, slope, params).run(alpha_init);
}

bool satisfies_strong_wolfe(double f_x, const Vector& g_x, const Vector& d,
                            double alpha, double f_new, const Vector& g_new,
                            double delta, double sigma) {
  const double slope = g_x.dot(d);
  return alpha > 0.0 && f_new <= f_x + delta * alpha * slope &&
         std::abs(g_new.dot(d)) <= -sigma * slope;
}

}  // namespace mddl
