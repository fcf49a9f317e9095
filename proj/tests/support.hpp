#pragma once

// Test-side helpers. Randomness comes from the standard library so that the
// checks do not share a generator with the code under test.

#include "mddl/core.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace testing {

inline mddl::Vector random_vector(std::mt19937_64& gen, int n, double lo = -1.0,
                                  double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  mddl::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(gen);
  return v;
}

// Central differences with a step scaled to each coordinate.
inline mddl::Vector fd_gradient(const std::function<double(const mddl::Vector&)>& f,
                                const mddl::Vector& x) {
  mddl::Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    mddl::Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (xp[i] - xm[i]);
  }
  return g;
}

inline double rel_diff(const mddl::Vector& a, const mddl::Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace testing

namespace testing {

// Problem assembled from two callables.
class FnProblem final : public mddl::Problem {
 public:
  using F = std::function<double(const mddl::Vector&)>;
  using G = std::function<mddl::Vector(const mddl::Vector&)>;
  FnProblem(std::size_t n, F f, G g) : n_(n), f_(std::move(f)), g_(std::move(g)) {}
  std::size_t dimension() const override { return n_; }
  double value(const mddl::Vector& x) const override { return f_(x); }
  mddl::Vector gradient(const mddl::Vector& x) const override { return g_(x); }

 private:
  std::size_t n_;
  F f_;
  G g_;
};

}  // namespace testing
