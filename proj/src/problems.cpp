#include "mddl/problems.hpp"

#include "mddl/rng.hpp"

#include "compensated.hpp"

#include <cmath>

namespace mddl {
namespace {

struct BealeResiduals {
  double r1, r2, r3;
};

// For x near 3 the constants minus x are exact, and the fma rounds only
// once on a result that is itself tiny, so r_i keeps full relative accuracy.
BealeResiduals beale_residuals(double x, double y) {
  const double y2 = y * y;
  const double e2 = std::fma(y, y, -y2);  // y^2 = y2 + e2 exactly
  const double y3 = y2 * y;
  const double e3 = std::fma(y2, y, -y3);  // y2 * y = y3 + e3 exactly
  const double r1 = std::fma(x, y, 1.5 - x);
  const double r2 = std::fma(x, y2, 2.25 - x) + x * e2;
  const double r3 = std::fma(x, y3, 2.625 - x) + x * (e3 + e2 * y);
  return {r1, r2, r3};
}

void require_length(const Vector& x, std::size_t n) {
  if (static_cast<std::size_t>(x.size()) != n) {
    throw Error(ErrorKind::LengthMismatch,
                "expected a vector of length " + std::to_string(n) + ", got " +
                    std::to_string(x.size()));
  }
}

}  // namespace

double Beale::value(const Vector& x) const {
  require_length(x, 2);
  const auto [r1, r2, r3] = beale_residuals(x[0], x[1]);
  return r1 * r1 + r2 * r2 + r3 * r3;
}

Vector Beale::gradient(const Vector& x) const {
  Vector g;
  value_and_gradient(x, g);
  return g;
}

double Beale::value_and_gradient(const Vector& x, Vector& grad) const {
  require_length(x, 2);
  const double u = x[0];
  const double v = x[1];
  const auto [r1, r2, r3] = beale_residuals(u, v);
  const double v2 = v * v;
  const double v3 = v2 * v;
  grad.resize(2);
  grad[0] = 2.0 * (r1 * (v - 1.0) + r2 * (v2 - 1.0) + r3 * (v3 - 1.0));
  grad[1] = 2.0 * u * (r1 + 2.0 * r2 * v + 3.0 * r3 * v2);
  return r1 * r1 + r2 * r2 + r3 * r3;
}

QuadraticProblem::QuadraticProblem(Vector diagonal, Vector b)
    : diagonal_(std::move(diagonal)), b_(std::move(b)) {
  if (diagonal_->size() != b_.size() || b_.size() == 0) {
    throw Error(ErrorKind::LengthMismatch, "diagonal and b must be nonempty and equal length");
  }
  for (Eigen::Index i = 0; i < diagonal_->size(); ++i) {
    const double a = (*diagonal_)[i];
    if (!std::isfinite(a) || !(a > 0.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  "diagonal entry " + std::to_string(i) + " is not positive");
    }
  }
  if (!all_finite(b_)) throw Error(ErrorKind::NonFiniteValue, "b is not finite");
}

QuadraticProblem::QuadraticProblem(Matrix a, Vector b)
    : dense_(std::move(a)), b_(std::move(b)) {
  const Matrix& m = *dense_;
  if (m.rows() != m.cols() || m.rows() != b_.size() || b_.size() == 0) {
    throw Error(ErrorKind::LengthMismatch, "A must be square and match b");
  }
  if (!m.allFinite() || !all_finite(b_)) {
    throw Error(ErrorKind::NonFiniteValue, "A or b is not finite");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * m.cwiseAbs().maxCoeff()) {
    throw Error(ErrorKind::InvalidArgument, "A is not symmetric");
  }
  if (Eigen::LLT<Matrix>(m).info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "A is not positive definite");
  }
}

Vector QuadraticProblem::apply(const Vector& x) const {
  require_length(x, dimension());
  if (diagonal_) return diagonal_->cwiseProduct(x);
  return *dense_ * x;
}

// Near the minimizer f is large while its variation is tiny, so the sum is
// accumulated in double-double; otherwise line-search comparisons see only
// rounding noise long before ||g||_inf reaches 1e-6.
double QuadraticProblem::value(const Vector& x) const {
  require_length(x, dimension());
  detail::DoubleDouble acc;
  auto add_half_product = [&acc](double a, double u, double v) {
    const double hu = 0.5 * a;  // exact
    const double t = hu * u;
    acc.add_product(t, v);
    acc.add_product(std::fma(hu, u, -t), v);
  };
  const Eigen::Index n = b_.size();
  if (diagonal_) {
    for (Eigen::Index i = 0; i < n; ++i) add_half_product((*diagonal_)[i], x[i], x[i]);
  } else {
    const Matrix& m = *dense_;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) add_half_product(m(i, j), x[i], x[j]);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) acc.add_product(b_[i], x[i]);
  return acc.value();
}

Vector QuadraticProblem::gradient(const Vector& x) const { return apply(x) + b_; }

double QuadraticProblem::value_and_gradient(const Vector& x, Vector& grad) const {
  grad = gradient(x);
  return value(x);
}

QuadraticProblem apq_fixed25() {
  Vector a = make_vector({2, 4, 3, 6, 4, 12, 8, 10, 5, 8, 6, 11, 4,
                          8, 3, 6, 2, 12, 6, 8, 4, 10, 5, 2, 6});
  Vector b = make_vector({-4,  -52, -18, -60, -24,  -72, -72, -50, -55,
                          -80, -78, -22, -12, -80,  -27, -42, -24, -120,
                          -30, -120, -24, -100, -60, -20, -66});
  return QuadraticProblem(std::move(a), std::move(b));
}

Vector apq_fixed25_start() { return Vector::Ones(25); }

QuadraticProblem apq_random(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  Xoshiro256 rng(seed);
  const auto n = static_cast<Eigen::Index>(dim);
  Vector a(n);
  Vector b(n);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = rng.uniform(0.5, 10.5);
  for (Eigen::Index i = 0; i < n; ++i) b[i] = rng.uniform(-10.0, 0.0);
  return QuadraticProblem(std::move(a), std::move(b));
}

Vector apq_random_start(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  Xoshiro256 rng(seed ^ 0x5851f42d4c957f2dULL);
  Vector x(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform();
  return x;
}

Vector analytic_minimizer(const Vector& diagonal, const Vector& b) {
  if (diagonal.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch, "diagonal and b differ in length");
  }
  Vector x(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (diagonal[i] == 0.0) {
      throw Error(ErrorKind::SingularMatrix,
                  "zero diagonal entry at index " + std::to_string(i));
    }
    x[i] = -b[i] / diagonal[i];
  }
  return x;
}

Vector analytic_minimizer(const QuadraticProblem& problem) {
  if (problem.is_diagonal()) return analytic_minimizer(problem.diagonal(), problem.b());
  Eigen::LLT<Matrix> llt(problem.dense());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularMatrix, "A is not invertible");
  }
  return -llt.solve(problem.b());
}

namespace {

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

nlohmann::json to_json(const QuadraticProblem& problem) {
  nlohmann::json doc;
  doc["dim"] = problem.dimension();
  if (problem.is_diagonal()) {
    doc["a"] = to_std(problem.diagonal());
  } else {
    auto rows = nlohmann::json::array();
    const Matrix& m = problem.dense();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_std(m.row(i).transpose()));
    doc["A"] = std::move(rows);
  }
  doc["b"] = to_std(problem.b());
  return doc;
}

QuadraticProblem quadratic_from_json(const nlohmann::json& doc) {
  try {
    const auto dim = doc.at("dim").get<std::size_t>();
    Vector b = make_vector(doc.at("b").get<std::vector<double>>());
    if (static_cast<std::size_t>(b.size()) != dim) {
      throw Error(ErrorKind::LengthMismatch, "b does not match dim");
    }
    if (doc.contains("a")) {
      return QuadraticProblem(make_vector(doc.at("a").get<std::vector<double>>()),
                              std::move(b));
    }
    const auto rows = doc.at("A").get<std::vector<std::vector<double>>>();
    Matrix a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    if (rows.size() != dim) throw Error(ErrorKind::LengthMismatch, "A does not match dim");
    for (std::size_t i = 0; i < dim; ++i) {
      if (rows[i].size() != dim) throw Error(ErrorKind::LengthMismatch, "A is not square");
      for (std::size_t j = 0; j < dim; ++j) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    return QuadraticProblem(std::move(a), std::move(b));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed quadratic JSON: ") + e.what());
  }
}

}  // namespace mddl
