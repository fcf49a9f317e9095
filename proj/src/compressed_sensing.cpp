#include "mddl/compressed_sensing.hpp"

#include "mddl/rng.hpp"
#include "mddl/solver.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace mddl::cs {

double huber_value(double u, double lambda) {
  const double au = std::abs(u);
  if (au < lambda) return au * au / (2.0 * lambda);
  return au - lambda / 2.0;
}

double huber_grad_component(double u, double lambda) {
  if (std::abs(u) < lambda) return u / lambda;
  return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
}

CsInstance generate_instance(int m, int n, int k, std::uint64_t seed,
                             MuRule mu_rule, double noise_std) {
  if (!(0 <= k && k < m && m < n)) {
    throw Error(ErrorKind::InvalidArgument,
                "compressed sensing shape needs 0 <= k < m < n");
  }
  if (!(noise_std >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "noise level must be nonnegative");
  }
  Xoshiro256 rng(seed);
  CsInstance inst;
  inst.m = m;
  inst.n = n;
  inst.k = k;
  inst.seed = seed;
  inst.noise_std = noise_std;

  inst.a.resize(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) inst.a(i, j) = rng.normal();
  }

  std::vector<int> index(static_cast<std::size_t>(n));
  std::iota(index.begin(), index.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(index[static_cast<std::size_t>(i)], index[static_cast<std::size_t>(j)]);
  }
  inst.x_true = Vector::Zero(n);
  for (int i = 0; i < k; ++i) {
    double v = 0.0;
    while (v == 0.0) v = rng.normal();
    inst.x_true[index[static_cast<std::size_t>(i)]] = v;
  }

  Vector noise(m);
  for (int i = 0; i < m; ++i) noise[i] = noise_std * rng.normal();
  inst.b = inst.a * inst.x_true + noise;

  const double atb = inf_norm(inst.a.transpose() * inst.b);
  inst.mu = 0.001 * atb;
  if (mu_rule == MuRule::Floored) inst.mu = std::max(0x1.0p-7, inst.mu);
  inst.lambda = std::min(0.001, 0.048 * atb);
  // b = 0 (empty signal, no noise) leaves the formula at zero; keep the cap.
  if (atb == 0.0) inst.lambda = 0.001;
  return inst;
}

SmoothedObjective::SmoothedObjective(std::shared_ptr<const CsInstance> instance)
    : inst_(std::move(instance)) {
  if (!inst_) throw Error(ErrorKind::InvalidArgument, "null instance");
  if (inst_->a.rows() != inst_->b.size()) {
    throw Error(ErrorKind::LengthMismatch, "A and b disagree on m");
  }
  if (!(inst_->lambda > 0.0) || !(inst_->mu >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "need lambda > 0 and mu >= 0");
  }
}

std::size_t SmoothedObjective::dimension() const {
  return static_cast<std::size_t>(inst_->a.cols());
}

double SmoothedObjective::value(const Vector& x) const {
  Vector g;
  return value_and_gradient(x, g);
}

Vector SmoothedObjective::gradient(const Vector& x) const {
  Vector g;
  value_and_gradient(x, g);
  return g;
}

double SmoothedObjective::value_and_gradient(const Vector& x, Vector& grad) const {
  const auto& inst = *inst_;
  if (x.size() != inst.a.cols()) {
    throw Error(ErrorKind::LengthMismatch, "x does not match the number of columns of A");
  }
  const Vector residual = inst.a * x - inst.b;
  grad.noalias() = inst.a.transpose() * residual;
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    penalty += huber_value(x[i], inst.lambda);
    grad[i] += inst.mu * huber_grad_component(x[i], inst.lambda);
  }
  return 0.5 * residual.squaredNorm() + inst.mu * penalty;
}

double mse(const Vector& x, const Vector& x_ref) {
  if (x.size() != x_ref.size() || x.size() == 0) {
    throw Error(ErrorKind::LengthMismatch, "mse needs two nonempty vectors of equal length");
  }
  return (x - x_ref).squaredNorm() / static_cast<double>(x.size());
}

double rel_err(const Vector& x_recovered, const Vector& x_true) {
  if (x_recovered.size() != x_true.size()) {
    throw Error(ErrorKind::LengthMismatch, "rel_err operands differ in length");
  }
  const double ref = x_true.norm();
  if (!(ref > 0.0)) throw Error(ErrorKind::ZeroReference, "reference signal is zero");
  return (x_recovered - x_true).norm() / ref;
}

Recovery recover(const CsInstance& instance, const SolverParams& params,
                 double mse_target) {
  auto shared = std::make_shared<const CsInstance>(instance);
  SmoothedObjective objective(shared);
  const Vector& truth = shared->x_true;
  const bool has_reference = truth.norm() > 0.0;

  Recovery out;
  auto predicate = [&](const Vector& x, std::span<const IterationRecord> trace) {
    const double e = mse(x, truth);
    // Called at x0, after every completed iteration, and again at the same
    // iterate after a restart; only new iterations extend the series.
    if (trace.size() > out.mse_series.size()) {
      out.mse_series.push_back(e);
      out.rel_err_series.push_back(has_reference
                                       ? rel_err(x, truth)
                                       : std::numeric_limits<double>::quiet_NaN());
    }
    return e <= mse_target;
  };

  const Vector x0 = shared->a.transpose() * shared->b;
  out.result = minimize(objective, x0, params, StoppingRule::custom(predicate));
  out.mse = mse(out.result.final_x, truth);
  out.rel_err = has_reference ? rel_err(out.result.final_x, truth)
                              : std::numeric_limits<double>::quiet_NaN();
  return out;
}

namespace {

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

nlohmann::json to_json(const CsInstance& inst) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(inst.a.size()));
  for (Eigen::Index i = 0; i < inst.a.rows(); ++i) {
    for (Eigen::Index j = 0; j < inst.a.cols(); ++j) flat.push_back(inst.a(i, j));
  }
  return {{"m", inst.m},         {"n", inst.n},           {"k", inst.k},
          {"seed", inst.seed},   {"A", std::move(flat)},  {"b", to_std(inst.b)},
          {"x_true", to_std(inst.x_true)}, {"mu", inst.mu}, {"lambda", inst.lambda},
          {"noise_std", inst.noise_std}};
}

CsInstance instance_from_json(const nlohmann::json& doc) {
  CsInstance inst;
  try {
    inst.m = doc.at("m").get<int>();
    inst.n = doc.at("n").get<int>();
    inst.k = doc.at("k").get<int>();
    inst.seed = doc.at("seed").get<std::uint64_t>();
    inst.mu = doc.at("mu").get<double>();
    inst.lambda = doc.at("lambda").get<double>();
    inst.noise_std = doc.value("noise_std", 0.1);
    const auto flat = doc.at("A").get<std::vector<double>>();
    if (inst.m <= 0 || inst.n <= 0 ||
        flat.size() != static_cast<std::size_t>(inst.m) * static_cast<std::size_t>(inst.n)) {
      throw Error(ErrorKind::LengthMismatch, "A does not hold m*n entries");
    }
    inst.a.resize(inst.m, inst.n);
    for (int i = 0; i < inst.m; ++i) {
      for (int j = 0; j < inst.n; ++j) {
        inst.a(i, j) = flat[static_cast<std::size_t>(i) * static_cast<std::size_t>(inst.n) +
                            static_cast<std::size_t>(j)];
      }
    }
    inst.b = make_vector(doc.at("b").get<std::vector<double>>());
    inst.x_true = make_vector(doc.at("x_true").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed instance JSON: ") + e.what());
  }
  if (inst.b.size() != inst.m || inst.x_true.size() != inst.n) {
    throw Error(ErrorKind::LengthMismatch, "b or x_true does not match m, n");
  }
  return inst;
}

void write_signal_csv(std::ostream& out, const Vector& x_true,
                      const Vector& x_recovered) {
  if (x_true.size() != x_recovered.size()) {
    throw Error(ErrorKind::LengthMismatch, "signal lengths differ");
  }
  auto put = [&out](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
  };
  out << "index,true,recovered\n";
  for (Eigen::Index i = 0; i < x_true.size(); ++i) {
    out << i << ',';
    put(x_true[i]);
    out << ',';
    put(x_recovered[i]);
    out << '\n';
  }
}

}  // namespace mddl::cs
