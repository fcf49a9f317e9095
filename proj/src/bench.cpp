#include "mddl/bench.hpp"

#include "mddl/problems.hpp"
#include "mddl/solver.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace mddl::bench {

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Beale: return "beale";
    case Experiment::Apq: return "apq";
    case Experiment::Cs: return "cs";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Mddlscg: return "mddlscg";
    case Method::Mscg: return "mscg";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  if (name == "beale") return Experiment::Beale;
  if (name == "apq") return Experiment::Apq;
  if (name == "cs") return Experiment::Cs;
  throw Error(ErrorKind::InvalidArgument, "unknown experiment '" + name + "'");
}

Method parse_method(const std::string& name) {
  if (name == "mddlscg") return Method::Mddlscg;
  if (name == "mscg") return Method::Mscg;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + name + "'");
}

SolverParams method_params(Method method, const SolverParams& base) {
  SolverParams p = base;
  p.beta_rule = method == Method::Mscg ? BetaRule::ZDK : BetaRule::MDDL;
  return p;
}

RunSpec default_spec(Experiment experiment) {
  RunSpec spec;
  spec.experiment = experiment;
  spec.sigmas = {0.1};
  for (std::uint64_t s = 1; s <= 10; ++s) spec.seeds.push_back(s);
  switch (experiment) {
    case Experiment::Beale: spec.sigmas = {0.1, 0.2, 0.4, 0.6, 0.8, 0.9}; break;
    case Experiment::Apq: spec.dims = {25, 100, 1000}; break;
    case Experiment::Cs: spec.shapes = {{128, 512, 16}, {256, 1024, 32}}; break;
  }
  return spec;
}

double default_epsilon(Experiment experiment) {
  return experiment == Experiment::Beale ? 1e-15 : 1e-6;
}

namespace {

void check_spec(const RunSpec& spec) {
  auto bad = [](const std::string& why) {
    throw Error(ErrorKind::InvalidArgument, "invalid run spec: " + why);
  };
  if (spec.methods.empty()) bad("no methods");
  if (spec.sigmas.empty()) bad("empty sigma list");
  if (spec.jobs < 1) bad("jobs must be at least 1");
  if (spec.experiment == Experiment::Apq) {
    if (spec.dims.empty()) bad("empty dims list");
    for (int d : spec.dims) if (d < 1) bad("dims must be positive");
    const bool random = std::any_of(spec.dims.begin(), spec.dims.end(),
                                    [](int d) { return d != 25; });
    if (random && spec.seeds.empty()) bad("empty seed list");
  }
  if (spec.experiment == Experiment::Cs) {
    if (spec.shapes.empty()) bad("no (m, n, k) shapes");
    if (spec.seeds.empty()) bad("empty seed list");
    for (const auto& [m, n, k] : spec.shapes) {
      if (!(0 <= k && k < m && m < n)) bad("shape needs 0 <= k < m < n");
    }
  }
}

// Runs every task, writing results into slots so that the output order is
// the spec order whatever the completion order.
void run_all(std::vector<std::function<Cell()>>& tasks, std::vector<Cell>& out,
             int jobs) {
  out.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) out[i] = tasks[i]();
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(jobs), tasks.size());
  if (n <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
}

std::vector<double> thetas_of(const SolveResult& r) {
  std::vector<double> out;
  out.reserve(r.trace.size());
  for (const auto& rec : r.trace) out.push_back(rec.theta);
  return out;
}

ResultRow key_only(const ResultRow& row) {
  ResultRow k;
  k.experiment = row.experiment;
  k.method = row.method;
  k.sigma = row.sigma;
  k.dim = row.dim;
  k.m = row.m;
  k.n = row.n;
  k.k = row.k;
  k.seed = row.seed;
  return k;
}

Trace trace_of(const ResultRow& row, const SolveResult& r) {
  Trace t;
  t.key = key_only(row);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& rec = r.trace[i];
    TracePoint p;
    p.iter = rec.index;
    p.f_value = rec.f_value;
    p.e_n = rec.grad_inf_norm;
    p.alpha = rec.step_alpha;
    p.theta = rec.theta;
    p.beta = rec.beta;
    if (r.path.size() == r.trace.size() + 1 && r.path[i + 1].size() == 2) {
      p.x = {r.path[i + 1][0], r.path[i + 1][1]};
    }
    t.points.push_back(std::move(p));
  }
  return t;
}

void fill_from(Cell& cell, const SolveResult& r) {
  cell.row.itr = r.iterations;
  cell.row.tcpu_s = r.wall_time;
  cell.row.e_n = r.final_grad_inf_norm;
  cell.converged = r.converged;
  cell.termination = to_string(r.termination_reason);
  cell.thetas = thetas_of(r);
}

// Solver errors belong to the row, not to the whole run.
Cell guarded(ResultRow key, const std::function<void(Cell&)>& body) {
  Cell cell;
  cell.row = std::move(key);
  try {
    body(cell);
  } catch (const std::exception& e) {
    cell.converged = false;
    cell.termination = std::string("error: ") + e.what();
  }
  return cell;
}

double epsilon_for(const RunSpec& spec) {
  return spec.epsilon.value_or(default_epsilon(spec.experiment));
}

}  // namespace

Report run_beale(const RunSpec& spec) {
  check_spec(spec);
  const double eps = epsilon_for(spec);
  std::vector<std::function<Cell()>> tasks;
  for (double sigma : spec.sigmas) {
    for (Method method : spec.methods) {
      tasks.emplace_back([=, &spec] {
        ResultRow key;
        key.experiment = "beale";
        key.method = to_string(method);
        key.sigma = sigma;
        key.dim = 2;
        return guarded(key, [&](Cell& cell) {
          SolverParams p = method_params(method, spec.base);
          p.sigma = sigma;
          p.epsilon = eps;
          p.record_path = spec.dump_trace;
          const Beale problem;
          const SolveResult r = minimize(problem, Beale::standard_start(), p);
          fill_from(cell, r);
          if (spec.dump_trace) cell.trace = trace_of(cell.row, r);
        });
      });
    }
  }
  Report report;
  run_all(tasks, report.cells, spec.jobs);
  return report;
}

Report run_apq(const RunSpec& spec) {
  check_spec(spec);
  const double eps = epsilon_for(spec);
  std::vector<std::function<Cell()>> tasks;
  for (int dim : spec.dims) {
    std::vector<std::optional<std::uint64_t>> seeds;
    if (dim == 25) {
      seeds.push_back(std::nullopt);
    } else {
      for (auto s : spec.seeds) seeds.push_back(s);
    }
    for (const auto& seed : seeds) {
      for (double sigma : spec.sigmas) {
        for (Method method : spec.methods) {
          tasks.emplace_back([=, &spec] {
            ResultRow key;
            key.experiment = "apq";
            key.method = to_string(method);
            key.sigma = sigma;
            key.dim = dim;
            key.seed = seed;
            return guarded(key, [&](Cell& cell) {
              const auto n = static_cast<std::size_t>(dim);
              const QuadraticProblem problem = seed ? apq_random(n, *seed) : apq_fixed25();
              const Vector x0 = seed ? apq_random_start(n, *seed) : apq_fixed25_start();
              SolverParams p = method_params(method, spec.base);
              p.sigma = sigma;
              p.epsilon = eps;
              const SolveResult r = minimize(problem, x0, p);
              fill_from(cell, r);
              cell.dist_to_minimizer = inf_norm(r.final_x - analytic_minimizer(problem));
              if (spec.dump_trace) cell.trace = trace_of(cell.row, r);
            });
          });
        }
      }
    }
  }
  Report report;
  run_all(tasks, report.cells, spec.jobs);
  return report;
}

Report run_cs(const RunSpec& spec) {
  check_spec(spec);
  std::vector<std::function<Cell()>> tasks;
  for (const auto& shape : spec.shapes) {
    for (double sigma : spec.sigmas) {
      for (Method method : spec.methods) {
        for (auto seed : spec.seeds) {
          tasks.emplace_back([=, &spec] {
            const auto [m, n, k] = shape;
            ResultRow key;
            key.experiment = "cs";
            key.method = to_string(method);
            key.sigma = sigma;
            key.m = m;
            key.n = n;
            key.k = k;
            key.seed = seed;
            return guarded(key, [&](Cell& cell) {
              const cs::CsInstance inst = cs::generate_instance(m, n, k, seed, spec.mu_rule);
              SolverParams p = method_params(method, spec.base);
              p.sigma = sigma;
              if (spec.epsilon) p.epsilon = *spec.epsilon;
              const cs::Recovery rec = cs::recover(inst, p);
              fill_from(cell, rec.result);
              cell.row.mse = rec.mse;
              cell.row.rel_err = rec.rel_err;
              if (spec.dump_trace) {
                Trace t = trace_of(cell.row, rec.result);
                for (std::size_t i = 0; i < t.points.size(); ++i) {
                  t.points[i].mse = rec.mse_series.at(i);
                  t.points[i].rel_err = rec.rel_err_series.at(i);
                }
                cell.trace = std::move(t);
                cell.signal = SignalDump{key_only(cell.row), inst.x_true, rec.result.final_x};
              }
            });
          });
        }
      }
    }
  }
  Report report;
  run_all(tasks, report.cells, spec.jobs);

  // Mean row per (shape, sigma, method) over the seeds, seed left empty.
  std::size_t i = 0;
  while (i < report.cells.size()) {
    ResultRow mean = key_only(report.cells[i].row);
    mean.seed.reset();
    std::size_t j = i;
    double itr = 0, tcpu = 0, e_n = 0, err = 0, rel = 0;
    bool all_numeric = true;
    while (j < report.cells.size() && key_only(report.cells[j].row).method == mean.method &&
           report.cells[j].row.m == mean.m && report.cells[j].row.n == mean.n &&
           report.cells[j].row.k == mean.k && report.cells[j].row.sigma == mean.sigma) {
      const ResultRow& r = report.cells[j].row;
      if (!(r.itr && r.tcpu_s && r.e_n && r.mse && r.rel_err)) {
        all_numeric = false;
      } else {
        itr += *r.itr;
        tcpu += *r.tcpu_s;
        e_n += *r.e_n;
        err += *r.mse;
        rel += *r.rel_err;
      }
      ++j;
    }
    if (all_numeric) {
      const double count = static_cast<double>(j - i);
      mean.itr = itr / count;
      mean.tcpu_s = tcpu / count;
      mean.e_n = e_n / count;
      mean.mse = err / count;
      mean.rel_err = rel / count;
    }
    report.means.push_back(std::move(mean));
    i = j;
  }
  return report;
}

Report run(const RunSpec& spec) {
  switch (spec.experiment) {
    case Experiment::Beale: return run_beale(spec);
    case Experiment::Apq: return run_apq(spec);
    case Experiment::Cs: return run_cs(spec);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown experiment");
}

std::vector<ResultRow> Report::rows() const {
  std::vector<ResultRow> out;
  out.reserve(cells.size() + means.size());
  for (const auto& c : cells) out.push_back(c.row);
  out.insert(out.end(), means.begin(), means.end());
  return out;
}

bool Report::all_converged() const {
  return std::all_of(cells.begin(), cells.end(), [](const Cell& c) { return c.converged; });
}

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const auto& c : cells) {
    if (c.converged) continue;
    std::ostringstream s;
    s << c.row.experiment << ' ' << c.row.method;
    if (c.row.sigma) s << " sigma=" << *c.row.sigma;
    if (c.row.dim) s << " dim=" << *c.row.dim;
    if (c.row.m) s << " mnk=" << *c.row.m << ',' << *c.row.n << ',' << *c.row.k;
    if (c.row.seed) s << " seed=" << *c.row.seed;
    s << ": " << c.termination;
    out.push_back(s.str());
  }
  return out;
}

// ---- CSV ----

namespace {

template <class T>
void put(std::string& out, const std::optional<T>& v) {
  if (!v) return;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, *v);
  out.append(buf, res.ptr);
}

template <class T>
void put(std::ostream& out, const std::optional<T>& v) {
  std::string s;
  put(s, v);
  out << s;
}

template <class T>
std::optional<T> get(std::string_view cell, const char* column) {
  if (cell.empty()) return std::nullopt;
  T v{};
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "bad value '" + std::string(cell) + "' in column " + column);
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void put_key(std::string& out, const ResultRow& r) {
  out += r.experiment;
  out += ',';
  out += r.method;
  out += ',';
  put(out, r.sigma);
  out += ',';
  put(out, r.dim);
  out += ',';
  put(out, r.m);
  out += ',';
  put(out, r.n);
  out += ',';
  put(out, r.k);
  out += ',';
  put(out, r.seed);
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    put_key(out, r);
    for (const auto* v : {&r.itr, &r.tcpu_s, &r.e_n, &r.mse, &r.rel_err}) {
      out += ',';
      put(out, *v);
    }
    out += '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorKind::InvalidArgument, "CSV header does not match the result schema");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 13) {
      throw Error(ErrorKind::InvalidArgument,
                  "CSV row has " + std::to_string(f.size()) + " fields, expected 13");
    }
    ResultRow r;
    r.experiment = std::string(f[0]);
    r.method = std::string(f[1]);
    r.sigma = get<double>(f[2], "sigma");
    r.dim = get<long>(f[3], "dim");
    r.m = get<long>(f[4], "m");
    r.n = get<long>(f[5], "n");
    r.k = get<long>(f[6], "k");
    r.seed = get<std::uint64_t>(f[7], "seed");
    r.itr = get<double>(f[8], "itr");
    r.tcpu_s = get<double>(f[9], "tcpu_s");
    r.e_n = get<double>(f[10], "e_n");
    r.mse = get<double>(f[11], "mse");
    r.rel_err = get<double>(f[12], "rel_err");
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---- JSON ----

namespace {

template <class T>
nlohmann::json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(*v)) return nullptr;
  }
  return *v;
}

nlohmann::json row_json(const ResultRow& r) {
  return {{"experiment", r.experiment}, {"method", r.method}, {"sigma", opt(r.sigma)},
          {"dim", opt(r.dim)},          {"m", opt(r.m)},      {"n", opt(r.n)},
          {"k", opt(r.k)},              {"seed", opt(r.seed)}, {"itr", opt(r.itr)},
          {"tcpu_s", opt(r.tcpu_s)},    {"e_n", opt(r.e_n)},  {"mse", opt(r.mse)},
          {"rel_err", opt(r.rel_err)}};
}

}  // namespace

nlohmann::json to_json(const Report& report) {
  auto rows = nlohmann::json::array();
  for (const auto& c : report.cells) {
    auto j = row_json(c.row);
    j["converged"] = c.converged;
    j["termination"] = c.termination;
    if (c.dist_to_minimizer) j["dist_inf"] = opt(c.dist_to_minimizer);
    rows.push_back(std::move(j));
  }
  auto means = nlohmann::json::array();
  for (const auto& m : report.means) means.push_back(row_json(m));
  return {{"rows", std::move(rows)}, {"means", std::move(means)}};
}

void write_trace_csv(std::ostream& out, const std::vector<Trace>& traces) {
  out << "experiment,method,sigma,dim,m,n,k,seed,iter,f,e_n,alpha,theta,beta,mse,rel_err,x1,x2\n";
  for (const auto& t : traces) {
    std::string key;
    put_key(key, t.key);
    for (const auto& p : t.points) {
      out << key << ',' << p.iter;
      for (double v : {p.f_value, p.e_n, p.alpha, p.theta, p.beta}) {
        out << ',';
        put(out, std::optional<double>(v));
      }
      out << ',';
      put(out, p.mse);
      out << ',';
      put(out, p.rel_err);
      for (std::size_t i = 0; i < 2; ++i) {
        out << ',';
        if (i < p.x.size()) put(out, std::optional<double>(p.x[i]));
      }
      out << '\n';
    }
  }
}

}  // namespace mddl::bench
