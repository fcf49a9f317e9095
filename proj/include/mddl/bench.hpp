#pragma once

#include "mddl/compressed_sensing.hpp"
#include "mddl/core.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mddl::bench {

enum class Experiment { Beale, Apq, Cs };
enum class Method { Mddlscg, Mscg };

const char* to_string(Experiment e);
const char* to_string(Method m);
Experiment parse_experiment(const std::string& name);
Method parse_method(const std::string& name);

/// Solver parameters for a method: MSCG swaps in the ZDK conjugate
/// parameter and its spectral rule, everything else is shared.
SolverParams method_params(Method method, const SolverParams& base);

struct RunSpec {
  Experiment experiment = Experiment::Beale;
  std::vector<Method> methods{Method::Mddlscg, Method::Mscg};
  std::vector<double> sigmas;
  std::vector<int> dims;                   // apq; 25 selects the fixed instance
  std::vector<std::array<int, 3>> shapes;  // cs (m, n, k)
  std::vector<std::uint64_t> seeds;
  SolverParams base;
  std::optional<double> epsilon;  // overrides the experiment default
  cs::MuRule mu_rule = cs::MuRule::Scaled;
  int jobs = 1;
  bool dump_trace = false;
};

/// Spec with the published grid for the experiment: the six-value sigma
/// sweep for Beale, dims {25, 100, 1000} for APQ, the two (m, n, k) presets
/// for compressed sensing, and seeds 1..10.
RunSpec default_spec(Experiment experiment);

/// Stopping tolerance used when RunSpec::epsilon is unset.
double default_epsilon(Experiment experiment);

/// One line of the result table. Field order matches kCsvHeader; unset
/// optionals are written as empty cells.
struct ResultRow {
  std::string experiment;
  std::string method;
  std::optional<double> sigma;
  std::optional<long> dim;
  std::optional<long> m;
  std::optional<long> n;
  std::optional<long> k;
  std::optional<std::uint64_t> seed;
  std::optional<double> itr;
  std::optional<double> tcpu_s;
  std::optional<double> e_n;
  std::optional<double> mse;
  std::optional<double> rel_err;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kCsvHeader =
    "experiment,method,sigma,dim,m,n,k,seed,itr,tcpu_s,e_n,mse,rel_err";

/// Per-iteration data for plotting (paths, gradient norms, MSE curves).
struct TracePoint {
  int iter = 0;
  double f_value = 0.0;
  double e_n = 0.0;
  double alpha = 0.0;
  double theta = 1.0;
  double beta = 0.0;
  std::optional<double> mse;
  std::optional<double> rel_err;
  std::vector<double> x;  // only for two-dimensional problems
};

struct Trace {
  ResultRow key;  // identifies the run; numeric result columns unset
  std::vector<TracePoint> points;
};

struct SignalDump {
  ResultRow key;
  Vector x_true;
  Vector x_recovered;
};

struct Cell {
  ResultRow row;
  bool converged = false;
  std::string termination;
  std::optional<double> dist_to_minimizer;  // APQ only: ||x - x*||_inf
  std::vector<double> thetas;               // every theta the solve emitted
  std::optional<Trace> trace;
  std::optional<SignalDump> signal;
};

struct Report {
  std::vector<Cell> cells;    // spec order
  std::vector<ResultRow> means;  // cs only: per (shape, method) averages

  std::vector<ResultRow> rows() const;
  bool all_converged() const;
  std::vector<std::string> failures() const;
};

Report run_beale(const RunSpec& spec);
Report run_apq(const RunSpec& spec);
Report run_cs(const RunSpec& spec);
Report run(const RunSpec& spec);

std::string to_csv(const std::vector<ResultRow>& rows);
/// Inverse of to_csv. Throws Error(InvalidArgument) on a header mismatch or
/// malformed cell.
std::vector<ResultRow> parse_csv(const std::string& text);

nlohmann::json to_json(const Report& report);

void write_trace_csv(std::ostream& out, const std::vector<Trace>& traces);

}  // namespace mddl::bench
