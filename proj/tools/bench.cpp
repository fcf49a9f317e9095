// bench: runs the Beale, APQ and compressed-sensing experiment grids and
// writes one result table (CSV or JSON).

#include "mddl/bench.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

using namespace mddl;
using namespace mddl::bench;

namespace {

struct Options {
  std::string experiment;
  std::string method = "both";
  std::vector<double> sigmas;
  std::vector<int> dims;
  std::vector<int> mnk;
  std::vector<std::uint64_t> seeds;
  std::string theta_variant = "r";
  std::string mu_rule = "scaled";
  SolverParams params;
  std::optional<double> epsilon;
  std::string out;
  std::string format = "csv";
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool dump_trace = false;
};

RunSpec build_spec(Experiment e, const Options& o) {
  RunSpec spec = default_spec(e);
  if (o.method == "both") {
    spec.methods = {Method::Mddlscg, Method::Mscg};
  } else {
    spec.methods = {parse_method(o.method)};
  }
  if (!o.sigmas.empty()) spec.sigmas = o.sigmas;
  if (!o.dims.empty()) spec.dims = o.dims;
  if (!o.mnk.empty()) {
    spec.shapes.clear();
    for (std::size_t i = 0; i < o.mnk.size(); i += 3) {
      spec.shapes.push_back({o.mnk[i], o.mnk[i + 1], o.mnk[i + 2]});
    }
  }
  if (!o.seeds.empty()) spec.seeds = o.seeds;
  spec.base = o.params;
  spec.base.theta_variant = o.theta_variant == "n" ? ThetaVariant::N : ThetaVariant::R;
  spec.epsilon = o.epsilon;
  spec.mu_rule = o.mu_rule == "floored" ? cs::MuRule::Floored : cs::MuRule::Scaled;
  spec.jobs = o.jobs;
  spec.dump_trace = o.dump_trace;
  return spec;
}

std::string stem_of(const std::string& out) {
  if (out.empty()) return "bench";
  const auto dot = out.find_last_of('.');
  const auto slash = out.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out;
  return out.substr(0, dot);
}

void dump_traces(const std::vector<Report>& reports, const std::string& stem) {
  std::vector<Trace> traces;
  for (const auto& r : reports) {
    for (const auto& c : r.cells) {
      if (c.trace) traces.push_back(*c.trace);
      if (c.signal) {
        const auto& k = c.signal->key;
        const std::string path = stem + "_signal_" + std::to_string(*k.m) + "_" +
                                 std::to_string(*k.n) + "_" + std::to_string(*k.k) +
                                 "_seed" + std::to_string(*k.seed) + "_" + k.method + ".csv";
        std::ofstream f(path);
        cs::write_signal_csv(f, c.signal->x_true, c.signal->x_recovered);
      }
    }
  }
  std::ofstream f(stem + "_trace.csv");
  write_trace_csv(f, traces);
  std::cerr << "trace written to " << stem << "_trace.csv\n";
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Conjugate gradient benchmark runner"};
  app.add_option("experiment", o.experiment, "beale, apq, cs or all")
      ->required()
      ->check(CLI::IsMember({"beale", "apq", "cs", "all"}));
  app.add_option("--method", o.method)->check(CLI::IsMember({"mddlscg", "mscg", "both"}));
  app.add_option("--sigma", o.sigmas, "curvature constants")->delimiter(',');
  app.add_option("--dims", o.dims, "APQ dimensions (25 is the fixed instance)")->delimiter(',');
  app.add_option("--mnk", o.mnk, "CS shape m,n,k (repeatable)")->delimiter(',');
  app.add_option("--seeds", o.seeds)->delimiter(',');
  app.add_option("--theta-variant", o.theta_variant)->check(CLI::IsMember({"r", "n"}));
  app.add_option("--mu-rule", o.mu_rule, "CS penalty weight rule")
      ->check(CLI::IsMember({"scaled", "floored"}));
  app.add_option("--p", o.params.p);
  app.add_option("--q", o.params.q);
  app.add_option("--eta", o.params.eta);
  app.add_option("--tau", o.params.tau);
  app.add_option("--r", o.params.r);
  app.add_option("--nu", o.params.nu);
  app.add_option("--delta", o.params.delta);
  app.add_option("--epsilon", o.epsilon, "overrides the experiment's tolerance");
  app.add_option("--out", o.out, "output file (default stdout)");
  app.add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
  app.add_flag("--dump-trace", o.dump_trace, "write per-iteration series");
  CLI11_PARSE(app, argc, argv);

  if (o.mnk.size() % 3 != 0) {
    std::cerr << "--mnk takes triples m,n,k\n";
    return 2;
  }

  std::vector<Experiment> experiments;
  if (o.experiment == "all") {
    experiments = {Experiment::Beale, Experiment::Apq, Experiment::Cs};
  } else {
    experiments = {parse_experiment(o.experiment)};
  }

  if (o.jobs > 1) {
    std::cerr << "note: running " << o.jobs
              << " cells in parallel; tcpu_s is indicative (use --jobs 1 for timing)\n";
  }

  std::vector<Report> reports;
  try {
    for (Experiment e : experiments) {
      RunSpec spec = build_spec(e, o);
      std::vector<std::string> bad = validate_params(spec.base);
      if (!bad.empty()) {
        for (const auto& b : bad) std::cerr << "invalid parameter: " << b << '\n';
        return 2;
      }
      reports.push_back(run(spec));
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }

  std::string text;
  if (o.format == "csv") {
    std::vector<ResultRow> rows;
    for (const auto& r : reports) {
      auto part = r.rows();
      rows.insert(rows.end(), part.begin(), part.end());
    }
    text = to_csv(rows);
  } else {
    nlohmann::json doc = nlohmann::json::object();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      doc[to_string(experiments[i])] = to_json(reports[i]);
    }
    text = doc.dump(2) + "\n";
  }
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out);
    if (!f) {
      std::cerr << "cannot open " << o.out << '\n';
      return 2;
    }
    f << text;
  }
  if (o.dump_trace) dump_traces(reports, stem_of(o.out));

  std::vector<std::string> failed;
  for (const auto& r : reports) {
    auto part = r.failures();
    failed.insert(failed.end(), part.begin(), part.end());
  }
  if (!failed.empty()) {
    std::cerr << failed.size() << " run(s) did not converge:\n";
    for (const auto& f : failed) std::cerr << "  " << f << '\n';
    return 1;
  }
  return 0;
}
