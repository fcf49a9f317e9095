#include "mddl/bench.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace mddl;
using namespace mddl::bench;

namespace {

// Everything except timing.
std::vector<ResultRow> without_timing(std::vector<ResultRow> rows) {
  for (auto& r : rows) r.tcpu_s.reset();
  return rows;
}

}  // namespace

TEST_CASE("CSV header is exact") {
  const std::string csv = to_csv({});
  CHECK(csv == "experiment,method,sigma,dim,m,n,k,seed,itr,tcpu_s,e_n,mse,rel_err\n");
}

TEST_CASE("absent fields are empty cells") {
  ResultRow r;
  r.experiment = "beale";
  r.method = "mddlscg";
  r.sigma = 0.1;
  r.dim = 2;
  r.itr = 11;
  r.tcpu_s = 0.5;
  r.e_n = 0.0;
  const std::string csv = to_csv({r});
  CHECK(csv.substr(csv.find('\n') + 1) == "beale,mddlscg,0.1,2,,,,,11,0.5,0,,\n");
}

TEST_CASE("property: CSV round trip") {
  std::mt19937_64 gen(37);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<ResultRow> rows;
  for (int i = 0; i < 500; ++i) {
    ResultRow r;
    r.experiment = coin(gen) ? "cs" : "apq";
    r.method = coin(gen) ? "mddlscg" : "mscg";
    auto maybe = [&](auto& field, auto value) {
      if (coin(gen)) field = value;
    };
    maybe(r.sigma, u(gen));
    maybe(r.dim, static_cast<long>(gen() % 5000));
    maybe(r.m, static_cast<long>(gen() % 5000));
    maybe(r.n, static_cast<long>(gen() % 5000));
    maybe(r.k, static_cast<long>(gen() % 5000));
    maybe(r.seed, gen());
    maybe(r.itr, std::floor(std::abs(u(gen))));
    maybe(r.tcpu_s, std::abs(u(gen)) * 1e-7);
    maybe(r.e_n, std::ldexp(std::abs(u(gen)), -60));
    maybe(r.mse, u(gen) * 1e-300);
    maybe(r.rel_err, 5e-324);
    rows.push_back(r);
  }
  CHECK(parse_csv(to_csv(rows)) == rows);
}

TEST_CASE("CSV parser rejects foreign input") {
  CHECK_THROWS_AS(parse_csv("a,b\n"), Error);
  CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\nbeale,mddlscg\n"), Error);
  CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\nbeale,mddlscg,x,,,,,,,,,,\n"), Error);
}

TEST_CASE("names") {
  CHECK(parse_experiment("apq") == Experiment::Apq);
  CHECK(parse_method("mscg") == Method::Mscg);
  CHECK_THROWS_AS(parse_method("scg"), Error);
  CHECK(method_params(Method::Mscg, SolverParams{}).beta_rule == BetaRule::ZDK);
  CHECK(method_params(Method::Mddlscg, SolverParams{}).beta_rule == BetaRule::MDDL);
}

TEST_CASE("Beale sweep") {
  RunSpec spec = default_spec(Experiment::Beale);
  const Report rep = run_beale(spec);
  REQUIRE(rep.cells.size() == 12);
  int mddl_rows = 0;
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    const auto& c = rep.cells[i];
    CHECK(c.converged);
    CHECK(*c.row.e_n < 1e-15);
    CHECK(c.row.dim == 2);
    CHECK_FALSE(c.row.seed.has_value());
    CHECK_FALSE(c.row.mse.has_value());
    if (c.row.method == "mddlscg") ++mddl_rows;
    // spec order: sigma outer, method inner
    CHECK(*c.row.sigma == spec.sigmas[i / 2]);
  }
  CHECK(mddl_rows == 6);
  CHECK(rep.all_converged());
  CHECK(rep.failures().empty());
}

TEST_CASE("Beale trace dump") {
  RunSpec spec = default_spec(Experiment::Beale);
  spec.sigmas = {0.1};
  spec.dump_trace = true;
  const Report rep = run_beale(spec);
  for (const auto& c : rep.cells) {
    REQUIRE(c.trace.has_value());
    CHECK(c.trace->points.size() == static_cast<std::size_t>(*c.row.itr));
    CHECK(c.trace->points.back().x.size() == 2);
  }
  std::ostringstream out;
  write_trace_csv(out, {*rep.cells[0].trace});
  const std::string text = out.str();
  const auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == 1 + static_cast<long>(*rep.cells[0].row.itr));
}

TEST_CASE("APQ rows") {
  RunSpec spec = default_spec(Experiment::Apq);
  spec.dims = {25, 60};
  spec.seeds = {1, 2, 3};
  const Report rep = run_apq(spec);
  REQUIRE(rep.cells.size() == 2 + 6);
  CHECK_FALSE(rep.cells[0].row.seed.has_value());
  CHECK(rep.cells[0].row.dim == 25);
  for (const auto& c : rep.cells) {
    CHECK(c.converged);
    CHECK(*c.row.e_n < 1e-6);
    REQUIRE(c.dist_to_minimizer.has_value());
    CHECK(*c.dist_to_minimizer < 1e-4);
  }
  CHECK(rep.cells[2].row.seed == 1u);
  const auto doc = to_json(rep);
  CHECK(doc["rows"].size() == 8);
  CHECK(doc["rows"][0].contains("dist_inf"));
}

TEST_CASE("CS rows, means and series") {
  RunSpec spec = default_spec(Experiment::Cs);
  CHECK(spec.shapes.size() == 2);
  CHECK(spec.shapes[0] == std::array<int, 3>{128, 512, 16});
  CHECK(spec.shapes[1] == std::array<int, 3>{256, 1024, 32});
  spec.shapes = {{32, 96, 3}};
  spec.seeds = {1, 2, 3};
  spec.dump_trace = true;
  const Report rep = run_cs(spec);
  REQUIRE(rep.cells.size() == 6);
  REQUIRE(rep.means.size() == 2);
  double itr = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& c = rep.cells[i];
    itr += *c.row.itr;
    REQUIRE(c.trace.has_value());
    CHECK(c.trace->points.size() == static_cast<std::size_t>(*c.row.itr));
    CHECK(c.trace->points.back().mse == c.row.mse);
    REQUIRE(c.signal.has_value());
    CHECK(c.signal->x_true.size() == 96);
  }
  CHECK(rep.means[0].method == "mddlscg");
  CHECK_FALSE(rep.means[0].seed.has_value());
  CHECK(*rep.means[0].itr == doctest::Approx(itr / 3));
  CHECK(rep.rows().size() == 8);
}

TEST_CASE("parallel runs reproduce the serial table") {
  RunSpec spec = default_spec(Experiment::Apq);
  spec.dims = {25, 100};
  spec.seeds = {1, 2, 3, 4};
  spec.jobs = 1;
  const auto serial = without_timing(run(spec).rows());
  spec.jobs = 4;
  const auto parallel = without_timing(run(spec).rows());
  CHECK(serial == parallel);
}

TEST_CASE("invalid specs") {
  RunSpec spec = default_spec(Experiment::Cs);
  spec.seeds.clear();
  CHECK_THROWS_AS(run(spec), Error);
  spec = default_spec(Experiment::Beale);
  spec.sigmas.clear();
  CHECK_THROWS_AS(run(spec), Error);
  spec = default_spec(Experiment::Cs);
  spec.shapes = {{10, 5, 1}};
  CHECK_THROWS_AS(run(spec), Error);
}

TEST_CASE("solver errors stay in their row") {
  RunSpec spec = default_spec(Experiment::Beale);
  spec.sigmas = {0.1};
  spec.base.p = 0.2;  // invalid, rejected inside every cell
  const Report rep = run(spec);
  CHECK_FALSE(rep.all_converged());
  CHECK(rep.failures().size() == 2);
  CHECK(rep.cells[0].termination.rfind("error:", 0) == 0);
}
