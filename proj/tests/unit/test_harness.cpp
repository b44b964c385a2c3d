#include "spreadkit/harness.hpp"

#include "spreadkit/philox.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace spreadkit;

namespace {

const Check* find_check(const TableReport& r, const std::string& prefix) {
  for (const auto& c : r.checks)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("error statistics") {
  const std::vector<double> v{1.0, 2.0, 3.5}, ref{1.0, 2.5, 3.0};
  const auto s = error_stats(v, ref);
  CHECK(s.rmse == doctest::Approx(std::sqrt(0.5 / 3.0)));
  CHECK(s.mae == doctest::Approx(0.5));
  CHECK(error_stats(ref, ref).rmse == 0.0);
  CHECK_THROWS(error_stats(v, std::vector<double>{1.0}));
}

TEST_CASE("basket skewness") {
  const auto t1 = testing::table("deelstra1");
  const auto t2 = testing::table("deelstra2");
  const auto p1 = problem_at(t1, -100.0);
  const auto p2 = problem_at(t2, 60.0);
  CHECK(basket_skewness(p1.instrument, p1.model) < 0.0);
  CHECK(basket_skewness(p2.instrument, p2.model) > 0.0);

  // an exchange of two identical independent assets is symmetric
  MarketModel m;
  m.assets = {Asset{100.0, VolCurve::flat(0.3)}, Asset{100.0, VolCurve::flat(0.3)}};
  m.correlation = Eigen::MatrixXd::Identity(2, 2);
  BasketSpreadInstrument in;
  in.weights = {1.0, -1.0};
  CHECK(std::abs(basket_skewness(in, m)) < 1e-10);

  m.assets[0].vol = VolCurve::flat(0.0);
  m.assets[1].vol = VolCurve::flat(0.0);
  CHECK_THROWS_AS(basket_skewness(in, m), ValidationError);
}

TEST_CASE("skewness agrees with sampled moments") {
  const auto t = testing::table("deelstra2");
  const auto p = problem_at(t, 60.0);
  const auto cov = canonical_covariance(p.model, p.instrument.maturity);
  const Eigen::MatrixXd l = pivoted_cholesky(cov.entries);
  const Philox4x32 gen(3);
  std::vector<double> z(static_cast<std::size_t>(l.cols()));
  std::vector<double> x;
  for (int k = 0; k < 400000; ++k) {
    fill_normals(gen, static_cast<std::uint64_t>(k), z);
    const Eigen::VectorXd g = l * Eigen::Map<const Eigen::VectorXd>(z.data(), l.cols());
    double b = 0.0;
    for (std::size_t i = 0; i < p.model.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      b += p.instrument.weights[i] * p.model.assets[i].forward * std::exp(g(ii) - 0.5 * cov(i, i));
    }
    x.push_back(b);
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    m2 += (v - mean) * (v - mean);
    m3 += (v - mean) * (v - mean) * (v - mean);
  }
  m2 /= static_cast<double>(x.size());
  m3 /= static_cast<double>(x.size());
  CHECK(m3 / std::pow(m2, 1.5) == doctest::Approx(basket_skewness(p.instrument, p.model)).epsilon(0.05));
}

TEST_CASE("bundled tables pass against their printed columns") {
  for (const char* id : {"deelstra1", "deelstra2", "deelstra7", "deelstra10", "krekel2"}) {
    CAPTURE(id);
    const auto r = run_table(testing::table(id), OracleKind::Paper);
    for (const auto& c : r.checks) {
      CAPTURE(c.name);
      CAPTURE(c.detail);
      CHECK(c.passed);
    }
    CHECK(r.passed());
  }
}

TEST_CASE("report contents") {
  const auto spec = testing::table("deelstra1");
  const auto r = run_table(spec, OracleKind::Paper);
  CHECK(r.rows.size() == spec.strikes.size());
  CHECK(r.rows[0].oracle == spec.printed_reference.values[0]);
  REQUIRE(find_check(r, "vg3 vs printed") != nullptr);
  REQUIRE(find_check(r, "rmse ordering") != nullptr);
  REQUIRE(find_check(r, "footer") != nullptr);
  CHECK(find_check(r, "vg3 vs internal mc") == nullptr);

  const auto csv = report_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "strike,vg0,vg1,vg2,vg3,paper_ref,abs_err_vg0,abs_err_vg1,abs_err_vg2,abs_err_vg3");
  int lines = 1;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
  }
  CHECK(lines == static_cast<int>(spec.strikes.size()) + 3);
  CHECK(csv.find("\nRMSE,") != std::string::npos);
  CHECK(csv.find("\nMAE,") != std::string::npos);
}

TEST_CASE("internal oracle") {
  auto spec = testing::table("deelstra2");
  spec.strikes = {50.0, 60.0};
  for (auto& c : spec.printed_vg) c.resize(std::min<std::size_t>(c.size(), 2));
  spec.printed_reference.values.resize(2);
  spec.literature.clear();
  spec.footer.clear();
  McConfig mc;
  mc.paths = 200000;
  const auto r = run_table(spec, OracleKind::InternalMc, mc);
  for (const auto& row : r.rows) CHECK(row.oracle_se > 0.0);
  const auto* c = find_check(r, "vg3 vs internal mc");
  REQUIRE(c != nullptr);
  CHECK(c->passed);
  CHECK(report_csv(r).rfind("strike,vg0,vg1,vg2,vg3,mc,mc_se,", 0) == 0);
}

TEST_CASE("a deterministic ladder has no error beyond rounding") {
  TableSpec spec;
  spec.id = "flat";
  spec.problem.model.assets = {Asset{100.0, VolCurve::flat(0.0)}, Asset{90.0, VolCurve::flat(0.0)}};
  spec.problem.model.correlation = Eigen::MatrixXd::Identity(2, 2);
  spec.problem.instrument.weights = {1.0, -1.0};
  spec.strikes = {0.0, 5.0, 15.0};
  const auto r = run_table(spec, OracleKind::InternalMc, McConfig{.paths = 1000});
  for (const auto& s : r.stats) {
    CHECK(s.rmse < 1e-12);
    CHECK(s.mae < 1e-12);
  }
  CHECK(r.rows[1].vg[3] == doctest::Approx(5.0));
}

TEST_CASE("identity instances are reproducible") {
  const auto a = random_identity_instance(42, 1);
  const auto b = random_identity_instance(42, 1);
  CHECK(a.inputs.kappa_star == b.inputs.kappa_star);
  CHECK(a.inputs.direction == Direction::Put);
  CHECK(a.indices == std::array<std::size_t, 3>{1, 2, 0});
  CHECK(random_identity_instance(42, 2).inputs.kappa_star != a.inputs.kappa_star);
  CHECK(a.inputs.kappa_star > 0.5);
  CHECK(a.inputs.kappa_star < 1.5);

  McConfig mc;
  mc.paths = 200000;
  const auto checks = run_identity_suite(a, mc);
  CHECK(checks.size() == 10);
  for (const auto& c : checks) CHECK(c.passed);
}
