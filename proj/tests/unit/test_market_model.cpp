#include "spreadkit/market_model.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace spreadkit;

namespace {

MarketModel two_assets(double s1, double s2, double rho) {
  MarketModel m;
  m.assets = {Asset{100.0, VolCurve::flat(s1)}, Asset{110.0, VolCurve::flat(s2)}};
  m.correlation = Eigen::MatrixXd{{1.0, rho}, {rho, 1.0}};
  m.discount_factor = 0.95;
  return m;
}

// midpoint rule on a fine grid; the integrands are piecewise constant
double integrate(const VolCurve& a, const VolCurve& b, double t, int steps = 100000) {
  const double h = t / steps;
  double sum = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double s = (k + 0.5) * h;
    sum += a.vol_at(s) * b.vol_at(s);
  }
  return sum * h;
}

}  // namespace

TEST_CASE("vol curve integrals") {
  const VolCurve v({{0.5, 0.2}, {1.5, 0.4}});
  CHECK(v.variance(0.25) == doctest::Approx(0.04 * 0.25).epsilon(1e-15));
  CHECK(v.variance(1.0) == doctest::Approx(0.04 * 0.5 + 0.16 * 0.5).epsilon(1e-15));
  CHECK(v.variance(2.0) == doctest::Approx(0.04 * 0.5 + 0.16 * 1.5).epsilon(1e-15));  // last segment extends
  CHECK(v.variance(0.0) == 0.0);
  CHECK(VolCurve().variance(3.0) == 0.0);
  CHECK(v.truncated(0.8).variance(5.0) == doctest::Approx(v.variance(0.8)).epsilon(1e-15));
  const VolCurve w({{0.3, 0.5}, {0.9, 0.1}, {2.0, 0.3}});
  CHECK(VolCurve::cross_integral(v, w, 1.7) == doctest::Approx(integrate(v, w, 1.7)).epsilon(1e-6));
  CHECK_THROWS_AS(VolCurve({{0.5, 0.2}, {0.5, 0.3}}), ValidationError);
  CHECK_THROWS_AS(VolCurve({{0.5, -0.2}}), ValidationError);
}

TEST_CASE("canonical covariance") {
  const auto cov = canonical_covariance(two_assets(0.6, 0.6, 0.28), 1.0);
  CHECK(cov(0, 0) == doctest::Approx(0.36).epsilon(1e-15));
  CHECK(cov(0, 1) == doctest::Approx(0.1008).epsilon(1e-15));
  CHECK(cov(1, 0) == cov(0, 1));

  auto m = two_assets(0.0, 0.3, 0.5);
  const auto z = canonical_covariance(m, 2.0);
  CHECK(z(0, 0) == 0.0);
  CHECK(z(0, 1) == 0.0);
  CHECK(z(1, 1) == doctest::Approx(0.18));
}

TEST_CASE("market validation") {
  auto m = two_assets(0.2, 0.2, 0.5);
  m.correlation(0, 1) = 0.4;
  CHECK_THROWS_AS(m.validate(), ValidationError);  // asymmetric

  MarketModel bad;
  for (int i = 0; i < 3; ++i) bad.assets.push_back(Asset{100.0, VolCurve::flat(0.2)});
  bad.correlation = Eigen::MatrixXd{{1.0, 0.9, -0.9}, {0.9, 1.0, 0.9}, {-0.9, 0.9, 1.0}};
  CHECK_THROWS_WITH_AS(bad.validate(), "correlation matrix is not positive semidefinite", ValidationError);

  m = two_assets(0.2, 0.2, 0.5);
  m.discount_factor = 1.2;
  CHECK_THROWS_AS(m.validate(), ValidationError);
  m = two_assets(0.2, 0.2, 0.5);
  m.assets[0].forward = -1.0;
  CHECK_THROWS_AS(m.validate(), ValidationError);
  CHECK_THROWS_AS(canonical_covariance(two_assets(0.2, 0.2, 0.5), 0.0), ValidationError);
}

TEST_CASE("forwards per observation date") {
  Asset a{100.0, VolCurve::flat(0.2), 0.05, {}};
  CHECK(a.forward_at(1.0, 1.0) == 100.0);
  CHECK(a.forward_at(0.5, 1.0) == doctest::Approx(100.0 * std::exp(-0.025)));
  a.forward_curve = {{0.0, 90.0}, {1.0, 110.0}};
  CHECK(a.forward_at(0.5, 1.0) == doctest::Approx(std::sqrt(90.0 * 110.0)));
  CHECK(a.forward_at(-1.0, 1.0) == 90.0);
  const auto s = Asset::from_spot(100.0, 0.05, 0.02, VolCurve::flat(0.2), 2.0);
  CHECK(s.forward == doctest::Approx(100.0 * std::exp(0.06)));
}

TEST_CASE("two-date asian reduction") {
  MarketModel m;
  m.assets = {Asset{100.0, VolCurve::flat(0.3), 0.04, {}}};
  m.correlation = Eigen::MatrixXd::Identity(1, 1);
  const auto r = reduce_asian({0.5, 1.0}, {0.5, 0.5}, 1.0, m);
  REQUIRE(r.model.size() == 2);
  const auto cov = canonical_covariance(r.model, 1.0);
  CHECK(cov(0, 0) == doctest::Approx(0.09 * 0.5));
  CHECK(cov(1, 1) == doctest::Approx(0.09));
  CHECK(cov(0, 1) == doctest::Approx(0.09 * 0.5));  // v at the earlier date
  // implied correlation sqrt(t1 / t2)
  CHECK(cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1)) == doctest::Approx(std::sqrt(0.5)));
  CHECK(r.model.assets[0].forward == doctest::Approx(100.0 * std::exp(-0.02)));
  CHECK(r.instrument.weights == std::vector<double>{0.5, 0.5});
}

TEST_CASE("thirty-date schedule against direct integration") {
  MarketModel m;
  m.assets = {Asset{100.0, VolCurve({{0.3, 0.25}, {0.7, 0.45}, {1.2, 0.3}}), 0.0, {}}};
  m.correlation = Eigen::MatrixXd::Identity(1, 1);
  std::vector<double> t, w;
  for (int i = 0; i < 30; ++i) {
    t.push_back(0.04 * (i + 1));
    w.push_back(1.0 / 30.0);
  }
  const auto r = reduce_asian(t, w, 1.2, m);
  const auto cov = canonical_covariance(r.model, 1.2);
  // entries depend on the earlier date only
  std::vector<double> direct;
  for (double ti : t) direct.push_back(integrate(m.assets[0].vol, m.assets[0].vol, ti, 1000000));
  double worst = 0.0;
  for (int a = 0; a < 30; ++a)
    for (int b = a; b < 30; ++b) worst = std::max(worst, std::abs(cov(a, b) - direct[static_cast<std::size_t>(a)]));
  CHECK(worst < 1e-6);
}

TEST_CASE("asian basket reduction") {
  const auto m = two_assets(0.3, 0.5, -0.4);
  AsianBasketSpec spec;
  spec.obs_times = {0.25, 0.75};
  spec.asian_weights = {{0.4, 0.6}};
  spec.basket_weights = {1.0, -2.0};
  spec.maturity = 1.0;
  const auto r = reduce_asian_basket(spec, m);
  REQUIRE(r.model.size() == 4);
  CHECK(r.instrument.weights == std::vector<double>{0.4, 0.6, -0.8, -1.2});
  const auto cov = canonical_covariance(r.model, 1.0);
  // pseudo-asset (obs i, asset j) sits at i + 2 j
  CHECK(cov(1, 2) == doctest::Approx(-0.4 * 0.15 * 0.25).epsilon(1e-14));
  CHECK(cov(1, 3) == doctest::Approx(-0.4 * 0.15 * 0.75).epsilon(1e-14));
  CHECK(cov(2, 3) == doctest::Approx(0.25 * 0.25).epsilon(1e-14));

  SUBCASE("one asset matches the single-asset reduction") {
    MarketModel one;
    one.assets = {m.assets[0]};
    one.correlation = Eigen::MatrixXd::Identity(1, 1);
    AsianBasketSpec s1 = spec;
    s1.basket_weights = {1.0};
    const auto a = canonical_covariance(reduce_asian_basket(s1, one).model, 1.0).entries;
    const auto b = canonical_covariance(reduce_asian(spec.obs_times, spec.asian_weights[0], 1.0, one).model, 1.0).entries;
    CHECK(a == b);
  }
  SUBCASE("one date at maturity is the plain basket") {
    AsianBasketSpec s1 = spec;
    s1.obs_times = {1.0};
    s1.asian_weights = {{1.0}};
    const auto a = canonical_covariance(reduce_asian_basket(s1, m).model, 1.0).entries;
    const auto b = canonical_covariance(m, 1.0).entries;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("zero-weight pairs are dropped") {
    AsianBasketSpec s1 = spec;
    s1.asian_weights = {{0.0, 1.0}, {1.0, 0.0}};
    const auto r1 = reduce_asian_basket(s1, m);
    CHECK(r1.model.size() == 2);
  }
  SUBCASE("schedule errors") {
    AsianBasketSpec s1 = spec;
    s1.obs_times = {0.75, 0.25};
    CHECK_THROWS_AS(reduce_asian_basket(s1, m), ValidationError);
    s1 = spec;
    s1.obs_times = {0.25, 1.5};
    CHECK_THROWS_AS(reduce_asian_basket(s1, m), ValidationError);
    s1 = spec;
    s1.asian_weights = {{0.5}};
    CHECK_THROWS_AS(reduce_asian_basket(s1, m), ValidationError);
  }
}

TEST_CASE("strike folding") {
  const auto m = two_assets(0.3, 0.3, 0.5);
  BasketSpreadInstrument in;
  in.weights = {-1.0, 1.0};
  in.strike = -100.0;
  auto f = fold_strike(in, m);
  REQUIRE(f.model.size() == 3);
  CHECK(f.instrument.weights == std::vector<double>{-1.0, 1.0, 1.0});
  CHECK(f.model.assets[2].forward == 100.0);
  CHECK(f.model.assets[2].vol.is_zero());
  CHECK(f.instrument.strike == 0.0);
  CHECK(f.model.correlation(2, 0) == 0.0);
  CHECK(f.model.correlation(2, 2) == 1.0);

  in.strike = 0.0;
  CHECK(fold_strike(in, m).model.size() == 2);

  // pure basket with a positive strike: the negative leg is the strike alone
  in.weights = {0.5, 0.5};
  in.strike = 50.0;
  f = fold_strike(in, m);
  CHECK(f.instrument.weights == std::vector<double>{0.5, 0.5, -1.0});

  in.weights = {-1.0, 1.0};
  in.strike = 10.0;
  in.mult_strike = 1.5;
  f = fold_strike(in, m);
  CHECK(f.instrument.weights == std::vector<double>{-1.5, 1.0, -1.0});
  CHECK(f.instrument.mult_strike == 1.0);

  in.weights = {-1.0, -1.0};
  in.mult_strike = 1.0;
  CHECK_THROWS_WITH_AS(fold_strike(in, m), "degenerate positive leg", ValidationError);
}

TEST_CASE("fixings") {
  AsianBasketSpec spec;
  spec.obs_times = {-0.5, 0.0, 0.5, 1.0};
  spec.asian_weights = {{0.25, 0.25, 0.25, 0.25}};
  spec.basket_weights = {1.0, -1.0};
  spec.maturity = 1.0;

  SUBCASE("none") {
    const auto r = apply_fixings(spec);
    CHECK(r.strike_adjustment == 0.0);
    CHECK(r.spec.obs_times == spec.obs_times);
  }
  SUBCASE("a fixed prefix becomes a strike adjustment") {
    spec.fixings = {{100.0, 104.0}, {90.0}};
    const auto r = apply_fixings(spec, 2.0);
    CHECK(r.strike_adjustment == doctest::Approx(0.25 * (100.0 + 104.0) - 2.0 * 0.25 * 90.0));
    CHECK(r.spec.obs_times == std::vector<double>{0.0, 0.5, 1.0});  // asset 1 still live at t = 0
    CHECK(r.spec.asian_weights[0] == std::vector<double>{0.0, 0.25, 0.25});
    CHECK(r.spec.asian_weights[1] == std::vector<double>{0.25, 0.25, 0.25});
  }
  SUBCASE("future fixings are rejected") {
    spec.fixings = {{100.0, 104.0, 101.0}};
    CHECK_THROWS_WITH_AS(apply_fixings(spec), "fixing supplied for a future observation", ValidationError);
  }
  SUBCASE("past observations need fixings") {
    MarketModel m;
    m.assets = {Asset{100.0, VolCurve::flat(0.2)}, Asset{100.0, VolCurve::flat(0.2)}};
    m.correlation = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_WITH_AS(reduce_asian_basket(spec, m), "past observation without a fixing", ValidationError);
  }
}
