#pragma once

#include "spreadkit/black76.hpp"
#include "spreadkit/json_io.hpp"
#include "spreadkit/market_model.hpp"
#include "spreadkit/philox.hpp"
#include "spreadkit/proxy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#ifndef SPREADKIT_DATA_DIR
#define SPREADKIT_DATA_DIR "data"
#endif

namespace testing {

using namespace spreadkit;

inline std::filesystem::path data_dir() { return SPREADKIT_DATA_DIR; }
inline TableSpec table(const std::string& id) { return load_table(data_dir() / "tables" / (id + ".json")); }

/// Portable uniforms for test fixtures.
class Uniforms {
 public:
  explicit Uniforms(std::uint64_t seed) : gen_(seed) {}
  double operator()(double lo = 0.0, double hi = 1.0) {
    const auto x = gen_({n_++, 0u, 0x7e57u, 0u});
    return lo + (hi - lo) * ((static_cast<double>(x[0]) + 0.5) / 4294967296.0);
  }

 private:
  Philox4x32 gen_;
  std::uint32_t n_ = 0;
};

/// Random m-asset model: flat or two-segment vols, Gram-matrix correlation.
inline MarketModel random_model(Uniforms& u, int m, double maturity) {
  MarketModel model;
  for (int i = 0; i < m; ++i) {
    Asset a;
    a.forward = u(50.0, 150.0);
    a.vol = VolCurve({{0.4 * maturity, u(0.1, 0.5)}, {maturity, u(0.1, 0.5)}});
    model.assets.push_back(a);
  }
  Eigen::MatrixXd g(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) g(i, j) = u(-1.0, 1.0);
    g.row(i).normalize();
  }
  model.correlation = g * g.transpose();
  for (int i = 0; i < m; ++i) model.correlation(i, i) = 1.0;
  model.discount_factor = std::exp(-0.02 * maturity);
  return model;
}

/// Alternating-sign weights, first one negative.
inline BasketSpreadInstrument random_spread(Uniforms& u, int m, double maturity) {
  BasketSpreadInstrument instr;
  instr.maturity = maturity;
  for (int i = 0; i < m; ++i) instr.weights.push_back((i % 2 == 0 ? -1.0 : 1.0) * u(0.3, 1.5));
  return instr;
}

/// c + u'X for the Gaussian log-return vector X ~ N(0, V).
struct LogLinear {
  double c = 0.0;
  Eigen::VectorXd u;

  LogLinear operator+(const LogLinear& o) const { return {c + o.c, u + o.u}; }
  LogLinear operator-(const LogLinear& o) const { return {c - o.c, u - o.u}; }
  LogLinear operator*(double k) const { return {k * c, k * u}; }
};

inline LogLinear log_s_star(const ExpansionInputs& in, std::size_t i) {
  const auto n = static_cast<Eigen::Index>(in.size());
  LogLinear s{-0.5 * in.cov(i, i), Eigen::VectorXd::Zero(n)};
  s.u(static_cast<Eigen::Index>(i)) = 1.0;
  return s;
}

inline LogLinear log_leg(const ExpansionInputs& in, int sign) {
  LogLinear g{std::log(sign > 0 ? in.alpha : in.beta), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(in.size()))};
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in.leg[i] == sign) g = g + log_s_star(in, i) * std::abs(in.exponent[i]);
  return g;
}

/// E[B exp(x) h(exp(r) - kappa*)] by exponential tilting: under the measure
/// weighted by exp(x), r stays Gaussian with its mean shifted by Cov(x, r).
inline double tilted(const ExpansionInputs& in, const LogLinear& x, const LogLinear& r) {
  const Eigen::VectorXd vx = in.cov * x.u;
  const Eigen::VectorXd vr = in.cov * r.u;
  const double var_r = r.u.dot(vr);
  BlackParams p;
  p.forward = std::exp(r.c + x.u.dot(vr) + 0.5 * var_r);
  p.strike = in.kappa_star;
  p.variance = var_r;
  p.maturity = in.maturity;
  p.direction = in.direction;
  p.discount = in.discount;
  return std::exp(x.c + 0.5 * x.u.dot(vx)) * black(p);
}

}  // namespace testing
