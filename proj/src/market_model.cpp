#include "spreadkit/market_model.hpp"

#include <algorithm>
#include <cmath>

namespace spreadkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

VolCurve::VolCurve(std::vector<VolSegment> segments) : segments_(std::move(segments)) {
  double prev = 0.0;
  for (const auto& s : segments_) {
    require(s.end_time > prev, "vol curve: segment end times must be positive and strictly increasing");
    require(std::isfinite(s.vol) && s.vol >= 0.0, "vol curve: volatilities must be finite and non-negative");
    prev = s.end_time;
  }
}

VolCurve VolCurve::flat(double vol) { return VolCurve({{kInf, vol}}); }

double VolCurve::vol_at(double t) const {
  if (segments_.empty()) return 0.0;
  for (const auto& s : segments_) {
    if (t <= s.end_time) return s.vol;
  }
  return segments_.back().vol;
}

VolCurve VolCurve::truncated(double t) const {
  if (t <= 0.0 || segments_.empty()) return VolCurve();
  std::vector<VolSegment> out;
  for (const auto& s : segments_) {
    if (s.end_time < t) {
      out.push_back(s);
    } else {
      out.push_back({t, s.vol});
      break;
    }
  }
  if (out.back().end_time < t) out.push_back({t, segments_.back().vol});
  out.push_back({kInf, 0.0});
  return VolCurve(std::move(out));
}

bool VolCurve::is_zero() const {
  return std::all_of(segments_.begin(), segments_.end(), [](const VolSegment& s) { return s.vol == 0.0; });
}

double VolCurve::cross_integral(const VolCurve& a, const VolCurve& b, double t) {
  if (t <= 0.0 || a.segments_.empty() || b.segments_.empty()) return 0.0;
  std::vector<double> knots;
  for (const auto& s : a.segments_)
    if (s.end_time < t) knots.push_back(s.end_time);
  for (const auto& s : b.segments_)
    if (s.end_time < t) knots.push_back(s.end_time);
  knots.push_back(t);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  double sum = 0.0;
  double lo = 0.0;
  for (double hi : knots) {
    sum += a.vol_at(hi) * b.vol_at(hi) * (hi - lo);
    lo = hi;
  }
  return sum;
}

double Asset::forward_at(double t, double maturity) const {
  if (forward_curve.empty()) return forward * std::exp(-carry * (maturity - t));
  if (t <= forward_curve.front().first) return forward_curve.front().second;
  if (t >= forward_curve.back().first) return forward_curve.back().second;
  auto hi = std::lower_bound(forward_curve.begin(), forward_curve.end(), t,
                             [](const auto& node, double x) { return node.first < x; });
  auto lo = std::prev(hi);
  const double u = (t - lo->first) / (hi->first - lo->first);
  return std::exp((1.0 - u) * std::log(lo->second) + u * std::log(hi->second));
}

Asset Asset::from_spot(double spot, double rate, double dividend, VolCurve vol, double maturity) {
  Asset a;
  a.carry = rate - dividend;
  a.forward = spot * std::exp(a.carry * maturity);
  a.vol = std::move(vol);
  return a;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void MarketModel::validate() const {
  const auto n = idx(assets.size());
  require(correlation.rows() == n && correlation.cols() == n, "correlation matrix size does not match asset count");
  for (const auto& a : assets) {
    require(std::isfinite(a.forward) && a.forward > 0.0, "forwards must be positive");
    for (std::size_t k = 1; k < a.forward_curve.size(); ++k)
      require(a.forward_curve[k].first > a.forward_curve[k - 1].first, "forward curve times must increase");
    for (const auto& [t, f] : a.forward_curve) require(f > 0.0, "forward curve values must be positive");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    require(correlation(i, i) == 1.0, "correlation diagonal must be 1");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double r = correlation(i, j);
      require(std::isfinite(r) && r >= -1.0 && r <= 1.0, "correlation entries must lie in [-1, 1]");
      require(std::abs(r - correlation(j, i)) <= 1e-12, "correlation matrix must be symmetric");
    }
  }
  require(min_eigenvalue(correlation) >= -kPsdTolerance, "correlation matrix is not positive semidefinite");
  require(discount_factor > 0.0 && discount_factor <= 1.0, "discount factor must lie in (0, 1]");
}

void BasketSpreadInstrument::validate(std::size_t asset_count) const {
  require(weights.size() == asset_count, "weight count does not match asset count");
  require(std::any_of(weights.begin(), weights.end(), [](double w) { return w != 0.0; }),
          "at least one weight must be nonzero");
  for (double w : weights) require(std::isfinite(w), "weights must be finite");
  require(std::isfinite(strike) && std::isfinite(mult_strike), "strikes must be finite");
  require(maturity > 0.0, "maturity must be positive");
}

double AsianBasketSpec::asian_weight(std::size_t asset, std::size_t obs) const {
  const auto& row = asian_weights.size() == 1 ? asian_weights.front() : asian_weights[asset];
  return row[obs];
}

std::size_t AsianBasketSpec::fixing_count(std::size_t asset) const {
  return asset < fixings.size() ? fixings[asset].size() : 0;
}

void AsianBasketSpec::validate() const {
  require(!basket_weights.empty(), "asian basket needs at least one asset");
  require(maturity > 0.0, "maturity must be positive");
  for (std::size_t i = 0; i < obs_times.size(); ++i) {
    require(obs_times[i] <= maturity, "observation times must not exceed maturity");
    if (i > 0) require(obs_times[i] > obs_times[i - 1], "observation times must be increasing");
  }
  require(asian_weights.size() == 1 || asian_weights.size() == asset_count(),
          "asian weights must be one shared row or one row per asset");
  for (const auto& row : asian_weights) {
    require(row.size() == obs_times.size(), "asian weight row length must match observation count");
    for (double w : row) require(std::isfinite(w) && w >= 0.0, "asian weights must be non-negative");
  }
  require(fixings.size() <= asset_count(), "more fixing rows than assets");
  for (const auto& row : fixings) require(row.size() <= obs_times.size(), "more fixings than observations");
}

CovarianceMatrix canonical_covariance(const MarketModel& model, double maturity) {
  require(maturity > 0.0, "maturity must be positive");
  model.validate();
  const std::size_t n = model.size();
  CovarianceMatrix cov{Eigen::MatrixXd::Zero(idx(n), idx(n)), maturity};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double rho = model.correlation(idx(i), idx(j));
      const double v =
          rho == 0.0 ? 0.0 : rho * VolCurve::cross_integral(model.assets[i].vol, model.assets[j].vol, maturity);
      cov.entries(idx(i), idx(j)) = v;
      cov.entries(idx(j), idx(i)) = v;
    }
  }
  return cov;
}

ReducedBasket reduce_asian(const std::vector<double>& obs_times, const std::vector<double>& weights,
                           double maturity, const MarketModel& model, std::size_t asset) {
  require(asset < model.size(), "asset index out of range");
  require(!obs_times.empty(), "asian option needs at least one observation");
  MarketModel single;
  single.assets = {model.assets[asset]};
  single.correlation = Eigen::MatrixXd::Identity(1, 1);
  single.discount_factor = model.discount_factor;
  AsianBasketSpec spec;
  spec.obs_times = obs_times;
  spec.asian_weights = {weights};
  spec.basket_weights = {1.0};
  spec.maturity = maturity;
  return reduce_asian_basket(spec, single);
}

ReducedBasket reduce_asian_basket(const AsianBasketSpec& spec, const MarketModel& model) {
  spec.validate();
  model.validate();
  require(spec.asset_count() == model.size(), "basket weight count does not match asset count");
  for (std::size_t j = 0; j < spec.asset_count(); ++j)
    require(spec.fixing_count(j) == 0, "apply fixings before reducing the asian basket");

  const std::size_t n = spec.obs_count();
  const std::size_t m = spec.asset_count();
  std::vector<std::size_t> underlying;
  ReducedBasket out;
  out.instrument.maturity = spec.maturity;
  out.model.discount_factor = model.discount_factor;

  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double w = spec.basket_weights[j] * spec.asian_weight(j, i);
      if (w == 0.0) continue;
      const double t = spec.obs_times[i];
      require(t >= 0.0, "past observation without a fixing");
      Asset pseudo;
      pseudo.forward = model.assets[j].forward_at(t, spec.maturity);
      pseudo.vol = model.assets[j].vol.truncated(t);
      out.model.assets.push_back(std::move(pseudo));
      out.instrument.weights.push_back(w);
      underlying.push_back(j);
    }
  }

  const std::size_t k = underlying.size();
  out.model.correlation.resize(idx(k), idx(k));
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = 0; q < k; ++q)
      out.model.correlation(idx(p), idx(q)) =
          p == q ? 1.0 : model.correlation(idx(underlying[p]), idx(underlying[q]));
  return out;
}

ReducedBasket fold_strike(const BasketSpreadInstrument& instr, const MarketModel& model) {
  instr.validate(model.size());
  ReducedBasket out{instr, model};
  for (double& w : out.instrument.weights)
    if (w < 0.0) w *= instr.mult_strike;
  out.instrument.mult_strike = 1.0;
  out.instrument.strike = 0.0;

  if (instr.strike != 0.0) {
    Asset pseudo;
    pseudo.forward = std::abs(instr.strike);
    out.model.assets.push_back(std::move(pseudo));
    out.instrument.weights.push_back(instr.strike > 0.0 ? -1.0 : 1.0);
    const auto n = out.model.correlation.rows();
    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(n + 1, n + 1);
    corr.topLeftCorner(n, n) = model.correlation;
    corr(n, n) = 1.0;
    out.model.correlation = std::move(corr);
  }

  const auto& w = out.instrument.weights;
  if (std::none_of(w.begin(), w.end(), [](double x) { return x > 0.0; }))
    throw ValidationError("degenerate positive leg");
  return out;
}

FixingsResult apply_fixings(const AsianBasketSpec& spec, double mult_strike) {
  spec.validate();
  const std::size_t n = spec.obs_count();
  const std::size_t m = spec.asset_count();

  std::vector<std::vector<double>> weights(m, std::vector<double>(n));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) weights[j][i] = spec.asian_weight(j, i);

  FixingsResult out;
  for (std::size_t j = 0; j < m; ++j) {
    const double scale = spec.basket_weights[j] < 0.0 ? mult_strike : 1.0;
    for (std::size_t i = 0; i < spec.fixing_count(j); ++i) {
      require(spec.obs_times[i] <= 0.0, "fixing supplied for a future observation");
      out.strike_adjustment += scale * spec.basket_weights[j] * weights[j][i] * spec.fixings[j][i];
      weights[j][i] = 0.0;
    }
  }

  out.spec.basket_weights = spec.basket_weights;
  out.spec.maturity = spec.maturity;
  out.spec.asian_weights.assign(m, {});
  for (std::size_t i = 0; i < n; ++i) {
    bool live = false;
    for (std::size_t j = 0; j < m; ++j) live = live || weights[j][i] != 0.0;
    if (!live) continue;
    out.spec.obs_times.push_back(spec.obs_times[i]);
    for (std::size_t j = 0; j < m; ++j) out.spec.asian_weights[j].push_back(weights[j][i]);
  }
  return out;
}

}  // namespace spreadkit
