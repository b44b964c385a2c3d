#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spreadkit {

/// Malformed or inconsistent market/instrument data.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerically infeasible construction (e.g. Levy moment matching).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Direction : int { Call = 1, Put = -1 };

constexpr double eta(Direction d) { return d == Direction::Call ? 1.0 : -1.0; }

constexpr double kPsdTolerance = 1e-10;

struct VolSegment {
  double end_time;  // years; +inf allowed for the last segment
  double vol;       // instantaneous, per sqrt(year)
};

/// Piecewise-constant instantaneous volatility. Segment k covers
/// (end_{k-1}, end_k]; the last segment extends to infinity.
/// A default-constructed curve has zero volatility everywhere.
class VolCurve {
 public:
  VolCurve() = default;
  explicit VolCurve(std::vector<VolSegment> segments);

  static VolCurve flat(double vol);

  double vol_at(double t) const;
  double variance(double t) const { return cross_integral(*this, *this, t); }

  /// Same curve on [0, t], zero afterwards.
  VolCurve truncated(double t) const;

  bool is_zero() const;
  const std::vector<VolSegment>& segments() const { return segments_; }

  /// Exact integral of sigma_a(s) sigma_b(s) over [0, t]; zero for t <= 0.
  static double cross_integral(const VolCurve& a, const VolCurve& b, double t);

 private:
  std::vector<VolSegment> segments_;
};

struct Asset {
  double forward = 1.0;  // F(0,T) to the instrument maturity
  VolCurve vol;
  /// Flat carry r - q used to infer F(0,t) = forward * exp(-carry (T - t)).
  double carry = 0.0;
  /// Optional explicit forward curve (t, F(0,t)); log-linear in between,
  /// flat outside. Overrides `carry` when non-empty.
  std::vector<std::pair<double, double>> forward_curve;

  double forward_at(double t, double maturity) const;

  static Asset from_spot(double spot, double rate, double dividend, VolCurve vol, double maturity);
};

struct MarketModel {
  std::vector<Asset> assets;
  Eigen::MatrixXd correlation;
  double discount_factor = 1.0;

  std::size_t size() const { return assets.size(); }
  void validate() const;
};

/// Integrated covariances v_{i,l} = rho_{i,l} * int_0^T sigma_i sigma_l ds.
struct CovarianceMatrix {
  Eigen::MatrixXd entries;
  double maturity = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

/// Payoff max(eta (sum_{w>0} w_i S_i + kappa sum_{w<0} w_i S_i - K), 0) at maturity.
struct BasketSpreadInstrument {
  std::vector<double> weights;
  double strike = 0.0;
  double mult_strike = 1.0;
  double maturity = 1.0;
  Direction direction = Direction::Call;

  void validate(std::size_t asset_count) const;
};

/// Discrete Asian averaging of a basket: sum_i sum_j w^B_i w^A_{i,j} S_i(t_j).
struct AsianBasketSpec {
  std::vector<double> obs_times;
  /// One row shared by all assets, or one row per asset.
  std::vector<std::vector<double>> asian_weights;
  std::vector<double> basket_weights;
  /// Per-asset known values for a prefix of the observation dates.
  std::vector<std::vector<double>> fixings;
  double maturity = 1.0;

  std::size_t asset_count() const { return basket_weights.size(); }
  std::size_t obs_count() const { return obs_times.size(); }
  double asian_weight(std::size_t asset, std::size_t obs) const;
  std::size_t fixing_count(std::size_t asset) const;
  void validate() const;
};

struct ReducedBasket {
  BasketSpreadInstrument instrument;
  MarketModel model;
};

struct FixingsResult {
  AsianBasketSpec spec;
  /// Deterministic part of the payoff; subtract it from the additive strike.
  double strike_adjustment = 0.0;
};

/// Minimum eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

CovarianceMatrix canonical_covariance(const MarketModel& model, double maturity);

/// Single-asset Asian with weights `weights` on `obs_times` of asset `asset`.
ReducedBasket reduce_asian(const std::vector<double>& obs_times, const std::vector<double>& weights,
                           double maturity, const MarketModel& model, std::size_t asset = 0);

/// Pseudo-asset (obs i, asset j) sits at index i + n*j; zero-weight pairs are dropped.
ReducedBasket reduce_asian_basket(const AsianBasketSpec& spec, const MarketModel& model);

/// Absorbs mult_strike into the negative weights, then represents K as a
/// zero-volatility pseudo-asset. The result has strike 0 and mult_strike 1.
ReducedBasket fold_strike(const BasketSpreadInstrument& instr, const MarketModel& model);

/// Removes fixed observations; their weighted values become a strike adjustment
/// (negative-leg contributions scaled by mult_strike).
FixingsResult apply_fixings(const AsianBasketSpec& spec, double mult_strike = 1.0);

}  // namespace spreadkit
