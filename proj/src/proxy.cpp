#include "spreadkit/proxy.hpp"

#include "spreadkit/black76.hpp"

#include <cmath>

namespace spreadkit {

namespace {

// Below this the ratio G_p*/G_n* is treated as deterministic.
constexpr double kMinRatioVariance = 1e-14;

double leg_form(const Eigen::MatrixXd& v, const std::vector<double>& x, const std::vector<int>& leg, int li, int lj) {
  double s = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (leg[i] != li) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (leg[j] == lj) s += x[i] * x[j] * v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return s;
}

// Exponent scale matching the leg's lognormal variance to ln(E[A^2]/E[A]^2).
double levy_scale(const Eigen::MatrixXd& v, const std::vector<double>& w, const std::vector<int>& leg, int side) {
  const double geometric = leg_form(v, w, leg, side, side);
  if (geometric <= 0.0) return 1.0;
  double second_moment = 0.0;
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (leg[i] != side) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (leg[j] == side)
        second_moment += w[i] * w[j] * std::exp(v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
  if (!(second_moment > 0.0)) throw InfeasibleError("levy moment matching infeasible");
  const double arithmetic = std::log(second_moment);
  if (!(arithmetic >= 0.0) || !std::isfinite(arithmetic)) throw InfeasibleError("levy moment matching infeasible");
  return std::sqrt(arithmetic / geometric);
}

}  // namespace

ExpansionInputs build_inputs(const BasketSpreadInstrument& instr, const MarketModel& model,
                             const CovarianceMatrix& cov, ProxyKind kind) {
  instr.validate(model.size());
  if (instr.strike != 0.0 || instr.mult_strike != 1.0)
    throw ValidationError("build_inputs expects a folded instrument (strike 0, mult_strike 1)");
  if (cov.size() != model.size()) throw ValidationError("covariance size does not match asset count");

  const std::size_t n = model.size();
  ExpansionInputs in;
  in.maturity = instr.maturity;
  in.direction = instr.direction;
  in.discount = model.discount_factor;
  in.cov = cov.entries;
  in.leg.resize(n);
  in.weight_norm.assign(n, 0.0);
  in.weight_star.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const double w = instr.weights[i];
    in.leg[i] = w > 0.0 ? 1 : (w < 0.0 ? -1 : 0);
    if (w > 0.0) in.a_pos += w * model.assets[i].forward;
    if (w < 0.0) in.a_neg -= w * model.assets[i].forward;
  }
  if (!(in.a_pos > 0.0)) throw ValidationError("degenerate positive leg");
  in.kappa_star = in.a_neg / in.a_pos;

  for (std::size_t i = 0; i < n; ++i) {
    const double wf = instr.weights[i] * model.assets[i].forward;
    if (in.leg[i] > 0) {
      in.weight_norm[i] = wf / in.a_pos;
      in.weight_star[i] = in.weight_norm[i];
    } else if (in.leg[i] < 0) {
      in.weight_norm[i] = wf / in.a_neg;
      in.weight_star[i] = in.kappa_star * in.weight_norm[i];
    }
  }

  in.exponent = in.weight_norm;
  if (kind == ProxyKind::Levy) {
    const double pos = levy_scale(in.cov, in.weight_norm, in.leg, 1);
    const double neg = in.a_neg > 0.0 ? levy_scale(in.cov, in.weight_norm, in.leg, -1) : 1.0;
    for (std::size_t i = 0; i < n; ++i) in.exponent[i] *= in.leg[i] > 0 ? pos : neg;
  }

  const auto& a = in.exponent;
  in.nu2_pos = leg_form(in.cov, a, in.leg, 1, 1);
  in.nu2_neg = leg_form(in.cov, a, in.leg, -1, -1);
  in.nu2_cross = -leg_form(in.cov, a, in.leg, -1, 1);
  in.nu2 = std::max(in.nu2_pos + in.nu2_neg - 2.0 * in.nu2_cross, 0.0);

  in.vbar.assign(n, 0.0);
  in.vbar_neg.assign(n, 0.0);
  double pos_diag = 0.0;
  double neg_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t l = 0; l < n; ++l) {
      const double c = a[l] * in.cov(ii, static_cast<Eigen::Index>(l));
      in.vbar[i] += c;
      if (in.leg[l] < 0) in.vbar_neg[i] += c;
    }
    if (in.leg[i] > 0) pos_diag += a[i] * in.cov(ii, ii);
    if (in.leg[i] < 0) neg_diag -= a[i] * in.cov(ii, ii);
  }
  in.alpha = std::exp(0.5 * pos_diag - 0.5 * in.nu2_pos);
  in.beta = std::exp(0.5 * neg_diag - 0.5 * in.nu2_neg);

  if (in.a_neg == 0.0)
    in.degeneracy = Degeneracy::NoNegativeLeg;
  else if (in.nu2 < kMinRatioVariance)
    in.degeneracy = Degeneracy::DeterministicRatio;
  return in;
}

ExpansionInputs build_inputs(const BasketSpreadInstrument& instr, const MarketModel& model, ProxyKind kind) {
  return build_inputs(instr, model, canonical_covariance(model, instr.maturity), kind);
}

double price_vg0(const ExpansionInputs& in) {
  const double v = in.degeneracy == Degeneracy::None ? in.nu2 : 0.0;
  return in.a_pos * black({1.0, in.kappa_star, v, in.maturity, in.direction, in.discount});
}

}  // namespace spreadkit
