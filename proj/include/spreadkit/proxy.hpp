#pragma once

#include "spreadkit/market_model.hpp"

#include <cstddef>
#include <vector>

namespace spreadkit {

enum class ProxyKind { Geometric, Levy };

enum class Degeneracy {
  None,
  NoNegativeLeg,       // A_n == 0: payoff is linear in the positive leg
  DeterministicRatio,  // nu^2 == 0: G_p*/G_n* is deterministic
};

/// Scalars shared by every expansion order, built from a folded basket.
///
/// Leg membership is by weight sign: `leg[i]` is +1 (positive leg), -1
/// (negative leg) or 0 (zero weight, ignored). Exponents `a` are signed so
/// that vbar_i = sum_l a_l v_{i,l} is a single sum; negative-leg entries are
/// negative.
struct ExpansionInputs {
  double a_pos = 0.0;       // A_p = sum_{w>0} w_i F_i
  double a_neg = 0.0;       // A_n = -sum_{w<0} w_i F_i
  double kappa_star = 0.0;  // A_n / A_p (mult_strike already absorbed)

  std::vector<int> leg;
  std::vector<double> weight_norm;  // a~_i: +1 summing on the positive leg, -1 on the negative leg
  std::vector<double> weight_star;  // a~*_i: a~_i, times kappa* on the negative leg
  std::vector<double> exponent;     // a_i (geometric: a~_i; Levy: rescaled per leg)

  double nu2 = 0.0;        // Var ln(G_p*/G_n*)
  double nu2_pos = 0.0;    // Var ln G_p*
  double nu2_neg = 0.0;    // Var ln G_n*
  double nu2_cross = 0.0;  // Cov(ln G_p*, ln G_n*)

  std::vector<double> vbar;      // sum_l a_l v_{i,l}
  std::vector<double> vbar_neg;  // sum_{l in negative leg} a_l v_{i,l}
  Eigen::MatrixXd cov;

  double alpha = 1.0;  // G_p* = alpha * prod_{pos} S*^{a}
  double beta = 1.0;   // G_n* = beta * prod_{neg} S*^{|a|}

  double maturity = 1.0;
  Direction direction = Direction::Call;
  double discount = 1.0;
  Degeneracy degeneracy = Degeneracy::None;

  std::size_t size() const { return leg.size(); }
  /// ln E[G_p*/G_n*] = nu_n^2 - nu_np^2.
  double log_mean_ratio() const { return nu2_neg - nu2_cross; }
};

/// `instr` must be folded (strike 0, mult_strike 1) and have a nonempty positive leg.
ExpansionInputs build_inputs(const BasketSpreadInstrument& instr, const MarketModel& model,
                             const CovarianceMatrix& cov, ProxyKind kind);

ExpansionInputs build_inputs(const BasketSpreadInstrument& instr, const MarketModel& model, ProxyKind kind);

/// A_p * Black(1, kappa*, nu^2, T).
double price_vg0(const ExpansionInputs& in);

}  // namespace spreadkit
