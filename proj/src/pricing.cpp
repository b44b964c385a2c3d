#include "spreadkit/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spreadkit {

ReducedBasket to_basket(const PricingProblem& problem) {
  if (!problem.asian) {
    problem.instrument.validate(problem.model.size());
    return {problem.instrument, problem.model};
  }

  AsianBasketSpec spec = *problem.asian;
  spec.basket_weights = problem.instrument.weights;
  spec.maturity = problem.instrument.maturity;
  const auto fixed = apply_fixings(spec, problem.instrument.mult_strike);

  ReducedBasket out;
  if (fixed.spec.obs_count() > 0) {
    out = reduce_asian_basket(fixed.spec, problem.model);
  } else {
    out.model.discount_factor = problem.model.discount_factor;
    out.model.correlation.resize(0, 0);
  }
  out.instrument.strike = problem.instrument.strike - fixed.strike_adjustment;
  out.instrument.mult_strike = problem.instrument.mult_strike;
  out.instrument.maturity = problem.instrument.maturity;
  out.instrument.direction = problem.instrument.direction;
  return out;
}

PriceResult price(const PricingProblem& problem, int order, ProxyKind proxy) {
  if (order < 0 || order > 3) throw ValidationError("expansion order must be 0..3");
  const auto reduced = to_basket(problem);
  PriceResult out;
  out.effective_strike = reduced.instrument.strike;

  const auto& w = reduced.instrument.weights;
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
    const double value = reduced.model.discount_factor *
                         std::max(-eta(reduced.instrument.direction) * reduced.instrument.strike, 0.0);
    out.prices.order = order;
    out.prices.vg.fill(std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k <= order; ++k) out.prices.vg[static_cast<std::size_t>(k)] = value;
    out.prices.terms[0] = {{"proxy", value}};
    return out;
  }

  const auto folded = fold_strike(reduced.instrument, reduced.model);
  out.inputs = build_inputs(folded.instrument, folded.model, proxy);
  out.prices = price_expansion(*out.inputs, order);
  return out;
}

}  // namespace spreadkit
