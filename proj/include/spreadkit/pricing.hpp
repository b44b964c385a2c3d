#pragma once

#include "spreadkit/expansion.hpp"
#include "spreadkit/market_model.hpp"
#include "spreadkit/proxy.hpp"

#include <optional>

namespace spreadkit {

/// A basket spread, or an Asian basket spread when `asian` is set. For the
/// Asian case `instrument.weights` are the basket weights and the model
/// describes the underlyings.
struct PricingProblem {
  MarketModel model;
  BasketSpreadInstrument instrument;
  std::optional<AsianBasketSpec> asian;
};

/// Fixings applied and the Asian schedule reduced to pseudo-assets. The strike
/// is not folded. An empty weight list means nothing random is left.
ReducedBasket to_basket(const PricingProblem& problem);

struct PriceResult {
  OrderedPrice prices;
  /// Empty when the payoff is fully deterministic.
  std::optional<ExpansionInputs> inputs;
  /// Strike after subtracting fixed observations.
  double effective_strike = 0.0;
};

PriceResult price(const PricingProblem& problem, int order = 3, ProxyKind proxy = ProxyKind::Geometric);

}  // namespace spreadkit
