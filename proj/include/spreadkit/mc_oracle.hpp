#pragma once

#include "spreadkit/expansion.hpp"
#include "spreadkit/market_model.hpp"
#include "spreadkit/proxy.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace spreadkit {

/// Monte Carlo settings. Path p (or antithetic pair p) draws its normals
/// from Philox keyed by `seed` with counter p, so results do not depend on
/// the thread count.
struct McConfig {
  std::uint64_t paths = 4'000'000;
  std::uint64_t seed = 42;
  bool antithetic = true;
  /// Regress payoffs on the two leg values, whose means are known exactly.
  /// Used by the basket pricers only.
  bool control_variate = true;
  std::uint32_t batches = 100;
  /// 0: use SPREADKIT_THREADS, else hardware concurrency.
  unsigned threads = 0;
};

struct McResult {
  double price = 0.0;
  double std_error = 0.0;
  std::uint64_t paths_used = 0;
};

enum class StrikeKind { Additive, Multiplicative };

/// Rank-revealing Cholesky: returns L (n x r) with L L^T = cov up to the
/// truncated pivots (< tol). Throws if a negative pivot below -tol appears.
Eigen::MatrixXd pivoted_cholesky(const Eigen::MatrixXd& cov, double tol = 1e-12);

unsigned mc_thread_count(const McConfig& config);

/// Exact terminal sampling of the basket through its integrated covariance.
McResult mc_price(const BasketSpreadInstrument& instr, const MarketModel& model, const McConfig& config);

/// One simulation, many strikes; the instrument's own strike field is ignored.
std::vector<McResult> mc_price_ladder(const BasketSpreadInstrument& instr, const MarketModel& model,
                                      std::span<const double> strikes, StrikeKind kind, const McConfig& config);

/// Path simulation of the raw Asian basket payoff, fixings included; no
/// reduction to pseudo-assets. `instr.weights` are the basket weights.
std::vector<McResult> mc_price_asian_ladder(const AsianBasketSpec& spec, const BasketSpreadInstrument& instr,
                                            const MarketModel& model, std::span<const double> strikes,
                                            StrikeKind kind, const McConfig& config);

/// Monte Carlo estimates of every identity's left-hand side at (i, j, k),
/// on shared paths. G_p* and G_n* are built from alpha, beta and a_i.
std::array<McResult, kIdentityCount> mc_identity_lhs_all(const ExpansionInputs& in,
                                                         std::array<std::size_t, 3> indices,
                                                         const McConfig& config);

McResult mc_identity_lhs(Identity id, const ExpansionInputs& in, std::array<std::size_t, 3> indices,
                         const McConfig& config);

}  // namespace spreadkit
