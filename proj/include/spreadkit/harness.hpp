#pragma once

#include "spreadkit/mc_oracle.hpp"
#include "spreadkit/pricing.hpp"

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spreadkit {

enum class OracleKind { Paper, InternalMc };

struct ErrorStats {
  double rmse = 0.0;
  double mae = 0.0;  // maximum absolute error
};

ErrorStats error_stats(std::span<const double> values, std::span<const double> reference);

struct NamedColumn {
  std::string name;
  std::vector<double> values;
};

struct FooterEntry {
  std::string column;
  ErrorStats stats;
};

/// A published strike ladder: the market, the strikes, and the printed columns.
struct TableSpec {
  std::string id;
  std::string title;
  PricingProblem problem;  // strike (or mult_strike) replaced per row
  StrikeKind strike_kind = StrikeKind::Additive;
  std::vector<double> strikes;
  int decimals = 4;
  ProxyKind proxy = ProxyKind::Geometric;
  OracleKind default_oracle = OracleKind::Paper;

  std::array<std::vector<double>, 4> printed_vg;  // may be empty
  NamedColumn printed_reference;                  // e.g. "MC"
  std::vector<NamedColumn> literature;            // other methods, reported only
  std::vector<FooterEntry> footer;                // printed RMSE/MAE per column

  void validate() const;
};

PricingProblem problem_at(const TableSpec& spec, double strike);

struct TableRow {
  double strike = 0.0;
  std::array<double, 4> vg{};
  double oracle = 0.0;
  double oracle_se = 0.0;
  double skewness = 0.0;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TableReport {
  std::string id;
  OracleKind oracle = OracleKind::Paper;
  int decimals = 4;
  std::vector<TableRow> rows;
  std::array<ErrorStats, 4> stats{};  // vg0..vg3 against the oracle
  std::vector<Check> checks;

  bool passed() const;
};

/// Skewness of sum_i w_i S_i(T) (negative weights scaled by mult_strike),
/// from the lognormal joint moments. Throws if the basket has no variance.
double basket_skewness(const BasketSpreadInstrument& instr, const MarketModel& model);

/// Prices every row at orders 0..3 and evaluates the table's checks:
/// printed VG columns within 5 units of the last printed place, printed
/// footers recomputed from the printed columns within one unit, the RMSE
/// ordering vg3 <= vg2 <= min(vg0, vg1) up to the oracle's noise floor, and,
/// for the internal oracle, |vg3 - mc| <= max(3 SE, 5e-3).
TableReport run_table(const TableSpec& spec, OracleKind oracle, const McConfig& mc = {});

/// Internal Monte Carlo prices for the whole ladder on shared paths.
std::vector<McResult> mc_ladder(const TableSpec& spec, const McConfig& mc);

/// strike, vg0..vg3, oracle, [oracle_se], abs_err_vg0..3, at the table's printed precision.
std::string report_csv(const TableReport& report);

struct IdentityInstance {
  PricingProblem problem;
  ExpansionInputs inputs;
  std::array<std::size_t, 3> indices{};
};

/// Reproducible random 3-asset spread (one negative, two positive weights)
/// with a random correlation matrix; `index` selects the instance.
IdentityInstance random_identity_instance(std::uint64_t seed, unsigned index);

struct IdentityCheck {
  Identity id;
  std::string label;
  double closed_form = 0.0;
  McResult mc;
  bool passed = false;  // |closed_form - mc| <= 3 SE
};

std::vector<IdentityCheck> run_identity_suite(const IdentityInstance& instance, const McConfig& mc);

}  // namespace spreadkit
