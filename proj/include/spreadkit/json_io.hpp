#pragma once

#include "spreadkit/harness.hpp"
#include "spreadkit/pricing.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace spreadkit {

/// Instrument and market document:
///   {assets: [{forward, vol_segments: [[t, vol], ...], carry?, forward_curve?: [[t, F], ...]}],
///    correlation, discount_factor, weights, strike, mult_strike?, maturity, direction,
///    asian?: {obs_times, asian_weights, fixings?}}
/// Any schema problem is reported as ValidationError.
PricingProblem problem_from_json(const nlohmann::json& doc);
nlohmann::ordered_json problem_to_json(const PricingProblem& problem);
PricingProblem load_problem(const std::filesystem::path& path);

TableSpec table_from_json(const nlohmann::json& doc);
TableSpec load_table(const std::filesystem::path& path);
/// Ids of the *.json tables in `dir`, sorted.
std::vector<std::string> list_tables(const std::filesystem::path& dir);

nlohmann::ordered_json price_to_json(const PriceResult& result, ProxyKind proxy);
nlohmann::ordered_json report_to_json(const TableReport& report);

const char* proxy_name(ProxyKind kind);
ProxyKind parse_proxy(const std::string& name);

}  // namespace spreadkit
