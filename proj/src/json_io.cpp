#include "spreadkit/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace spreadkit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) fail(where + ": expected an object");
  auto it = obj.find(name);
  if (it == obj.end()) fail(where + ": missing field '" + name + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where + ": non-finite number");
  return x;
}

double number_or(const json& obj, const char* name, double fallback, const std::string& where) {
  auto it = obj.find(name);
  return it == obj.end() ? fallback : number(*it, where + "." + name);
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::pair<double, double>> pairs(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of [t, value] pairs");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto p = numbers(v[i], where + "[" + std::to_string(i) + "]");
    if (p.size() != 2) fail(where + "[" + std::to_string(i) + "]: expected [t, value]");
    out.emplace_back(p[0], p[1]);
  }
  return out;
}

std::vector<std::vector<double>> rows(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(numbers(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where + ": expected a string");
  return v.get<std::string>();
}

Direction parse_direction(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "call") return Direction::Call;
    if (s == "put") return Direction::Put;
  } else if (v.is_number()) {
    const double x = v.get<double>();
    if (x == 1.0) return Direction::Call;
    if (x == -1.0) return Direction::Put;
  }
  fail("direction: expected \"call\" or \"put\"");
}

const char* degeneracy_name(Degeneracy d) {
  switch (d) {
    case Degeneracy::None: return "none";
    case Degeneracy::NoNegativeLeg: return "no_negative_leg";
    case Degeneracy::DeterministicRatio: return "deterministic_ratio";
  }
  return "none";
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(path.string() + ": " + e.what());
  }
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

const char* proxy_name(ProxyKind kind) { return kind == ProxyKind::Levy ? "levy" : "geometric"; }

ProxyKind parse_proxy(const std::string& name) {
  if (name == "geometric") return ProxyKind::Geometric;
  if (name == "levy") return ProxyKind::Levy;
  fail("proxy must be \"geometric\" or \"levy\", got \"" + name + "\"");
}

PricingProblem problem_from_json(const json& doc) {
  return guarded([&] {
    PricingProblem p;
    const auto& assets = field(doc, "assets", "document");
    if (!assets.is_array() || assets.empty()) fail("assets: expected a nonempty array");
    for (std::size_t i = 0; i < assets.size(); ++i) {
      const std::string where = "assets[" + std::to_string(i) + "]";
      const auto& a = assets[i];
      Asset asset;
      asset.forward = number(field(a, "forward", where), where + ".forward");
      std::vector<VolSegment> segments;
      for (const auto& [t, v] : pairs(field(a, "vol_segments", where), where + ".vol_segments"))
        segments.push_back({t, v});
      asset.vol = VolCurve(std::move(segments));
      asset.carry = number_or(a, "carry", 0.0, where);
      if (a.contains("forward_curve")) asset.forward_curve = pairs(a["forward_curve"], where + ".forward_curve");
      p.model.assets.push_back(std::move(asset));
    }

    const auto corr = rows(field(doc, "correlation", "document"), "correlation");
    const auto n = static_cast<Eigen::Index>(p.model.size());
    if (static_cast<Eigen::Index>(corr.size()) != n) fail("correlation: expected one row per asset");
    p.model.correlation.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = corr[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(row.size()) != n) fail("correlation: expected a square matrix");
      for (Eigen::Index j = 0; j < n; ++j) p.model.correlation(i, j) = row[static_cast<std::size_t>(j)];
    }
    p.model.discount_factor = number(field(doc, "discount_factor", "document"), "discount_factor");
    if (!(p.model.discount_factor > 0.0 && p.model.discount_factor <= 1.0))
      fail("discount_factor must lie in (0, 1]");

    auto& instr = p.instrument;
    instr.weights = numbers(field(doc, "weights", "document"), "weights");
    instr.strike = number(field(doc, "strike", "document"), "strike");
    instr.mult_strike = number_or(doc, "mult_strike", 1.0, "document");
    instr.maturity = number(field(doc, "maturity", "document"), "maturity");
    instr.direction = parse_direction(field(doc, "direction", "document"));

    if (doc.contains("asian")) {
      const auto& a = doc["asian"];
      AsianBasketSpec spec;
      spec.obs_times = numbers(field(a, "obs_times", "asian"), "asian.obs_times");
      const auto& aw = field(a, "asian_weights", "asian");
      if (aw.is_array() && !aw.empty() && aw.front().is_array()) spec.asian_weights = rows(aw, "asian.asian_weights");
      else spec.asian_weights = {numbers(aw, "asian.asian_weights")};
      if (a.contains("fixings")) spec.fixings = rows(a["fixings"], "asian.fixings");
      spec.basket_weights = instr.weights;
      spec.maturity = instr.maturity;
      spec.validate();
      p.asian = std::move(spec);
    }

    p.model.validate();
    if (!p.asian) instr.validate(p.model.size());
    else if (instr.weights.size() != p.model.size()) fail("weights: expected one weight per asset");
    return p;
  });
}

ordered_json problem_to_json(const PricingProblem& p) {
  ordered_json doc;
  doc["assets"] = ordered_json::array();
  for (const auto& a : p.model.assets) {
    ordered_json j;
    j["forward"] = a.forward;
    j["vol_segments"] = ordered_json::array();
    double prev = 0.0;
    for (const auto& s : a.vol.segments()) {
      // the last segment extends anyway; JSON has no infinity
      const double end = std::isfinite(s.end_time) ? s.end_time : std::max(prev + 1.0, p.instrument.maturity);
      j["vol_segments"].push_back({end, s.vol});
      prev = end;
    }
    if (a.carry != 0.0) j["carry"] = a.carry;
    if (!a.forward_curve.empty()) {
      j["forward_curve"] = ordered_json::array();
      for (const auto& [t, f] : a.forward_curve) j["forward_curve"].push_back({t, f});
    }
    doc["assets"].push_back(std::move(j));
  }
  doc["correlation"] = ordered_json::array();
  for (Eigen::Index i = 0; i < p.model.correlation.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < p.model.correlation.cols(); ++j) row.push_back(p.model.correlation(i, j));
    doc["correlation"].push_back(std::move(row));
  }
  doc["discount_factor"] = p.model.discount_factor;
  doc["weights"] = p.instrument.weights;
  doc["strike"] = p.instrument.strike;
  doc["mult_strike"] = p.instrument.mult_strike;
  doc["maturity"] = p.instrument.maturity;
  doc["direction"] = p.instrument.direction == Direction::Call ? "call" : "put";
  if (p.asian) {
    ordered_json a;
    a["obs_times"] = p.asian->obs_times;
    a["asian_weights"] = p.asian->asian_weights;
    if (!p.asian->fixings.empty()) a["fixings"] = p.asian->fixings;
    doc["asian"] = std::move(a);
  }
  return doc;
}

PricingProblem load_problem(const std::filesystem::path& path) { return problem_from_json(read_file(path)); }

TableSpec table_from_json(const json& doc) {
  return guarded([&] {
    TableSpec t;
    t.id = text(field(doc, "id", "table"), "id");
    if (doc.contains("title")) t.title = text(doc["title"], "title");
    t.problem = problem_from_json(field(doc, "problem", "table " + t.id));
    const auto kind = text(field(doc, "strike_kind", "table " + t.id), "strike_kind");
    if (kind == "additive") t.strike_kind = StrikeKind::Additive;
    else if (kind == "multiplicative") t.strike_kind = StrikeKind::Multiplicative;
    else fail("strike_kind must be \"additive\" or \"multiplicative\"");
    t.strikes = numbers(field(doc, "strikes", "table " + t.id), "strikes");
    if (doc.contains("decimals")) {
      if (!doc["decimals"].is_number_integer()) fail("decimals: expected an integer");
      t.decimals = doc["decimals"].get<int>();
    }
    if (doc.contains("proxy")) t.proxy = parse_proxy(text(doc["proxy"], "proxy"));
    if (doc.contains("oracle")) {
      const auto o = text(doc["oracle"], "oracle");
      if (o == "paper") t.default_oracle = OracleKind::Paper;
      else if (o == "mc") t.default_oracle = OracleKind::InternalMc;
      else fail("oracle must be \"paper\" or \"mc\"");
    }

    const std::string reference = doc.contains("reference") ? text(doc["reference"], "reference") : "MC";
    t.printed_reference.name = reference;
    if (doc.contains("columns")) {
      const auto& cols = doc["columns"];
      if (!cols.is_array()) fail("columns: expected an array of {name, values}");
      for (const auto& c : cols) {
        NamedColumn col{text(field(c, "name", "columns"), "columns.name"), {}};
        col.values = numbers(field(c, "values", "columns"), "columns." + col.name);
        bool placed = false;
        for (int k = 0; k < 4; ++k)
          if (col.name == "VG" + std::to_string(k)) {
            t.printed_vg[static_cast<std::size_t>(k)] = col.values;
            placed = true;
          }
        if (placed) continue;
        if (col.name == reference) t.printed_reference = std::move(col);
        else t.literature.push_back(std::move(col));
      }
    }
    if (doc.contains("footer")) {
      const auto& f = doc["footer"];
      if (!f.is_array()) fail("footer: expected an array of {column, rmse, mae}");
      for (const auto& e : f)
        t.footer.push_back({text(field(e, "column", "footer"), "footer.column"),
                            {number(field(e, "rmse", "footer"), "footer.rmse"),
                             number(field(e, "mae", "footer"), "footer.mae")}});
    }
    t.validate();
    return t;
  });
}

TableSpec load_table(const std::filesystem::path& path) { return table_from_json(read_file(path)); }

std::vector<std::string> list_tables(const std::filesystem::path& dir) {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".json") ids.push_back(e.path().stem().string());
  if (ec) fail("cannot list tables in " + dir.string() + ": " + ec.message());
  std::sort(ids.begin(), ids.end());
  return ids;
}

ordered_json price_to_json(const PriceResult& r, ProxyKind proxy) {
  ordered_json out;
  const int order = r.prices.order;
  out["proxy"] = proxy_name(proxy);
  out["order"] = order;
  out["price"] = r.prices.vg[static_cast<std::size_t>(order)];
  ordered_json prices;
  for (int k = 0; k <= order; ++k) prices["vg" + std::to_string(k)] = r.prices.vg[static_cast<std::size_t>(k)];
  out["prices"] = std::move(prices);
  ordered_json terms;
  for (int k = 0; k <= order; ++k) {
    ordered_json list = ordered_json::array();
    for (const auto& t : r.prices.terms[static_cast<std::size_t>(k)])
      list.push_back(ordered_json{{"label", t.label}, {"value", t.value}});
    terms["vg" + std::to_string(k)] = std::move(list);
  }
  out["terms"] = std::move(terms);

  ordered_json diag;
  diag["effective_strike"] = r.effective_strike;
  if (r.inputs) {
    const auto& in = *r.inputs;
    diag["assets"] = in.size();
    diag["a_pos"] = in.a_pos;
    diag["a_neg"] = in.a_neg;
    diag["kappa_star"] = in.kappa_star;
    diag["nu2"] = in.nu2;
    diag["degeneracy"] = degeneracy_name(in.degeneracy);
  } else {
    diag["degeneracy"] = "deterministic_payoff";
  }
  out["diagnostics"] = std::move(diag);
  return out;
}

ordered_json report_to_json(const TableReport& r) {
  ordered_json out;
  out["id"] = r.id;
  out["oracle"] = r.oracle == OracleKind::Paper ? "paper" : "mc";
  out["passed"] = r.passed();
  out["rows"] = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json j;
    j["strike"] = row.strike;
    for (int k = 0; k < 4; ++k) j["vg" + std::to_string(k)] = row.vg[static_cast<std::size_t>(k)];
    j["oracle"] = row.oracle;
    if (r.oracle == OracleKind::InternalMc) j["oracle_se"] = row.oracle_se;
    j["skewness"] = row.skewness;
    out["rows"].push_back(std::move(j));
  }
  ordered_json stats;
  for (int k = 0; k < 4; ++k)
    stats["vg" + std::to_string(k)] = ordered_json{{"rmse", r.stats[static_cast<std::size_t>(k)].rmse},
                                                   {"mae", r.stats[static_cast<std::size_t>(k)].mae}};
  out["stats"] = std::move(stats);
  out["checks"] = ordered_json::array();
  for (const auto& c : r.checks)
    out["checks"].push_back(ordered_json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return out;
}

}  // namespace spreadkit
