#include "spreadkit/harness.hpp"

#include "spreadkit/philox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace spreadkit {

namespace {

std::string fixed(double x, int decimals) {
  if (!std::isfinite(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  // "-0.0000" reads badly in a table
  std::string s = buf;
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

const std::vector<double>* column(const TableSpec& spec, const std::string& name) {
  for (int k = 0; k < 4; ++k)
    if (name == "VG" + std::to_string(k)) {
      const auto& c = spec.printed_vg[static_cast<std::size_t>(k)];
      return c.empty() ? nullptr : &c;
    }
  if (name == spec.printed_reference.name && !spec.printed_reference.values.empty())
    return &spec.printed_reference.values;
  for (const auto& c : spec.literature)
    if (c.name == name) return &c.values;
  return nullptr;
}

}  // namespace

ErrorStats error_stats(std::span<const double> values, std::span<const double> reference) {
  if (values.size() != reference.size() || values.empty())
    throw ValidationError("error statistics need two nonempty columns of equal length");
  double ss = 0.0;
  double mae = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = std::abs(values[i] - reference[i]);
    ss += d * d;
    mae = std::max(mae, d);
  }
  return {std::sqrt(ss / static_cast<double>(values.size())), mae};
}

void TableSpec::validate() const {
  if (id.empty()) throw ValidationError("table without an id");
  if (strikes.empty()) throw ValidationError("table " + id + ": no strikes");
  for (double k : strikes)
    if (!std::isfinite(k)) throw ValidationError("table " + id + ": non-finite strike");
  auto check_len = [&](const std::vector<double>& c, const std::string& what) {
    if (!c.empty() && c.size() != strikes.size())
      throw ValidationError("table " + id + ": column " + what + " has the wrong length");
    for (double x : c)
      if (!std::isfinite(x)) throw ValidationError("table " + id + ": non-finite value in " + what);
  };
  for (int k = 0; k < 4; ++k) check_len(printed_vg[static_cast<std::size_t>(k)], "VG" + std::to_string(k));
  check_len(printed_reference.values, printed_reference.name);
  for (const auto& c : literature) check_len(c.values, c.name);
  if (decimals < 0 || decimals > 10) throw ValidationError("table " + id + ": decimals out of range");
}

PricingProblem problem_at(const TableSpec& spec, double strike) {
  PricingProblem p = spec.problem;
  if (spec.strike_kind == StrikeKind::Additive) p.instrument.strike = strike;
  else p.instrument.mult_strike = strike;
  return p;
}

double basket_skewness(const BasketSpreadInstrument& instr, const MarketModel& model) {
  const auto cov = canonical_covariance(model, instr.maturity);
  const std::size_t n = model.size();
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = instr.weights[i] < 0.0 ? instr.weights[i] * instr.mult_strike : instr.weights[i];
    c[i] = w * model.assets[i].forward;
  }
  const Eigen::MatrixXd e = cov.entries.array().exp().matrix();

  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i] == 0.0) continue;
    m1 += c[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (c[j] == 0.0) continue;
      const double eij = e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      m2 += c[i] * c[j] * eij;
      double inner = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        inner += c[k] * e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
                 e(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      m3 += c[i] * c[j] * eij * inner;
    }
  }
  const double var = m2 - m1 * m1;
  if (!(var > 1e-14 * std::max(1.0, m1 * m1))) throw ValidationError("basket skewness undefined: zero variance");
  return (m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1) / std::pow(var, 1.5);
}

std::vector<McResult> mc_ladder(const TableSpec& spec, const McConfig& mc) {
  const auto& p = spec.problem;
  if (p.asian) return mc_price_asian_ladder(*p.asian, p.instrument, p.model, spec.strikes, spec.strike_kind, mc);
  return mc_price_ladder(p.instrument, p.model, spec.strikes, spec.strike_kind, mc);
}

bool TableReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

TableReport run_table(const TableSpec& spec, OracleKind oracle, const McConfig& mc) {
  spec.validate();
  TableReport report;
  report.id = spec.id;
  report.oracle = oracle;
  report.decimals = spec.decimals;
  const std::size_t n = spec.strikes.size();
  report.rows.resize(n);

  for (std::size_t r = 0; r < n; ++r) {
    auto& row = report.rows[r];
    row.strike = spec.strikes[r];
    const auto problem = problem_at(spec, row.strike);
    row.vg = price(problem, 3, spec.proxy).prices.vg;
    const auto reduced = to_basket(problem);
    try {
      row.skewness = basket_skewness(reduced.instrument, reduced.model);
    } catch (const ValidationError&) {
      row.skewness = std::numeric_limits<double>::quiet_NaN();
    }
  }

  double noise = 0.5 * std::pow(10.0, -spec.decimals);
  if (oracle == OracleKind::Paper) {
    if (spec.printed_reference.values.empty())
      throw ValidationError("table " + spec.id + " has no printed reference column");
    for (std::size_t r = 0; r < n; ++r) report.rows[r].oracle = spec.printed_reference.values[r];
  } else {
    const auto ladder = mc_ladder(spec, mc);
    double max_se = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      report.rows[r].oracle = ladder[r].price;
      report.rows[r].oracle_se = ladder[r].std_error;
      max_se = std::max(max_se, ladder[r].std_error);
    }
    noise = 3.0 * max_se;
  }

  std::vector<double> ref(n);
  for (std::size_t r = 0; r < n; ++r) ref[r] = report.rows[r].oracle;
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = report.rows[r].vg[k];
    report.stats[k] = error_stats(v, ref);
  }

  const double unit = std::pow(10.0, -spec.decimals);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& printed = spec.printed_vg[k];
    if (printed.empty()) continue;
    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r) worst = std::max(worst, std::abs(report.rows[r].vg[k] - printed[r]));
    report.checks.push_back({"vg" + std::to_string(k) + " vs printed", worst <= 5.0 * unit,
                             "max |diff| " + sci(worst) + ", tol " + sci(5.0 * unit)});
  }

  if (!spec.footer.empty()) {
    if (spec.printed_reference.values.empty())
      throw ValidationError("table " + spec.id + ": footer without a printed reference column");
    for (const auto& f : spec.footer) {
      const auto* col = column(spec, f.column);
      if (!col) throw ValidationError("table " + spec.id + ": footer for unknown column " + f.column);
      const auto s = error_stats(*col, spec.printed_reference.values);
      const double tol = unit * (1.0 + 1e-9);
      const bool ok = std::abs(s.rmse - f.stats.rmse) <= tol && std::abs(s.mae - f.stats.mae) <= tol;
      report.checks.push_back({"footer " + f.column, ok,
                               "rmse " + fixed(s.rmse, spec.decimals) + " (printed " + fixed(f.stats.rmse, spec.decimals) +
                                   "), mae " + fixed(s.mae, spec.decimals) + " (printed " +
                                   fixed(f.stats.mae, spec.decimals) + ")"});
    }
  }

  {
    const auto& s = report.stats;
    const bool ok = s[3].rmse <= s[2].rmse + noise && s[2].rmse <= std::min(s[0].rmse, s[1].rmse) + noise;
    report.checks.push_back({"rmse ordering", ok,
                             "rmse " + sci(s[0].rmse) + " " + sci(s[1].rmse) + " " + sci(s[2].rmse) + " " +
                                 sci(s[3].rmse) + ", noise floor " + sci(noise)});
  }

  if (oracle == OracleKind::InternalMc) {
    bool ok = true;
    double worst = 0.0;
    for (const auto& row : report.rows) {
      const double d = std::abs(row.vg[3] - row.oracle);
      ok = ok && d <= std::max(3.0 * row.oracle_se, 5e-3);
      worst = std::max(worst, d);
    }
    report.checks.push_back({"vg3 vs internal mc", ok, "max |diff| " + sci(worst) + ", tol max(3 SE, 5e-3)"});
  }
  return report;
}

std::string report_csv(const TableReport& report) {
  const int d = report.decimals;
  const bool mc = report.oracle == OracleKind::InternalMc;
  std::ostringstream os;
  os << "strike,vg0,vg1,vg2,vg3," << (mc ? "mc,mc_se" : "paper_ref") << ",abs_err_vg0,abs_err_vg1,abs_err_vg2,abs_err_vg3\n";
  for (const auto& r : report.rows) {
    os << fixed(r.strike, 2);
    for (double v : r.vg) os << ',' << fixed(v, d);
    os << ',' << fixed(r.oracle, d);
    if (mc) os << ',' << fixed(r.oracle_se, d + 1);
    for (double v : r.vg) os << ',' << fixed(std::abs(v - r.oracle), d);
    os << '\n';
  }
  const std::string pad = mc ? ",," : ",";
  os << "RMSE";
  for (const auto& s : report.stats) os << ',' << fixed(s.rmse, d);
  os << pad << ",,,,\n";
  os << "MAE";
  for (const auto& s : report.stats) os << ',' << fixed(s.mae, d);
  os << pad << ",,,,\n";
  return os.str();
}

IdentityInstance random_identity_instance(std::uint64_t seed, unsigned index) {
  // uniforms straight from the counter generator, so instances are portable
  const Philox4x32 gen(seed ^ 0x5eed1de7u);
  std::uint32_t draw = 0;
  auto uniform = [&](double lo, double hi) {
    const auto x = gen({draw++, index, 0x1d, 0});
    const double u = (static_cast<double>(x[0] >> 5) * 67108864.0 + static_cast<double>(x[1] >> 6)) / 9007199254740992.0;
    return lo + (hi - lo) * u;
  };

  constexpr int n = 3;
  IdentityInstance inst;
  auto& model = inst.problem.model;
  auto& instr = inst.problem.instrument;
  instr.maturity = uniform(0.5, 2.0);
  instr.direction = index % 2 == 0 ? Direction::Call : Direction::Put;
  model.discount_factor = std::exp(-0.03 * instr.maturity);
  for (int i = 0; i < n; ++i) {
    Asset a;
    a.forward = uniform(50.0, 150.0);
    a.vol = VolCurve({{0.5 * instr.maturity, uniform(0.15, 0.5)}, {instr.maturity, uniform(0.15, 0.5)}});
    model.assets.push_back(std::move(a));
    instr.weights.push_back((i == 0 ? -1.0 : 1.0) * uniform(0.5, 1.5));
  }
  // keep kappa* near the money so puts and calls both carry weight
  const double a_pos = instr.weights[1] * model.assets[1].forward + instr.weights[2] * model.assets[2].forward;
  instr.weights[0] = -uniform(0.8, 1.2) * a_pos / model.assets[0].forward;

  // correlation as the Gram matrix of random unit vectors
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = uniform(-1.0, 1.0);
    g.row(i).normalize();
  }
  model.correlation = g * g.transpose();
  for (int i = 0; i < n; ++i) model.correlation(i, i) = 1.0;

  const auto folded = fold_strike(instr, model);
  inst.inputs = build_inputs(folded.instrument, folded.model, ProxyKind::Geometric);
  inst.indices = {index % 3, (index + 1) % 3, (index + 2) % 3};
  return inst;
}

std::vector<IdentityCheck> run_identity_suite(const IdentityInstance& instance, const McConfig& mc) {
  const auto closed = identity_values(instance.inputs, instance.indices);
  const auto sim = mc_identity_lhs_all(instance.inputs, instance.indices, mc);
  std::vector<IdentityCheck> out;
  for (std::size_t k = 0; k < closed.size(); ++k) {
    IdentityCheck c{closed[k].id, closed[k].label, closed[k].value, sim[k], false};
    c.passed = std::abs(c.closed_form - c.mc.price) <= 3.0 * c.mc.std_error;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace spreadkit
