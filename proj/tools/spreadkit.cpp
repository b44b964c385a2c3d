#include "spreadkit/harness.hpp"
#include "spreadkit/json_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#ifndef SPREADKIT_DATA_DIR
#define SPREADKIT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace spreadkit;

namespace {

constexpr int kExitBreach = 1;
constexpr int kExitSchema = 2;
constexpr int kExitInfeasible = 3;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct PriceArgs {
  std::string input;
  std::string order = "all";
  std::string proxy = "geometric";
  bool mc = false;
  std::uint64_t paths = 4'000'000;
  std::uint64_t seed = 42;
};

int run_price(const PriceArgs& a) {
  const auto problem = load_problem(a.input);
  const int order = a.order == "all" ? 3 : std::stoi(a.order);
  const auto proxy = parse_proxy(a.proxy);
  const auto result = price(problem, order, proxy);
  auto out = price_to_json(result, proxy);

  const auto reduced = to_basket(problem);
  if (!reduced.instrument.weights.empty()) {
    try {
      out["diagnostics"]["skewness"] = basket_skewness(reduced.instrument, reduced.model);
    } catch (const ValidationError&) {
      out["diagnostics"]["skewness"] = nullptr;
    }
  }

  if (a.mc) {
    McConfig cfg;
    cfg.paths = a.paths;
    cfg.seed = a.seed;
    const double strike[] = {problem.instrument.strike};
    const McResult r = problem.asian ? mc_price_asian_ladder(*problem.asian, problem.instrument, problem.model, strike,
                                                             StrikeKind::Additive, cfg)
                                           .front()
                                     : mc_price(problem.instrument, problem.model, cfg);
    out["mc"] = {{"price", r.price}, {"std_error", r.std_error}, {"paths", r.paths_used}, {"seed", a.seed}};
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

struct TablesArgs {
  std::vector<std::string> cases;
  bool all = false;
  std::string oracle = "auto";
  std::string out;
  std::string data = std::string(SPREADKIT_DATA_DIR) + "/tables";
  std::uint64_t paths = 4'000'000;
  std::uint64_t seed = 42;
};

void print_report(const TableSpec& spec, const TableReport& r) {
  const bool mc = r.oracle == OracleKind::InternalMc;
  const char* f = r.decimals >= 5 ? "%12.5f" : "%11.4f";
  std::cout << r.id << "  " << spec.title << "\n  oracle: " << (mc ? "internal mc" : "paper " + spec.printed_reference.name)
            << '\n';
  std::cout << "         K        vg0        vg1        vg2        vg3     oracle"
            << (mc ? "         se" : "") << '\n';
  for (const auto& row : r.rows) {
    std::cout << "  " << fmt("%8.2f", row.strike);
    for (double v : row.vg) std::cout << fmt(f, v);
    std::cout << fmt(f, row.oracle);
    if (mc) std::cout << fmt("%11.6f", row.oracle_se);
    std::cout << '\n';
  }
  std::cout << "      RMSE";
  for (const auto& s : r.stats) std::cout << fmt(f, s.rmse);
  std::cout << "\n       MAE";
  for (const auto& s : r.stats) std::cout << fmt(f, s.mae);
  std::cout << '\n';
  for (const auto& c : r.checks)
    std::cout << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << '\n';
  std::cout << (r.passed() ? "  table PASS\n\n" : "  table FAIL\n\n");
}

int run_tables(const TablesArgs& a) {
  const fs::path dir = a.data;
  auto ids = a.all ? list_tables(dir) : a.cases;
  if (ids.empty()) throw ValidationError("no tables selected; use --case ID or --all");
  for (const auto& id : ids)
    if (!fs::exists(dir / (id + ".json"))) throw ValidationError("unknown case '" + id + "' in " + dir.string());

  McConfig cfg;
  cfg.paths = a.paths;
  cfg.seed = a.seed;
  if (!a.out.empty()) fs::create_directories(a.out);

  int passed = 0;
  for (const auto& id : ids) {
    const auto spec = load_table(dir / (id + ".json"));
    OracleKind oracle = spec.default_oracle;
    if (a.oracle == "paper") oracle = OracleKind::Paper;
    if (a.oracle == "mc") oracle = OracleKind::InternalMc;
    const auto report = run_table(spec, oracle, cfg);
    print_report(spec, report);
    if (!a.out.empty()) {
      std::ofstream(fs::path(a.out) / (id + ".csv")) << report_csv(report);
      std::ofstream(fs::path(a.out) / (id + ".json")) << report_to_json(report).dump(2) << '\n';
    }
    passed += report.passed() ? 1 : 0;
  }
  std::cout << "tables: " << passed << "/" << ids.size() << " passed\n";
  return passed == static_cast<int>(ids.size()) ? 0 : kExitBreach;
}

struct ValidateArgs {
  bool identities = true;
  std::uint64_t paths = 4'000'000;
  std::uint64_t seed = 42;
  unsigned instances = 3;
};

int run_validate(const ValidateArgs& a) {
  McConfig cfg;
  cfg.paths = a.paths;
  cfg.seed = a.seed;
  int total = 0;
  int passed = 0;
  for (unsigned k = 0; k < a.instances; ++k) {
    const auto inst = random_identity_instance(a.seed, k);
    const auto& in = inst.inputs;
    std::cout << "instance " << k << ": kappa* " << fmt("%.6f", in.kappa_star) << ", nu2 " << fmt("%.6f", in.nu2)
              << ", indices (" << inst.indices[0] << "," << inst.indices[1] << "," << inst.indices[2] << "), "
              << (in.direction == Direction::Call ? "call" : "put") << '\n';
    for (const auto& c : run_identity_suite(inst, cfg)) {
      const double z = c.mc.std_error > 0.0 ? (c.mc.price - c.closed_form) / c.mc.std_error : 0.0;
      std::cout << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << fmt("%2.0f", static_cast<double>(c.id)) << ' '
                << c.label << ": closed " << fmt("%.10f", c.closed_form) << "  mc " << fmt("%.10f", c.mc.price)
                << "  se " << fmt("%.3e", c.mc.std_error) << "  z " << fmt("%+.2f", z) << '\n';
      ++total;
      passed += c.passed ? 1 : 0;
    }
  }
  std::cout << "identities: " << passed << "/" << total << " within 3 SE (" << a.paths << " paths, seed " << a.seed
            << ")\n";
  return passed == total ? 0 : kExitBreach;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spreadkit: Asian basket spread option pricing by stochastic Taylor expansion"};
  app.require_subcommand(1);

  PriceArgs pa;
  auto* price_cmd = app.add_subcommand("price", "Price an instrument file");
  price_cmd->add_option("--input", pa.input, "Instrument and market JSON")->required()->check(CLI::ExistingFile);
  price_cmd->add_option("--order", pa.order, "Expansion order")->check(CLI::IsMember({"0", "1", "2", "3", "all"}));
  price_cmd->add_option("--proxy", pa.proxy, "Proxy")->check(CLI::IsMember({"geometric", "levy"}));
  price_cmd->add_flag("--mc", pa.mc, "Also run the Monte Carlo oracle");
  price_cmd->add_option("--paths", pa.paths, "Monte Carlo paths");
  price_cmd->add_option("--seed", pa.seed, "Monte Carlo seed");

  TablesArgs ta;
  auto* tables_cmd = app.add_subcommand("tables", "Reproduce the bundled reference tables");
  auto* case_opt = tables_cmd->add_option("--case", ta.cases, "Table id (repeatable)");
  tables_cmd->add_flag("--all", ta.all, "Run every bundled table")->excludes(case_opt);
  tables_cmd->add_option("--oracle", ta.oracle, "Reference column: the printed one, internal MC, or the table default")
      ->check(CLI::IsMember({"auto", "paper", "mc"}));
  tables_cmd->add_option("--out", ta.out, "Directory for CSV and JSON reports");
  tables_cmd->add_option("--data", ta.data, "Directory with table JSON files");
  tables_cmd->add_option("--paths", ta.paths, "Monte Carlo paths for the internal oracle");
  tables_cmd->add_option("--seed", ta.seed, "Monte Carlo seed");

  ValidateArgs va;
  auto* validate_cmd = app.add_subcommand("validate", "Check the closed-form identities against Monte Carlo");
  validate_cmd->add_flag("--identities", va.identities, "Run the identity suite (default)");
  validate_cmd->add_option("--paths", va.paths, "Monte Carlo paths");
  validate_cmd->add_option("--seed", va.seed, "Seed for instances and paths");
  validate_cmd->add_option("--instances", va.instances, "Number of random 3-asset instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }

  try {
    if (*price_cmd) return run_price(pa);
    if (*tables_cmd) return run_tables(ta);
    if (*validate_cmd) return run_validate(va);
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBreach;
  }
  return 0;
}
