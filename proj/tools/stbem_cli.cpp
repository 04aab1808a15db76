// Command line front-end: solve, study, adaptive, rates, oracle.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stbem/analysis.hpp"
#include "stbem/study.hpp"

namespace {

using namespace stbem;

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct ConfigArgs {
  std::string file;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("-c,--config", args.file, "key=value configuration file");
  cmd->add_option("-s,--set", args.overrides, "override, key=value (repeatable)");
}

StudyConfig load_config(const ConfigArgs& args) {
  StudyConfig cfg;
  if (!args.file.empty()) {
    std::ifstream in(args.file);
    if (!in) throw ConfigError("cannot read configuration file " + args.file);
    cfg.read(in);
  }
  for (const auto& o : args.overrides) cfg.apply(o);
  cfg.validate();
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

/// "x.csv" -> "x" + suffix
std::string sibling(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + suffix;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("malformed number \"" + item + "\"");
    }
    if (used != item.size()) throw ConfigError("malformed number \"" + item + "\"");
    out.push_back(v);
  }
  require(!out.empty(), "empty sample list");
  return out;
}

int cmd_study(const ConfigArgs& args) {
  const StudyConfig cfg = load_config(args);
  const StudyResult res = run_study(cfg);
  if (cfg.output.empty()) {
    write_study_csv(std::cout, res.records);
    std::cerr << res.report;
  } else {
    auto out = open_output(cfg.output);
    write_study_csv(out, res.records);
    auto rep = open_output(sibling(cfg.output, ".report.txt"));
    rep << res.report;
    std::cout << res.report;
  }
  if (res.adaptive && !cfg.output.empty()) {
    auto sets = open_output(sibling(cfg.output, ".indexset.txt"));
    res.adaptive->accepted.write_text(sets);
    auto steps = open_output(sibling(cfg.output, ".steps.csv"));
    write_adaptive_csv(steps, res.adaptive->history);
  }
  return 0;
}

int cmd_solve(const ConfigArgs& args, int level, const std::string& coefficients) {
  StudyConfig cfg = load_config(args);
  require(cfg.scheme != Scheme::adaptive, "solve runs full, combination or sparse-galerkin schemes");
  const int L = level >= 0 ? level : cfg.L_max;
  cfg.L_min = cfg.L_max = L;
  const Problem pb = cfg.problem();
  SolutionCache cache(pb);
  const IndexSet set = study_space(cfg.scheme, L, cfg.sigma2);
  const SchemeSolution sol = solve_scheme(cfg, pb, set, L, cache);
  std::cout << cfg.describe() << "\n";
  std::cout << "L=" << L << " N=" << dof_count(DiscreteSpace(pb.disc, set)) << " grid=" << sol.grid.levels()
            << " assemble_s=" << format_seconds(sol.assemble_s) << " solve_s=" << format_seconds(sol.solve_s) << "\n";
  if (!coefficients.empty()) {
    auto out = open_output(coefficients);
    out << "cell,q,panel,p,value\n";
    const FullGrid& g = sol.grid;
    for (int n = 0; n < g.cells(); ++n)
      for (int q = 0; q <= g.disc.pt; ++q)
        for (int i = 0; i < g.panels(); ++i)
          for (int p = 0; p <= g.disc.px; ++p)
            out << n << ',' << q << ',' << i << ',' << p << ',' << format_double(sol.coefficients[g.index(n, q, i, p)])
                << '\n';
  }
  return 0;
}

int cmd_adaptive(const ConfigArgs& args, const std::string& set_path, const std::string& steps_path) {
  StudyConfig cfg = load_config(args);
  cfg.scheme = Scheme::adaptive;
  cfg.validate();
  AdaptiveSolver solver(cfg.problem(), cfg.workers);
  solver.literal_cost_benefit = cfg.cost_over_benefit;
  const AdaptiveState st = solver.grow(AdaptiveState::initial(), cfg.steps);
  if (st.history.size() < static_cast<std::size_t>(cfg.steps))
    std::cerr << "notice: adaptive loop stopped after " << st.history.size() << " of " << cfg.steps << " steps\n";
  if (set_path.empty()) {
    st.accepted.write_text(std::cout);
  } else {
    auto out = open_output(set_path);
    st.accepted.write_text(out);
  }
  if (steps_path.empty()) {
    write_adaptive_csv(std::cerr, st.history);
  } else {
    auto out = open_output(steps_path);
    write_adaptive_csv(out, st.history);
  }
  return 0;
}

int cmd_rates(int px, int pt, int d, const std::string& sigma2) {
  if (px < 0) {
    std::cout << format_rate_tables(rate_tables());
    return 0;
  }
  RateModel m = RateModel::standard(px, pt, d);
  const FullRate f = predicted_rate_full(m);
  std::cout << "full tensor: gamma " << to_string(f.gamma) << ", optimal sigma^2 " << to_string(f.sigma2_opt)
            << ", squared-norm rate " << to_string(f.squared_rate) << "\n";
  const Rational s2 = sigma2.empty() ? Rational(d - 1) : parse_rational(sigma2);
  m.sigma2 = s2;
  std::cout << "full tensor at sigma^2 " << to_string(s2) << ": squared-norm rate " << to_string(general_full_rate(m, s2))
            << "\n";
  std::cout << "sparse grid at sigma^2 " << to_string(s2) << ": gamma " << to_string(predicted_rate_sparse(m)) << "\n";
  return 0;
}

int cmd_oracle(const ConfigArgs& args, const std::string& phis, const std::string& times, int terms) {
  const StudyConfig cfg = load_config(args);
  require(is_unit_circle(cfg.curve()), "the oracle exists for the unit disk only");
  require(terms >= 1, "terms must be positive");
  const DiskOracle oracle(terms, cfg.T);
  std::printf("phi,t,flux\n");
  for (double t : parse_list(times))
    for (double phi : parse_list(phis)) std::printf("%.10g,%.10g,%.16e\n", phi, t, oracle.flux(phi, t));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time Galerkin BEM for the 2D heat equation"};
  app.require_subcommand(1);

  ConfigArgs study_args, solve_args, adaptive_args, oracle_args;
  auto* study = app.add_subcommand("study", "convergence study over a level range");
  add_config_options(study, study_args);

  int level = -1;
  std::string coefficients;
  auto* solve = app.add_subcommand("solve", "one solve at a single level");
  add_config_options(solve, solve_args);
  solve->add_option("-L,--level", level, "level (default L_max)");
  solve->add_option("--coefficients", coefficients, "write nodal coefficients as CSV");

  std::string set_path, steps_path;
  auto* adaptive = app.add_subcommand("adaptive", "adaptive index set growth");
  add_config_options(adaptive, adaptive_args);
  adaptive->add_option("--indexset", set_path, "write the accepted index set here");
  adaptive->add_option("--steps-csv", steps_path, "write the step log here");

  int px = -1, pt = 0, d = 2;
  std::string sigma2;
  auto* rates = app.add_subcommand("rates", "predicted convergence rates");
  rates->add_option("--px", px, "spatial degree (omit to print all tables)");
  rates->add_option("--pt", pt, "temporal degree");
  rates->add_option("--d", d, "space-time dimension");
  rates->add_option("--sigma2", sigma2, "scaling sigma^2 (default d - 1)");

  std::string phis = "0", times = "0,1,2,3,4";
  int terms = 50;
  auto* oracle = app.add_subcommand("oracle", "exact disk flux table");
  add_config_options(oracle, oracle_args);
  oracle->add_option("--phi", phis, "comma separated angles");
  oracle->add_option("--t", times, "comma separated times");
  oracle->add_option("--terms", terms, "Bessel terms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  try {
    if (study->parsed()) return cmd_study(study_args);
    if (solve->parsed()) return cmd_solve(solve_args, level, coefficients);
    if (adaptive->parsed()) return cmd_adaptive(adaptive_args, set_path, steps_path);
    if (rates->parsed()) return cmd_rates(px, pt, d, sigma2);
    if (oracle->parsed()) return cmd_oracle(oracle_args, phis, times, terms);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numerical;
  }
  return 0;
}
