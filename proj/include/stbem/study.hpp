#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stbem/analysis.hpp"
#include "stbem/data.hpp"
#include "stbem/error.hpp"
#include "stbem/indexsets.hpp"
#include "stbem/rates.hpp"
#include "stbem/solve.hpp"

namespace stbem {

enum class Scheme { full, combination, sparse_galerkin, adaptive };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::full: return "full";
    case Scheme::combination: return "combination";
    case Scheme::sparse_galerkin: return "sparse-galerkin";
    case Scheme::adaptive: return "adaptive";
  }
  return "?";
}

struct ErrorMode {
  enum class Kind { automatic, oracle, reference };
  Kind kind = Kind::automatic;
  int levels_above = 2;
};

/// Flat key=value configuration of a study. Keys:
///   geometry = circle | ellipse        radius, a, b
///   data = t2cos1 | t2cos2 | zero | fourier:m,p,A;...
///   method = direct | indirect         scheme = full | sparse | combination | sparse-galerkin | adaptive
///   L_min, L_max, sigma2 (p/q), px, pt, T, M0
///   error = oracle[:k] | reference[:k] | auto     (k levels above the finest study grid)
///   steps (adaptive), workers, oracle_terms, cost_over_benefit (0/1), output
struct StudyConfig {
  std::string geometry = "circle";
  double radius = 1.0;
  double a = 0.8;
  double b = 0.5;
  std::string data = "t2cos1";
  Method method = Method::direct;
  Scheme scheme = Scheme::full;
  int L_min = 1;
  int L_max = 5;
  Rational sigma2{1};
  int px = 0;
  int pt = 0;
  double T = 4.0;
  int M0 = 4;
  ErrorMode error;
  int steps = 20;
  int workers = 0;
  int oracle_terms = 50;
  bool cost_over_benefit = false;
  std::string output;

  void set(const std::string& key, const std::string& value) {
    try {
      if (key == "geometry") {
        require(value == "circle" || value == "ellipse", "geometry must be circle or ellipse");
        geometry = value;
      } else if (key == "radius") radius = parse_double(value);
      else if (key == "a") a = parse_double(value);
      else if (key == "b") b = parse_double(value);
      else if (key == "data") {
        BoundaryData::parse(value);
        data = value;
      } else if (key == "method") {
        require(value == "direct" || value == "indirect", "method must be direct or indirect");
        method = value == "direct" ? Method::direct : Method::indirect;
      } else if (key == "scheme") {
        if (value == "full") scheme = Scheme::full;
        else if (value == "sparse" || value == "combination") scheme = Scheme::combination;
        else if (value == "sparse-galerkin") scheme = Scheme::sparse_galerkin;
        else if (value == "adaptive") scheme = Scheme::adaptive;
        else throw ConfigError("unknown scheme \"" + value + "\"");
      } else if (key == "L_min") L_min = parse_int(value);
      else if (key == "L_max") L_max = parse_int(value);
      else if (key == "sigma2") sigma2 = parse_rational(value);
      else if (key == "px") px = parse_int(value);
      else if (key == "pt") pt = parse_int(value);
      else if (key == "T") T = parse_double(value);
      else if (key == "M0") M0 = parse_int(value);
      else if (key == "error") error = parse_error(value);
      else if (key == "steps") steps = parse_int(value);
      else if (key == "workers") workers = parse_int(value);
      else if (key == "oracle_terms") oracle_terms = parse_int(value);
      else if (key == "cost_over_benefit") cost_over_benefit = parse_int(value) != 0;
      else if (key == "output") output = value;
      else throw ConfigError("unknown configuration key \"" + key + "\"");
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      if (what.rfind(key + ":", 0) == 0) throw;
      throw ConfigError(key + ": " + what);
    }
  }

  /// Applies "key=value" (surrounding blanks ignored).
  void apply(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got \"" + assignment + "\"");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  }

  void read(std::istream& is) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (trim(line).empty()) continue;
      try {
        apply(line);
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }

  void validate() const {
    require(L_min >= 0 && L_min <= L_max, "need 0 <= L_min <= L_max");
    require(sigma2 > 0, "sigma2 must be positive");
    require(px == 0 || px == 1, "px must be 0 or 1");
    require(pt == 0 || pt == 1, "pt must be 0 or 1");
    require(T > 0.0, "T must be positive");
    require(M0 >= 1, "M0 must be at least 1");
    require(steps >= 1, "steps must be positive");
    require(oracle_terms >= 1, "oracle_terms must be positive");
    require(error.levels_above >= 0, "error levels must be nonnegative");
    if (scheme == Scheme::sparse_galerkin || scheme == Scheme::adaptive)
      require(px == 0 && pt == 0, to_string(scheme) + " needs px = pt = 0");
    require(geometry != "circle" || radius > 0.0, "radius must be positive");
    require(geometry != "ellipse" || (a > 0.0 && b > 0.0), "ellipse semi-axes must be positive");
    BoundaryData::parse(data);
    if (error.kind == ErrorMode::Kind::oracle)
      require(oracle_fits(), "error=oracle needs the unit circle, direct method and data t2cos1");
  }

  bool oracle_fits() const {
    return geometry == "circle" && std::abs(radius - 1.0) < 1e-14 && method == Method::direct && data == "t2cos1";
  }

  BoundaryCurve curve() const {
    return geometry == "circle" ? BoundaryCurve::circle(radius) : BoundaryCurve::ellipse(a, b);
  }

  Problem problem() const {
    validate();
    Problem pb;
    pb.disc.curve = curve();
    pb.disc.px = px;
    pb.disc.pt = pt;
    pb.disc.T = T;
    pb.disc.M0 = M0;
    pb.data = BoundaryData::parse(data);
    pb.method = method;
    pb.assembly.workers = workers;
    return pb;
  }

  /// Oracle errors are used whenever they apply, unless asked otherwise.
  bool uses_oracle() const {
    validate();
    return error.kind == ErrorMode::Kind::oracle || (error.kind == ErrorMode::Kind::automatic && oracle_fits());
  }

  std::string describe() const {
    std::ostringstream os;
    os << "scheme=" << to_string(scheme) << " geometry=" << curve().describe() << " data=" << data
       << " method=" << (method == Method::direct ? "direct" : "indirect") << " sigma2=" << stbem::to_string(sigma2)
       << " px=" << px << " pt=" << pt << " T=" << T << " M0=" << M0;
    return os.str();
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  static int parse_int(const std::string& v) {
    std::size_t used = 0;
    int x = 0;
    try {
      x = std::stoi(v, &used);
    } catch (const std::exception&) {
      throw ConfigError("expected an integer, got \"" + v + "\"");
    }
    if (used != v.size()) throw ConfigError("expected an integer, got \"" + v + "\"");
    return x;
  }
  static double parse_double(const std::string& v) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      throw ConfigError("expected a number, got \"" + v + "\"");
    }
    if (used != v.size() || !std::isfinite(x)) throw ConfigError("expected a number, got \"" + v + "\"");
    return x;
  }
  static ErrorMode parse_error(const std::string& v) {
    ErrorMode m;
    const auto colon = v.find(':');
    const std::string kind = v.substr(0, colon);
    if (kind == "oracle") m.kind = ErrorMode::Kind::oracle;
    else if (kind == "reference") m.kind = ErrorMode::Kind::reference;
    else if (kind == "auto") m.kind = ErrorMode::Kind::automatic;
    else throw ConfigError("error must be oracle[:k], reference[:k] or auto");
    if (colon != std::string::npos) m.levels_above = parse_int(v.substr(colon + 1));
    return m;
  }
};

/// Two significant digits, as used for timings in the study CSV.
inline std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2g", s);
  return buf;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

inline void write_study_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records) {
  os << "L,N,err2,assemble_s,solve_s\n";
  for (const auto& r : records)
    os << r.L << ',' << r.N << ',' << format_double(r.err2) << ',' << format_seconds(r.assemble_s) << ','
       << format_seconds(r.solve_s) << '\n';
}

inline void write_adaptive_csv(std::ostream& os, const std::vector<AdaptiveStep>& steps) {
  os << "step,lx,lt,cost,benefit,ratio\n";
  for (const auto& s : steps)
    os << s.step << ',' << s.index.lx << ',' << s.index.lt << ',' << s.cost << ',' << format_double(s.benefit) << ','
       << format_double(s.ratio) << '\n';
}

struct StudyResult {
  std::vector<ConvergenceRecord> records;
  std::vector<IndexSet> sets;  // discrete space of each record
  std::string reference;
  std::optional<AdaptiveState> adaptive;
  std::optional<double> fitted_rate;
  std::string report;
};

/// Index set of the discrete space a scheme uses at level L.
inline IndexSet study_space(Scheme scheme, int L, const Rational& sigma2) {
  switch (scheme) {
    case Scheme::full: return full_tensor_set(L, sigma2);
    case Scheme::sparse_galerkin: return sparse_set(L, sigma2);
    case Scheme::combination: {
      std::vector<LevelPair> g;
      for (const auto& [p, sign] : combination_plan(L, sigma2).terms) g.push_back(p);
      return downset_closure(g);
    }
    case Scheme::adaptive: break;
  }
  throw ConfigError("adaptive spaces are produced by the adaptive loop");
}

/// Nodal coefficients of a scheme's solution on the bounding grid of its space.
struct SchemeSolution {
  FullGrid grid;
  Vector coefficients;
  double assemble_s = 0.0;
  double solve_s = 0.0;
};

/// Solves one level of a scheme. Full-grid solves go through `cache`;
/// adaptive runs use the solver's own cache.
inline SchemeSolution solve_scheme(const StudyConfig& cfg, const Problem& pb, const IndexSet& set, int L,
                                   SolutionCache& cache, AdaptiveSolver* adaptive = nullptr) {
  const FullGrid bound(pb.disc, set.max_lx(), set.max_lt());
  try {
    switch (cfg.scheme) {
      case Scheme::full: {
        const auto sol = cache.get(bound.levels());
        return {sol->grid, sol->coefficients, sol->assemble_s, sol->solve_s};
      }
      case Scheme::combination:
      case Scheme::adaptive: {
        // the ceiling rule's own signs need not sum to one for sigma^2 != 1; the
        // inclusion-exclusion coefficients of its downset do, and agree with it at sigma^2 = 1
        const CombinationPlan plan = combination_plan(set);
        SolutionCache& c = (cfg.scheme == Scheme::adaptive && adaptive) ? adaptive->cache() : cache;
        const CombinedSolution cs = solve_combination(plan, c, cfg.workers);
        return {bound, cs.on(bound), cs.assemble_s, cs.solve_s};
      }
      case Scheme::sparse_galerkin: {
        const SparseGalerkinSolution sg = solve_galerkin_on_set(set, pb);
        const Density n = to_nodal(sg.density);
        return {n.space.bounding_grid(), n.coefficients, sg.assemble_s, sg.solve_s};
      }
    }
  } catch (const NumericalError& e) {
    throw NumericalError("study level " + std::to_string(L) + ": " + e.what());
  }
  throw ConfigError("unknown scheme");
}

inline std::string rate_report(const StudyConfig& cfg, const StudyResult& res) {
  std::ostringstream os;
  os << cfg.describe() << "\n";
  os << "error: " << res.reference << "\n";
  os.setf(std::ios::fixed);
  os.precision(4);
  if (res.fitted_rate) os << "fitted squared-norm rate: " << *res.fitted_rate << "\n";
  else os << "fitted squared-norm rate: n/a (fewer than three records)\n";
  const RateModel m = RateModel::standard(cfg.px, cfg.pt, 2, cfg.sigma2);
  switch (cfg.scheme) {
    case Scheme::full: {
      const Rational r = general_full_rate(m, cfg.sigma2);
      const FullRate opt = predicted_rate_full(m);
      os << "predicted squared-norm rate at sigma2=" << to_string(cfg.sigma2) << ": " << to_string(r) << " ("
         << to_double(r) << ")\n";
      os << "optimal sigma2 " << to_string(opt.sigma2_opt) << " gives " << to_string(opt.squared_rate) << " ("
         << to_double(opt.squared_rate) << "), gamma " << to_string(opt.gamma) << "\n";
      break;
    }
    case Scheme::combination:
    case Scheme::sparse_galerkin:
    case Scheme::adaptive: {
      const Rational g = predicted_rate_sparse(m);
      os << "predicted sparse rate gamma: " << to_string(g) << " (" << to_double(g) << ")"
         << "; read as a squared-norm rate: " << to_string(2 * g) << " (" << to_double(2 * g) << ")\n";
      break;
    }
  }
  return os.str();
}

/// Runs every level of the study, measures each against one common
/// reference on a grid k levels above the finest grid used, and fits the rate.
inline StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  const Problem pb = cfg.problem();
  StudyResult res;
  SolutionCache cache(pb);

  std::optional<AdaptiveSolver> adaptive;
  std::vector<int> levels;
  if (cfg.scheme == Scheme::adaptive) {
    adaptive.emplace(pb, cfg.workers);
    adaptive->literal_cost_benefit = cfg.cost_over_benefit;
    AdaptiveState st = adaptive->grow(AdaptiveState::initial(), cfg.steps);
    if (st.history.size() < static_cast<std::size_t>(cfg.steps))
      std::fprintf(stderr, "notice: adaptive loop stopped after %zu of %d steps\n", st.history.size(), cfg.steps);
    IndexSet acc(std::set<LevelPair>{{0, 0}});
    for (const auto& h : st.history) {
      acc.insert(h.index);
      res.sets.push_back(acc);
      levels.push_back(h.step);
    }
    res.adaptive = std::move(st);
  } else {
    for (int L = cfg.L_min; L <= cfg.L_max; ++L) {
      res.sets.push_back(study_space(cfg.scheme, L, cfg.sigma2));
      levels.push_back(L);
    }
  }

  int mx = 0, mt = 0;
  for (const auto& s : res.sets) {
    mx = std::max(mx, s.max_lx());
    mt = std::max(mt, s.max_lt());
  }
  const LevelPair ref_levels{mx + cfg.error.levels_above, mt + cfg.error.levels_above};
  const ErrorReference ref =
      cfg.uses_oracle() ? oracle_reference(pb, ref_levels, cfg.oracle_terms) : bem_reference(pb, ref_levels);
  res.reference = ref.description;

  for (std::size_t k = 0; k < res.sets.size(); ++k) {
    const int L = levels[k];
    const SchemeSolution sol = solve_scheme(cfg, pb, res.sets[k], L, cache, adaptive ? &*adaptive : nullptr);
    ConvergenceRecord rec;
    rec.L = L;
    rec.N = dof_count(DiscreteSpace(pb.disc, res.sets[k]));
    rec.err2 = ref.err2(sol.grid, sol.coefficients);
    rec.assemble_s = sol.assemble_s;
    rec.solve_s = sol.solve_s;
    res.records.push_back(rec);
  }

  bool fit_ok = res.records.size() >= 3;
  for (std::size_t k = 0; k < res.records.size(); ++k) {
    if (!(res.records[k].err2 > 0.0)) fit_ok = false;
    if (k > 0 && res.records[k].N <= res.records[k - 1].N) fit_ok = false;
  }
  if (fit_ok) res.fitted_rate = fit_rate(res.records);
  res.report = rate_report(cfg, res);
  return res;
}

}  // namespace stbem
