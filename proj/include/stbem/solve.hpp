#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "stbem/assembly.hpp"
#include "stbem/data.hpp"
#include "stbem/error.hpp"
#include "stbem/indexsets.hpp"
#include "stbem/norms.hpp"
#include "stbem/parallel.hpp"
#include "stbem/space.hpp"

namespace stbem {

enum class Method { direct, indirect };

struct Problem {
  Discretisation disc;
  BoundaryData data = BoundaryData::t2cos(1);
  Method method = Method::direct;
  AssemblyOptions assembly;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Block forward substitution. The lag-0 block is factorised once.
inline Vector solve_full_grid(const CausalBlockMatrix& A, const Vector& rhs) {
  require(rhs.size() == A.size(), "right-hand side length does not match the matrix");
  const int nt = A.nt(), nx = A.nx();
  std::vector<Matrix> blocks(nt);
  for (int k = 0; k < nt; ++k) blocks[k] = A.block(k);
  Eigen::PartialPivLU<Matrix> lu(blocks[0]);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    std::ostringstream os;
    os << "singular diagonal block (rcond " << rcond << ")";
    throw NumericalError(os.str());
  }
  Vector x(A.size());
  Vector r(nx);
  for (int n = 0; n < nt; ++n) {
    r = rhs.segment(static_cast<long>(n) * nx, nx);
    for (int k = 1; k <= n; ++k) r.noalias() -= blocks[k] * x.segment(static_cast<long>(n - k) * nx, nx);
    x.segment(static_cast<long>(n) * nx, nx) = lu.solve(r);
  }
  if (!x.allFinite()) throw NumericalError("non-finite solution of the causal system");
  return x;
}

inline Vector assemble_rhs(const FullGrid& g, const Problem& pb) {
  return pb.method == Method::direct ? assemble_rhs_direct(g, pb.data, pb.assembly)
                                     : assemble_rhs_indirect(g, pb.data);
}

struct FullGridSolution {
  FullGrid grid;
  Vector coefficients;
  double assemble_s = 0.0;
  double solve_s = 0.0;
};

inline FullGridSolution solve_problem(const Problem& pb, LevelPair lev) {
  const FullGrid g(pb.disc, lev);
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const CausalBlockMatrix A = assemble_single_layer(g, pb.assembly);
    const Vector b = assemble_rhs(g, pb);
    const double ta = seconds_since(t0);
    const auto t1 = std::chrono::steady_clock::now();
    Vector x = solve_full_grid(A, b);
    return {g, std::move(x), ta, seconds_since(t1)};
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os << "level " << lev << ": " << e.what();
    throw NumericalError(os.str());
  }
}

/// Full-grid solutions keyed by level pair; concurrent readers, exclusive writers.
class SolutionCache {
 public:
  explicit SolutionCache(Problem pb) : problem_(std::move(pb)) {}

  const Problem& problem() const { return problem_; }

  std::shared_ptr<const FullGridSolution> get(LevelPair lev) {
    {
      std::shared_lock lock(mutex_);
      auto it = store_.find(lev);
      if (it != store_.end()) return it->second;
    }
    auto sol = std::make_shared<const FullGridSolution>(solve_problem(problem_, lev));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = store_.emplace(lev, sol);
    return it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return store_.size();
  }

 private:
  Problem problem_;
  mutable std::shared_mutex mutex_;
  std::map<LevelPair, std::shared_ptr<const FullGridSolution>> store_;
};

// ---------------------------------------------------------------------------
// Combination technique

struct CombinationPlan {
  std::vector<std::pair<LevelPair, int>> terms;
};

/// Isotropic rule: + on lx + lt = L, - on lx + lt = L - 1. Otherwise the
/// ceiling rule ceil(sigma^2 lx) + lt = ceil(sigma L) - l with sign (-1)^l.
/// Terms with a negative level are dropped. For some anisotropic scalings
/// the signs do not sum to one (L = 2, sigma^2 = 2 gives +2 -2).
inline CombinationPlan combination_plan(int L, const Rational& sigma2) {
  require(L >= 0, "combination level must be nonnegative");
  require(sigma2 > 0, "sigma^2 must be positive");
  CombinationPlan plan;
  const int top = ceil_sigma_L(L, sigma2);
  for (int l = 0; l <= 1; ++l) {
    const int target = top - l;
    for (int lx = 0;; ++lx) {
      const long long cx = ceil_rational(sigma2 * lx);
      if (cx > target) break;
      const int lt = static_cast<int>(target - cx);
      plan.terms.push_back({{lx, lt}, l == 0 ? 1 : -1});
    }
  }
  return plan;
}

/// Coefficients of the combination technique on an arbitrary downset.
inline CombinationPlan combination_plan(const IndexSet& set) {
  require(set.is_downset(), "combination on a non-downset");
  CombinationPlan plan;
  for (const auto& [p, c] : combination_coefficients(set)) plan.terms.push_back({p, c});
  return plan;
}

struct CombinedSolution {
  struct Term {
    LevelPair level;
    int sign;
    std::shared_ptr<const FullGridSolution> solution;
  };
  std::vector<Term> terms;
  double assemble_s = 0.0;
  double solve_s = 0.0;

  int max_lx() const {
    int m = 0;
    for (const auto& t : terms) m = std::max(m, t.level.lx);
    return m;
  }
  int max_lt() const {
    int m = 0;
    for (const auto& t : terms) m = std::max(m, t.level.lt);
    return m;
  }

  /// Signed sum of the prolonged terms on a common fine grid.
  Vector on(const FullGrid& f) const {
    Vector s = Vector::Zero(f.dofs());
    for (const auto& t : terms) s += t.sign * prolong(t.solution->grid, t.solution->coefficients, f);
    return s;
  }
};

inline CombinedSolution solve_combination(const CombinationPlan& plan, SolutionCache& cache, int workers = 0) {
  CombinedSolution out;
  out.terms.resize(plan.terms.size());
  parallel_for(static_cast<long>(plan.terms.size()), [&](long k) {
    const auto& [lev, sign] = plan.terms[k];
    out.terms[k] = {lev, sign, cache.get(lev)};
  }, workers);
  for (const auto& t : out.terms) {
    out.assemble_s += t.solution->assemble_s;
    out.solve_s += t.solution->solve_s;
  }
  return out;
}

inline CombinedSolution solve_combination(const CombinationPlan& plan, const Problem& pb, int workers = 0) {
  SolutionCache cache(pb);
  return solve_combination(plan, cache, workers);
}

// ---------------------------------------------------------------------------
// Galerkin solve on the sparse space

struct SparseGalerkinSolution {
  Density density;  // hierarchical, on the sparse space
  double assemble_s = 0.0;
  double solve_s = 0.0;
  double min_symmetric_eigenvalue = 0.0;
};

/// Assemble the bounding full grid, conjugate with the tensor Haar transform,
/// restrict to the blocks of the index set and solve densely.
inline SparseGalerkinSolution solve_galerkin_on_set(const IndexSet& set, const Problem& pb, bool eigen_check = false) {
  require(pb.disc.px == 0 && pb.disc.pt == 0, "sparse Galerkin solve needs piecewise constants");
  const DiscreteSpace space(pb.disc, set);
  const FullGrid g = space.bounding_grid();
  const auto t0 = std::chrono::steady_clock::now();
  const CausalBlockMatrix A = assemble_single_layer(g, pb.assembly);
  const Vector b = assemble_rhs(g, pb);
  Matrix D = A.to_dense();
  const double w = cell_weight(g);
  // rows then columns: Q A Q^T / w
  for (long c = 0; c < D.cols(); ++c) D.col(c) = haar_tensor_forward(g, D.col(c));
  for (long r = 0; r < D.rows(); ++r) D.row(r) = haar_tensor_forward(g, D.row(r).transpose()).transpose();
  D /= w;
  const Vector bh = haar_tensor_forward(g, b) / std::sqrt(w);

  // grid positions of the retained hierarchical functions, in block order
  const long n = dof_count(space);
  std::vector<long> pos(n);
  {
    Vector probe(n);
    for (long k = 0; k < n; ++k) probe[k] = static_cast<double>(k + 1);
    const Vector grid = blocks_to_grid(space, probe, g);
    for (long k = 0; k < grid.size(); ++k)
      if (grid[k] != 0.0) pos[static_cast<long>(grid[k]) - 1] = k;
  }
  Matrix As(n, n);
  Vector bs(n);
  for (long r = 0; r < n; ++r) {
    bs[r] = bh[pos[r]];
    for (long c = 0; c < n; ++c) As(r, c) = D(pos[r], pos[c]);
  }
  D.resize(0, 0);
  const double ta = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  Eigen::PartialPivLU<Matrix> lu(As);
  if (!(lu.rcond() > 1e-14)) throw NumericalError("singular restricted sparse Galerkin system");
  Vector x = lu.solve(bs);
  const double ts = seconds_since(t1);
  double mineig = 0.0;
  if (eigen_check) {
    const Matrix S = 0.5 * (As + As.transpose());
    mineig = Eigen::SelfAdjointEigenSolver<Matrix>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  }
  return {Density(space, std::move(x), Density::Representation::hierarchical), ta, ts, mineig};
}

inline SparseGalerkinSolution solve_sparse_galerkin(int L, const Rational& sigma2, const Problem& pb, bool eigen_check = false) {
  return solve_galerkin_on_set(sparse_set(L, sigma2), pb, eigen_check);
}

// ---------------------------------------------------------------------------
// Adaptive index sets

/// c(lx, lt) = 2^{lt + lx (d - 1)}.
inline double adaptive_cost(const LevelPair& p, int d = 2) {
  require(d == 2, "only d = 2 is supported");
  return std::ldexp(1.0, p.lt + p.lx * (d - 1));
}

struct AdaptiveStep {
  int step;
  LevelPair index;
  double cost;
  double benefit;
  double ratio;
};

struct AdaptiveState {
  IndexSet accepted;
  std::vector<LevelPair> frontier;
  std::map<LevelPair, double> measured_benefit;
  std::size_t max_indices = 1000;
  long max_dofs = 1L << 40;
  std::vector<AdaptiveStep> history;

  static AdaptiveState initial() {
    AdaptiveState s;
    s.accepted = IndexSet(std::set<LevelPair>{{0, 0}});
    s.frontier = s.accepted.admissible_neighbours();
    return s;
  }
};

/// Greedy growth by measured surplus contributions.
class AdaptiveSolver {
 public:
  explicit AdaptiveSolver(Problem pb, int workers = 0) : cache_(std::move(pb)), workers_(workers) {}

  SolutionCache& cache() { return cache_; }
  const Problem& problem() const { return cache_.problem(); }

  /// Select by minimal c/b instead of maximal b/c when set.
  bool literal_cost_benefit = false;

  /// Energy surrogate (r, s) = (-1/2, -1/4) of the surplus
  /// Pi_l - Pi_{l-ex} - Pi_{l-et} + Pi_{l-ex-et}, missing terms taken as 0.
  double benefit(const LevelPair& lev) {
    {
      std::lock_guard lock(benefit_mutex_);
      auto it = benefit_cache_.find(lev);
      if (it != benefit_cache_.end()) return it->second;
    }
    require(problem().disc.px == 0 && problem().disc.pt == 0, "adaptive benefits need piecewise constants");
    const FullGrid g(problem().disc, lev);
    Vector surplus = cache_.get(lev)->coefficients;
    for (int dx = 0; dx <= 1; ++dx)
      for (int dt = 0; dt <= 1; ++dt) {
        if (dx + dt == 0) continue;
        const LevelPair lower{lev.lx - dx, lev.lt - dt};
        if (lower.lx < 0 || lower.lt < 0) continue;
        const auto sol = cache_.get(lower);
        const double sign = (dx + dt) % 2 ? -1.0 : 1.0;
        surplus += sign * prolong(sol->grid, sol->coefficients, g);
      }
    const Density h = to_hierarchical(Density::nodal(g, surplus));
    const double b = std::sqrt(energy_norm_sq_wavelet(h, -0.5, -0.25));
    std::lock_guard lock(benefit_mutex_);
    benefit_cache_[lev] = b;
    return b;
  }

  /// Accepts `steps` indices (fewer if the frontier empties or a budget is hit).
  AdaptiveState grow(AdaptiveState state, int steps) {
    for (int step = 0; step < steps; ++step) {
      if (state.frontier.empty()) break;
      if (state.accepted.size() >= state.max_indices) break;
      std::vector<double> b(state.frontier.size());
      parallel_for(static_cast<long>(b.size()), [&](long k) { b[k] = benefit(state.frontier[k]); }, workers_);
      std::size_t best = state.frontier.size();
      double best_score = 0.0;
      // frontier is sorted, so strict comparison keeps the lexicographically smallest on ties
      for (std::size_t k = 0; k < state.frontier.size(); ++k) {
        const LevelPair& p = state.frontier[k];
        state.measured_benefit[p] = b[k];
        const double c = adaptive_cost(p);
        const double score = literal_cost_benefit ? (b[k] > 0.0 ? -c / b[k] : -INFINITY) : b[k] / c;
        if (best == state.frontier.size() || score > best_score) {
          best = k;
          best_score = score;
        }
      }
      const LevelPair chosen = state.frontier[best];
      IndexSet next = state.accepted;
      next.insert(chosen);
      if (dof_count(DiscreteSpace(problem().disc, next)) > state.max_dofs) break;
      state.accepted = std::move(next);
      state.history.push_back({static_cast<int>(state.history.size()) + 1, chosen, adaptive_cost(chosen),
                               b[best], b[best] / adaptive_cost(chosen)});
      state.frontier = state.accepted.admissible_neighbours();
    }
    return state;
  }

 private:
  SolutionCache cache_;
  int workers_;
  std::mutex benefit_mutex_;
  std::map<LevelPair, double> benefit_cache_;
};

}  // namespace stbem
