#include <gtest/gtest.h>

#include <random>
#include <set>

#include "stbem/solve.hpp"

using namespace stbem;

namespace {

Problem circle_problem(Method m = Method::direct) {
  Problem pb;
  pb.method = m;
  return pb;
}

Problem ellipse_problem() {
  Problem pb;
  pb.disc.curve = BoundaryCurve::ellipse(0.8, 0.5);
  return pb;
}

std::set<std::pair<LevelPair, int>> as_set(const CombinationPlan& p) { return {p.terms.begin(), p.terms.end()}; }

}  // namespace

TEST(Solve, ForwardSubstitutionMatchesDenseLU) {
  std::mt19937 rng(1);
  std::normal_distribution<double> N01;
  for (int px = 0; px <= 1; ++px)
    for (int pt = 0; pt <= 1; ++pt) {
      Discretisation d;
      d.curve = BoundaryCurve::ellipse(0.8, 0.5);
      d.px = px;
      d.pt = pt;
      const FullGrid g(d, 1, 3);
      const CausalBlockMatrix A = assemble_single_layer(g);
      Vector b(g.dofs());
      for (auto& v : b) v = N01(rng);
      const Vector x = solve_full_grid(A, b);
      const Vector y = A.to_dense().partialPivLu().solve(b);
      EXPECT_LE((x - y).norm(), 1e-10 * y.norm());
      EXPECT_LE((A.apply(x) - b).norm(), 1e-10 * b.norm());
    }
}

TEST(Solve, CausalityOfTheSolution) {
  std::mt19937 rng(2);
  std::normal_distribution<double> N01;
  const FullGrid g(Discretisation{}, 2, 3);
  const CausalBlockMatrix A = assemble_single_layer(g);
  const long nx = g.block_size();
  Vector b = Vector::Zero(g.dofs());
  for (long k = 3 * nx; k < g.dofs(); ++k) b[k] = N01(rng);
  const Vector x = solve_full_grid(A, b);
  EXPECT_EQ(x.head(3 * nx).cwiseAbs().maxCoeff(), 0.0);
  // later data cannot change earlier coefficients
  Vector b2 = b;
  b2.tail(nx).setRandom();
  const Vector x2 = solve_full_grid(A, b2);
  EXPECT_EQ((x2 - x).head(g.dofs() - nx).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Solve, SingularDiagonalBlockIsReported) {
  const FullGrid g(Discretisation{}, 0, 1);
  std::vector<Matrix> blocks(2, Matrix::Zero(g.block_size(), g.block_size()));
  const CausalBlockMatrix A = CausalBlockMatrix::dense(g, blocks);
  EXPECT_THROW(solve_full_grid(A, Vector::Ones(g.dofs())), NumericalError);
  EXPECT_THROW(solve_full_grid(A, Vector::Ones(3)), ConfigError);
}

TEST(Solve, ZeroDataGivesZeroSolution) {
  Problem pb = ellipse_problem();
  pb.data = BoundaryData::zero();
  EXPECT_EQ(solve_problem(pb, {1, 2}).coefficients.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Solve, DirectAndIndirectDiffer) {
  const auto d = solve_problem(circle_problem(Method::direct), {1, 1}).coefficients;
  const auto i = solve_problem(circle_problem(Method::indirect), {1, 1}).coefficients;
  EXPECT_GT((d - i).norm(), 1e-3 * d.norm());
}

TEST(Combination, IsotropicPlan) {
  const std::set<std::pair<LevelPair, int>> want{
      {{0, 2}, 1}, {{1, 1}, 1}, {{2, 0}, 1}, {{0, 1}, -1}, {{1, 0}, -1}};
  EXPECT_EQ(as_set(combination_plan(2, Rational(1))), want);
}

TEST(Combination, AnisotropicPlan) {
  const std::set<std::pair<LevelPair, int>> want{{{0, 3}, 1}, {{1, 1}, 1}, {{0, 2}, -1}, {{1, 0}, -1}};
  EXPECT_EQ(as_set(combination_plan(2, Rational(2))), want);
}

static int coefficient_sum(const CombinationPlan& p) {
  int sum = 0;
  for (const auto& [q, c] : p.terms) sum += c;
  return sum;
}

TEST(Combination, IsotropicCoefficientsSumToOne) {
  for (int L = 0; L <= 12; ++L) EXPECT_EQ(coefficient_sum(combination_plan(L, Rational(1))), 1) << L;
}

TEST(Combination, CeilingRuleSumIsNotAlwaysOne) {
  EXPECT_EQ(coefficient_sum(combination_plan(2, Rational(2))), 0);
  EXPECT_EQ(coefficient_sum(combination_plan(2, Rational(2, 3))), 2);
}

TEST(Combination, StudyPlansAreConsistentForAllScalings) {
  for (const auto& s2 : {Rational(2, 3), Rational(1), Rational(6, 5), Rational(2)})
    for (int L = 0; L <= 9; ++L) {
      std::vector<LevelPair> gens;
      for (const auto& [p, c] : combination_plan(L, s2).terms) {
        EXPECT_GE(p.lx, 0);
        EXPECT_GE(p.lt, 0);
        gens.push_back(p);
      }
      const IndexSet closure = downset_closure(gens);
      EXPECT_EQ(coefficient_sum(combination_plan(closure)), 1) << to_string(s2) << " " << L;
    }
}

TEST(Combination, DownsetCoefficientsReproduceIsotropicPlan) {
  for (int L = 0; L <= 8; ++L) {
    // the isotropic plan combines the downset lx + lt <= L
    std::set<LevelPair> tri;
    for (int x = 0; x <= L; ++x)
      for (int t = 0; x + t <= L; ++t) tri.insert({x, t});
    EXPECT_EQ(as_set(combination_plan(IndexSet(tri))), as_set(combination_plan(L, Rational(1))));
  }
}

TEST(Combination, InclusionExclusionOnRandomDownsets) {
  // every index of the downset is covered exactly once: sum over terms p >= q of c_p is 1
  std::mt19937 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    IndexSet s(std::set<LevelPair>{{0, 0}});
    for (int k = 0; k < 12; ++k) {
      const auto nb = s.admissible_neighbours();
      s.insert(nb[rng() % nb.size()]);
    }
    const auto plan = combination_plan(s);
    for (const auto& q : s.indices()) {
      int cover = 0;
      for (const auto& [p, c] : plan.terms)
        if (p.lx >= q.lx && p.lt >= q.lt) cover += c;
      EXPECT_EQ(cover, 1);
    }
  }
}

TEST(Combination, FullBoxCollapsesToTopSolution) {
  const Problem pb = ellipse_problem();
  const auto plan = combination_plan(full_tensor_set(2, Rational(1)));
  ASSERT_EQ(plan.terms.size(), 1u);
  const CombinedSolution cs = solve_combination(plan, pb);
  const FullGrid g(pb.disc, 2, 2);
  EXPECT_EQ((cs.on(g) - solve_problem(pb, {2, 2}).coefficients).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Combination, WorkerCountDoesNotChangeResult) {
  const Problem pb = circle_problem();
  const auto plan = combination_plan(3, Rational(1));
  const CombinedSolution a = solve_combination(plan, pb, 1), b = solve_combination(plan, pb, 3);
  const FullGrid g(pb.disc, a.max_lx(), a.max_lt());
  EXPECT_EQ((a.on(g) - b.on(g)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Combination, CacheReusesSolutions) {
  SolutionCache cache(circle_problem());
  solve_combination(combination_plan(2, Rational(1)), cache);
  EXPECT_EQ(cache.size(), 5u);
  solve_combination(combination_plan(3, Rational(1)), cache);
  EXPECT_EQ(cache.size(), 9u);
}

TEST(SparseGalerkin, LevelZeroIsTheFullGridSolution) {
  const Problem pb = ellipse_problem();
  const auto sg = solve_sparse_galerkin(0, Rational(1), pb);
  const auto full = solve_problem(pb, {0, 0});
  const Vector nodal = to_nodal(sg.density).coefficients;
  EXPECT_LE((nodal - full.coefficients).norm(), 1e-12 * full.coefficients.norm());
}

TEST(SparseGalerkin, FullTensorSetReproducesFullGrid) {
  const Problem pb = circle_problem();
  const auto sg = solve_galerkin_on_set(full_tensor_set(2, Rational(1)), pb);
  const auto full = solve_problem(pb, {2, 2});
  EXPECT_LE((to_nodal(sg.density).coefficients - full.coefficients).norm(), 1e-10 * full.coefficients.norm());
}

TEST(SparseGalerkin, GalerkinOrthogonality) {
  for (const Problem& pb : {circle_problem(), ellipse_problem()}) {
    const auto sg = solve_sparse_galerkin(3, Rational(1), pb, true);
    EXPECT_GT(sg.min_symmetric_eigenvalue, 0.0);
    const FullGrid g = sg.density.space.bounding_grid();
    const CausalBlockMatrix A = assemble_single_layer(g);
    const Vector b = assemble_rhs(g, pb);
    const Vector x = to_nodal(sg.density).coefficients;
    const Vector r = b - A.apply(x);
    // residual against every basis function of the sparse space
    const long n = dof_count(sg.density.space);
    double worst = 0.0;
    for (long k = 0; k < n; ++k) {
      const Density e(sg.density.space, Vector::Unit(n, k), Density::Representation::hierarchical);
      const Vector v = to_nodal(e).coefficients;
      worst = std::max(worst, std::abs(r.dot(v)) / (b.norm() * v.norm()));
    }
    EXPECT_LE(worst, 1e-11);
    // and the full residual is not zero: the space is a proper subspace
    EXPECT_GT(r.norm(), 1e-8 * b.norm());
  }
}

TEST(Adaptive, CostFunction) {
  EXPECT_EQ(adaptive_cost({0, 0}), 1.0);
  EXPECT_EQ(adaptive_cost({2, 3}), 32.0);
  EXPECT_THROW(adaptive_cost({1, 1}, 3), ConfigError);
}

TEST(Adaptive, GrowsDownsetsAlongTheFrontier) {
  AdaptiveSolver solver(circle_problem(), 1);
  AdaptiveState st = AdaptiveState::initial();
  EXPECT_EQ(st.frontier, (std::vector<LevelPair>{{0, 1}, {1, 0}}));
  for (int k = 1; k <= 8; ++k) {
    const auto before = st.frontier;
    st = solver.grow(st, 1);
    ASSERT_EQ(st.history.size(), static_cast<std::size_t>(k));
    const auto& step = st.history.back();
    EXPECT_NE(std::find(before.begin(), before.end(), step.index), before.end());
    EXPECT_TRUE(st.accepted.is_downset());
    EXPECT_EQ(st.accepted.size(), static_cast<std::size_t>(k + 1));
    EXPECT_EQ(st.frontier, st.accepted.admissible_neighbours());
    EXPECT_DOUBLE_EQ(step.cost, adaptive_cost(step.index));
    EXPECT_DOUBLE_EQ(step.ratio, step.benefit / step.cost);
    EXPECT_GT(step.benefit, 0.0);
    // the chosen index has the best ratio of the frontier it came from
    for (const auto& p : before) EXPECT_LE(st.measured_benefit.at(p) / adaptive_cost(p), step.ratio * (1 + 1e-15));
  }
}

TEST(Adaptive, BenefitOfRootIsItsEnergy) {
  AdaptiveSolver solver(circle_problem(), 1);
  const auto sol = solver.cache().get({0, 0});
  const Density h = to_hierarchical(Density::nodal(sol->grid, sol->coefficients));
  EXPECT_DOUBLE_EQ(solver.benefit({0, 0}), std::sqrt(energy_norm_sq_wavelet(h, -0.5, -0.25)));
}

TEST(Adaptive, SurplusesTelescopeToTheTopSolution) {
  // sum over the box of the surpluses equals the full grid solution at the corner
  const Problem pb = ellipse_problem();
  SolutionCache cache(pb);
  const FullGrid top(pb.disc, 2, 2);
  Vector sum = Vector::Zero(top.dofs());
  for (int x = 0; x <= 2; ++x)
    for (int t = 0; t <= 2; ++t)
      for (int dx = 0; dx <= 1; ++dx)
        for (int dt = 0; dt <= 1; ++dt) {
          if (x - dx < 0 || t - dt < 0) continue;
          const auto s = cache.get({x - dx, t - dt});
          sum += ((dx + dt) % 2 ? -1.0 : 1.0) * prolong(s->grid, s->coefficients, top);
        }
  const Vector want = cache.get({2, 2})->coefficients;
  EXPECT_LE((sum - want).cwiseAbs().maxCoeff(), 1e-12 * want.cwiseAbs().maxCoeff());
}

TEST(Adaptive, DeterministicAcrossRunsAndWorkers) {
  AdaptiveSolver a(circle_problem(), 1), b(circle_problem(), 3);
  const auto sa = a.grow(AdaptiveState::initial(), 6), sb = b.grow(AdaptiveState::initial(), 6);
  ASSERT_EQ(sa.history.size(), sb.history.size());
  for (std::size_t k = 0; k < sa.history.size(); ++k) {
    EXPECT_EQ(sa.history[k].index, sb.history[k].index);
    EXPECT_EQ(sa.history[k].benefit, sb.history[k].benefit);
  }
  EXPECT_EQ(sa.accepted.indices(), sb.accepted.indices());
}

TEST(Adaptive, BudgetsStopTheLoop) {
  AdaptiveSolver solver(circle_problem(), 1);
  AdaptiveState st = AdaptiveState::initial();
  st.max_indices = 3;
  st = solver.grow(st, 10);
  EXPECT_EQ(st.accepted.size(), 3u);
  AdaptiveState st2 = AdaptiveState::initial();
  st2.max_dofs = 4;
  st2 = solver.grow(st2, 10);
  EXPECT_TRUE(st2.history.empty());
}
