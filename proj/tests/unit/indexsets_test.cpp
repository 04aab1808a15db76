#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "stbem/indexsets.hpp"
#include "stbem/space.hpp"

using namespace stbem;

namespace {

std::set<LevelPair> S(std::initializer_list<LevelPair> l) { return std::set<LevelPair>(l); }

const std::vector<Rational> kSigmas{Rational(2, 3), Rational(1), Rational(6, 5), Rational(2)};

}  // namespace

TEST(IndexSets, FullTensorExamples) {
  EXPECT_EQ(full_tensor_set(2, Rational(1)).size(), 9u);
  const auto s = full_tensor_set(5, Rational(6, 5));
  EXPECT_EQ(s.max_lx(), 4);
  EXPECT_EQ(s.max_lt(), 5);
  EXPECT_EQ(s.size(), 30u);
  EXPECT_EQ(full_tensor_set(0, Rational(7, 3)).indices(), S({{0, 0}}));
  EXPECT_THROW(full_tensor_set(2, Rational(0)), ConfigError);
  EXPECT_THROW(full_tensor_set(2, Rational(-1)), ConfigError);
}

TEST(IndexSets, SparseExamples) {
  EXPECT_EQ(sparse_set(2, Rational(1)).indices(), S({{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {2, 0}}));
  EXPECT_EQ(sparse_set(2, Rational(2)).indices(), S({{0, 0}, {0, 1}, {0, 2}, {1, 0}}));
  EXPECT_EQ(sparse_set(0, Rational(6, 5)).indices(), S({{0, 0}}));
  EXPECT_THROW(sparse_set(1, Rational(0)), ConfigError);
}

TEST(IndexSets, SparseMembershipMatchesFloatingPointWhereUnambiguous) {
  for (const auto& s2 : kSigmas) {
    const double sg = std::sqrt(to_double(s2));
    for (int L = 0; L <= 8; ++L)
      for (int x = 0; x <= 12; ++x)
        for (int t = 0; t <= 12; ++t) {
          const double lhs = sg * x + t / sg;
          if (std::abs(lhs - L) < 1e-9) continue;
          EXPECT_EQ(sparse_member({x, t}, L, s2), lhs < L) << x << " " << t << " L=" << L;
        }
  }
}

TEST(IndexSets, OptimizedSetLimits) {
  for (const auto& s2 : kSigmas)
    for (int L = 0; L <= 8; ++L) {
      EXPECT_EQ(optimized_set(L, s2, Rational(0)).indices(), sparse_set(L, s2).indices());
      // the T -> -infinity branch: max{sigma lx, lt/sigma} <= L
      const double sg = std::sqrt(to_double(s2));
      std::set<LevelPair> box;
      for (int x = 0; x <= 20; ++x)
        for (int t = 0; t <= 20; ++t)
          if (std::max(sg * x, t / sg) <= L + 1e-12) box.insert({x, t});
      EXPECT_EQ(optimized_set(L, s2, std::nullopt).indices(), box);
    }
  EXPECT_THROW(optimized_set(2, Rational(1), Rational(1)), ConfigError);
  EXPECT_THROW(optimized_set(2, Rational(1), Rational(3, 2)), ConfigError);
}

TEST(IndexSets, OptimizedSetBruteForce) {
  std::set<LevelPair> expect;
  for (int x = 0; x <= 8; ++x)
    for (int t = 0; t <= 8; ++t)
      if (x + t + std::max(x, t) <= 4) expect.insert({x, t});
  EXPECT_EQ(optimized_set(2, Rational(1), Rational(-1)).indices(), expect);
}

TEST(IndexSets, AllConstructorsGiveDownsets) {
  const std::vector<std::optional<Rational>> Ts{Rational(-4), Rational(-1), Rational(0), Rational(1, 2)};
  for (const auto& s2 : kSigmas)
    for (int L = 0; L <= 8; ++L) {
      EXPECT_TRUE(is_downset(full_tensor_set(L, s2)));
      EXPECT_TRUE(is_downset(sparse_set(L, s2)));
      for (const auto& T : Ts) EXPECT_TRUE(is_downset(optimized_set(L, s2, T)));
      const auto full = full_tensor_set(L, s2), sparse = sparse_set(L, s2);
      for (const auto& p : sparse.indices()) EXPECT_TRUE(full.contains(p));
    }
}

TEST(IndexSets, DownsetPredicate) {
  EXPECT_TRUE(IndexSet(S({{0, 0}, {1, 0}})).is_downset());
  EXPECT_FALSE(IndexSet(S({{0, 0}, {1, 1}})).is_downset());
}

TEST(IndexSets, AdmissibleNeighbours) {
  const IndexSet s(S({{0, 0}}));
  EXPECT_EQ(s.admissible_neighbours(), (std::vector<LevelPair>{{0, 1}, {1, 0}}));
  const IndexSet t(S({{0, 0}, {1, 0}, {0, 1}}));
  EXPECT_EQ(t.admissible_neighbours(), (std::vector<LevelPair>{{0, 2}, {1, 1}, {2, 0}}));
}

TEST(IndexSets, TextRoundTrip) {
  const auto s = sparse_set(4, Rational(6, 5));
  std::stringstream ss;
  s.write_text(ss);
  EXPECT_EQ(IndexSet::read_text(ss).indices(), s.indices());
  std::stringstream bad("0 0\n1 x\n");
  EXPECT_THROW(IndexSet::read_text(bad), ConfigError);
}

TEST(IndexSets, RationalParsing) {
  EXPECT_EQ(parse_rational("6/5"), Rational(6, 5));
  EXPECT_EQ(parse_rational("2"), Rational(2));
  EXPECT_EQ(parse_rational("1.2"), Rational(6, 5));
  EXPECT_THROW(parse_rational("1/0"), ConfigError);
  EXPECT_THROW(parse_rational("abc"), ConfigError);
}

TEST(IndexSets, FloorsAndCeilings) {
  EXPECT_EQ(floor_L_over_sigma(5, Rational(6, 5)), 4);
  EXPECT_EQ(floor_sigma_L(5, Rational(6, 5)), 5);
  EXPECT_EQ(ceil_sigma_L(2, Rational(2)), 3);
  for (const auto& s2 : kSigmas)
    for (int L = 0; L <= 30; ++L) {
      const double sg = std::sqrt(to_double(s2));
      EXPECT_EQ(floor_L_over_sigma(L, s2), static_cast<int>(std::floor(L / sg + 1e-12)));
      EXPECT_EQ(floor_sigma_L(L, s2), static_cast<int>(std::floor(sg * L + 1e-12)));
      EXPECT_EQ(ceil_sigma_L(L, s2), static_cast<int>(std::ceil(sg * L - 1e-12)));
    }
}

TEST(Dofs, Examples) {
  Discretisation d;
  EXPECT_EQ(dof_count(full_space(FullGrid(d, 2, 3))), 128);
  EXPECT_EQ(dof_count(DiscreteSpace(d, IndexSet(S({{0, 0}})))), 4);
  d.px = 1;
  d.pt = 1;
  EXPECT_EQ(dof_count(full_space(FullGrid(d, 2, 3))), 128 * 4);
}

TEST(Dofs, FullTensorMatchesProductFormula) {
  for (int px = 0; px <= 1; ++px)
    for (int pt = 0; pt <= 1; ++pt)
      for (int M0 : {1, 3, 4})
        for (int lx = 0; lx <= 5; ++lx)
          for (int lt = 0; lt <= 5; ++lt) {
            Discretisation d;
            d.px = px;
            d.pt = pt;
            d.M0 = M0;
            const FullGrid g(d, lx, lt);
            EXPECT_EQ(dof_count(full_space(g)), static_cast<long>(M0 << lx) * (px + 1) * (1L << lt) * (pt + 1));
            EXPECT_EQ(dof_count(full_space(g)), g.dofs());
          }
}

TEST(Dofs, SparseGrowthIsOrderTwoToTheLTimesL) {
  Discretisation d;
  for (int L = 3; L <= 8; ++L) {
    // exact enumeration of block sizes
    long n = 0;
    for (int x = 0; x <= L; ++x)
      for (int t = 0; x + t <= L; ++t) n += 4L * (x ? 1L << (x - 1) : 1L) * (t ? 1L << (t - 1) : 1L);
    const long N = dof_count(DiscreteSpace(d, sparse_set(L, Rational(1))));
    EXPECT_EQ(N, n);
    const double ratio = static_cast<double>(N) / (std::ldexp(1.0, L) * L * d.M0);
    EXPECT_GE(ratio, 0.25);
    EXPECT_LE(ratio, 4.0);
  }
}

TEST(Dofs, StrictlyMonotoneInL) {
  Discretisation d;
  for (const auto& s2 : kSigmas) {
    long pf = 0, ps = 0, po = 0;
    for (int L = 0; L <= 8; ++L) {
      const long f = dof_count(DiscreteSpace(d, full_tensor_set(L, s2)));
      const long s = dof_count(DiscreteSpace(d, sparse_set(L, s2)));
      const long o = dof_count(DiscreteSpace(d, optimized_set(L, s2, Rational(-1))));
      if (L > 0) {
        EXPECT_GE(f, pf);
        EXPECT_GT(s, ps);
        EXPECT_GT(o, po);
      }
      pf = f;
      ps = s;
      po = o;
    }
  }
  // full tensor counts can stall when neither floor moves; with sigma^2 = 1 they cannot
  long prev = 0;
  for (int L = 0; L <= 8; ++L) {
    const long f = dof_count(DiscreteSpace(d, full_tensor_set(L, Rational(1))));
    EXPECT_GT(f, prev);
    prev = f;
  }
}

TEST(Haar, MatrixIsOrthogonal) {
  for (int n0 : {1, 4})
    for (int L = 0; L <= 6; ++L) {
      const int n = n0 << L;
      if (n > 256) continue;
      Eigen::MatrixXd Q(n, n);
      std::vector<double> work, e(n), out(n);
      for (int c = 0; c < n; ++c) {
        std::fill(e.begin(), e.end(), 0.0);
        e[c] = 1.0;
        haar_forward(e.data(), out.data(), n0, L, work);
        for (int r = 0; r < n; ++r) Q(r, c) = out[r];
      }
      EXPECT_LE((Q.transpose() * Q - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Haar, ConstantLivesOnLevelZero) {
  Discretisation d;
  const FullGrid g(d, 3, 2);
  const Density h = to_hierarchical(Density::nodal(g, Vector::Ones(g.dofs())));
  for_each_block(h.space, [&](const LevelPair& p, long off) {
    const double norm = h.coefficients.segment(off, h.space.block_size(p)).norm();
    if (p == LevelPair{0, 0}) EXPECT_GT(norm, 1.0);
    else EXPECT_LE(norm, 1e-12);
  });
}

TEST(Haar, RoundTripAndParseval) {
  Discretisation d;
  std::mt19937 rng(5);
  std::normal_distribution<double> N01;
  for (int lx = 0; lx <= 3; ++lx)
    for (int lt = 0; lt <= 3; ++lt) {
      const FullGrid g(d, lx, lt);
      Vector c(g.dofs());
      for (auto& v : c) v = N01(rng);
      const Density n = Density::nodal(g, c);
      const Density h = to_hierarchical(n);
      const Density back = to_nodal(h);
      EXPECT_LE((back.coefficients - c).cwiseAbs().maxCoeff(), 1e-12);
      // orthonormal scaling: the L^2 norm squared is w * sum c^2
      EXPECT_NEAR(h.coefficients.squaredNorm(), cell_weight(g) * c.squaredNorm(), 1e-12 * h.coefficients.squaredNorm());
      const Vector q = haar_tensor_forward(g, c);
      EXPECT_NEAR(q.squaredNorm(), c.squaredNorm(), 1e-12 * c.squaredNorm());
    }
}

TEST(Haar, RejectsHigherDegrees) {
  Discretisation d;
  d.px = 1;
  const FullGrid g(d, 1, 1);
  EXPECT_THROW(to_hierarchical(Density::nodal(g, Vector::Zero(g.dofs()))), ConfigError);
}

TEST(Prolongation, ExactForNestedGrids) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int px = 0; px <= 1; ++px)
    for (int pt = 0; pt <= 1; ++pt) {
      Discretisation d;
      d.px = px;
      d.pt = pt;
      const FullGrid g(d, 1, 1), f(d, 3, 2);
      Vector c(g.dofs());
      for (auto& v : c) v = U(rng);
      const Vector cf = prolong(g, c, f);
      // compare point values at random (u, t)
      auto value = [](const FullGrid& G, const Vector& x, double u, double t) {
        const int i = std::min(static_cast<int>(u * G.panels()), G.panels() - 1);
        const int n = std::min(static_cast<int>(t / G.h()), G.cells() - 1);
        const double xi = u * G.panels() - i, tau = t / G.h() - n;
        double s = 0.0;
        for (int q = 0; q <= G.disc.pt; ++q)
          for (int p = 0; p <= G.disc.px; ++p)
            s += x[G.index(n, q, i, p)] * (q ? 2 * tau - 1 : 1.0) * (p ? 2 * xi - 1 : 1.0);
        return s;
      };
      for (int k = 0; k < 50; ++k) {
        const double u = 0.5 * (U(rng) + 1.0), t = 2.0 * (U(rng) + 1.0);
        EXPECT_NEAR(value(g, c, u, t), value(f, cf, u, t), 1e-12);
      }
      EXPECT_THROW(prolong(f, cf, g), ConfigError);
    }
}
