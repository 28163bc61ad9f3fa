#include <gtest/gtest.h>

#include <random>

#include "hssplab/exactmath.hpp"
#include "oracles.hpp"

namespace hssplab {
namespace {

TEST(GramSchmidt, IdentityIsUnchanged) {
  const auto gs = gram_schmidt(IntMatrix::identity(2));
  EXPECT_EQ(gs.orthogonal, RatMatrix::identity(2));
  EXPECT_EQ(gs.mu, RatMatrix::identity(2));
}

TEST(GramSchmidt, HandComputedProjection) {
  const auto gs = gram_schmidt(IntMatrix{{1, 1}, {1, 0}});
  EXPECT_EQ(gs.orthogonal(0, 0), 1);
  EXPECT_EQ(gs.orthogonal(0, 1), 1);
  EXPECT_EQ(gs.mu(1, 0), Rat(1, 2));
  EXPECT_EQ(gs.orthogonal(1, 0), Rat(1, 2));
  EXPECT_EQ(gs.orthogonal(1, 1), Rat(-1, 2));
}

TEST(GramSchmidt, OrthogonalInput) {
  const auto gs = gram_schmidt(IntMatrix{{3, 0}, {0, 4}});
  EXPECT_EQ(gs.mu(1, 0), 0);
  EXPECT_EQ(gs.orthogonal(0, 0), 3);
  EXPECT_EQ(gs.orthogonal(1, 1), 4);
}

TEST(GramSchmidt, DependentRowsThrow) {
  EXPECT_THROW(gram_schmidt(IntMatrix{{1, 2}, {2, 4}}), MathError);
}

TEST(GramSchmidt, ReconstructsBasisAndIsOrthogonal) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    IntMatrix b = oracle::random_matrix(gen, 4, 5, 20);
    if (oracle::rank(b) < 4) continue;
    const auto gs = gram_schmidt(b);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        EXPECT_EQ(dot(gs.orthogonal.row(i), gs.orthogonal.row(j)), 0);
      }
      for (std::size_t c = 0; c < 5; ++c) {
        Rat acc = gs.orthogonal(i, c);
        for (std::size_t j = 0; j < i; ++j) acc += gs.mu(i, j) * gs.orthogonal(j, c);
        EXPECT_EQ(acc, Rat(b(i, c)));
      }
    }
  }
}

TEST(Hnf, AlreadyInForm) {
  EXPECT_EQ(hnf(IntMatrix{{2, 0}, {0, 2}}), (IntMatrix{{2, 0}, {0, 2}}));
}

TEST(Hnf, RowSwapOfIdentity) {
  EXPECT_EQ(hnf(IntMatrix{{0, 1}, {1, 0}}), IntMatrix::identity(2));
}

TEST(Hnf, MatchesRowOperationOracle) {
  EXPECT_EQ(hnf(IntMatrix{{2, 4}, {1, 3}}),
            oracle::hnf_by_row_ops(IntMatrix{{2, 4}, {1, 3}}));
  EXPECT_EQ(hnf(IntMatrix{{2, 4}, {1, 3}}), (IntMatrix{{1, 1}, {0, 2}}));
}

TEST(Hnf, RandomMatricesMatchOracleAndSpanSameLattice) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t r = 1 + trial % 4;
    const std::size_t c = r + trial % 3;
    IntMatrix m = oracle::random_matrix(gen, r, c, 30);
    const IntMatrix h = hnf(m);
    EXPECT_EQ(h, oracle::hnf_by_row_ops(m)) << "trial " << trial;
    EXPECT_EQ(h.rows(), oracle::rank(m));
    if (h.rows() == r) {
      EXPECT_TRUE(oracle::same_lattice(h, m));
    }
  }
}

TEST(Hnf, DropsZeroRows) {
  const IntMatrix h = hnf(IntMatrix{{1, 2}, {2, 4}, {0, 0}});
  EXPECT_EQ(h, (IntMatrix{{1, 2}}));
}

TEST(IntKernel, IdentityHasEmptyKernel) {
  EXPECT_EQ(int_kernel(IntMatrix::identity(4)).rows(), 0u);
}

TEST(IntKernel, AllOnesRow) {
  const IntMatrix m{{1, 1, 1}};
  const IntMatrix k = int_kernel(m);
  ASSERT_EQ(k.rows(), 2u);
  EXPECT_EQ(oracle::rank(k), 2u);
  for (std::size_t i = 0; i < k.rows(); ++i) EXPECT_TRUE(is_zero(multiply(m, k.row(i))));
  // Contains the candidate basis {(1,-1,0),(0,1,-1)} and is generated by it.
  EXPECT_TRUE(oracle::same_lattice(k, IntMatrix{{1, -1, 0}, {0, 1, -1}}));
}

TEST(IntKernel, CoordinateKernel) {
  const IntMatrix k = int_kernel(IntMatrix{{1, 0, 0}});
  EXPECT_TRUE(oracle::same_lattice(k, IntMatrix{{0, 1, 0}, {0, 0, 1}}));
}

TEST(IntKernel, RandomKernelsArePrimitive) {
  // The kernel lattice is saturated: any integer vector of the rational
  // kernel must be an integer combination of the returned rows.
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 40; ++trial) {
    IntMatrix m = oracle::random_matrix(gen, 2, 5, 6);
    const IntMatrix k = int_kernel(m);
    ASSERT_EQ(k.rows(), 5 - oracle::rank(m));
    for (std::size_t i = 0; i < k.rows(); ++i) EXPECT_TRUE(is_zero(multiply(m, k.row(i))));
    // Scaled rational kernel vectors: take 3 * k_0 + k_1 divided by gcd.
    IntVector v(5);
    for (std::size_t j = 0; j < 5; ++j) v[j] = 3 * k(0, j) + 7 * k(1, j);
    Int g = 0;
    for (const auto& e : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
    if (g > 1) {
      for (auto& e : v) e /= g;
    }
    EXPECT_TRUE(oracle::contains(k, v));
  }
}

TEST(Rank, Examples) {
  EXPECT_EQ(rank(IntMatrix::identity(3)), 3u);
  EXPECT_EQ(rank(IntMatrix{{1, 1}, {2, 2}, {5, 5}}), 1u);
  EXPECT_EQ(rank(IntMatrix(2, 3)), 0u);
}

TEST(Rank, MatchesOracle) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    IntMatrix m = oracle::random_matrix(gen, 4, 4, 2);
    EXPECT_EQ(rank(m), oracle::rank(m));
  }
}

TEST(Determinant, MatchesCofactorOracle) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 5;
    IntMatrix m = oracle::random_matrix(gen, n, n, 9);
    EXPECT_EQ(determinant(m), oracle::det(m));
  }
}

TEST(ModularSolve, IdentitySystem) {
  EXPECT_EQ(modular_solve(IntMatrix::identity(2), IntVector{5, 2}, Int(7)),
            (IntVector{5, 2}));
}

TEST(ModularSolve, BackSubstitution) {
  EXPECT_EQ(modular_solve(IntMatrix{{1, 1}, {0, 1}}, IntVector{5, 2}, Int(101)),
            (IntVector{3, 2}));
}

TEST(ModularSolve, SingularModulusThrows) {
  EXPECT_THROW(modular_solve(IntMatrix{{2, 0}, {0, 2}}, IntVector{1, 1}, Int(4)),
               MathError);
}

TEST(ModularSolve, CompositeModulusWithUnitDeterminant) {
  // det = 1, so the system is solvable modulo any Q even though 2 is not a
  // unit mod 12.
  const IntMatrix a{{2, 1}, {1, 1}};
  const IntVector x = modular_solve(a, IntVector{7, 4}, Int(12));
  const IntVector ax = multiply(a, x);
  EXPECT_EQ(mod_floor(ax[0] - 7, 12), 0);
  EXPECT_EQ(mod_floor(ax[1] - 4, 12), 0);
}

TEST(ModularSolve, RandomSystemsVerify) {
  std::mt19937_64 gen(9);
  const Int q("1000000007");
  for (int trial = 0; trial < 30; ++trial) {
    IntMatrix a = oracle::random_matrix(gen, 4, 4, 50);
    if (mod_floor(oracle::det(a), q) == 0) continue;
    IntVector b{Int(trial), Int(3), Int(-5), Int(123456)};
    const IntVector x = modular_solve(a, b, q);
    const IntVector ax = multiply(a, x);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(mod_floor(ax[i] - b[i], q), 0);
      EXPECT_GE(x[i], 0);
      EXPECT_LT(x[i], q);
    }
  }
}

TEST(Scalars, RoundingAndModulo) {
  EXPECT_EQ(round_nearest(Rat(1, 2)), 1);
  EXPECT_EQ(round_nearest(Rat(-1, 2)), -1);
  EXPECT_EQ(round_nearest(Rat(7, 3)), 2);
  EXPECT_EQ(mod_floor(Int(-1), Int(7)), 6);
  EXPECT_EQ(l1_norm(IntVector{1, -2, 3}), 6);
  EXPECT_EQ(squared_norm(IntVector{1, -2, 3}), 14);
}

TEST(ParseRational, Forms) {
  EXPECT_EQ(parse_rational("99/100"), Rat(99, 100));
  EXPECT_EQ(parse_rational("0.99"), Rat(99, 100));
  EXPECT_EQ(parse_rational("-0.125"), Rat(-1, 8));
  EXPECT_EQ(parse_rational("1e-2"), Rat(1, 100));
  EXPECT_EQ(parse_rational("3"), Rat(3));
  EXPECT_EQ(parse_rational("2/4"), Rat(1, 2));
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("."), std::invalid_argument);
}

}  // namespace
}  // namespace hssplab
