#pragma once

// Independent reference implementations used only by the tests. They favour
// obviousness over speed and share no code with the library's algorithms.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hssplab/exactmath.hpp"
#include "hssplab/lattice.hpp"

namespace oracle {

using hssplab::Int;
using hssplab::IntMatrix;
using hssplab::IntVector;
using hssplab::LatticeBasis;
using hssplab::Rat;

inline IntMatrix random_matrix(std::mt19937_64& gen, std::size_t rows,
                               std::size_t cols, long bound) {
  std::uniform_int_distribution<long> d(-bound, bound);
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = d(gen);
  return m;
}

// Rational coordinates of v in the row span of `basis` (rows independent),
// or nullopt when v is outside the span. Plain Gauss-Jordan on the
// transposed system.
inline std::optional<std::vector<Rat>> coordinates(const IntMatrix& basis,
                                                   const IntVector& v) {
  const std::size_t r = basis.rows();
  const std::size_t d = basis.cols();
  // Augmented d x (r + 1) system: sum_i c_i basis_i = v.
  std::vector<std::vector<Rat>> a(d, std::vector<Rat>(r + 1));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < r; ++i) a[j][i] = basis(i, j);
    a[j][r] = v[j];
  }
  std::size_t row = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t c = 0; c < r && row < d; ++c) {
    std::size_t p = row;
    while (p < d && a[p][c] == 0) ++p;
    if (p == d) continue;
    std::swap(a[p], a[row]);
    for (std::size_t k = 0; k < d; ++k) {
      if (k == row || a[k][c] == 0) continue;
      const Rat f = a[k][c] / a[row][c];
      for (std::size_t l = c; l <= r; ++l) a[k][l] -= f * a[row][l];
    }
    pivot_col.push_back(c);
    ++row;
  }
  for (std::size_t k = row; k < d; ++k) {
    if (a[k][r] != 0) return std::nullopt;
  }
  std::vector<Rat> coef(r);
  for (std::size_t k = 0; k < row; ++k) {
    coef[pivot_col[k]] = a[k][r] / a[k][pivot_col[k]];
  }
  return coef;
}

// Membership of v in the lattice spanned by independent rows.
inline bool contains(const IntMatrix& basis, const IntVector& v) {
  auto c = coordinates(basis, v);
  if (!c) return false;
  for (const auto& x : *c) {
    if (x.get_den() != 1) return false;
  }
  return true;
}

// Two bases with independent rows generate the same lattice.
inline bool same_lattice(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (!contains(b, a.row(i)) || !contains(a, b.row(i))) return false;
  }
  return true;
}

// Rank by rational elimination.
inline std::size_t rank(const IntMatrix& m) {
  std::vector<std::vector<Rat>> a(m.rows(), std::vector<Rat>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
  std::size_t row = 0;
  for (std::size_t c = 0; c < m.cols() && row < a.size(); ++c) {
    std::size_t p = row;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    for (std::size_t k = row + 1; k < a.size(); ++k) {
      const Rat f = a[k][c] / a[row][c];
      for (std::size_t l = c; l < m.cols(); ++l) a[k][l] -= f * a[row][l];
    }
    ++row;
  }
  return row;
}

// Cofactor-expansion determinant; fine for n <= 6.
inline Int det(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  Int total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    IntMatrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == c) continue;
        minor(i - 1, cc++) = m(i, j);
      }
    }
    const Int term = m(0, c) * det(minor);
    total += (c % 2 == 0) ? term : Int(-term);
  }
  return total;
}

// Lagrange-Gauss reduction of a rank-2 basis; returns the two successive
// minima vectors (squared norms ascending).
inline std::pair<IntVector, IntVector> gauss_reduce(IntVector u, IntVector v) {
  auto nrm = [](const IntVector& x) { return hssplab::squared_norm(x); };
  if (nrm(u) > nrm(v)) std::swap(u, v);
  while (true) {
    const Rat mu(hssplab::dot(u, v), nrm(u));
    const Int r = hssplab::round_nearest(mu);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= r * u[i];
    if (nrm(v) >= nrm(u)) return {u, v};
    std::swap(u, v);
  }
}

// Shortest nonzero squared norm by exhaustive search over a coefficient box.
inline Int box_svp(const IntMatrix& basis, long box) {
  const std::size_t r = basis.rows();
  std::vector<long> c(r, -box);
  std::optional<Int> best;
  while (true) {
    bool nonzero = std::any_of(c.begin(), c.end(), [](long x) { return x != 0; });
    if (nonzero) {
      IntVector v(basis.cols());
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < basis.cols(); ++j) v[j] += c[i] * basis(i, j);
      const Int n = hssplab::squared_norm(v);
      if (!best || n < *best) best = n;
    }
    std::size_t i = 0;
    while (i < r && c[i] == box) c[i++] = -box;
    if (i == r) break;
    ++c[i];
  }
  return *best;
}

// Hermite normal form by repeated elementary row operations on a small
// matrix: for each column, Euclid between the current pivot row and every
// row below until only one nonzero remains, then reduce the rows above.
inline IntMatrix hnf_by_row_ops(IntMatrix m) {
  std::size_t row = 0;
  for (std::size_t c = 0; c < m.cols() && row < m.rows(); ++c) {
    while (true) {
      std::optional<std::size_t> smallest;
      for (std::size_t i = row; i < m.rows(); ++i) {
        if (m(i, c) != 0 && (!smallest || abs(m(i, c)) < abs(m(*smallest, c)))) {
          smallest = i;
        }
      }
      if (!smallest) break;
      m.swap_rows(row, *smallest);
      bool done = true;
      for (std::size_t i = row + 1; i < m.rows(); ++i) {
        if (m(i, c) == 0) continue;
        Int qt;
        mpz_fdiv_q(qt.get_mpz_t(), m(i, c).get_mpz_t(), m(row, c).get_mpz_t());
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= qt * m(row, j);
        if (m(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (m(row, c) == 0) continue;
    if (m(row, c) < 0) {
      for (std::size_t j = 0; j < m.cols(); ++j) m(row, j) = -m(row, j);
    }
    for (std::size_t i = 0; i < row; ++i) {
      Int qt;
      mpz_fdiv_q(qt.get_mpz_t(), m(i, c).get_mpz_t(), m(row, c).get_mpz_t());
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= qt * m(row, j);
    }
    ++row;
  }
  m.truncate_rows(row);
  return m;
}

// Every vector of {0,1}^m (m small) that lies in the lattice, excluding 0.
inline std::vector<IntVector> binary_members(const IntMatrix& basis) {
  const std::size_t m = basis.cols();
  std::vector<IntVector> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    IntVector v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = (mask >> i) & 1U;
    if (contains(basis, v)) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace oracle
