#pragma once

// Exact integer and rational linear algebra on top of GMP.

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hssplab {

using Int = mpz_class;
using Rat = mpq_class;
using IntVector = std::vector<Int>;
using RatVector = std::vector<Rat>;

// Raised for violated mathematical preconditions ("not a basis",
// "singular modulo Q", ...).
class MathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix. Rows are stored as separate vectors so that row
// swaps (the bread and butter of lattice reduction) are O(1).
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : cols_(cols), rows_(rows, std::vector<T>(cols)) {}
  Matrix(std::initializer_list<std::initializer_list<long>> init) {
    for (const auto& r : init) {
      std::vector<T> row;
      row.reserve(r.size());
      for (long v : r) row.emplace_back(v);
      if (!rows_.empty() && row.size() != cols_) {
        throw std::invalid_argument("Matrix: ragged initializer");
      }
      cols_ = row.size();
      rows_.push_back(std::move(row));
    }
  }
  static Matrix from_rows(std::vector<std::vector<T>> rows, std::size_t cols) {
    Matrix m;
    m.cols_ = cols;
    for (const auto& r : rows) {
      if (r.size() != cols) throw std::invalid_argument("Matrix: ragged rows");
    }
    m.rows_ = std::move(rows);
    return m;
  }
  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return rows_[i][j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return rows_[i][j];
  }
  std::vector<T>& row(std::size_t i) { return rows_[i]; }
  const std::vector<T>& row(std::size_t i) const { return rows_[i]; }
  const std::vector<std::vector<T>>& row_vectors() const { return rows_; }

  void append_row(std::vector<T> r) {
    if (rows_.empty() && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) throw std::invalid_argument("Matrix: bad row size");
    rows_.push_back(std::move(r));
  }
  void swap_rows(std::size_t i, std::size_t j) { rows_[i].swap(rows_[j]); }
  void truncate_rows(std::size_t n) { rows_.resize(n); }

  Matrix transposed() const {
    Matrix t(cols_, rows());
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = rows_[i][j];
    return t;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.cols_ == b.cols_ && a.rows_ == b.rows_;
  }

 private:
  std::size_t cols_ = 0;
  std::vector<std::vector<T>> rows_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

Int dot(std::span<const Int> a, std::span<const Int> b);
Rat dot(std::span<const Rat> a, std::span<const Rat> b);
Int squared_norm(std::span<const Int> v);
Int l1_norm(std::span<const Int> v);
bool is_zero(std::span<const Int> v);

// M * v.
IntVector multiply(const IntMatrix& m, std::span<const Int> v);
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);

// Non-negative representative of a mod q.
Int mod_floor(const Int& a, const Int& q);

// Round to nearest integer, halves away from zero.
Int round_nearest(const Rat& r);

struct GramSchmidt {
  RatMatrix orthogonal;  // b*_i
  RatMatrix mu;          // lower unitriangular
};

// Exact Gram-Schmidt orthogonalisation of the rows of `basis`.
// Throws MathError("not a basis") if the rows are linearly dependent.
GramSchmidt gram_schmidt(const IntMatrix& basis);

// Row-style Hermite normal form: upper-triangular profile, positive pivots,
// entries above each pivot reduced into [0, pivot). Zero rows are dropped,
// so the result is a basis of the row lattice of `m`.
IntMatrix hnf(const IntMatrix& m);

// Basis (as rows) of { y in Z^cols : m * y = 0 }. Row count is
// cols(m) - rank(m). The rows are not reduced.
IntMatrix int_kernel(const IntMatrix& m);

// Rank over Q via fraction-free (Bareiss) elimination.
std::size_t rank(const IntMatrix& m);

// Determinant of a square matrix (Bareiss).
Int determinant(const IntMatrix& m);

// Solves a * x = b (mod q) for square a, with x reduced into [0, q).
// Throws MathError("singular modulo Q") if det(a) is not a unit mod q.
IntVector modular_solve(const IntMatrix& a, std::span<const Int> b,
                        const Int& q);

std::string to_string(std::span<const Int> v);

// Exact value of "p/q", an integer, or a plain decimal such as "-0.125" or
// "1e-2". Throws std::invalid_argument on anything else.
Rat parse_rational(std::string_view text);

}  // namespace hssplab
