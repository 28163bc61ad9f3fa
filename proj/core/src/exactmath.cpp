#include "hssplab/exactmath.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace hssplab {

Int dot(std::span<const Int> a, std::span<const Int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_addmul(s.get_mpz_t(), a[i].get_mpz_t(), b[i].get_mpz_t());
  }
  return s;
}

Rat dot(std::span<const Rat> a, std::span<const Rat> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Int squared_norm(std::span<const Int> v) { return dot(v, v); }

Int l1_norm(std::span<const Int> v) {
  Int s = 0;
  for (const auto& x : v) s += abs(x);
  return s;
}

bool is_zero(std::span<const Int> v) {
  for (const auto& x : v) {
    if (sgn(x) != 0) return false;
  }
  return true;
}

IntVector multiply(const IntMatrix& m, std::span<const Int> v) {
  if (m.cols() != v.size()) {
    throw std::invalid_argument("multiply: size mismatch");
  }
  IntVector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
  return out;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("multiply: size mismatch");
  }
  IntMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (sgn(a(i, k)) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        mpz_addmul(out(i, j).get_mpz_t(), a(i, k).get_mpz_t(),
                   b(k, j).get_mpz_t());
      }
    }
  }
  return out;
}

Int mod_floor(const Int& a, const Int& q) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t());
  if (sgn(r) < 0) r += abs(q);
  return r;
}

Int round_nearest(const Rat& r) {
  Int num = r.get_num();
  const Int& den = r.get_den();
  bool neg = sgn(num) < 0;
  if (neg) num = -num;
  Int q;
  // floor((2*num + den) / (2*den))
  Int two_num = 2 * num + den;
  Int two_den = 2 * den;
  mpz_fdiv_q(q.get_mpz_t(), two_num.get_mpz_t(), two_den.get_mpz_t());
  return neg ? Int(-q) : q;
}

GramSchmidt gram_schmidt(const IntMatrix& basis) {
  const std::size_t n = basis.rows();
  const std::size_t m = basis.cols();
  GramSchmidt gs{RatMatrix(n, m), RatMatrix(n, n)};
  std::vector<Rat> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < m; ++c) gs.orthogonal(i, c) = basis(i, c);
    for (std::size_t j = 0; j < i; ++j) {
      Rat ip = 0;
      for (std::size_t c = 0; c < m; ++c) {
        ip += Rat(basis(i, c)) * gs.orthogonal(j, c);
      }
      Rat mu = ip / norms[j];
      gs.mu(i, j) = mu;
      if (sgn(mu) == 0) continue;
      for (std::size_t c = 0; c < m; ++c) {
        gs.orthogonal(i, c) -= mu * gs.orthogonal(j, c);
      }
    }
    gs.mu(i, i) = 1;
    norms[i] = dot(gs.orthogonal.row(i), gs.orthogonal.row(i));
    if (sgn(norms[i]) == 0) throw MathError("not a basis");
  }
  return gs;
}

namespace {

// new_a = s*a + t*b, new_b = (a0/g)*b - (b0/g)*a; a unimodular 2x2 step that
// leaves gcd(a0, b0) in column `c` of `a` and zero in `b`.
void gcd_combine(std::vector<Int>& a, std::vector<Int>& b, std::size_t c,
                 std::size_t from_col) {
  Int g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a[c].get_mpz_t(),
             b[c].get_mpz_t());
  Int ag = a[c] / g;
  Int bg = b[c] / g;
  Int na, nb;
  for (std::size_t j = from_col; j < a.size(); ++j) {
    na = s * a[j] + t * b[j];
    nb = ag * b[j] - bg * a[j];
    a[j].swap(na);
    b[j].swap(nb);
  }
}

// Row echelon form on columns [0, col_limit) with unimodular row operations.
// Pivots are made positive and, when reduce_above is set, entries above each
// pivot are reduced into [0, pivot). Returns the number of pivot rows.
std::size_t echelon(std::vector<std::vector<Int>>& rows, std::size_t col_limit,
                    bool reduce_above) {
  std::size_t r = 0;
  const std::size_t n = rows.size();
  for (std::size_t c = 0; c < col_limit && r < n; ++c) {
    std::size_t first = n;
    for (std::size_t i = r; i < n; ++i) {
      if (sgn(rows[i][c]) != 0) {
        first = i;
        break;
      }
    }
    if (first == n) continue;
    std::swap(rows[r], rows[first]);
    for (std::size_t i = r + 1; i < n; ++i) {
      if (sgn(rows[i][c]) == 0) continue;
      if (mpz_divisible_p(rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t())) {
        Int q = rows[i][c] / rows[r][c];
        for (std::size_t j = c; j < rows[i].size(); ++j) {
          mpz_submul(rows[i][j].get_mpz_t(), q.get_mpz_t(),
                     rows[r][j].get_mpz_t());
        }
      } else {
        gcd_combine(rows[r], rows[i], c, c);
      }
    }
    if (sgn(rows[r][c]) < 0) {
      for (auto& x : rows[r]) x = -x;
    }
    if (reduce_above) {
      for (std::size_t i = 0; i < r; ++i) {
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(),
                   rows[r][c].get_mpz_t());
        if (sgn(q) == 0) continue;
        for (std::size_t j = c; j < rows[i].size(); ++j) {
          mpz_submul(rows[i][j].get_mpz_t(), q.get_mpz_t(),
                     rows[r][j].get_mpz_t());
        }
      }
    }
    ++r;
  }
  return r;
}

}  // namespace

IntMatrix hnf(const IntMatrix& m) {
  auto rows = m.row_vectors();
  std::size_t r = echelon(rows, m.cols(), /*reduce_above=*/true);
  rows.resize(r);
  return IntMatrix::from_rows(std::move(rows), m.cols());
}

IntMatrix int_kernel(const IntMatrix& m) {
  const std::size_t r = m.rows();
  const std::size_t n = m.cols();
  // Rows of [M^T | I]; after echelon on the first r columns the rows with a
  // zero M^T part carry a kernel basis in their identity part.
  std::vector<std::vector<Int>> aug(n, std::vector<Int>(r + n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) aug[i][j] = m(j, i);
    aug[i][r + i] = 1;
  }
  std::size_t pivots = echelon(aug, r, /*reduce_above=*/true);
  IntMatrix kernel(n - pivots, n);
  for (std::size_t i = pivots; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      kernel(i - pivots, j) = std::move(aug[i][r + j]);
    }
  }
  return kernel;
}

namespace {

// Fraction-free elimination; returns rank and (for square input) the
// determinant via `det_out`.
std::size_t bareiss(std::vector<std::vector<Int>> a, Int* det_out) {
  const std::size_t n = a.size();
  const std::size_t m = n ? a[0].size() : 0;
  Int prev = 1;
  int sign = 1;
  std::size_t r = 0;
  Int t;
  for (std::size_t c = 0; c < m && r < n; ++c) {
    std::size_t piv = n;
    for (std::size_t i = r; i < n; ++i) {
      if (sgn(a[i][c]) != 0) {
        piv = i;
        break;
      }
    }
    if (piv == n) continue;
    if (piv != r) {
      std::swap(a[piv], a[r]);
      sign = -sign;
    }
    for (std::size_t i = r + 1; i < n; ++i) {
      for (std::size_t j = c + 1; j < m; ++j) {
        t = a[r][c] * a[i][j];
        mpz_submul(t.get_mpz_t(), a[i][c].get_mpz_t(), a[r][j].get_mpz_t());
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  if (det_out) {
    *det_out = (r == n && n == m) ? Int(sign * prev) : Int(0);
    if (n == 0) *det_out = 1;
  }
  return r;
}

}  // namespace

std::size_t rank(const IntMatrix& m) {
  return bareiss(m.row_vectors(), nullptr);
}

Int determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("determinant: matrix not square");
  }
  Int det;
  bareiss(m.row_vectors(), &det);
  return det;
}

IntVector modular_solve(const IntMatrix& a, std::span<const Int> b,
                        const Int& q) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) {
    throw std::invalid_argument("modular_solve: dimension mismatch");
  }
  if (q < 2) throw std::invalid_argument("modular_solve: modulus below 2");
  std::vector<std::vector<Int>> rows(n, std::vector<Int>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = mod_floor(a(i, j), q);
    rows[i][n] = mod_floor(b[i], q);
  }
  auto reduce_row = [&](std::vector<Int>& row) {
    for (auto& x : row) x = mod_floor(x, q);
  };
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t first = n;
    for (std::size_t i = c; i < n; ++i) {
      if (sgn(rows[i][c]) != 0) {
        first = i;
        break;
      }
    }
    if (first == n) throw MathError("singular modulo Q");
    std::swap(rows[c], rows[first]);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (sgn(rows[i][c]) == 0) continue;
      gcd_combine(rows[c], rows[i], c, c);
      reduce_row(rows[c]);
      reduce_row(rows[i]);
    }
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), rows[c][c].get_mpz_t(), q.get_mpz_t()) ==
        0) {
      throw MathError("singular modulo Q");
    }
    for (auto& x : rows[c]) x = mod_floor(x * inv, q);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || sgn(rows[i][c]) == 0) continue;
      Int f = rows[i][c];
      for (std::size_t j = c; j <= n; ++j) {
        mpz_submul(rows[i][j].get_mpz_t(), f.get_mpz_t(),
                   rows[c][j].get_mpz_t());
      }
      reduce_row(rows[i]);
    }
  }
  IntVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rows[i][n];
  return x;
}

std::string to_string(std::span<const Int> v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i].get_str();
  }
  os << ')';
  return os.str();
}

Rat parse_rational(std::string_view text) {
  const std::string s(text);
  auto bad = [&] { return std::invalid_argument("not a rational number: '" + s + "'"); };
  auto is_int = [](std::string_view t) {
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) t.remove_prefix(1);
    return !t.empty() &&
           std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  auto to_int = [](std::string_view t) {
    if (!t.empty() && t[0] == '+') t.remove_prefix(1);
    return Int(std::string(t), 10);
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = text.substr(0, slash);
    const auto den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) throw bad();
    const Int d = to_int(den);
    if (d == 0) throw bad();
    Rat r(to_int(num), d);
    r.canonicalize();
    return r;
  }
  std::string_view mant = text;
  long exponent = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    const auto ex = text.substr(e + 1);
    if (!is_int(ex) || ex.size() > 6) throw bad();
    exponent = std::stol(std::string(ex));
    mant = text.substr(0, e);
  }
  std::string digits(mant);
  if (const auto dot = digits.find('.'); dot != std::string::npos) {
    exponent -= static_cast<long>(digits.size() - dot - 1);
    digits.erase(dot, 1);
    if (digits.empty() || digits == "-" || digits == "+") throw bad();
  }
  if (!is_int(digits)) throw bad();
  Int ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rat r = exponent >= 0 ? Rat(to_int(digits) * ten_pow) : Rat(to_int(digits), ten_pow);
  r.canonicalize();
  return r;
}

}  // namespace hssplab
