#include "hssplab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>

namespace hssplab {

namespace {

using Real = long double;

Real to_real(const Int& x) {
  const std::size_t bits = mpz_sizeinbase(x.get_mpz_t(), 2);
  if (bits <= 62) return static_cast<Real>(mpz_get_si(x.get_mpz_t()));
  const long shift = static_cast<long>(bits) - 62;
  Int t;
  mpz_tdiv_q_2exp(t.get_mpz_t(), x.get_mpz_t(), shift);
  return std::ldexp(static_cast<Real>(mpz_get_si(t.get_mpz_t())),
                    static_cast<int>(shift));
}

Real to_real(const Rat& x) {
  return to_real(x.get_num()) / to_real(x.get_den());
}

// `r` must already be integral.
Int from_real(Real r) {
  if (std::fabs(r) < 4.0e18L) return Int(static_cast<long>(r));
  int e = 0;
  Real m = std::frexp(r, &e);
  Int out(static_cast<long>(std::ldexp(m, 62)));
  mpz_mul_2exp(out.get_mpz_t(), out.get_mpz_t(), e - 62);
  return out;
}

// b_k -= x * b_j
void sub_mul_row(IntVector& bk, const IntVector& bj, const Int& x) {
  for (std::size_t c = 0; c < bk.size(); ++c) {
    mpz_submul(bk[c].get_mpz_t(), x.get_mpz_t(), bj[c].get_mpz_t());
  }
}

// ---------------------------------------------------------------------------
// Floating-point LLL in the style of the L2 algorithm: the Gram matrix is
// kept exactly, Gram-Schmidt data is recomputed in long double from it, and
// size reduction is lazy (repeat until |mu| <= eta). The result is close to
// reduced; the exact pass afterwards closes the gap.
class FloatLll {
 public:
  FloatLll(std::vector<IntVector>& b, Real delta)
      : b_(b), d_(b.size()), delta_(delta) {
    gram_.assign(d_, std::vector<Int>(d_));
    gram_f_.assign(d_, std::vector<Real>(d_));
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        gram_[i][j] = dot(b_[i], b_[j]);
        gram_[j][i] = gram_[i][j];
        gram_f_[i][j] = gram_f_[j][i] = to_real(gram_[i][j]);
      }
    }
    mu_.assign(d_, std::vector<Real>(d_, 0));
    r_.assign(d_, std::vector<Real>(d_, 0));
  }

  // Returns false if it gave up (iteration cap); the caller falls back to
  // the exact algorithm, which also detects dependent rows.
  bool run() {
    if (d_ < 2) return true;
    r_[0][0] = gram_f_[0][0];
    std::size_t k = 1;
    std::size_t steps = 0;
    const std::size_t cap = 2'000'000 + 2000 * d_ * d_;
    while (k < d_) {
      if (++steps > cap) return false;
      if (!size_reduce(k)) return false;
      const Real lhs = delta_ * r_[k - 1][k - 1];
      const Real rhs =
          r_[k][k] + mu_[k][k - 1] * mu_[k][k - 1] * r_[k - 1][k - 1];
      if (lhs > rhs) {
        swap_rows(k - 1, k);
        if (k == 1) {
          r_[0][0] = gram_f_[0][0];
        } else {
          --k;
        }
      } else {
        ++k;
      }
    }
    return true;
  }

 private:
  bool size_reduce(std::size_t k) {
    constexpr Real kEta = 0.51L;
    std::vector<Int> xs(k);
    for (int iter = 0; iter < 200; ++iter) {
      Real max_mu = 0;
      for (std::size_t j = 0; j < k; ++j) {
        Real s = gram_f_[k][j];
        for (std::size_t i = 0; i < j; ++i) s -= mu_[j][i] * r_[k][i];
        r_[k][j] = s;
        mu_[k][j] = s / r_[j][j];
        max_mu = std::max(max_mu, std::fabs(mu_[k][j]));
      }
      if (!(max_mu > kEta)) {
        Real s = gram_f_[k][k];
        for (std::size_t j = 0; j < k; ++j) s -= mu_[k][j] * r_[k][j];
        r_[k][k] = s;
        return true;
      }
      if (!std::isfinite(max_mu)) return false;
      bool any = false;
      for (std::size_t jj = k; jj-- > 0;) {
        Real x = std::nearbyint(mu_[k][jj]);
        if (x == 0) {
          xs[jj] = 0;
          continue;
        }
        any = true;
        xs[jj] = from_real(x);
        for (std::size_t i = 0; i < jj; ++i) mu_[k][i] -= x * mu_[jj][i];
      }
      if (!any) continue;
      apply_reduction(k, xs);
      if (sgn(gram_[k][k]) == 0) throw MathError("not a basis");
    }
    return false;
  }

  void apply_reduction(std::size_t k, const std::vector<Int>& xs) {
    for (std::size_t j = 0; j < k; ++j) {
      if (sgn(xs[j]) != 0) sub_mul_row(b_[k], b_[j], xs[j]);
    }
    for (std::size_t i = 0; i < d_; ++i) {
      if (i == k) continue;
      Int& g = gram_[k][i];
      for (std::size_t j = 0; j < k; ++j) {
        if (sgn(xs[j]) != 0) {
          mpz_submul(g.get_mpz_t(), xs[j].get_mpz_t(),
                     gram_[j][i].get_mpz_t());
        }
      }
      gram_[i][k] = g;
      gram_f_[k][i] = gram_f_[i][k] = to_real(g);
    }
    gram_[k][k] = dot(b_[k], b_[k]);
    gram_f_[k][k] = to_real(gram_[k][k]);
  }

  void swap_rows(std::size_t a, std::size_t c) {
    b_[a].swap(b_[c]);
    gram_[a].swap(gram_[c]);
    gram_f_[a].swap(gram_f_[c]);
    for (std::size_t i = 0; i < d_; ++i) {
      std::swap(gram_[i][a], gram_[i][c]);
      std::swap(gram_f_[i][a], gram_f_[i][c]);
    }
  }

  std::vector<IntVector>& b_;
  std::size_t d_;
  Real delta_;
  std::vector<std::vector<Int>> gram_;
  std::vector<std::vector<Real>> gram_f_;
  std::vector<std::vector<Real>> mu_;
  std::vector<std::vector<Real>> r_;
};

// ---------------------------------------------------------------------------
// Integral LLL: Gram determinants D[i] and lambda[i][j] = D[j+1] * mu[i][j]
// are kept as integers, so every decision is exact.
class IntegralGso {
 public:
  explicit IntegralGso(const std::vector<IntVector>& b) : d_(b.size()) {
    D_.assign(d_ + 1, Int(0));
    D_[0] = 1;
    lam_.assign(d_, std::vector<Int>(d_));
    Int u, t;
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        u = dot(b[i], b[j]);
        for (std::size_t l = 0; l < j; ++l) {
          t = D_[l + 1] * u;
          mpz_submul(t.get_mpz_t(), lam_[i][l].get_mpz_t(),
                     lam_[j][l].get_mpz_t());
          mpz_divexact(u.get_mpz_t(), t.get_mpz_t(), D_[l].get_mpz_t());
        }
        if (j < i) {
          lam_[i][j] = u;
        } else {
          D_[i + 1] = u;
          if (sgn(u) == 0) throw MathError("not a basis");
        }
      }
    }
  }

  std::size_t size() const { return d_; }
  const Int& D(std::size_t i) const { return D_[i]; }
  const Int& lambda(std::size_t i, std::size_t j) const { return lam_[i][j]; }
  Rat mu(std::size_t i, std::size_t j) const {
    return Rat(lam_[i][j], D_[j + 1]);
  }
  // ||b*_i||^2
  Rat c(std::size_t i) const { return Rat(D_[i + 1], D_[i]); }

  // Size-reduce row k against row l; returns true if the basis changed.
  bool redi(std::vector<IntVector>& b, std::size_t k, std::size_t l) {
    Int two_abs = 2 * abs(lam_[k][l]);
    if (two_abs <= D_[l + 1]) return false;
    Int q;
    Int num = 2 * lam_[k][l] + D_[l + 1];
    Int den = 2 * D_[l + 1];
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    sub_mul_row(b[k], b[l], q);
    mpz_submul(lam_[k][l].get_mpz_t(), q.get_mpz_t(), D_[l + 1].get_mpz_t());
    for (std::size_t i = 0; i < l; ++i) {
      mpz_submul(lam_[k][i].get_mpz_t(), q.get_mpz_t(),
                 lam_[l][i].get_mpz_t());
    }
    return true;
  }

  // q * (D[k+1] D[k-1] + lambda^2) >= p * D[k]^2
  bool lovasz_holds(std::size_t k, const Int& p, const Int& q) const {
    Int lhs = D_[k + 1] * D_[k - 1] + lam_[k][k - 1] * lam_[k][k - 1];
    lhs *= q;
    Int rhs = D_[k] * D_[k];
    rhs *= p;
    return lhs >= rhs;
  }

  void swapi(std::vector<IntVector>& b, std::size_t k) {
    b[k].swap(b[k - 1]);
    for (std::size_t j = 0; j + 1 < k; ++j) std::swap(lam_[k][j], lam_[k - 1][j]);
    const Int lam = lam_[k][k - 1];
    Int B = D_[k - 1] * D_[k + 1] + lam * lam;
    mpz_divexact(B.get_mpz_t(), B.get_mpz_t(), D_[k].get_mpz_t());
    Int t, u;
    for (std::size_t i = k + 1; i < d_; ++i) {
      t = lam_[i][k];
      u = D_[k + 1] * lam_[i][k - 1] - lam * t;
      mpz_divexact(lam_[i][k].get_mpz_t(), u.get_mpz_t(), D_[k].get_mpz_t());
      u = B * t + lam * lam_[i][k];
      mpz_divexact(lam_[i][k - 1].get_mpz_t(), u.get_mpz_t(),
                   D_[k + 1].get_mpz_t());
    }
    D_[k] = B;
  }

 private:
  std::size_t d_;
  std::vector<Int> D_;
  std::vector<std::vector<Int>> lam_;
};

void check_delta(const Rat& delta) {
  if (delta <= Rat(1, 4) || delta >= 1) {
    throw std::invalid_argument("LLL delta must lie in (1/4, 1)");
  }
}

void integral_lll(std::vector<IntVector>& b, const Rat& delta) {
  const std::size_t d = b.size();
  if (d == 0) return;
  IntegralGso gso(b);
  const Int p = delta.get_num();
  const Int q = delta.get_den();
  std::size_t k = 1;
  while (k < d) {
    gso.redi(b, k, k - 1);
    if (!gso.lovasz_holds(k, p, q)) {
      gso.swapi(b, k);
      k = std::max<std::size_t>(1, k - 1);
    } else {
      for (std::size_t l = k - 1; l-- > 0;) gso.redi(b, k, l);
      ++k;
    }
  }
}

std::vector<IntVector> rows_of(const LatticeBasis& basis) {
  return basis.matrix().row_vectors();
}

LatticeBasis basis_from(std::vector<IntVector> rows, std::size_t dim) {
  return LatticeBasis(IntMatrix::from_rows(std::move(rows), dim));
}

// ---------------------------------------------------------------------------
// Schnorr-Euchner enumeration over a projected block [begin, end) of a basis
// whose Gram-Schmidt data is given in long double. Calls `on_leaf` with the
// coefficient vector (relative to the block) of every nonzero vector whose
// projected squared norm is <= bound(); only one of +-x is visited.
class Enumerator {
 public:
  Enumerator(const std::vector<std::vector<Real>>& mu,
             const std::vector<Real>& c, std::size_t begin, std::size_t end)
      : mu_(mu), c_(c), begin_(begin), n_(end - begin), x_(n_, 0) {}

  template <typename Leaf>
  void run(Real& bound, Leaf&& on_leaf) {
    if (n_ == 0) return;
    recurse(n_ - 1, 0.0L, true, bound, on_leaf);
  }

 private:
  template <typename Leaf>
  void recurse(std::size_t level, Real partial, bool top, Real& bound,
               Leaf& on_leaf) {
    const std::size_t gi = begin_ + level;
    Real center = 0;
    for (std::size_t j = level + 1; j < n_; ++j) {
      center -= static_cast<Real>(x_[j]) * mu_[begin_ + j][gi];
    }
    const Real cl = c_[gi];
    auto visit = [&](long xv) -> bool {
      const Real diff = static_cast<Real>(xv) - center;
      const Real p = partial + cl * diff * diff;
      if (p > bound) return false;
      x_[level] = xv;
      const bool still_top = top && xv == 0;
      if (level == 0) {
        if (!still_top) on_leaf(x_, p);
      } else {
        recurse(level - 1, p, still_top, bound, on_leaf);
      }
      return true;
    };
    if (top) {
      // Symmetry: the highest nonzero coefficient is positive.
      for (long xv = 0;; ++xv) {
        if (!visit(xv)) break;
      }
    } else {
      const long start = std::lround(center);
      for (long xv = start;; ++xv) {
        if (!visit(xv)) break;
      }
      for (long xv = start - 1;; --xv) {
        if (!visit(xv)) break;
      }
    }
    x_[level] = 0;
  }

  const std::vector<std::vector<Real>>& mu_;
  const std::vector<Real>& c_;
  std::size_t begin_;
  std::size_t n_;
  std::vector<long> x_;
};

struct FloatGso {
  std::vector<std::vector<Real>> mu;
  std::vector<Real> c;
};

FloatGso float_gso(const IntegralGso& g) {
  const std::size_t d = g.size();
  FloatGso f;
  f.mu.assign(d, std::vector<Real>(d, 0));
  f.c.assign(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    f.c[i] = to_real(g.c(i));
    f.mu[i][i] = 1;
    for (std::size_t j = 0; j < i; ++j) f.mu[i][j] = to_real(g.mu(i, j));
  }
  return f;
}

IntVector combine(const std::vector<IntVector>& b, std::size_t begin,
                  const std::vector<long>& x) {
  IntVector v(b[begin].size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    const Int xi(x[i]);
    for (std::size_t c = 0; c < v.size(); ++c) {
      mpz_addmul(v[c].get_mpz_t(), xi.get_mpz_t(),
                 b[begin + i][c].get_mpz_t());
    }
  }
  return v;
}

// Exact squared norm of the projection of sum x_i b_{begin+i} orthogonally
// to b_0..b_{begin-1}.
Rat projected_norm(const IntegralGso& g, std::size_t begin,
                   const std::vector<long>& x) {
  const std::size_t n = x.size();
  Rat total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rat coord = x[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (x[j] != 0) coord += x[j] * g.mu(begin + j, begin + i);
    }
    total += coord * coord * g.c(begin + i);
  }
  return total;
}

// Makes sum x_i b_{begin+i} the row at position `begin` by unimodular
// operations on rows begin..begin+x.size()-1. Requires gcd(x) = 1.
void insert_combination(std::vector<IntVector>& b, std::size_t begin,
                        std::vector<long> x) {
  const std::size_t n = x.size();
  for (;;) {
    std::size_t p = n;
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      ++nonzero;
      if (p == n || std::labs(x[i]) < std::labs(x[p])) p = i;
    }
    if (nonzero <= 1) {
      if (p == n) throw MathError("insert_combination: zero vector");
      if (std::labs(x[p]) != 1) {
        throw MathError("insert_combination: non-primitive vector");
      }
      if (x[p] < 0) {
        for (auto& e : b[begin + p]) e = -e;
      }
      std::rotate(b.begin() + begin, b.begin() + begin + p,
                  b.begin() + begin + p + 1);
      return;
    }
    for (std::size_t q = 0; q < n; ++q) {
      if (q == p || x[q] == 0) continue;
      const long t = x[q] / x[p];
      if (t == 0) continue;
      x[q] -= t * x[p];
      const Int tt(t);
      for (std::size_t c = 0; c < b[begin + p].size(); ++c) {
        mpz_addmul(b[begin + p][c].get_mpz_t(), tt.get_mpz_t(),
                   b[begin + q][c].get_mpz_t());
      }
    }
  }
}

}  // namespace

IntVector normalize_sign(IntVector v) {
  for (const auto& e : v) {
    if (sgn(e) == 0) continue;
    if (sgn(e) < 0) {
      for (auto& x : v) x = -x;
    }
    break;
  }
  return v;
}

LatticeBasis lll_reduce_exact(const LatticeBasis& basis, const Rat& delta) {
  check_delta(delta);
  auto rows = rows_of(basis);
  integral_lll(rows, delta);
  return basis_from(std::move(rows), basis.dim());
}

LatticeBasis lll_reduce(const LatticeBasis& basis, const Rat& delta) {
  check_delta(delta);
  auto rows = rows_of(basis);
  if (rows.size() == 1 && is_zero(rows[0])) throw MathError("not a basis");
  if (rows.size() >= 2) {
    // Aim slightly above delta so the exact pass rarely has to swap.
    const Real d = to_real(delta);
    FloatLll fp(rows, std::min<Real>(d + (1 - d) / 4, 0.999L));
    fp.run();
  }
  integral_lll(rows, delta);
  return basis_from(std::move(rows), basis.dim());
}

bool is_lll_reduced(const LatticeBasis& basis, const Rat& delta) {
  GramSchmidt gs;
  try {
    gs = gram_schmidt(basis.matrix());
  } catch (const MathError&) {
    return false;
  }
  const std::size_t d = basis.rank();
  const Rat half(1, 2);
  std::vector<Rat> c(d);
  for (std::size_t i = 0; i < d; ++i) {
    c[i] = dot(gs.orthogonal.row(i), gs.orthogonal.row(i));
    for (std::size_t j = 0; j < i; ++j) {
      if (abs(gs.mu(i, j)) > half) return false;
    }
  }
  for (std::size_t k = 1; k < d; ++k) {
    const Rat& m = gs.mu(k, k - 1);
    if (c[k] < (delta - m * m) * c[k - 1]) return false;
  }
  return true;
}

IntVector svp_enumerate(const LatticeBasis& basis, std::size_t enum_limit) {
  if (basis.rank() > enum_limit) throw MathError("enumeration limit");
  if (basis.empty()) throw MathError("not a basis");
  auto rows = rows_of(lll_reduce(basis));
  IntegralGso g(rows);
  FloatGso f = float_gso(g);

  IntVector best = normalize_sign(rows[0]);
  Int best_norm = squared_norm(best);
  constexpr Real kSlack = 1.0L + 1e-9L;
  Real bound = to_real(best_norm) * kSlack;
  Enumerator e(f.mu, f.c, 0, rows.size());
  e.run(bound, [&](const std::vector<long>& x, Real) {
    IntVector v = normalize_sign(combine(rows, 0, x));
    Int n = squared_norm(v);
    if (n < best_norm) {
      best_norm = n;
      best = std::move(v);
      bound = to_real(best_norm) * kSlack;
    } else if (n == best_norm && v < best) {
      best = std::move(v);
    }
  });
  return best;
}

LatticeBasis bkz_reduce(const LatticeBasis& basis,
                        const ReductionParams& params) {
  check_delta(params.delta);
  auto rows = rows_of(lll_reduce(basis, params.delta));
  const std::size_t r = rows.size();
  if (r < 2) return basis_from(std::move(rows), basis.dim());
  const std::size_t beta = std::clamp<std::size_t>(params.beta, 2, r);
  if (beta > params.enum_limit) throw MathError("enumeration limit");

  constexpr Real kSlack = 1.0L + 1e-9L;
  constexpr int kMaxTours = 1000;
  for (int tour = 0; tour < kMaxTours; ++tour) {
    bool changed = false;
    for (std::size_t k = 0; k + 1 < r; ++k) {
      const std::size_t end = std::min(k + beta, r);
      IntegralGso g(rows);
      FloatGso f = float_gso(g);
      const Rat ck = g.c(k);
      Rat best_norm = ck;
      std::optional<std::vector<long>> best;
      Real bound = to_real(ck) * kSlack;
      Enumerator e(f.mu, f.c, k, end);
      e.run(bound, [&](const std::vector<long>& x, Real) {
        Rat n = projected_norm(g, k, x);
        if (n < best_norm) {
          best_norm = n;
          best = x;
          bound = to_real(n) * kSlack;
        }
      });
      if (!best) continue;
      insert_combination(rows, k, *best);
      auto reduced = lll_reduce(basis_from(std::move(rows), basis.dim()),
                                params.delta);
      rows = rows_of(reduced);
      changed = true;
    }
    if (!changed) break;
  }
  return basis_from(std::move(rows), basis.dim());
}

ModularOrthogonal orthogonal_lattice_mod(std::span<const Int> h,
                                         const Int& q) {
  if (q < 2) throw std::invalid_argument("orthogonal_lattice_mod: Q < 2");
  const std::size_t m = h.size();
  IntVector hq(m);
  for (std::size_t i = 0; i < m; ++i) hq[i] = mod_floor(h[i], q);

  ModularOrthogonal out;
  if (std::all_of(hq.begin(), hq.end(), [](const Int& x) { return sgn(x) == 0; })) {
    out.basis = LatticeBasis(IntMatrix::identity(m));
    out.degenerate = true;
    return out;
  }

  std::size_t pivot = m;
  Int inv;
  for (std::size_t i = 0; i < m; ++i) {
    if (mpz_invert(inv.get_mpz_t(), hq[i].get_mpz_t(), q.get_mpz_t()) != 0) {
      pivot = i;
      break;
    }
  }
  if (pivot == m) {
    // No unit coordinate (composite Q): kernel of (h | Q), projected away
    // from the last coordinate, then canonicalised.
    IntMatrix row(1, m + 1);
    for (std::size_t i = 0; i < m; ++i) row(0, i) = hq[i];
    row(0, m) = q;
    IntMatrix k = int_kernel(row);
    IntMatrix proj(k.rows(), m);
    for (std::size_t i = 0; i < k.rows(); ++i)
      for (std::size_t j = 0; j < m; ++j) proj(i, j) = k(i, j);
    out.basis = LatticeBasis(hnf(proj));
    return out;
  }

  IntMatrix b(m, m);
  b(0, pivot) = q;
  std::size_t r = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == pivot) continue;
    b(r, i) = 1;
    b(r, pivot) = mod_floor(-hq[i] * inv, q);
    ++r;
  }
  out.basis = LatticeBasis(std::move(b));
  return out;
}

LatticeBasis orthogonal_lattice(const LatticeBasis& basis, const Rat& delta) {
  IntMatrix k = int_kernel(basis.matrix());
  if (k.rows() == 0) return LatticeBasis(IntMatrix(0, basis.dim()));
  return lll_reduce(LatticeBasis(std::move(k)), delta);
}

bool hnf_contains(const IntMatrix& h, std::span<const Int> v) {
  if (v.size() != h.cols()) return false;
  IntVector w(v.begin(), v.end());
  std::size_t col = 0;
  Int q;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    std::size_t pc = col;
    while (pc < h.cols() && sgn(h(i, pc)) == 0) ++pc;
    if (pc == h.cols()) break;
    for (std::size_t c = col; c < pc; ++c) {
      if (sgn(w[c]) != 0) return false;
    }
    if (!mpz_divisible_p(w[pc].get_mpz_t(), h(i, pc).get_mpz_t())) {
      return false;
    }
    mpz_divexact(q.get_mpz_t(), w[pc].get_mpz_t(), h(i, pc).get_mpz_t());
    if (sgn(q) != 0) sub_mul_row(w, h.row(i), q);
    col = pc + 1;
  }
  return is_zero(w);
}

bool lattice_contains(const LatticeBasis& basis, std::span<const Int> v) {
  return hnf_contains(hnf(basis.matrix()), v);
}

}  // namespace hssplab
