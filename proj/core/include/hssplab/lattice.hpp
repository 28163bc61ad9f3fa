#pragma once

// Lattice reduction (LLL, BKZ), exact SVP enumeration and orthogonal-lattice
// constructions. Bases are stored as rows.

#include <cstddef>
#include <span>

#include "hssplab/exactmath.hpp"

namespace hssplab {

class LatticeBasis {
 public:
  LatticeBasis() = default;
  // Takes the rows as given; linear independence is the caller's contract
  // and is enforced by the reduction routines.
  explicit LatticeBasis(IntMatrix rows) : rows_(std::move(rows)) {}

  std::size_t rank() const { return rows_.rows(); }
  std::size_t dim() const { return rows_.cols(); }
  bool empty() const { return rows_.rows() == 0; }

  const IntMatrix& matrix() const { return rows_; }
  IntMatrix& matrix() { return rows_; }
  const IntVector& operator[](std::size_t i) const { return rows_.row(i); }

  friend bool operator==(const LatticeBasis&, const LatticeBasis&) = default;

 private:
  IntMatrix rows_;
};

inline const Rat kDefaultDelta{99, 100};
inline constexpr std::size_t kDefaultEnumLimit = 24;
inline constexpr std::size_t kDefaultMaxBeta = 20;

struct ReductionParams {
  Rat delta = kDefaultDelta;  // LLL quality, in (1/4, 1)
  std::size_t beta = 2;       // BKZ block size, 2 <= beta <= rank
  std::size_t enum_limit = kDefaultEnumLimit;
};

// LLL reduction with Lovász parameter `delta`. Output rows are exactly
// size-reduced (|mu| <= 1/2) and satisfy the Lovász condition.
// A long-double Schnorr-Euchner pass does the bulk of the work; an exact
// integral LLL pass finishes it, so the guarantee never depends on rounding.
// Throws MathError("not a basis") on dependent rows.
LatticeBasis lll_reduce(const LatticeBasis& basis,
                        const Rat& delta = kDefaultDelta);

// Only the exact integral LLL (de Weger / Cohen). Slow on large entries.
LatticeBasis lll_reduce_exact(const LatticeBasis& basis,
                              const Rat& delta = kDefaultDelta);

// True iff rows are size-reduced and satisfy Lovász for `delta`, checked
// with exact rational Gram-Schmidt.
bool is_lll_reduced(const LatticeBasis& basis, const Rat& delta);

// Shortest nonzero vector (exhaustive Schnorr-Euchner enumeration). Among
// equal-norm vectors the sign is normalised to a positive leading entry and
// the lexicographically smallest is returned.
// Throws MathError("enumeration limit") if rank > enum_limit.
IntVector svp_enumerate(const LatticeBasis& basis,
                        std::size_t enum_limit = kDefaultEnumLimit);

// BKZ with full (unpruned) enumeration as the block oracle. The output is
// LLL-reduced; with beta == rank its first row is a shortest vector.
LatticeBasis bkz_reduce(const LatticeBasis& basis,
                        const ReductionParams& params);

struct ModularOrthogonal {
  LatticeBasis basis;
  bool degenerate = false;  // h == 0 mod Q: every y qualifies
};

// Full-rank basis of { y in Z^m : <y, h> = 0 mod Q }.
ModularOrthogonal orthogonal_lattice_mod(std::span<const Int> h, const Int& q);

// LLL-reduced basis of the integer vectors orthogonal to every row of
// `basis`. Empty when the input has full rank.
LatticeBasis orthogonal_lattice(const LatticeBasis& basis,
                                const Rat& delta = kDefaultDelta);

// Exact membership test through the Hermite normal form.
bool lattice_contains(const LatticeBasis& basis, std::span<const Int> v);

// Same test against a precomputed HNF (see hnf()).
bool hnf_contains(const IntMatrix& hnf_rows, std::span<const Int> v);

// Sign normalisation: flip so the first nonzero entry is positive.
IntVector normalize_sign(IntVector v);

}  // namespace hssplab
