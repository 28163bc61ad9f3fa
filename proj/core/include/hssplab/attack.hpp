#pragma once

// The two-step orthogonal-lattice attack on hidden subset sum instances.
//
//   Step 1: reduce the lattice of vectors orthogonal to h modulo Q, keep the
//           first m - n rows (a candidate basis of the vectors orthogonal to
//           the hidden weights) and take their orthogonal lattice, a rank-n
//           lattice that contains every hidden weight vector.
//   Step 2: BKZ-reduce that lattice, collect binary vectors among small
//           combinations of the short rows, then solve for the hidden data
//           modulo Q.
//
// Step 1 and Step 2 only read the public part of the instance (Q, h, n, m).

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <stdexcept>
#include <vector>

#include "hssplab/exactmath.hpp"
#include "hssplab/hssp.hpp"
#include "hssplab/lattice.hpp"

namespace hssplab {

class AttackError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// How binary vectors are extracted from the reduced basis.
//   depth:               fixed-depth signed combinations only.
//   resolve_differences: additionally, a step vector with both positive and
//                        negative entries is read as a difference of hidden
//                        columns and is added to / subtracted from every
//                        binary vector recovered so far, until nothing new
//                        appears.
//   full_closure:        like resolve_differences but with every short
//                        vector; enumerates the whole binary part of the
//                        lattice when the basis vectors are disjoint binary
//                        pieces. Diagnostic.
enum class RecoveryMode { depth, resolve_differences, full_closure };

std::string_view to_string(RecoveryMode mode);
RecoveryMode recovery_mode_from_string(std::string_view s);

struct AttackParams {
  Rat delta = kDefaultDelta;
  std::optional<std::size_t> beta;  // absent: min(rank, 20)
  std::size_t combo_depth = 2;      // 3 is accepted for diagnostics
  RecoveryMode recovery = RecoveryMode::resolve_differences;
  std::size_t max_recovered = 4096;
  std::size_t enum_limit = kDefaultEnumLimit;
  std::size_t subset_budget = 100;  // independent n-subsets tried in Step 2
  std::size_t solve_retries = 200;  // randomized pivot orders in solve_x
  std::uint64_t seed = 0;
};

struct Step1Output {
  LatticeBasis ortho_basis;      // rank m - n
  LatticeBasis completed_basis;  // rank n, LLL-reduced
};

// Throws AttackError("degenerate instance") when h = 0 mod Q.
Step1Output ns_step1(const HsspInstance& inst, const AttackParams& params);

// Fills short_vectors, recovered_binary, weights_recovered, x_recovered and
// the pipeline failure stage. Metrics are left to evaluate_attack.
AttackReport ns_step2(const Step1Output& step1, const HsspInstance& inst,
                      const AttackParams& params);

// Candidates s1*v_i (depth 1), s1*v_i + s2*v_j (depth 2) and, for depth 3,
// three-term sums, with signs in {-1, +1}; keeps the nonzero vectors in
// {0,1}^m, deduplicated and sorted lexicographically.
//
// The iterative modes add u + s*c for recovered u (see RecoveryMode), where c
// is a short vector or, for combo_depth >= 2, a sum or difference of two,
// until no new vector appears or `max_recovered` is reached. This follows
// chains such as (a1 - a2) + (a2 - a3) + a3 that a fixed depth misses.
std::vector<IntVector> recover_binary_vectors(
    std::span<const IntVector> short_vectors, std::size_t combo_depth,
    RecoveryMode mode = RecoveryMode::depth, std::size_t max_recovered = 4096);

enum class SolveStatus { solved, no_invertible_submatrix, verification_failed };

struct SolveResult {
  SolveStatus status = SolveStatus::no_invertible_submatrix;
  std::optional<IntVector> x;
};

struct SolveOptions {
  std::size_t random_retries = 200;
  std::size_t exhaustive_max_m = 20;
  std::uint64_t seed = 0;
};

// Finds n rows of the m x n matrix that are invertible mod Q (greedy
// pivoting; then every subset when m <= exhaustive_max_m, otherwise random
// row orders), solves, and verifies the whole system a x = h (mod Q).
SolveResult solve_x(const IntMatrix& candidate_a, std::span<const Int> h,
                    const Int& q, const SolveOptions& options = {});

// Step 1 + Step 2 + evaluate_attack, with the Step-1 ground-truth membership
// diagnostic filled in and the failure stage classified.
AttackReport run_attack(const HsspInstance& inst, const AttackParams& params);

}  // namespace hssplab
