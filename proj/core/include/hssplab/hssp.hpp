#pragma once

// Hidden subset sum instances, the (7/8)^m probability tools and the
// attack-evaluation metrics.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hssplab/exactmath.hpp"

namespace hssplab {

enum class Provenance { random, kmeans };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

// How K-means observations were drawn from the trace. Only whole-iteration
// sampling preserves the exact m/k column norm.
enum class RowSampling { whole_iterations, rows };

std::string_view to_string(RowSampling s);
RowSampling row_sampling_from_string(std::string_view s);

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Public data (q, h) plus the hidden ground truth used for evaluation.
// h = truth_weights * truth_x (mod q).
struct HsspInstance {
  Provenance provenance = Provenance::random;
  std::size_t n = 0;
  std::size_t m = 0;
  std::optional<std::size_t> k;  // K-means only
  std::size_t scale_bits = 0;    // 0 for random instances
  RowSampling row_sampling = RowSampling::whole_iterations;
  Int q;
  IntVector h;
  IntMatrix truth_weights;  // m x n, binary
  IntVector truth_x;        // in [0, q)
  std::uint64_t seed = 0;

  IntVector truth_column(std::size_t i) const;
  std::vector<IntVector> truth_columns() const;

  friend bool operator==(const HsspInstance&, const HsspInstance&) = default;
};

// Throws InstanceError describing the first violated invariant.
void validate(const HsspInstance& inst);

std::string to_json(const HsspInstance& inst);
// Parses and validates.
HsspInstance instance_from_json(std::string_view text);

// Random prime with exactly `bits` bits; Miller-Rabin error below 2^-80.
Int random_prime(std::size_t bits, std::uint64_t seed);

// Random instance: prime q of q_bits bits, x uniform in Z_q, independent
// fair-bit weights. Requires m > n >= 1 and q_bits >= 2.
HsspInstance random_hssp(std::size_t n, std::size_t m, std::size_t q_bits,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Probability tools for v = a_i + a_j - a_k with fair-bit vectors.

// Exact (7/8)^m.
Rat proposition_probability(std::size_t m);

struct PropositionQuery {
  std::size_t n = 1;
  std::size_t m = 0;
  Rat epsilon{1, 100};
  std::size_t trials = 100000;
};

// Monte Carlo estimate of Pr(v in {-1,0,1}^m) over query.trials draws.
Rat proposition_mc(const PropositionQuery& query, std::uint64_t seed);

// Smallest m >= 0 with m >= 16 log2(n) - 6 log2(epsilon).
std::size_t min_m_bound(std::size_t n, const Rat& epsilon);

// 16 > 3 / -log2(7/8), checked exactly as 2^48 > 2^3 * 7^16.
bool triple_count_constant_holds();
// 6 > -1 / log2(7/8), checked exactly as 8^6 > 2 * 7^6.
bool epsilon_constant_holds();

// Standard deviation of a binomial proportion.
double binomial_sigma(double p, std::size_t trials);

// ---------------------------------------------------------------------------
// Attack report and its evaluation against ground truth.

enum class AttackFailure {
  none,
  step1_gap_failure,        // truth columns not in the completed lattice
  no_binary_found,          // fewer than n independent binary candidates
  no_invertible_submatrix,  // no n x n minor invertible mod q
  verification_failed,      // solved minor disagrees with the full system
  spurious_solution,        // a verified x that is not the hidden data
};

std::string_view to_string(AttackFailure f);
AttackFailure attack_failure_from_string(std::string_view s);

struct PhaseTimings {
  double step1_s = 0;
  double step2_reduce_s = 0;
  double recover_s = 0;
  double solve_s = 0;
};

struct AttackReport {
  std::vector<IntVector> short_vectors;
  std::vector<IntVector> recovered_binary;
  std::size_t recovered_count = 0;
  std::optional<Rat> mean_l1_recovered;
  std::size_t true_match_count = 0;
  std::optional<IntVector> x_recovered;
  // Columns of the weight matrix that produced x_recovered.
  std::vector<IntVector> weights_recovered;
  bool x_success = false;
  AttackFailure failure = AttackFailure::none;
  // Diagnostic that uses the ground truth; absent when not evaluated.
  std::optional<bool> step1_contains_truth;
  PhaseTimings timings;
};

// Fills recovered_count, mean_l1_recovered, true_match_count and x_success.
// A failure is reclassified as spurious_solution when the pipeline produced
// an x that is not the hidden data.
AttackReport evaluate_attack(const HsspInstance& inst, AttackReport report);

// Stable field order; big integers as decimal strings.
std::string to_json(const AttackReport& report);

}  // namespace hssplab
