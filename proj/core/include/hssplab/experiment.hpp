#pragma once

// Monte Carlo comparison of random and K-means-derived HSSP instances under
// the same attack. Each run produces one row per provenance.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hssplab/attack.hpp"
#include "hssplab/exactmath.hpp"
#include "hssplab/hssp.hpp"
#include "hssplab/kmeans.hpp"
#include "hssplab/lattice.hpp"

namespace hssplab {

struct ExperimentConfig {
  std::size_t runs = 100;
  std::size_t n = 10;
  std::size_t m = 60;
  std::size_t k = 3;
  std::size_t t_max = 100;
  std::size_t q_bits = 2000;  // random instances only
  std::size_t scale_bits = 16;
  Rat delta = kDefaultDelta;
  std::optional<std::size_t> beta = 10;
  std::size_t combo_depth = 2;
  RecoveryMode recovery = RecoveryMode::resolve_differences;
  std::size_t coordinate = 0;
  bool standardize = false;
  RowSampling sampling = RowSampling::whole_iterations;
  std::filesystem::path dataset_path;
  std::uint64_t master_seed = 0;
  std::size_t threads = 0;  // 0: HSSPLAB_THREADS, else hardware concurrency
  bool include_random = true;
  bool include_kmeans = true;
};

struct ExperimentRow {
  std::size_t run_index = 0;
  Provenance provenance = Provenance::random;
  std::size_t recovered_count = 0;
  std::optional<Rat> mean_l1_recovered;
  Rat baseline_l1;  // m/2 for random, m/k for K-means
  std::size_t true_match_count = 0;
  bool x_success = false;
  std::optional<std::size_t> rank_w;  // K-means only
  double wall_time_s = 0;
  // Failure category, or "error: ..." when the run threw.
  std::string status;
};

// Stable per-run seed from (master seed, run index, provenance).
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index,
                       Provenance provenance);

// Worker count: explicit value, else HSSPLAB_THREADS, else hardware
// concurrency (at least 1).
std::size_t resolve_threads(std::size_t requested);

ExperimentRow run_random_trial(const ExperimentConfig& config,
                               std::size_t run_index);
ExperimentRow run_kmeans_trial(const ExperimentConfig& config,
                               const Dataset& data, std::size_t run_index);

// Rows ordered by (run_index, provenance) whatever the scheduling. Per-run
// exceptions become rows with an "error: ..." status. `on_row` is called
// from worker threads under a lock, in completion order.
std::vector<ExperimentRow> run_experiment(
    const ExperimentConfig& config,
    const std::function<void(const ExperimentRow&)>& on_row = {});

inline constexpr const char* kCsvHeader =
    "run_index,provenance,recovered_count,mean_l1_recovered,baseline_l1,"
    "true_match_count,x_success,rank_W,wall_time_s,status";

// One CSV line without trailing newline. Rationals are printed as decimals
// with 6 fractional digits.
std::string to_csv(const ExperimentRow& row);
void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

struct ProvenanceSummary {
  std::size_t runs = 0;
  std::size_t errors = 0;
  double mean_recovered_count = 0;
  std::optional<double> mean_l1_recovered;  // over runs that recovered any
  double baseline_l1 = 0;
  double mean_true_match_count = 0;
  double x_success_rate = 0;
  std::size_t zero_match_runs = 0;
  std::size_t rank_deficient_runs = 0;  // rank(W) < n, K-means only
};

ProvenanceSummary summarize(const std::vector<ExperimentRow>& rows,
                            Provenance provenance, std::size_t n);
std::string format_summary(const std::vector<ExperimentRow>& rows,
                           std::size_t n);

}  // namespace hssplab
