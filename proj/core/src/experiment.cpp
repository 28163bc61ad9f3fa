#include "hssplab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "hssplab/attack.hpp"
#include "hssplab/random.hpp"

namespace hssplab {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

AttackParams attack_params(const ExperimentConfig& config, std::uint64_t seed) {
  AttackParams p;
  p.delta = config.delta;
  p.beta = config.beta;
  p.combo_depth = config.combo_depth;
  p.recovery = config.recovery;
  p.seed = seed;
  return p;
}

void fill_from_report(ExperimentRow& row, const AttackReport& report) {
  row.recovered_count = report.recovered_count;
  row.mean_l1_recovered = report.mean_l1_recovered;
  row.true_match_count = report.true_match_count;
  row.x_success = report.x_success;
  row.status = std::string(to_string(report.failure));
}

}  // namespace

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index,
                       Provenance provenance) {
  const std::uint64_t p = provenance == Provenance::random ? 1 : 2;
  return derive_seed(derive_seed(master_seed, run_index), p);
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HSSPLAB_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

ExperimentRow run_random_trial(const ExperimentConfig& config,
                               std::size_t run_index) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = run_seed(config.master_seed, run_index,
                                      Provenance::random);
  ExperimentRow row;
  row.run_index = run_index;
  row.provenance = Provenance::random;
  row.baseline_l1 = Rat(static_cast<long>(config.m), 2);
  row.baseline_l1.canonicalize();
  HsspInstance inst = random_hssp(config.n, config.m, config.q_bits, seed);
  fill_from_report(row, run_attack(inst, attack_params(config, derive_seed(seed, 3))));
  row.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start).count();
  return row;
}

ExperimentRow run_kmeans_trial(const ExperimentConfig& config,
                               const Dataset& data, std::size_t run_index) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = run_seed(config.master_seed, run_index,
                                      Provenance::kmeans);
  ExperimentRow row;
  row.run_index = run_index;
  row.provenance = Provenance::kmeans;
  row.baseline_l1 = Rat(static_cast<long>(config.m), static_cast<long>(config.k));
  row.baseline_l1.canonicalize();

  KMeansConfig kc;
  kc.k = config.k;
  kc.t_max = config.t_max;
  kc.init_seed = derive_seed(seed, 1);
  kc.coordinate = config.coordinate;
  kc.scale_bits = config.scale_bits;
  KMeansTrace trace = run_federated_kmeans(data, kc);

  KMeansInstanceOptions ko;
  ko.n = config.n;
  ko.m = config.m;
  ko.subsample_seed = derive_seed(seed, 2);
  ko.sampling = config.sampling;
  HsspInstance inst = kmeans_hssp_instance(trace, data, kc, ko);
  row.rank_w = rank(inst.truth_weights);

  fill_from_report(row, run_attack(inst, attack_params(config, derive_seed(seed, 3))));
  row.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<ExperimentRow> run_experiment(
    const ExperimentConfig& config,
    const std::function<void(const ExperimentRow&)>& on_row) {
  if (config.runs == 0) throw std::invalid_argument("runs must be at least 1");
  if (!config.include_random && !config.include_kmeans) {
    throw std::invalid_argument("no provenance selected");
  }

  Dataset data;
  if (config.include_kmeans) {
    data = load_dataset(config.dataset_path);
    if (config.standardize) data = standardize(data);
  }

  struct Job {
    std::size_t run;
    Provenance provenance;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < config.runs; ++r) {
    if (config.include_random) jobs.push_back({r, Provenance::random});
    if (config.include_kmeans) jobs.push_back({r, Provenance::kmeans});
  }

  std::vector<ExperimentRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      ExperimentRow row;
      try {
        row = job.provenance == Provenance::random
                  ? run_random_trial(config, job.run)
                  : run_kmeans_trial(config, data, job.run);
      } catch (const std::exception& e) {
        row = ExperimentRow{};
        row.run_index = job.run;
        row.provenance = job.provenance;
        row.baseline_l1 = job.provenance == Provenance::random
                              ? Rat(static_cast<long>(config.m), 2)
                              : Rat(static_cast<long>(config.m),
                                    static_cast<long>(config.k));
        row.baseline_l1.canonicalize();
        row.status = std::string("error: ") + e.what();
      }
      rows[i] = std::move(row);
      if (on_row) {
        std::lock_guard lock(mu);
        on_row(rows[i]);
      }
    }
  };

  const std::size_t threads = std::min(resolve_threads(config.threads), jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

std::string to_csv(const ExperimentRow& row) {
  std::string status = row.status;
  std::replace(status.begin(), status.end(), ',', ';');
  std::replace(status.begin(), status.end(), '\n', ' ');
  std::ostringstream out;
  out << row.run_index << ',' << to_string(row.provenance) << ','
      << row.recovered_count << ','
      << (row.mean_l1_recovered ? fixed6(row.mean_l1_recovered->get_d()) : "")
      << ',' << fixed6(row.baseline_l1.get_d()) << ',' << row.true_match_count
      << ',' << (row.x_success ? "true" : "false") << ','
      << (row.rank_w ? std::to_string(*row.rank_w) : "") << ','
      << fixed6(row.wall_time_s) << ',' << status;
  return out.str();
}

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& row : rows) out << to_csv(row) << '\n';
}

ProvenanceSummary summarize(const std::vector<ExperimentRow>& rows,
                            Provenance provenance, std::size_t n) {
  ProvenanceSummary s;
  double l1_sum = 0;
  std::size_t l1_count = 0;
  std::size_t recovered = 0;
  std::size_t matches = 0;
  std::size_t successes = 0;
  for (const auto& row : rows) {
    if (row.provenance != provenance) continue;
    s.baseline_l1 = row.baseline_l1.get_d();
    if (row.status.starts_with("error")) {
      ++s.errors;
      continue;
    }
    ++s.runs;
    recovered += row.recovered_count;
    matches += row.true_match_count;
    if (row.x_success) ++successes;
    if (row.true_match_count == 0) ++s.zero_match_runs;
    if (row.mean_l1_recovered) {
      l1_sum += row.mean_l1_recovered->get_d();
      ++l1_count;
    }
    if (row.rank_w && *row.rank_w < n) ++s.rank_deficient_runs;
  }
  if (s.runs > 0) {
    s.mean_recovered_count = static_cast<double>(recovered) / s.runs;
    s.mean_true_match_count = static_cast<double>(matches) / s.runs;
    s.x_success_rate = static_cast<double>(successes) / s.runs;
  }
  if (l1_count > 0) s.mean_l1_recovered = l1_sum / l1_count;
  return s;
}

std::string format_summary(const std::vector<ExperimentRow>& rows,
                           std::size_t n) {
  std::ostringstream out;
  out << "provenance  runs  errors  recovered_count  mean_l1_recovered  "
         "baseline_l1  true_match_count  zero_match_runs  x_success_rate  "
         "rank_deficient\n";
  for (Provenance p : {Provenance::random, Provenance::kmeans}) {
    const ProvenanceSummary s = summarize(rows, p, n);
    if (s.runs + s.errors == 0) continue;
    char line[256];
    std::snprintf(line, sizeof line,
                  "%-10s  %4zu  %6zu  %15.3f  %17s  %11.3f  %16.3f  %15zu  %14.3f  %14s\n",
                  std::string(to_string(p)).c_str(), s.runs, s.errors,
                  s.mean_recovered_count,
                  s.mean_l1_recovered ? fixed6(*s.mean_l1_recovered).c_str() : "-",
                  s.baseline_l1, s.mean_true_match_count, s.zero_match_runs,
                  s.x_success_rate,
                  p == Provenance::kmeans
                      ? (std::to_string(s.rank_deficient_runs) + "/" +
                         std::to_string(s.runs)).c_str()
                      : "-");
    out << line;
  }
  return out.str();
}

}  // namespace hssplab
