// hssplab: generate HSSP instances, attack them, run Monte Carlo comparisons
// and check the triple-combination bound.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hssplab/attack.hpp"
#include "hssplab/experiment.hpp"
#include "hssplab/hssp.hpp"
#include "hssplab/kmeans.hpp"
#include "hssplab/random.hpp"

namespace fs = std::filesystem;
using namespace hssplab;

namespace {

struct Shared {
  std::uint64_t seed = 0;
  std::string out;
  bool verbose = false;
};

void add_shared(CLI::App* cmd, Shared& s) {
  cmd->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", s.out, "Output file (default: stdout)");
  cmd->add_flag("-v,--verbose", s.verbose, "Progress on stderr");
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Summary lines go to stdout when the payload goes to a file, else stderr.
std::ostream& info(const Shared& s) {
  return s.out.empty() || s.out == "-" ? std::cerr : std::cout;
}

std::optional<std::size_t> parse_beta(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t pos = 0;
  const unsigned long v = std::stoul(text, &pos);
  if (pos != text.size() || v < 2) {
    throw CLI::ValidationError("--beta", "expected an integer >= 2 or 'auto'");
  }
  return v;
}

Rat parse_delta(const std::string& text) {
  const Rat d = parse_rational(text);
  if (d <= Rat(1, 4) || d >= 1) {
    throw CLI::ValidationError("--delta", "must lie in (1/4, 1)");
  }
  return d;
}

std::string path_with_suffix(const std::string& path, std::size_t attribute) {
  fs::path p(path);
  const std::string stem = p.stem().string();
  const std::string ext = p.has_extension() ? p.extension().string() : ".json";
  return (p.parent_path() / (stem + ".attr" + std::to_string(attribute) + ext))
      .string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden subset sum instances, lattice attack and federated K-means leakage"};
  app.require_subcommand(1);

  // gen-random -------------------------------------------------------------
  Shared gr;
  std::size_t gr_n = 0, gr_m = 0, gr_q_bits = 2000;
  auto* gen_random = app.add_subcommand("gen-random", "Random HSSP instance");
  gen_random->add_option("--n", gr_n, "Number of hidden values")->required()
      ->check(CLI::PositiveNumber);
  gen_random->add_option("--m", gr_m, "Number of samples")->required()
      ->check(CLI::PositiveNumber);
  gen_random->add_option("--q-bits", gr_q_bits, "Bit length of the prime modulus")
      ->capture_default_str()->check(CLI::Range(2, 1 << 20));
  add_shared(gen_random, gr);

  // gen-kmeans -------------------------------------------------------------
  Shared gk;
  std::string gk_data, gk_trace_out, gk_q, gk_row_sample = "iterations";
  KMeansConfig gk_cfg;
  KMeansInstanceOptions gk_opts;
  bool gk_all_attributes = false, gk_standardize = false;
  auto* gen_kmeans = app.add_subcommand("gen-kmeans", "HSSP instance from a federated K-means run");
  gen_kmeans->add_option("--data", gk_data, "CSV dataset")->required()
      ->check(CLI::ExistingFile);
  gen_kmeans->add_option("--n", gk_opts.n, "Samples kept as hidden data")
      ->capture_default_str()->check(CLI::PositiveNumber);
  gen_kmeans->add_option("--k", gk_cfg.k, "Clusters")->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen_kmeans->add_option("--t-max", gk_cfg.t_max, "Iterations")
      ->capture_default_str()->check(CLI::PositiveNumber);
  gen_kmeans->add_option("--m", gk_opts.m, "Observations kept")
      ->capture_default_str()->check(CLI::PositiveNumber);
  gen_kmeans->add_option("--scale-bits", gk_cfg.scale_bits, "Fixed-point fraction bits")
      ->capture_default_str()->check(CLI::Range(0, 64));
  gen_kmeans->add_option("--coordinate", gk_cfg.coordinate, "Attribute used as hidden data")
      ->capture_default_str();
  gen_kmeans->add_flag("--all-attributes", gk_all_attributes,
                       "One instance per attribute, sharing W (--out gets .attrN suffixes)");
  gen_kmeans->add_option("--row-sample", gk_row_sample, "iterations | rows")
      ->capture_default_str()->check(CLI::IsMember({"iterations", "rows"}));
  gen_kmeans->add_flag("--standardize", gk_standardize, "Standardize attributes first");
  gen_kmeans->add_option("--q", gk_q, "Modulus (default: smallest prime above 4 n max|x|)");
  gen_kmeans->add_option("--trace-out", gk_trace_out, "Write the clustering trace JSON here");
  add_shared(gen_kmeans, gk);

  // attack -----------------------------------------------------------------
  Shared at;
  std::string at_in, at_delta = "99/100", at_beta = "auto", at_recovery = "resolve_differences";
  AttackParams at_params;
  auto* attack = app.add_subcommand("attack", "Run the two-step lattice attack on an instance");
  attack->add_option("--in", at_in, "Instance JSON")->required()->check(CLI::ExistingFile);
  attack->add_option("--delta", at_delta, "LLL parameter, e.g. 99/100 or 0.99")
      ->capture_default_str();
  attack->add_option("--beta", at_beta, "BKZ block size or 'auto'")->capture_default_str();
  attack->add_option("--combo-depth", at_params.combo_depth, "1, 2 or 3")
      ->capture_default_str()->check(CLI::Range(1, 3));
  attack->add_option("--recovery", at_recovery, "depth | resolve_differences | full_closure")
      ->capture_default_str()
      ->check(CLI::IsMember({"depth", "resolve_differences", "full_closure"}));
  attack->add_option("--enum-limit", at_params.enum_limit, "Largest enumeration block")
      ->capture_default_str();
  attack->add_option("--subset-budget", at_params.subset_budget,
                     "Independent n-subsets tried")->capture_default_str();
  add_shared(attack, at);

  // experiment -------------------------------------------------------------
  Shared ex;
  ExperimentConfig ex_cfg;
  std::string ex_delta = "99/100", ex_beta = "10", ex_recovery = "resolve_differences";
  std::string ex_row_sample = "iterations", ex_data, ex_summary_out;
  bool ex_random_only = false, ex_kmeans_only = false;
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo comparison, CSV output");
  experiment->add_option("--runs", ex_cfg.runs, "Monte Carlo runs")
      ->capture_default_str()->check(CLI::PositiveNumber);
  experiment->add_option("--n", ex_cfg.n, "Hidden values")->capture_default_str()
      ->check(CLI::PositiveNumber);
  experiment->add_option("--m", ex_cfg.m, "Samples")->capture_default_str()
      ->check(CLI::PositiveNumber);
  experiment->add_option("--k", ex_cfg.k, "Clusters")->capture_default_str()
      ->check(CLI::PositiveNumber);
  experiment->add_option("--t-max", ex_cfg.t_max, "K-means iterations")
      ->capture_default_str();
  experiment->add_option("--q-bits", ex_cfg.q_bits, "Modulus bits for random instances")
      ->capture_default_str();
  experiment->add_option("--scale-bits", ex_cfg.scale_bits, "Fixed-point fraction bits")
      ->capture_default_str();
  experiment->add_option("--delta", ex_delta, "LLL parameter")->capture_default_str();
  experiment->add_option("--beta", ex_beta, "BKZ block size or 'auto'")->capture_default_str();
  experiment->add_option("--combo-depth", ex_cfg.combo_depth, "1, 2 or 3")
      ->capture_default_str()->check(CLI::Range(1, 3));
  experiment->add_option("--recovery", ex_recovery, "depth | resolve_differences | full_closure")
      ->capture_default_str()
      ->check(CLI::IsMember({"depth", "resolve_differences", "full_closure"}));
  experiment->add_option("--data", ex_data, "CSV dataset for K-means instances");
  experiment->add_option("--coordinate", ex_cfg.coordinate, "Attribute used as hidden data")
      ->capture_default_str();
  experiment->add_option("--row-sample", ex_row_sample, "iterations | rows")
      ->capture_default_str()->check(CLI::IsMember({"iterations", "rows"}));
  experiment->add_flag("--standardize", ex_cfg.standardize, "Standardize attributes first");
  experiment->add_option("--threads", ex_cfg.threads,
                         "Workers (default: HSSPLAB_THREADS or hardware concurrency)");
  experiment->add_flag("--random-only", ex_random_only, "Skip K-means instances");
  experiment->add_flag("--kmeans-only", ex_kmeans_only, "Skip random instances");
  experiment->add_option("--summary-out", ex_summary_out, "Also write the summary here");
  add_shared(experiment, ex);

  // prop-check -------------------------------------------------------------
  Shared pc;
  std::optional<std::size_t> pc_m, pc_n;
  std::string pc_epsilon;
  std::size_t pc_trials = 100000;
  auto* prop_check = app.add_subcommand(
      "prop-check", "Probability that a_i + a_j - a_k stays in {-1,0,1}^m, and the m bound");
  prop_check->add_option("--m", pc_m, "Vector length");
  prop_check->add_option("--n", pc_n, "Number of hidden vectors")->check(CLI::PositiveNumber);
  prop_check->add_option("--epsilon", pc_epsilon, "Target probability in (0, 1)");
  prop_check->add_option("--trials", pc_trials, "Monte Carlo trials")
      ->capture_default_str()->check(CLI::PositiveNumber);
  add_shared(prop_check, pc);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_random) {
      if (gr_m <= gr_n) throw CLI::ValidationError("--m", "must exceed --n");
      const HsspInstance inst = random_hssp(gr_n, gr_m, gr_q_bits, gr.seed);
      write_output(gr.out, to_json(inst));
      info(gr) << "n=" << inst.n << " m=" << inst.m << " q_bits=" << gr_q_bits
               << " seed=" << gr.seed << "\n";
      return 0;
    }

    if (*gen_kmeans) {
      if (gk_opts.n < gk_cfg.k) throw CLI::ValidationError("--n", "must be at least --k");
      if (gk_row_sample == "iterations" && gk_opts.m % gk_cfg.k != 0) {
        throw CLI::ValidationError("--m", "must be divisible by --k");
      }
      Dataset data = load_dataset(gk_data);
      if (gk_standardize) data = standardize(data);
      gk_cfg.init_seed = derive_seed(gk.seed, 1);
      gk_opts.subsample_seed = derive_seed(gk.seed, 2);
      gk_opts.sampling = row_sampling_from_string(gk_row_sample);
      if (!gk_q.empty()) gk_opts.q = Int(gk_q);
      if (gk.verbose) {
        std::cerr << "dataset: " << data.size() << " rows, " << data.dims()
                  << " attributes\n";
      }
      const KMeansTrace trace = run_federated_kmeans(data, gk_cfg);
      if (!gk_trace_out.empty()) write_output(gk_trace_out, trace_to_json(trace));

      std::vector<std::size_t> coords;
      if (gk_all_attributes) {
        for (std::size_t c = 0; c < data.dims(); ++c) coords.push_back(c);
      } else {
        coords.push_back(gk_cfg.coordinate);
      }
      for (std::size_t c : coords) {
        KMeansConfig cfg = gk_cfg;
        cfg.coordinate = c;
        const HsspInstance inst = kmeans_hssp_instance(trace, data, cfg, gk_opts);
        const std::string out = gk_all_attributes && !gk.out.empty()
                                    ? path_with_suffix(gk.out, c)
                                    : gk.out;
        write_output(out, to_json(inst));
        info(gk) << "coordinate=" << c << " n=" << inst.n << " m=" << inst.m
                 << " k=" << cfg.k << " Q=" << inst.q.get_str()
                 << " rank(W)=" << rank(inst.truth_weights) << "\n";
      }
      return 0;
    }

    if (*attack) {
      HsspInstance inst = instance_from_json(read_file(at_in));
      at_params.delta = parse_delta(at_delta);
      at_params.beta = parse_beta(at_beta);
      at_params.recovery = recovery_mode_from_string(at_recovery);
      at_params.seed = at.seed;
      const AttackReport report = run_attack(inst, at_params);
      write_output(at.out, to_json(report));
      info(at) << "recovered_count=" << report.recovered_count
               << " true_match_count=" << report.true_match_count
               << " x_success=" << (report.x_success ? "true" : "false")
               << " failure=" << to_string(report.failure) << "\n";
      if (at.verbose) {
        std::fprintf(stderr, "step1 %.3fs  reduce %.3fs  recover %.3fs  solve %.3fs\n",
                     report.timings.step1_s, report.timings.step2_reduce_s,
                     report.timings.recover_s, report.timings.solve_s);
      }
      return 0;
    }

    if (*experiment) {
      if (ex_random_only && ex_kmeans_only) {
        throw CLI::ValidationError("--random-only", "conflicts with --kmeans-only");
      }
      ex_cfg.include_random = !ex_kmeans_only;
      ex_cfg.include_kmeans = !ex_random_only;
      if (ex_cfg.include_kmeans && ex_data.empty()) {
        throw CLI::ValidationError("--data", "required unless --random-only");
      }
      if (ex_cfg.include_kmeans && ex_row_sample == "iterations" &&
          ex_cfg.m % ex_cfg.k != 0) {
        throw CLI::ValidationError("--m", "must be divisible by --k");
      }
      ex_cfg.dataset_path = ex_data;
      ex_cfg.delta = parse_delta(ex_delta);
      ex_cfg.beta = parse_beta(ex_beta);
      ex_cfg.recovery = recovery_mode_from_string(ex_recovery);
      ex_cfg.sampling = row_sampling_from_string(ex_row_sample);
      ex_cfg.master_seed = ex.seed;
      const bool verbose = ex.verbose;
      const auto rows = run_experiment(ex_cfg, [verbose](const ExperimentRow& row) {
        if (verbose) std::cerr << to_csv(row) << "\n";
      });
      std::ostringstream csv;
      write_csv(csv, rows);
      write_output(ex.out, csv.str());
      const std::string summary = format_summary(rows, ex_cfg.n);
      info(ex) << summary;
      if (!ex_summary_out.empty()) write_output(ex_summary_out, summary);
      return 0;
    }

    if (*prop_check) {
      std::optional<Rat> eps;
      if (!pc_epsilon.empty()) {
        eps = parse_rational(pc_epsilon);
        if (*eps <= 0 || *eps >= 1) {
          throw std::invalid_argument("--epsilon must lie in (0, 1)");
        }
      }
      if (!pc_m && !(pc_n && eps)) {
        throw CLI::ValidationError("prop-check", "give --m, or --n with --epsilon");
      }
      std::ostringstream out;
      if (pc_m) {
        const Rat exact = proposition_probability(*pc_m);
        PropositionQuery q;
        q.m = *pc_m;
        q.trials = pc_trials;
        const double est = proposition_mc(q, pc.seed).get_d();
        const double p = exact.get_d();
        const double sigma = binomial_sigma(p, pc_trials);
        char line[256];
        out << "exact (7/8)^" << *pc_m << " = " << exact.get_str() << "\n";
        std::snprintf(line, sizeof line, "exact decimal = %.6f\n", p);
        out << line;
        std::snprintf(line, sizeof line,
                      "monte carlo = %.6f over %zu trials, 3-sigma interval [%.6f, %.6f], %s\n",
                      est, pc_trials, est - 3 * sigma, est + 3 * sigma,
                      std::fabs(est - p) <= 3 * sigma ? "consistent" : "INCONSISTENT");
        out << line;
      }
      if (pc_n && eps) {
        out << "min_m_bound(n=" << *pc_n << ", epsilon=" << eps->get_str()
            << ") = " << min_m_bound(*pc_n, *eps) << "\n";
      }
      out << "constant 16 > 3 / -log2(7/8): "
          << (triple_count_constant_holds() ? "holds" : "FAILS") << "\n";
      out << "constant 6 > -1 / log2(7/8): "
          << (epsilon_constant_holds() ? "holds" : "FAILS") << "\n";
      write_output(pc.out, out.str());
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
