// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
// Usage: hssplab_acceptance [IRIS_CSV]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hssplab/attack.hpp"
#include "hssplab/experiment.hpp"
#include "hssplab/hssp.hpp"
#include "hssplab/kmeans.hpp"
#include "hssplab/lattice.hpp"
#include "hssplab/random.hpp"
#include "oracles.hpp"

namespace {

using namespace hssplab;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Shared Monte Carlo rows for criteria 1-4.
struct FlagshipRuns {
  std::vector<ExperimentRow> random_rows;
  std::vector<ExperimentRow> kmeans_rows;
  std::string kmeans_error;
};

FlagshipRuns run_flagship(const std::filesystem::path& iris) {
  ExperimentConfig c;
  c.runs = 20;
  c.n = 10;
  c.m = 60;
  c.k = 3;
  c.t_max = 100;
  c.q_bits = 2000;
  c.delta = Rat(99, 100);
  c.beta = 10;
  c.master_seed = 0;
  c.dataset_path = iris;

  FlagshipRuns out;
  c.include_kmeans = false;
  out.random_rows = run_experiment(c);

  c.include_random = false;
  c.include_kmeans = true;
  try {
    const Dataset d = load_dataset(iris);
    if (d.size() != 150 || d.dims() != 4) {
      out.kmeans_error = fmt("Iris has shape %zux%zu, expected 150x4", d.size(), d.dims());
      return out;
    }
    out.kmeans_rows = run_experiment(c);
  } catch (const std::exception& e) {
    out.kmeans_error = std::string("cannot load Iris: ") + e.what();
  }
  return out;
}

std::size_t errors_in(const std::vector<ExperimentRow>& rows) {
  std::size_t e = 0;
  for (const auto& r : rows) e += r.status.rfind("error", 0) == 0;
  return e;
}

Outcome criterion1(const FlagshipRuns& f) {
  const auto& rows = f.random_rows;
  std::size_t success = 0, full_when_success = 0;
  for (const auto& r : rows) {
    if (r.x_success) {
      ++success;
      full_when_success += r.true_match_count == 10;
    }
  }
  const double rate = rows.empty() ? 0.0 : double(success) / rows.size();
  Outcome o;
  o.pass = rows.size() == 20 && rate >= 0.95 && full_when_success == success;
  o.detail = fmt("x_success %zu/%zu (%.0f%%, need >= 95%%), 10/10 matches in %zu of those, errors %zu",
                 success, rows.size(), 100 * rate, full_when_success, errors_in(rows));
  return o;
}

Outcome criterion2(const FlagshipRuns& f) {
  if (!f.kmeans_error.empty()) return {false, f.kmeans_error};
  const auto& rows = f.kmeans_rows;
  std::size_t zero = 0, success = 0;
  for (const auto& r : rows) {
    zero += r.true_match_count == 0 && r.status.rfind("error", 0) != 0;
    success += r.x_success;
  }
  const double rate = rows.empty() ? 0.0 : double(zero) / rows.size();
  Outcome o;
  o.pass = rows.size() == 20 && rate >= 0.90 && success == 0;
  o.detail = fmt("zero true matches in %zu/%zu (%.0f%%, need >= 90%%), x_success %zu/%zu (need 0), errors %zu",
                 zero, rows.size(), 100 * rate, success, rows.size(), errors_in(rows));
  return o;
}

Outcome criterion3(const FlagshipRuns& f) {
  // Random: pooled mean over every recovered vector of every run.
  double total = 0;
  std::size_t count = 0;
  for (const auto& r : f.random_rows) {
    if (!r.mean_l1_recovered) continue;
    total += r.mean_l1_recovered->get_d() * r.recovered_count;
    count += r.recovered_count;
  }
  const double random_mean = count ? total / count : 0.0;
  const bool random_ok = count > 0 && std::fabs(random_mean - 30.0) <= 3.0;

  if (!f.kmeans_error.empty()) {
    return {false, fmt("random mean L1 %.3f; K-means: %s", random_mean, f.kmeans_error.c_str())};
  }
  std::size_t deviating = 0;
  for (const auto& r : f.kmeans_rows) {
    if (r.mean_l1_recovered && std::fabs(r.mean_l1_recovered->get_d() - 20.0) > 2.0) ++deviating;
  }
  const auto& km = f.kmeans_rows;
  const double rate = km.empty() ? 0.0 : double(deviating) / km.size();
  Outcome o;
  o.pass = random_ok && km.size() == 20 && rate >= 0.80;
  o.detail = fmt("random mean L1 %.3f (need |x-30| <= 3); K-means mean L1 off 20 by > 2 in %zu/%zu (%.0f%%, need >= 80%%)",
                 random_mean, deviating, km.size(), 100 * rate);
  return o;
}

Outcome criterion4(const FlagshipRuns& f) {
  std::size_t exact = 0;
  for (const auto& r : f.random_rows) exact += r.true_match_count == 10 && r.recovered_count == 10;
  const bool random_ok = f.random_rows.size() == 20 && exact == f.random_rows.size();
  if (!f.kmeans_error.empty()) {
    return {false, fmt("random exact truth set %zu/%zu; K-means: %s", exact,
                       f.random_rows.size(), f.kmeans_error.c_str())};
  }
  std::size_t more = 0;
  for (const auto& r : f.kmeans_rows) more += r.recovered_count > 10;
  const double rate = f.kmeans_rows.empty() ? 0.0 : double(more) / f.kmeans_rows.size();
  Outcome o;
  o.pass = random_ok && f.kmeans_rows.size() == 20 && rate >= 0.80;
  o.detail = fmt("random runs recovering exactly the 10 truth columns %zu/%zu (need all); "
                 "K-means recovered > 10 in %zu/%zu (%.0f%%, need >= 80%%)",
                 exact, f.random_rows.size(), more, f.kmeans_rows.size(), 100 * rate);
  return o;
}

Outcome criterion5() {
  PropositionQuery q;
  q.m = 10;
  q.trials = 100000;
  const double p = proposition_probability(10).get_d();
  const double est = proposition_mc(q, 2024).get_d();
  const double sigma = binomial_sigma(p, q.trials);
  const bool mc_ok = std::fabs(est - p) <= 3 * sigma;
  const bool exact_ok = proposition_probability(10) == Rat(282475249, 1073741824);
  const std::size_t bound = min_m_bound(10, Rat(1, 100));
  const bool consts = triple_count_constant_holds() && epsilon_constant_holds();
  Outcome o;
  o.pass = mc_ok && exact_ok && bound == 94 && consts;
  o.detail = fmt("MC %.5f vs exact %.5f (3 sigma = %.5f), min_m_bound(10, 0.01) = %zu, constants %s",
                 est, p, 3 * sigma, bound, consts ? "hold" : "FAIL");
  return o;
}

LatticeBasis random_full_rank(std::mt19937_64& gen, std::size_t r, std::size_t d, long bound) {
  while (true) {
    IntMatrix m = oracle::random_matrix(gen, r, d, bound);
    if (oracle::rank(m) == r) return LatticeBasis(std::move(m));
  }
}

Outcome criterion6() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(6);
  const long bound = 1L << 16;
  const Rat delta(99, 100);
  std::size_t bases = 0, bad_hnf = 0, bad_reduced = 0, bad_bound = 0;
  for (int t = 0; t < 120; ++t) {
    const std::size_t r = 1 + t % 8;
    const std::size_t d = r + (t / 8) % 3;
    const LatticeBasis b = random_full_rank(gen, r, d, bound);
    const IntMatrix h = hnf(b.matrix());
    const LatticeBasis l = lll_reduce(b, delta);
    ReductionParams p;
    p.delta = delta;
    p.beta = std::min<std::size_t>(std::max<std::size_t>(2, r), 6);
    const LatticeBasis z = r >= 2 ? bkz_reduce(b, p) : l;
    bad_hnf += hnf(l.matrix()) != h || hnf(z.matrix()) != h;
    bad_reduced += !is_lll_reduced(l, delta) || !is_lll_reduced(z, delta);
    // |b1|^2 <= 2^(r-1) * lambda1^2
    const Int lambda_sq = squared_norm(svp_enumerate(l));
    bad_bound += squared_norm(l[0]) > (Int(1) << static_cast<unsigned>(r - 1)) * lambda_sq;
    ++bases;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.pass = bases >= 100 && bad_hnf == 0 && bad_reduced == 0 && bad_bound == 0 && secs <= 60;
  o.detail = fmt("%zu bases, hnf mismatches %zu, reduction violations %zu, first-vector bound violations %zu, %.1fs (limit 60s)",
                 bases, bad_hnf, bad_reduced, bad_bound, secs);
  return o;
}

Outcome criterion7() {
  std::mt19937_64 gen(7);
  std::size_t checked = 0, failures = 0;
  const std::vector<Int> moduli{Int(12), Int(97), Int(1000), Int("1000000007"),
                                random_prime(200, 1), Int(1) << 64};
  for (const Int& q : moduli) {
    for (std::size_t m = 2; m <= 10; ++m) {
      IntVector h(m);
      do {
        for (auto& e : h) {
          e = Int(static_cast<unsigned long>(gen() >> 1));
          e = mod_floor(e * e * e, q);
        }
      } while ([&] {
        Int g = q;
        for (const auto& e : h) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
        return g != 1;
      }());
      const auto out = orthogonal_lattice_mod(h, q);
      bool ok = !out.degenerate && out.basis.rank() == m &&
                abs(determinant(out.basis.matrix())) == q;
      for (std::size_t i = 0; ok && i < out.basis.rank(); ++i)
        ok = mod_floor(dot(out.basis[i], h), q) == 0;
      failures += !ok;
      ++checked;
    }
  }
  for (int t = 0; t < 40; ++t) {
    const std::size_t d = 3 + t % 6;
    const std::size_t r = 1 + t % (d - 1);
    const LatticeBasis b = random_full_rank(gen, r, d, 50);
    const LatticeBasis o = orthogonal_lattice(b);
    bool ok = o.rank() == d - r;
    for (std::size_t i = 0; ok && i < o.rank(); ++i)
      for (std::size_t j = 0; ok && j < r; ++j) ok = dot(o[i], b[j]) == 0;
    const LatticeBasis oo = orthogonal_lattice(o);
    ok = ok && oo.rank() == r;
    for (std::size_t j = 0; ok && j < r; ++j) ok = lattice_contains(oo, b[j]);
    failures += !ok;
    ++checked;
  }
  return {failures == 0, fmt("%zu cases (modular and exact, prime and composite moduli), %zu failures",
                             checked, failures)};
}

Outcome criterion8() {
  const auto start = std::chrono::steady_clock::now();
  AttackParams p;
  p.beta = 10;
  std::size_t instances = 0, not_subset = 0, truth_missing = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const HsspInstance inst = random_hssp(3, 8, 120, seed);
    const Step1Output s = ns_step1(inst, p);
    const auto brute = oracle::binary_members(s.completed_basis.matrix());
    const std::set<IntVector> brute_set(brute.begin(), brute.end());
    const AttackReport r = run_attack(inst, p);
    const std::set<IntVector> rec(r.recovered_binary.begin(), r.recovered_binary.end());
    for (const auto& v : rec) not_subset += !brute_set.count(v);
    for (const auto& col : inst.truth_columns())
      truth_missing += !brute_set.count(col) || !rec.count(col);
    ++instances;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {not_subset == 0 && truth_missing == 0,
          fmt("%zu instances (n=3, m=8), recovered outside brute force %zu, truth columns missing %zu, %.2fs",
              instances, not_subset, truth_missing, secs)};
}

Outcome criterion9() {
  const Dataset d = load_dataset(HSSPLAB_FIXTURE_CSV);
  std::size_t runs = 0, wcss_bad = 0, conservation_bad = 0, norm_bad = 0, block_bad = 0,
              rank_bad = 0, rank_deficient = 0;
  const std::size_t n = 6, m = 30, k = 3;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    KMeansConfig cfg;
    cfg.k = k;
    cfg.t_max = 20;
    cfg.init_seed = derive_seed(seed, 1);
    const KMeansTrace tr = run_federated_kmeans(d, cfg);
    const FixedPoint pts = to_fixed(d, cfg.scale_bits);

    std::vector<Int> total(d.dims(), Int(0));
    for (const auto& p : pts)
      for (std::size_t a = 0; a < p.size(); ++a) total[a] += p[a];
    for (std::size_t t = 0; t < tr.iterations(); ++t) {
      if (t > 0 && wcss(pts, tr, t) > wcss(pts, tr, t - 1)) ++wcss_bad;
      for (std::size_t a = 0; a < total.size(); ++a) {
        Int s = 0;
        for (std::size_t j = 0; j < k; ++j) s += tr.centroid_sums[t][j][a];
        conservation_bad += s != total[a];
      }
    }

    KMeansInstanceOptions opt;
    opt.n = n;
    opt.m = m;
    opt.subsample_seed = derive_seed(seed, 2);
    const HsspInstance inst = kmeans_hssp_instance(tr, d, cfg, opt);
    for (const auto& col : inst.truth_columns()) norm_bad += l1_norm(col) != Int(m / k);
    for (std::size_t blk = 0; blk < m / k; ++blk) {
      for (std::size_t i = 0; i < n; ++i) {
        Int s = 0;
        for (std::size_t j = 0; j < k; ++j) s += inst.truth_weights(blk * k + j, i);
        block_bad += s != 1;
      }
    }
    const std::size_t rw = rank(inst.truth_weights);
    rank_bad += rw > n;
    rank_deficient += rw < n;
    ++runs;
  }
  const bool pass = runs == 50 && wcss_bad == 0 && conservation_bad == 0 && norm_bad == 0 &&
                    block_bad == 0 && rank_bad == 0;
  return {pass, fmt("%zu fixture runs (n=%zu, m=%zu, k=%zu): WCSS increases %zu, conservation breaks %zu, "
                    "column norm != m/k %zu, block sums != 1 %zu, rank(W) > n %zu; rank(W) < n in %zu/%zu",
                    runs, n, m, k, wcss_bad, conservation_bad, norm_bad, block_bad, rank_bad,
                    rank_deficient, runs)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path iris = argc > 1 ? argv[1] : HSSPLAB_IRIS_CSV;
  int failed = 0;
  auto report = [&](int id, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  };

  FlagshipRuns flagship;
  {
    const auto start = std::chrono::steady_clock::now();
    flagship = run_flagship(iris);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("flagship Monte Carlo: 20 random + 20 K-means runs in %.1fs\n", secs);
  }
  report(1, [&] { return criterion1(flagship); });
  report(2, [&] { return criterion2(flagship); });
  report(3, [&] { return criterion3(flagship); });
  report(4, [&] { return criterion4(flagship); });
  report(5, criterion5);
  report(6, criterion6);
  report(7, criterion7);
  report(8, criterion8);
  report(9, criterion9);
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
