#include "hssplab/attack.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "hssplab/random.hpp"

namespace hssplab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_binary_nonzero(const IntVector& v) {
  bool any = false;
  for (const auto& e : v) {
    if (e == 1) {
      any = true;
    } else if (sgn(e) != 0) {
      return false;
    }
  }
  return any;
}

bool has_mixed_signs(const IntVector& v) {
  bool pos = false;
  bool neg = false;
  for (const auto& e : v) {
    pos = pos || sgn(e) > 0;
    neg = neg || sgn(e) < 0;
  }
  return pos && neg;
}

// Adds s * v to acc.
void add_scaled(IntVector& acc, const IntVector& v, int s) {
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (s > 0) {
      acc[i] += v[i];
    } else {
      acc[i] -= v[i];
    }
  }
}

// Greedy row selection over Z_q: keeps a row when, after elimination
// against the rows kept so far, its first nonzero entry is a unit. The kept
// rows then form a submatrix invertible mod q.
std::optional<std::vector<std::size_t>> greedy_rows(
    const IntMatrix& a, const Int& q, std::span<const std::size_t> order) {
  const std::size_t n = a.cols();
  std::vector<std::pair<std::size_t, IntVector>> pivots;
  std::vector<std::size_t> chosen;
  Int inv;
  for (std::size_t r : order) {
    IntVector v(n);
    for (std::size_t c = 0; c < n; ++c) v[c] = mod_floor(a(r, c), q);
    for (const auto& [pc, prow] : pivots) {
      if (sgn(v[pc]) == 0) continue;
      const Int f = v[pc];
      for (std::size_t c = 0; c < n; ++c) v[c] = mod_floor(v[c] - f * prow[c], q);
    }
    std::size_t lead = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (sgn(v[c]) != 0) {
        lead = c;
        break;
      }
    }
    if (lead == n) continue;
    if (mpz_invert(inv.get_mpz_t(), v[lead].get_mpz_t(), q.get_mpz_t()) == 0) {
      continue;
    }
    for (auto& e : v) e = mod_floor(e * inv, q);
    pivots.emplace_back(lead, std::move(v));
    chosen.push_back(r);
    if (chosen.size() == n) return chosen;
  }
  return std::nullopt;
}

SolveResult solve_with_rows(const IntMatrix& a, std::span<const Int> h,
                            const Int& q, std::span<const std::size_t> rows) {
  const std::size_t n = a.cols();
  IntMatrix sub(n, n);
  IntVector rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    sub.row(i) = a.row(rows[i]);
    rhs[i] = h[rows[i]];
  }
  SolveResult out;
  IntVector x;
  try {
    x = modular_solve(sub, rhs, q);
  } catch (const MathError&) {
    out.status = SolveStatus::no_invertible_submatrix;
    return out;
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (mod_floor(dot(a.row(r), x) - h[r], q) != 0) {
      out.status = SolveStatus::verification_failed;
      return out;
    }
  }
  out.status = SolveStatus::solved;
  out.x = std::move(x);
  return out;
}

// Advances `idx` (strictly increasing, values < total) to the next
// combination in lexicographic order. Returns false after the last one.
bool next_combination(std::vector<std::size_t>& idx, std::size_t total) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < total - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(RecoveryMode mode) {
  switch (mode) {
    case RecoveryMode::depth:
      return "depth";
    case RecoveryMode::resolve_differences:
      return "resolve_differences";
    case RecoveryMode::full_closure:
      return "full_closure";
  }
  return "?";
}

RecoveryMode recovery_mode_from_string(std::string_view s) {
  for (auto m : {RecoveryMode::depth, RecoveryMode::resolve_differences,
                 RecoveryMode::full_closure}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown recovery mode: " + std::string(s));
}

Step1Output ns_step1(const HsspInstance& inst, const AttackParams& params) {
  if (inst.m <= inst.n) throw AttackError("m must exceed n");
  if (inst.h.size() != inst.m) throw AttackError("h has wrong length");
  auto mod = orthogonal_lattice_mod(inst.h, inst.q);
  if (mod.degenerate) throw AttackError("degenerate instance");

  LatticeBasis reduced = lll_reduce(mod.basis, params.delta);
  const std::size_t keep = inst.m - inst.n;
  IntMatrix first(0, inst.m);
  for (std::size_t i = 0; i < keep; ++i) first.append_row(reduced[i]);

  Step1Output out;
  out.ortho_basis = LatticeBasis(std::move(first));
  out.completed_basis = orthogonal_lattice(out.ortho_basis, params.delta);
  return out;
}

std::vector<IntVector> recover_binary_vectors(
    std::span<const IntVector> short_vectors, std::size_t combo_depth,
    RecoveryMode mode, std::size_t max_recovered) {
  if (combo_depth < 1 || combo_depth > 3) {
    throw std::invalid_argument("combo_depth must be 1, 2 or 3");
  }
  std::set<IntVector> found;
  const std::size_t r = short_vectors.size();
  for (std::size_t i = 0; i < r; ++i) {
    for (int si : {1, -1}) {
      IntVector a(short_vectors[i].size());
      add_scaled(a, short_vectors[i], si);
      if (is_binary_nonzero(a)) found.insert(a);
      if (combo_depth < 2) continue;
      for (std::size_t j = i + 1; j < r; ++j) {
        for (int sj : {1, -1}) {
          IntVector b = a;
          add_scaled(b, short_vectors[j], sj);
          if (is_binary_nonzero(b)) found.insert(b);
          if (combo_depth < 3) continue;
          for (std::size_t l = j + 1; l < r; ++l) {
            for (int sl : {1, -1}) {
              IntVector c = b;
              add_scaled(c, short_vectors[l], sl);
              if (is_binary_nonzero(c)) found.insert(std::move(c));
            }
          }
        }
      }
    }
  }
  if (mode != RecoveryMode::depth) {
    // Steps are the short vectors and, from depth 2, their pairwise sums and
    // differences.
    std::vector<IntVector> steps;
    auto keep = [&](IntVector v) {
      if (mode == RecoveryMode::full_closure || has_mixed_signs(v)) {
        steps.push_back(std::move(v));
      }
    };
    for (std::size_t i = 0; i < r; ++i) {
      keep(short_vectors[i]);
      if (combo_depth < 2) continue;
      for (std::size_t j = i + 1; j < r; ++j) {
        for (int sj : {1, -1}) {
          IntVector c = short_vectors[i];
          add_scaled(c, short_vectors[j], sj);
          keep(std::move(c));
        }
      }
    }
    std::vector<IntVector> frontier(found.begin(), found.end());
    while (!frontier.empty() && found.size() < max_recovered) {
      std::vector<IntVector> next;
      for (const auto& u : frontier) {
        for (const IntVector& v : steps) {
          for (int s : {1, -1}) {
            IntVector c = u;
            add_scaled(c, v, s);
            if (found.size() < max_recovered && is_binary_nonzero(c) &&
                found.insert(c).second) {
              next.push_back(std::move(c));
            }
          }
        }
      }
      frontier = std::move(next);
    }
  }
  return {found.begin(), found.end()};
}

SolveResult solve_x(const IntMatrix& candidate_a, std::span<const Int> h,
                    const Int& q, const SolveOptions& options) {
  const std::size_t m = candidate_a.rows();
  const std::size_t n = candidate_a.cols();
  if (h.size() != m) throw std::invalid_argument("solve_x: h has wrong length");
  if (n == 0 || m < n) return {};

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  if (auto rows = greedy_rows(candidate_a, q, order)) {
    return solve_with_rows(candidate_a, h, q, *rows);
  }
  // Over a field the greedy pass is complete.
  if (mpz_probab_prime_p(q.get_mpz_t(), 40) != 0) return {};

  if (m <= options.exhaustive_max_m) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    do {
      IntMatrix sub(n, n);
      for (std::size_t i = 0; i < n; ++i) sub.row(i) = candidate_a.row(idx[i]);
      Int det = mod_floor(determinant(sub), q);
      Int g;
      mpz_gcd(g.get_mpz_t(), det.get_mpz_t(), q.get_mpz_t());
      if (sgn(det) != 0 && g == 1) {
        return solve_with_rows(candidate_a, h, q, idx);
      }
    } while (next_combination(idx, m));
    return {};
  }

  Rng rng(options.seed);
  for (std::size_t attempt = 0; attempt < options.random_retries; ++attempt) {
    for (std::size_t i = m; i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    if (auto rows = greedy_rows(candidate_a, q, order)) {
      return solve_with_rows(candidate_a, h, q, *rows);
    }
  }
  return {};
}

AttackReport ns_step2(const Step1Output& step1, const HsspInstance& inst,
                      const AttackParams& params) {
  AttackReport report;
  const std::size_t n = inst.n;
  const auto& completed = step1.completed_basis;

  auto t0 = Clock::now();
  ReductionParams rp;
  rp.delta = params.delta;
  rp.enum_limit = params.enum_limit;
  rp.beta = params.beta.value_or(std::min(completed.rank(), kDefaultMaxBeta));
  rp.beta = std::min(rp.beta, completed.rank());
  LatticeBasis reduced =
      completed.rank() >= 2 ? bkz_reduce(completed, rp) : completed;
  report.timings.step2_reduce_s = seconds_since(t0);
  report.short_vectors = reduced.matrix().row_vectors();

  t0 = Clock::now();
  report.recovered_binary =
      recover_binary_vectors(report.short_vectors, params.combo_depth,
                             params.recovery, params.max_recovered);
  report.timings.recover_s = seconds_since(t0);

  t0 = Clock::now();
  const auto& cand = report.recovered_binary;
  if (cand.size() < n ||
      rank(IntMatrix::from_rows(cand, inst.m)) < n) {
    report.failure = AttackFailure::no_binary_found;
    report.timings.solve_s = seconds_since(t0);
    return report;
  }

  SolveOptions so;
  so.random_retries = params.solve_retries;
  so.seed = derive_seed(params.seed, 0x5017e);
  bool verification_failed = false;
  std::size_t tried = 0;
  std::size_t examined = 0;
  constexpr std::size_t kMaxExamined = 20000;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  do {
    if (++examined > kMaxExamined) break;
    IntMatrix a(inst.m, n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < inst.m; ++r) a(r, c) = cand[idx[c]][r];
    if (rank(a) < n) continue;
    ++tried;
    SolveResult res = solve_x(a, inst.h, inst.q, so);
    if (res.status == SolveStatus::solved) {
      report.x_recovered = std::move(res.x);
      for (std::size_t c = 0; c < n; ++c) {
        report.weights_recovered.push_back(cand[idx[c]]);
      }
      break;
    }
    if (res.status == SolveStatus::verification_failed) verification_failed = true;
  } while (tried < params.subset_budget && next_combination(idx, cand.size()));

  if (!report.x_recovered) {
    report.failure = verification_failed ? AttackFailure::verification_failed
                                         : AttackFailure::no_invertible_submatrix;
  }
  report.timings.solve_s = seconds_since(t0);
  return report;
}

AttackReport run_attack(const HsspInstance& inst, const AttackParams& params) {
  auto t0 = Clock::now();
  Step1Output step1 = ns_step1(inst, params);
  const double step1_s = seconds_since(t0);

  AttackReport report = ns_step2(step1, inst, params);
  report.timings.step1_s = step1_s;

  const IntMatrix h = hnf(step1.completed_basis.matrix());
  bool contains = true;
  for (const auto& col : inst.truth_columns()) {
    if (!hnf_contains(h, col)) {
      contains = false;
      break;
    }
  }
  report.step1_contains_truth = contains;
  report = evaluate_attack(inst, std::move(report));
  if (!report.x_success && !contains) {
    report.failure = AttackFailure::step1_gap_failure;
  }
  return report;
}

}  // namespace hssplab
