#include "hssplab/hssp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hssplab/random.hpp"
#include "json.hpp"

namespace hssplab {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Provenance p) {
  return p == Provenance::random ? "random" : "kmeans";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "random") return Provenance::random;
  if (s == "kmeans") return Provenance::kmeans;
  throw InstanceError("unknown provenance '" + std::string(s) + "'");
}

std::string_view to_string(RowSampling s) {
  return s == RowSampling::whole_iterations ? "iterations" : "rows";
}

RowSampling row_sampling_from_string(std::string_view s) {
  if (s == "iterations") return RowSampling::whole_iterations;
  if (s == "rows") return RowSampling::rows;
  throw InstanceError("unknown row sampling '" + std::string(s) + "'");
}

IntVector HsspInstance::truth_column(std::size_t i) const {
  IntVector col(m);
  for (std::size_t r = 0; r < m; ++r) col[r] = truth_weights(r, i);
  return col;
}

std::vector<IntVector> HsspInstance::truth_columns() const {
  std::vector<IntVector> cols;
  cols.reserve(n);
  for (std::size_t i = 0; i < n; ++i) cols.push_back(truth_column(i));
  return cols;
}

void validate(const HsspInstance& inst) {
  if (inst.n == 0) throw InstanceError("inconsistent instance: n = 0");
  if (inst.q < 2) throw InstanceError("inconsistent instance: Q < 2");
  if (inst.h.size() != inst.m) {
    throw InstanceError("inconsistent instance: h has wrong length");
  }
  if (inst.truth_weights.rows() != inst.m ||
      inst.truth_weights.cols() != inst.n) {
    throw InstanceError("inconsistent instance: weight matrix is not m x n");
  }
  if (inst.truth_x.size() != inst.n) {
    throw InstanceError("inconsistent instance: x has wrong length");
  }
  for (std::size_t r = 0; r < inst.m; ++r) {
    for (std::size_t c = 0; c < inst.n; ++c) {
      const Int& w = inst.truth_weights(r, c);
      if (w != 0 && w != 1) {
        throw InstanceError("inconsistent instance: non-binary weight");
      }
    }
  }
  for (const auto& x : inst.truth_x) {
    if (sgn(x) < 0 || x >= inst.q) {
      throw InstanceError("inconsistent instance: x outside [0, Q)");
    }
  }
  IntVector wx = multiply(inst.truth_weights, inst.truth_x);
  for (std::size_t r = 0; r < inst.m; ++r) {
    if (mod_floor(wx[r] - inst.h[r], inst.q) != 0) {
      throw InstanceError("inconsistent instance: h != W x (mod Q) at row " +
                          std::to_string(r));
    }
  }
  if (inst.provenance == Provenance::kmeans) {
    if (!inst.k || *inst.k == 0) {
      throw InstanceError("inconsistent instance: K-means instance without k");
    }
    if (inst.row_sampling == RowSampling::whole_iterations) {
      if (inst.m % *inst.k != 0) {
        throw InstanceError("inconsistent instance: m not divisible by k");
      }
      const Int expected = static_cast<unsigned long>(inst.m / *inst.k);
      for (std::size_t c = 0; c < inst.n; ++c) {
        if (l1_norm(inst.truth_column(c)) != expected) {
          throw InstanceError(
              "inconsistent instance: column L1 norm differs from m/k");
        }
      }
    }
  }
}

namespace {

ordered_json int_array(std::span<const Int> v) {
  ordered_json a = ordered_json::array();
  for (const auto& x : v) a.push_back(x.get_str());
  return a;
}

Int parse_int(const ordered_json& j) {
  if (!j.is_string()) throw InstanceError("expected decimal string integer");
  Int v;
  if (v.set_str(j.get<std::string>(), 10) != 0) {
    throw InstanceError("malformed integer '" + j.get<std::string>() + "'");
  }
  return v;
}

IntVector parse_int_array(const ordered_json& j) {
  if (!j.is_array()) throw InstanceError("expected array");
  IntVector out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(parse_int(e));
  return out;
}

}  // namespace

std::string to_json(const HsspInstance& inst) {
  ordered_json j;
  j["provenance"] = to_string(inst.provenance);
  j["n"] = inst.n;
  j["m"] = inst.m;
  if (inst.k) j["k"] = *inst.k;
  j["scale_bits"] = inst.scale_bits;
  if (inst.provenance == Provenance::kmeans) {
    j["row_sampling"] = to_string(inst.row_sampling);
  }
  j["Q"] = inst.q.get_str();
  j["h"] = int_array(inst.h);
  ordered_json w = ordered_json::array();
  for (std::size_t r = 0; r < inst.truth_weights.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (const auto& e : inst.truth_weights.row(r)) row.push_back(e.get_si());
    w.push_back(std::move(row));
  }
  j["truth_weights"] = std::move(w);
  j["truth_x"] = int_array(inst.truth_x);
  j["seed"] = inst.seed;
  return j.dump(1) + "\n";
}

HsspInstance instance_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError(std::string("instance JSON: ") + e.what());
  }
  HsspInstance inst;
  try {
    inst.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    inst.n = j.at("n").get<std::size_t>();
    inst.m = j.at("m").get<std::size_t>();
    if (j.contains("k")) inst.k = j.at("k").get<std::size_t>();
    inst.scale_bits = j.at("scale_bits").get<std::size_t>();
    if (j.contains("row_sampling")) {
      inst.row_sampling =
          row_sampling_from_string(j.at("row_sampling").get<std::string>());
    }
    inst.q = parse_int(j.at("Q"));
    inst.h = parse_int_array(j.at("h"));
    const auto& w = j.at("truth_weights");
    if (!w.is_array()) throw InstanceError("truth_weights must be an array");
    inst.truth_weights = IntMatrix(w.size(), inst.n);
    for (std::size_t r = 0; r < w.size(); ++r) {
      if (!w[r].is_array() || w[r].size() != inst.n) {
        throw InstanceError("truth_weights row has wrong length");
      }
      for (std::size_t c = 0; c < inst.n; ++c) {
        inst.truth_weights(r, c) = w[r][c].get<long>();
      }
    }
    inst.truth_x = parse_int_array(j.at("truth_x"));
    inst.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InstanceError(std::string("instance JSON: ") + e.what());
  }
  validate(inst);
  return inst;
}

Int random_prime(std::size_t bits, std::uint64_t seed) {
  if (bits < 2) throw std::invalid_argument("random_prime: bits < 2");
  Rng rng(seed);
  for (;;) {
    Int c = rng.random_bits(bits);
    mpz_setbit(c.get_mpz_t(), bits - 1);
    // The smallest prime >= c; GMP's own test is weaker than we need, so
    // confirm with 40 Miller-Rabin rounds (error < 4^-40 = 2^-80).
    mpz_sub_ui(c.get_mpz_t(), c.get_mpz_t(), 1);
    for (;;) {
      mpz_nextprime(c.get_mpz_t(), c.get_mpz_t());
      if (mpz_sizeinbase(c.get_mpz_t(), 2) != bits) break;
      if (mpz_probab_prime_p(c.get_mpz_t(), 40) != 0) return c;
    }
  }
}

HsspInstance random_hssp(std::size_t n, std::size_t m, std::size_t q_bits,
                         std::uint64_t seed) {
  if (n < 1 || m <= n) {
    throw std::invalid_argument("random_hssp: requires m > n >= 1");
  }
  if (q_bits < 2) throw std::invalid_argument("random_hssp: q_bits < 2");
  HsspInstance inst;
  inst.provenance = Provenance::random;
  inst.n = n;
  inst.m = m;
  inst.seed = seed;
  inst.q = random_prime(q_bits, derive_seed(seed, 1));
  Rng xr(derive_seed(seed, 2));
  inst.truth_x.resize(n);
  for (auto& x : inst.truth_x) x = xr.below(inst.q);
  Rng wr(derive_seed(seed, 3));
  inst.truth_weights = IntMatrix(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) inst.truth_weights(r, c) = wr.bit() ? 1 : 0;
  inst.h = multiply(inst.truth_weights, inst.truth_x);
  for (auto& v : inst.h) v = mod_floor(v, inst.q);
  return inst;
}

Rat proposition_probability(std::size_t m) {
  Int num, den;
  mpz_ui_pow_ui(num.get_mpz_t(), 7, m);
  mpz_ui_pow_ui(den.get_mpz_t(), 8, m);
  Rat p(num, den);
  p.canonicalize();
  return p;
}

Rat proposition_mc(const PropositionQuery& query, std::uint64_t seed) {
  if (query.trials == 0) throw std::invalid_argument("proposition_mc: trials = 0");
  Rng rng(seed);
  unsigned long hits = 0;
  for (std::size_t t = 0; t < query.trials; ++t) {
    bool inside = true;
    // Each coordinate needs all three bits drawn to keep the stream aligned.
    for (std::size_t c = 0; c < query.m; ++c) {
      const bool ai = rng.bit();
      const bool aj = rng.bit();
      const bool ak = rng.bit();
      if (ai && aj && !ak) inside = false;  // the only way to reach 2
    }
    if (inside) ++hits;
  }
  Rat r(static_cast<unsigned long>(hits),
        static_cast<unsigned long>(query.trials));
  r.canonicalize();
  return r;
}

std::size_t min_m_bound(std::size_t n, const Rat& epsilon) {
  if (n < 1) throw std::invalid_argument("min_m_bound: n < 1");
  if (epsilon <= 0 || epsilon >= 1) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  auto log2_int = [](const Int& v) {
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
    return std::log2(static_cast<long double>(mant)) + exp;
  };
  const long double log_eps =
      log2_int(epsilon.get_num()) - log2_int(epsilon.get_den());
  const long double bound =
      16.0L * std::log2(static_cast<long double>(n)) - 6.0L * log_eps;
  if (bound <= 0) return 0;
  return static_cast<std::size_t>(std::ceil(bound));
}

bool triple_count_constant_holds() {
  Int lhs, rhs;
  mpz_ui_pow_ui(lhs.get_mpz_t(), 2, 48);
  mpz_ui_pow_ui(rhs.get_mpz_t(), 7, 16);
  rhs *= 8;
  return lhs > rhs;
}

bool epsilon_constant_holds() {
  Int lhs, rhs;
  mpz_ui_pow_ui(lhs.get_mpz_t(), 8, 6);
  mpz_ui_pow_ui(rhs.get_mpz_t(), 7, 6);
  rhs *= 2;
  return lhs > rhs;
}

double binomial_sigma(double p, std::size_t trials) {
  return std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

std::string_view to_string(AttackFailure f) {
  switch (f) {
    case AttackFailure::none: return "none";
    case AttackFailure::step1_gap_failure: return "step1_gap_failure";
    case AttackFailure::no_binary_found: return "no_binary_found";
    case AttackFailure::no_invertible_submatrix: return "no_invertible_submatrix";
    case AttackFailure::verification_failed: return "verification_failed";
    case AttackFailure::spurious_solution: return "spurious_solution";
  }
  return "none";
}

AttackFailure attack_failure_from_string(std::string_view s) {
  for (auto f : {AttackFailure::none, AttackFailure::step1_gap_failure,
                 AttackFailure::no_binary_found,
                 AttackFailure::no_invertible_submatrix,
                 AttackFailure::verification_failed,
                 AttackFailure::spurious_solution}) {
    if (to_string(f) == s) return f;
  }
  throw std::invalid_argument("unknown failure '" + std::string(s) + "'");
}

AttackReport evaluate_attack(const HsspInstance& inst, AttackReport report) {
  std::set<IntVector> truth;
  for (auto& col : inst.truth_columns()) truth.insert(std::move(col));
  std::set<IntVector> recovered(report.recovered_binary.begin(),
                                report.recovered_binary.end());

  report.recovered_count = recovered.size();
  report.true_match_count = 0;
  Int l1_total = 0;
  for (const auto& v : recovered) {
    l1_total += l1_norm(v);
    if (truth.count(v)) ++report.true_match_count;
  }
  if (recovered.empty()) {
    report.mean_l1_recovered.reset();
  } else {
    Rat mean(l1_total, Int(static_cast<unsigned long>(recovered.size())));
    mean.canonicalize();
    report.mean_l1_recovered = mean;
  }

  report.x_success = false;
  if (report.x_recovered && report.x_recovered->size() == inst.n) {
    IntVector got = *report.x_recovered;
    IntVector want = inst.truth_x;
    for (auto& v : got) v = mod_floor(v, inst.q);
    for (auto& v : want) v = mod_floor(v, inst.q);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    report.x_success = got == want;
  }
  if (report.x_success) {
    report.failure = AttackFailure::none;
  } else if (report.failure == AttackFailure::none) {
    report.failure = AttackFailure::spurious_solution;
  }
  return report;
}

std::string to_json(const AttackReport& report) {
  ordered_json j;
  j["recovered_count"] = report.recovered_count;
  if (report.mean_l1_recovered) {
    j["mean_l1_recovered"] = report.mean_l1_recovered->get_str();
    j["mean_l1_recovered_approx"] = report.mean_l1_recovered->get_d();
  } else {
    j["mean_l1_recovered"] = nullptr;
    j["mean_l1_recovered_approx"] = nullptr;
  }
  j["true_match_count"] = report.true_match_count;
  j["x_success"] = report.x_success;
  j["failure"] = to_string(report.failure);
  if (report.step1_contains_truth) {
    j["step1_contains_truth"] = *report.step1_contains_truth;
  } else {
    j["step1_contains_truth"] = nullptr;
  }
  j["x_recovered"] = report.x_recovered ? int_array(*report.x_recovered)
                                        : ordered_json(nullptr);
  ordered_json rec = ordered_json::array();
  for (const auto& v : report.recovered_binary) rec.push_back(int_array(v));
  j["recovered_binary"] = std::move(rec);
  ordered_json wr = ordered_json::array();
  for (const auto& v : report.weights_recovered) wr.push_back(int_array(v));
  j["weights_recovered"] = std::move(wr);
  ordered_json sv = ordered_json::array();
  for (const auto& v : report.short_vectors) sv.push_back(int_array(v));
  j["short_vectors"] = std::move(sv);
  j["timings"] = {{"step1_s", report.timings.step1_s},
                  {"step2_reduce_s", report.timings.step2_reduce_s},
                  {"recover_s", report.timings.recover_s},
                  {"solve_s", report.timings.solve_s}};
  return j.dump(1) + "\n";
}

}  // namespace hssplab
