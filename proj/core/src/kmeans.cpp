#include "hssplab/kmeans.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "hssplab/random.hpp"
#include "json.hpp"

namespace hssplab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

Dataset parse_dataset(std::istream& in) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.emplace_back(line_no, split_csv(line));
  }
  if (rows.empty()) throw DatasetError("empty dataset");

  auto numeric = [](const std::string& s) { return parse_number(s).has_value(); };
  const auto& first = rows[0].second;
  bool header = false;
  for (std::size_t c = 0; c + 1 < first.size(); ++c) {
    if (!numeric(first[c])) header = true;
  }
  if (!header && rows.size() > 1 && !numeric(first.back()) &&
      numeric(rows[1].second.back())) {
    header = true;
  }

  Dataset data;
  std::size_t begin = 0;
  if (header) {
    data.attribute_names = first;
    begin = 1;
  }
  if (begin == rows.size()) throw DatasetError("dataset has a header but no rows");

  const auto& schema = rows[begin].second;
  const std::size_t width = schema.size();
  const bool has_label = !numeric(schema.back());
  const std::size_t d = has_label ? width - 1 : width;
  if (d == 0) {
    throw DatasetError("line " + std::to_string(rows[begin].first) +
                       ": no numeric attributes");
  }
  if (header && has_label && data.attribute_names.size() == width) {
    data.attribute_names.pop_back();
  }

  for (std::size_t r = begin; r < rows.size(); ++r) {
    const auto& [no, cells] = rows[r];
    if (cells.size() != width) {
      throw DatasetError("line " + std::to_string(no) + ": expected " +
                         std::to_string(width) + " columns, found " +
                         std::to_string(cells.size()));
    }
    std::vector<double> point(d);
    for (std::size_t c = 0; c < d; ++c) {
      auto v = parse_number(cells[c]);
      if (!v) {
        throw DatasetError("line " + std::to_string(no) +
                           ": non-numeric attribute '" + cells[c] + "'");
      }
      point[c] = *v;
    }
    data.points.push_back(std::move(point));
    if (has_label) data.labels.push_back(cells.back());
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in);
}

Dataset standardize(const Dataset& data) {
  Dataset out = data;
  const std::size_t n = data.size();
  if (n == 0) return out;
  for (std::size_t c = 0; c < data.dims(); ++c) {
    double mean = 0;
    for (const auto& p : data.points) mean += p[c];
    mean /= static_cast<double>(n);
    double var = 0;
    for (const auto& p : data.points) var += (p[c] - mean) * (p[c] - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    for (auto& p : out.points) {
      p[c] -= mean;
      if (sd > 0) p[c] /= sd;
    }
  }
  return out;
}

Int to_fixed(double x, std::size_t scale_bits) {
  const double scaled = std::round(std::ldexp(x, static_cast<int>(scale_bits)));
  Int v;
  mpz_set_d(v.get_mpz_t(), scaled);
  return v;
}

FixedPoint to_fixed(const Dataset& data, std::size_t scale_bits) {
  FixedPoint out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i].reserve(data.dims());
    for (double x : data.points[i]) out[i].push_back(to_fixed(x, scale_bits));
  }
  return out;
}

std::size_t assign(std::span<const Int> point, const Centroids& centroids) {
  if (centroids.empty()) throw std::invalid_argument("assign: no centroids");
  std::size_t best = 0;
  Rat best_d;
  Rat diff;
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    Rat dist = 0;
    for (std::size_t c = 0; c < point.size(); ++c) {
      diff = Rat(point[c]) - centroids[j][c];
      dist += diff * diff;
    }
    if (j == 0 || dist < best_d) {
      best = j;
      best_d = dist;
    }
  }
  return best;
}

std::size_t assign(std::span<const double> point,
                   const std::vector<std::vector<double>>& centroids) {
  if (centroids.empty()) throw std::invalid_argument("assign: no centroids");
  std::size_t best = 0;
  double best_d = 0;
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    double dist = 0;
    for (std::size_t c = 0; c < point.size(); ++c) {
      const double diff = point[c] - centroids[j][c];
      dist += diff * diff;
    }
    if (j == 0 || dist < best_d) {
      best = j;
      best_d = dist;
    }
  }
  return best;
}

Aggregate aggregate(const FixedPoint& points, std::span<const std::size_t> labels,
                    std::size_t k, const Centroids& previous) {
  if (labels.size() != points.size()) {
    throw std::invalid_argument("aggregate: label count mismatch");
  }
  const std::size_t d = points.empty() ? 0 : points[0].size();
  Aggregate agg;
  agg.sums.assign(k, std::vector<Int>(d, Int(0)));
  agg.sizes.assign(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t j = labels[i];
    if (j >= k) throw std::invalid_argument("aggregate: label out of range");
    for (std::size_t c = 0; c < d; ++c) agg.sums[j][c] += points[i][c];
    ++agg.sizes[j];
  }
  agg.centroids.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (agg.sizes[j] == 0) {
      if (j < previous.size()) {
        agg.centroids[j] = previous[j];
      } else {
        agg.centroids[j].assign(d, Rat(0));
      }
      continue;
    }
    agg.centroids[j].resize(d);
    const Int size(static_cast<unsigned long>(agg.sizes[j]));
    for (std::size_t c = 0; c < d; ++c) {
      agg.centroids[j][c] = Rat(agg.sums[j][c], size);
      agg.centroids[j][c].canonicalize();
    }
  }
  return agg;
}

KMeansTrace run_federated_kmeans(const FixedPoint& points,
                                 const KMeansConfig& config) {
  const std::size_t n = points.size();
  if (config.k == 0) throw std::invalid_argument("k must be at least 1");
  if (n < config.k) {
    throw std::invalid_argument("need at least k data points (n < k)");
  }
  if (config.t_max == 0) throw std::invalid_argument("t_max must be at least 1");

  KMeansTrace trace;
  trace.k = config.k;
  trace.scale_bits = config.scale_bits;
  if (config.initial_indices.empty()) {
    Rng rng(config.init_seed);
    trace.initial_indices = rng.sample_without_replacement(n, config.k);
  } else {
    if (config.initial_indices.size() != config.k) {
      throw std::invalid_argument("initial_indices must hold k entries");
    }
    for (std::size_t idx : config.initial_indices) {
      if (idx >= n) throw std::invalid_argument("initial index out of range");
    }
    trace.initial_indices = config.initial_indices;
  }
  Centroids current;
  for (std::size_t idx : trace.initial_indices) {
    std::vector<Rat> c(points[idx].begin(), points[idx].end());
    current.push_back(std::move(c));
  }
  trace.initial_centroids = current;

  std::vector<std::size_t> labels(n);
  for (std::size_t t = 0; t < config.t_max; ++t) {
    for (std::size_t i = 0; i < n; ++i) labels[i] = assign(points[i], current);
    Aggregate agg = aggregate(points, labels, config.k, current);
    trace.assignments.push_back(labels);
    trace.centroid_sums.push_back(std::move(agg.sums));
    trace.cluster_sizes.push_back(std::move(agg.sizes));
    current = agg.centroids;
    trace.centroids.push_back(std::move(agg.centroids));
  }
  return trace;
}

KMeansTrace run_federated_kmeans(const Dataset& data, const KMeansConfig& config) {
  return run_federated_kmeans(to_fixed(data, config.scale_bits), config);
}

Rat wcss(const FixedPoint& points, const KMeansTrace& trace, std::size_t t) {
  Rat total = 0;
  Rat diff;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& c = trace.centroids.at(t)[trace.assignments[t][i]];
    for (std::size_t d = 0; d < points[i].size(); ++d) {
      diff = Rat(points[i][d]) - c[d];
      total += diff * diff;
    }
  }
  return total;
}

WeightMatrix build_weight_matrix(const KMeansTrace& trace,
                                 std::span<const std::size_t> selected_iterations,
                                 std::span<const std::size_t> samples) {
  WeightMatrix out;
  out.selected_iterations.assign(selected_iterations.begin(),
                                 selected_iterations.end());
  if (samples.empty()) {
    const std::size_t n =
        trace.assignments.empty() ? 0 : trace.assignments[0].size();
    for (std::size_t i = 0; i < n; ++i) out.sample_indices.push_back(i);
  } else {
    out.sample_indices.assign(samples.begin(), samples.end());
  }
  const std::size_t cols = out.sample_indices.size();
  out.w = IntMatrix(trace.k * selected_iterations.size(), cols);
  std::size_t row = 0;
  for (std::size_t t : selected_iterations) {
    if (t >= trace.iterations()) {
      throw std::out_of_range("build_weight_matrix: iteration not recorded");
    }
    for (std::size_t j = 0; j < trace.k; ++j, ++row) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (trace.assignments[t][out.sample_indices[c]] == j) out.w(row, c) = 1;
      }
    }
  }
  return out;
}

HsspInstance kmeans_hssp_instance(const KMeansTrace& trace, const Dataset& data,
                                  const KMeansConfig& config,
                                  const KMeansInstanceOptions& options) {
  const std::size_t k = trace.k;
  if (k == 0 || trace.iterations() == 0) {
    throw std::invalid_argument("kmeans_hssp_instance: empty trace");
  }
  if (trace.scale_bits != config.scale_bits) {
    throw std::invalid_argument("kmeans_hssp_instance: scale_bits mismatch");
  }
  if (options.n == 0 || options.n > data.size()) {
    throw std::invalid_argument("kmeans_hssp_instance: n out of range");
  }
  if (config.coordinate >= data.dims()) {
    throw std::invalid_argument("kmeans_hssp_instance: coordinate out of range");
  }
  if (options.m == 0) throw std::invalid_argument("kmeans_hssp_instance: m = 0");

  Rng sample_rng(derive_seed(options.subsample_seed, 1));
  auto samples = sample_rng.sample_without_replacement(data.size(), options.n);
  std::sort(samples.begin(), samples.end());

  Rng row_rng(derive_seed(options.subsample_seed, 2));
  IntMatrix w;
  if (options.sampling == RowSampling::whole_iterations) {
    if (options.m % k != 0) {
      throw std::invalid_argument("m must be divisible by k");
    }
    const std::size_t t_sel = options.m / k;
    if (t_sel > trace.iterations()) {
      throw std::invalid_argument("m / k exceeds the recorded iterations");
    }
    auto iters = row_rng.sample_without_replacement(trace.iterations(), t_sel);
    std::sort(iters.begin(), iters.end());
    w = build_weight_matrix(trace, iters, samples).w;
  } else {
    const std::size_t total = k * trace.iterations();
    if (options.m > total) {
      throw std::invalid_argument("m exceeds the recorded observations");
    }
    auto picks = row_rng.sample_without_replacement(total, options.m);
    std::sort(picks.begin(), picks.end());
    w = IntMatrix(options.m, options.n);
    for (std::size_t r = 0; r < picks.size(); ++r) {
      const std::size_t t = picks[r] / k;
      const std::size_t j = picks[r] % k;
      for (std::size_t c = 0; c < options.n; ++c) {
        if (trace.assignments[t][samples[c]] == j) w(r, c) = 1;
      }
    }
  }

  IntVector x_int(options.n);
  Int max_abs = 0;
  for (std::size_t c = 0; c < options.n; ++c) {
    x_int[c] = to_fixed(data.points[samples[c]][config.coordinate],
                        config.scale_bits);
    max_abs = std::max<Int>(max_abs, abs(x_int[c]));
  }

  HsspInstance inst;
  inst.provenance = Provenance::kmeans;
  inst.n = options.n;
  inst.m = options.m;
  inst.k = k;
  inst.scale_bits = config.scale_bits;
  inst.row_sampling = options.sampling;
  inst.seed = options.subsample_seed;
  if (options.q) {
    inst.q = *options.q;
  } else {
    // Smallest prime above 4 n max|x|: no modular wraparound of any sum.
    Int bound = max_abs * 4 * static_cast<unsigned long>(options.n);
    Int q = bound;
    do {
      mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
    } while (mpz_probab_prime_p(q.get_mpz_t(), 40) == 0);
    inst.q = q;
  }
  inst.truth_weights = std::move(w);
  inst.truth_x.resize(options.n);
  for (std::size_t c = 0; c < options.n; ++c) {
    inst.truth_x[c] = mod_floor(x_int[c], inst.q);
  }
  inst.h = multiply(inst.truth_weights, inst.truth_x);
  for (auto& v : inst.h) v = mod_floor(v, inst.q);
  validate(inst);
  return inst;
}

std::string trace_to_json(const KMeansTrace& trace) {
  using ordered_json = nlohmann::ordered_json;
  auto rat_rows = [](const Centroids& cs) {
    ordered_json a = ordered_json::array();
    for (const auto& c : cs) {
      ordered_json row = ordered_json::array();
      for (const auto& v : c) row.push_back(v.get_str());
      a.push_back(std::move(row));
    }
    return a;
  };
  ordered_json j;
  j["k"] = trace.k;
  j["scale_bits"] = trace.scale_bits;
  j["iterations"] = trace.iterations();
  j["initial_indices"] = trace.initial_indices;
  j["initial_centroids"] = rat_rows(trace.initial_centroids);
  j["assignments"] = trace.assignments;
  ordered_json sums = ordered_json::array();
  for (const auto& it : trace.centroid_sums) {
    ordered_json block = ordered_json::array();
    for (const auto& c : it) {
      ordered_json row = ordered_json::array();
      for (const auto& v : c) row.push_back(v.get_str());
      block.push_back(std::move(row));
    }
    sums.push_back(std::move(block));
  }
  j["centroid_sums"] = std::move(sums);
  j["cluster_sizes"] = trace.cluster_sizes;
  ordered_json cents = ordered_json::array();
  for (const auto& it : trace.centroids) cents.push_back(rat_rows(it));
  j["centroids"] = std::move(cents);
  return j.dump(1) + "\n";
}

}  // namespace hssplab
