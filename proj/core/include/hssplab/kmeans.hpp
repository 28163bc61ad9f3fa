#pragma once

// Federated K-means (Lloyd) simulator. Every node holds one data point; the
// coordinator only sees per-cluster sums. The simulator records those sums
// for every iteration and turns them into hidden subset sum instances.
//
// Clustering runs on fixed-point integers (x * 2^scale_bits, rounded) so the
// centroid sums are exact; centroids are exact rationals. Cluster indices are
// 0-based throughout.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hssplab/exactmath.hpp"
#include "hssplab/hssp.hpp"

namespace hssplab {

struct Dataset {
  std::vector<std::vector<double>> points;  // n rows x d attributes
  std::vector<std::string> labels;          // empty when absent
  std::vector<std::string> attribute_names; // empty when no header

  std::size_t size() const { return points.size(); }
  std::size_t dims() const { return points.empty() ? 0 : points[0].size(); }
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV, comma separated. A first row containing any non-numeric cell is a
// header. A trailing non-numeric column is the class label.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);

// Zero mean, unit (population) variance per attribute; constant attributes
// are only centred.
Dataset standardize(const Dataset& data);

struct KMeansConfig {
  std::size_t k = 3;
  std::size_t t_max = 100;
  std::uint64_t init_seed = 0;
  std::size_t coordinate = 0;  // attribute carried as the HSSP payload
  std::size_t scale_bits = 16;
  // Overrides the seeded draw of initial centroids (data point indices).
  std::vector<std::size_t> initial_indices;
};

using FixedPoint = std::vector<std::vector<Int>>;
using Centroids = std::vector<std::vector<Rat>>;

// round(x * 2^scale_bits), halves away from zero.
Int to_fixed(double x, std::size_t scale_bits);
FixedPoint to_fixed(const Dataset& data, std::size_t scale_bits);

struct KMeansTrace {
  std::size_t k = 0;
  std::size_t scale_bits = 0;
  Centroids initial_centroids;
  std::vector<std::size_t> initial_indices;
  // Indexed [t][i], [t][j][dim], [t][j], [t][j][dim]. centroids[t] are the
  // centroids after aggregating iteration t.
  std::vector<std::vector<std::size_t>> assignments;
  std::vector<std::vector<std::vector<Int>>> centroid_sums;
  std::vector<std::vector<std::size_t>> cluster_sizes;
  std::vector<Centroids> centroids;

  std::size_t iterations() const { return assignments.size(); }
};

// Nearest centroid by squared Euclidean distance; ties go to the lowest
// index.
std::size_t assign(std::span<const Int> point, const Centroids& centroids);
std::size_t assign(std::span<const double> point,
                   const std::vector<std::vector<double>>& centroids);

struct Aggregate {
  std::vector<std::vector<Int>> sums;
  std::vector<std::size_t> sizes;
  Centroids centroids;
};

// Per-cluster sums and sizes; an empty cluster keeps its previous centroid.
Aggregate aggregate(const FixedPoint& points, std::span<const std::size_t> labels,
                    std::size_t k, const Centroids& previous);

// Exactly t_max iterations, no early stopping. Initial centroids are k
// distinct data points drawn with init_seed unless config.initial_indices
// is set. Throws if n < k.
KMeansTrace run_federated_kmeans(const Dataset& data, const KMeansConfig& config);
KMeansTrace run_federated_kmeans(const FixedPoint& points,
                                 const KMeansConfig& config);

// Within-cluster sum of squares after iteration t, in fixed-point units
// squared.
Rat wcss(const FixedPoint& points, const KMeansTrace& trace, std::size_t t);

struct WeightMatrix {
  IntMatrix w;  // (k * |selected|) x |samples|
  std::vector<std::size_t> selected_iterations;
  std::vector<std::size_t> sample_indices;
};

// Row (t, j) holds 1 in column i iff sample i was in cluster j at iteration
// t; rows are iteration-major, cluster-minor. Empty `samples` means all.
WeightMatrix build_weight_matrix(const KMeansTrace& trace,
                                 std::span<const std::size_t> selected_iterations,
                                 std::span<const std::size_t> samples = {});

struct KMeansInstanceOptions {
  std::size_t n = 10;  // samples kept as hidden data
  std::size_t m = 60;  // observations kept
  std::optional<Int> q;  // absent: smallest prime > 4 n max|x_int|
  std::uint64_t subsample_seed = 0;
  RowSampling sampling = RowSampling::whole_iterations;
};

// Subsamples n samples and m observations from a trace and packages
// h = W x (mod Q) as an HSSP instance.
HsspInstance kmeans_hssp_instance(const KMeansTrace& trace, const Dataset& data,
                                  const KMeansConfig& config,
                                  const KMeansInstanceOptions& options);

std::string trace_to_json(const KMeansTrace& trace);

}  // namespace hssplab
