#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include <lexreg/clustering.hpp>
#include <lexreg/corpus.hpp>
#include <lexreg/spatial.hpp>
#include <lexreg/timestamp.hpp>

namespace lexreg {

// Half-open interval [start, end).
struct period {
  std::string label;
  instant start{};
  instant end{};
};

struct period_spec {
  std::vector<period> periods;

  // start < end for every period, no overlaps, unique labels.
  void validate() const;
};

nlohmann::json to_json(const period_spec& spec);
// Array of {"label", "start", "end"} with ISO-8601 instants.
period_spec period_spec_from_json(const nlohmann::json& j);

struct period_split {
  // One stream per period, in spec order.
  std::vector<std::vector<geo_document>> streams;
  std::size_t dropped = 0;
};

period_split split_periods(std::span<const geo_document> docs, const period_spec& spec);

struct pair_sampling {
  // Pairs between any two different clusters instead of requiring a 2-way cut.
  bool allow_k_way = false;
  // 0 keeps every pair; otherwise a seeded sample without replacement.
  std::size_t max_pairs = 0;
  std::uint64_t seed = 0;
};

struct inter_cluster_result {
  std::vector<double> distances;
  // Reference units absent from the period matrix.
  std::vector<std::string> missing_units;
};

// Euclidean distances between G* rows of units in different reference
// clusters, pairs enumerated cluster-1 unit major.
inter_cluster_result inter_cluster_distances(const hotspot_matrix& hotspots, const cluster_assignment& reference,
                                             const pair_sampling& sampling = {});

struct distribution_stats {
  std::string label;
  std::size_t count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
};

// Linear-interpolation quantile (position (n - 1) p) of sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

// Quartiles plus whiskers at the most extreme data points inside
// [q1 - 1.5 IQR, q3 + 1.5 IQR].
distribution_stats boxplot_stats(std::span<const double> values, std::string label = {});

// CSV `period,count,median,q1,q3,whisker_low,whisker_high`.
void write_distribution_stats(const std::filesystem::path& path, std::span<const distribution_stats> stats);

}  // namespace lexreg
