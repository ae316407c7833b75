#include <lexreg/temporal.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <lexreg/csv.hpp>
#include <lexreg/error.hpp>
#include <lexreg/parallel.hpp>

namespace lexreg {

using nlohmann::json;

void period_spec::validate() const {
  require(!periods.empty(), errc::invalid_spec, "period spec is empty");
  std::set<std::string> labels;
  for (const auto& p : periods) {
    require(p.start < p.end, errc::invalid_spec, "period '" + p.label + "' does not start before it ends");
    require(labels.insert(p.label).second, errc::invalid_spec, "duplicate period label '" + p.label + "'");
  }
  std::vector<const period*> sorted;
  for (const auto& p : periods) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->start < b->start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    require(sorted[i - 1]->end <= sorted[i]->start, errc::invalid_spec,
            "periods '" + sorted[i - 1]->label + "' and '" + sorted[i]->label + "' overlap");
  }
}

json to_json(const period_spec& spec) {
  json out = json::array();
  for (const auto& p : spec.periods)
    out.push_back({{"label", p.label}, {"start", format_iso8601(p.start)}, {"end", format_iso8601(p.end)}});
  return out;
}

period_spec period_spec_from_json(const json& j) {
  period_spec spec;
  try {
    for (const auto& item : j) {
      spec.periods.push_back({item.at("label").get<std::string>(), parse_iso8601(item.at("start").get<std::string>()),
                              parse_iso8601(item.at("end").get<std::string>())});
    }
  } catch (const json::exception& e) {
    fail(errc::invalid_spec, e.what());
  }
  return spec;
}

period_split split_periods(std::span<const geo_document> docs, const period_spec& spec) {
  spec.validate();
  period_split out;
  out.streams.resize(spec.periods.size());
  for (const auto& d : docs) {
    bool routed = false;
    for (std::size_t i = 0; i < spec.periods.size() && !routed; ++i) {
      const auto& p = spec.periods[i];
      if (d.timestamp >= p.start && d.timestamp < p.end) {
        out.streams[i].push_back(d);
        routed = true;
      }
    }
    if (!routed) ++out.dropped;
  }
  return out;
}

inter_cluster_result inter_cluster_distances(const hotspot_matrix& hotspots, const cluster_assignment& reference,
                                             const pair_sampling& sampling) {
  require(sampling.allow_k_way ? reference.n_clusters >= 2 : reference.n_clusters == 2, errc::invalid_argument,
          "reference assignment must be a 2-way cut (got " + std::to_string(reference.n_clusters) + " clusters)");
  require(reference.unit_ids.size() == reference.labels.size(), errc::invalid_argument,
          "reference assignment lacks unit ids");

  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t i = 0; i < hotspots.unit_ids.size(); ++i)
    row_of.emplace(hotspots.unit_ids[i], static_cast<Eigen::Index>(i));

  inter_cluster_result result;
  std::vector<std::pair<Eigen::Index, int>> present;
  for (std::size_t i = 0; i < reference.unit_ids.size(); ++i) {
    auto it = row_of.find(reference.unit_ids[i]);
    if (it == row_of.end()) {
      result.missing_units.push_back(reference.unit_ids[i]);
      continue;
    }
    present.emplace_back(it->second, reference.labels[i]);
  }

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (std::size_t i = 0; i < present.size(); ++i) {
    for (std::size_t j = 0; j < present.size(); ++j) {
      auto [ri, li] = present[i];
      auto [rj, lj] = present[j];
      if (li < lj) pairs.emplace_back(ri, rj);
    }
  }
  // Non-2-way pairs are emitted (lower label, higher label); for the 2-way
  // cut this is cluster 1 x cluster 2.
  if (sampling.max_pairs > 0 && pairs.size() > sampling.max_pairs) {
    std::mt19937_64 rng(sampling.seed);
    // Floyd's algorithm: a uniform subset of indices without replacement.
    std::unordered_set<std::size_t> chosen;
    const std::size_t total = pairs.size();
    for (std::size_t j = total - sampling.max_pairs; j < total; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, j);
      std::size_t t = pick(rng);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::size_t> idx(chosen.begin(), chosen.end());
    std::sort(idx.begin(), idx.end());
    std::vector<std::pair<Eigen::Index, Eigen::Index>> sampled;
    sampled.reserve(idx.size());
    for (auto i : idx) sampled.push_back(pairs[i]);
    pairs = std::move(sampled);
  }

  result.distances.resize(pairs.size());
  const auto& g = hotspots.values;
  parallel_for(pairs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      auto [a, b] = pairs[p];
      double ss = 0.0;
      for (Eigen::Index w = 0; w < g.cols(); ++w) {
        double d = g(a, w) - g(b, w);
        ss += d * d;
      }
      result.distances[p] = std::sqrt(ss);
    }
  });
  return result;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  require(!sorted.empty(), errc::empty_input, "quantile of an empty sample");
  double pos = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

distribution_stats boxplot_stats(std::span<const double> values, std::string label) {
  require(!values.empty(), errc::empty_input, "boxplot statistics of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  distribution_stats s;
  s.label = std::move(label);
  s.count = sorted.size();
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  double iqr = s.q3 - s.q1;
  double low_fence = s.q1 - 1.5 * iqr;
  double high_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = *std::lower_bound(sorted.begin(), sorted.end(), low_fence);
  s.whisker_high = *(std::upper_bound(sorted.begin(), sorted.end(), high_fence) - 1);
  return s;
}

void write_distribution_stats(const std::filesystem::path& path, std::span<const distribution_stats> stats) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << "period,count,median,q1,q3,whisker_low,whisker_high\n";
  for (const auto& s : stats) {
    out << csv::quote(s.label) << ',' << s.count << ',' << csv::format_double(s.median) << ','
        << csv::format_double(s.q1) << ',' << csv::format_double(s.q3) << ',' << csv::format_double(s.whisker_low)
        << ',' << csv::format_double(s.whisker_high) << '\n';
  }
}

}  // namespace lexreg
