#include <lexreg/spatial.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <lexreg/csv.hpp>
#include <lexreg/error.hpp>
#include <lexreg/matrix_io.hpp>
#include <lexreg/parallel.hpp>

namespace lexreg {

using nlohmann::json;

json to_json(const weights_descriptor& d) {
  if (d.mode == weights_mode::knn) return json{{"mode", "knn"}, {"k", d.k}};
  return json{{"mode", "distance_band"}, {"band_km", d.band_km}};
}

weights_descriptor weights_descriptor_from_json(const json& j) {
  weights_descriptor d;
  auto mode = j.value("mode", std::string("knn"));
  if (mode == "knn") {
    d.mode = weights_mode::knn;
    d.k = j.value("k", 10);
  } else if (mode == "distance_band" || mode == "band") {
    d.mode = weights_mode::distance_band;
    d.band_km = j.value("band_km", 100.0);
  } else {
    fail(errc::invalid_config, "unknown weights mode '" + mode + "'");
  }
  return d;
}

bool proximity_matrix::contains(std::size_t c, std::size_t other) const {
  const auto& row = neighbors.at(c);
  return std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(other));
}

namespace {

std::vector<std::string> ids_of(std::span<const unit_geometry> units) {
  std::vector<std::string> ids;
  ids.reserve(units.size());
  for (const auto& u : units) ids.push_back(u.unit_id);
  return ids;
}

}  // namespace

proximity_matrix knn_weights(std::span<const unit_geometry> units, int k) {
  validate_geometry(units);
  const std::size_t n = units.size();
  require(k >= 0 && static_cast<std::size_t>(k) < n, errc::invalid_k,
          "k=" + std::to_string(k) + " requires more than k units (have " + std::to_string(n) + ")");
  proximity_matrix w;
  w.unit_ids = ids_of(units);
  w.neighbors.resize(n);
  w.descriptor = {weights_mode::knn, k, 0.0};
  const auto kk = static_cast<std::size_t>(k);

  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<std::pair<double, std::uint32_t>> candidates;
    for (std::size_t c = begin; c < end; ++c) {
      candidates.clear();
      for (std::size_t o = 0; o < n; ++o) {
        if (o != c) candidates.emplace_back(haversine_km(units[c], units[o]), static_cast<std::uint32_t>(o));
      }
      auto closer = [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return units[a.second].unit_id < units[b.second].unit_id;
      };
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(kk), candidates.end(),
                        closer);
      auto& row = w.neighbors[c];
      row.reserve(kk + 1);
      row.push_back(static_cast<std::uint32_t>(c));
      for (std::size_t i = 0; i < kk; ++i) row.push_back(candidates[i].second);
      std::sort(row.begin(), row.end());
    }
  });
  return w;
}

proximity_matrix distance_band_weights(std::span<const unit_geometry> units, double band_km) {
  validate_geometry(units);
  require(band_km > 0.0 && std::isfinite(band_km), errc::invalid_argument, "band_km must be positive");
  const std::size_t n = units.size();
  proximity_matrix w;
  w.unit_ids = ids_of(units);
  w.neighbors.resize(n);
  w.descriptor = {weights_mode::distance_band, 0, band_km};
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      auto& row = w.neighbors[c];
      for (std::size_t o = 0; o < n; ++o) {
        if (o == c || haversine_km(units[c], units[o]) <= band_km) row.push_back(static_cast<std::uint32_t>(o));
      }
    }
  });
  return w;
}

proximity_matrix build_weights(std::span<const unit_geometry> units, const weights_descriptor& descriptor) {
  if (descriptor.mode == weights_mode::knn) return knn_weights(units, descriptor.k);
  return distance_band_weights(units, descriptor.band_km);
}

void write_weights(const std::filesystem::path& csv_path, const std::filesystem::path& descriptor_path,
                   const proximity_matrix& weights) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    require(out.good(), errc::io_error, "cannot write " + csv_path.string());
    out << "unit_id,neighbor_id,weight\n";
    for (std::size_t c = 0; c < weights.size(); ++c) {
      auto unit = csv::quote(weights.unit_ids[c]);
      for (auto o : weights.neighbors[c]) out << unit << ',' << csv::quote(weights.unit_ids[o]) << ",1\n";
    }
  }
  json desc = to_json(weights.descriptor);
  desc["format"] = "lexreg.weights/1";
  desc["units"] = weights.unit_ids;
  std::ofstream out(descriptor_path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + descriptor_path.string());
  out << desc.dump(1) << '\n';
}

proximity_matrix read_weights(const std::filesystem::path& csv_path, const std::filesystem::path& descriptor_path) {
  std::ifstream desc_in(descriptor_path);
  require(desc_in.good(), errc::missing_artifact, "cannot open " + descriptor_path.string());
  proximity_matrix w;
  try {
    json desc = json::parse(desc_in);
    w.descriptor = weights_descriptor_from_json(desc);
    w.unit_ids = desc.at("units").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    fail(errc::parse_error, descriptor_path.string() + ": " + e.what());
  }
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < w.unit_ids.size(); ++i) index.emplace(w.unit_ids[i], i);
  w.neighbors.resize(w.unit_ids.size());
  std::ifstream in(csv_path, std::ios::binary);
  require(in.good(), errc::missing_artifact, "cannot open " + csv_path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line_no == 1) continue;
    auto f = csv::split(line);
    require(f.size() == 3, errc::parse_error, csv_path.string() + ":" + std::to_string(line_no) + ": bad row");
    auto a = index.find(f[0]);
    auto b = index.find(f[1]);
    require(a != index.end() && b != index.end(), errc::parse_error,
            csv_path.string() + ":" + std::to_string(line_no) + ": unknown unit");
    require(csv::parse_double(f[2]) == 1.0, errc::parse_error, "only binary weights are supported");
    w.neighbors[a->second].push_back(b->second);
  }
  for (std::size_t c = 0; c < w.neighbors.size(); ++c) {
    auto& row = w.neighbors[c];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    require(std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(c)), errc::parse_error,
            "weights row for '" + w.unit_ids[c] + "' lacks the self weight");
  }
  return w;
}

hotspot_matrix getis_ord(const Eigen::MatrixXd& frequencies, std::span<const std::string> unit_ids,
                         std::span<const std::string> vocabulary, const proximity_matrix& weights) {
  const auto n = static_cast<std::size_t>(frequencies.rows());
  const auto n_words = frequencies.cols();
  require(n >= 2, errc::insufficient_units, "G* needs at least 2 units");
  require(unit_ids.size() == n && weights.size() == n, errc::order_mismatch,
          "frequency rows, unit ids and weights must have the same length");
  for (std::size_t c = 0; c < n; ++c) {
    require(unit_ids[c] == weights.unit_ids[c], errc::order_mismatch,
            "unit order differs at row " + std::to_string(c) + ": '" + unit_ids[c] + "' vs '" +
              weights.unit_ids[c] + "'");
  }
  require(vocabulary.size() == static_cast<std::size_t>(n_words), errc::invalid_argument,
          "vocabulary length does not match frequency columns");

  const double nd = static_cast<double>(n);
  // sqrt((N sum W^2 - (sum W)^2) / (N - 1)); binary weights make sum W^2 = sum W.
  std::vector<double> spread(n);
  for (std::size_t c = 0; c < n; ++c) {
    double s1 = static_cast<double>(weights.row_sum(c));
    double term = (nd * s1 - s1 * s1) / (nd - 1.0);
    spread[c] = term > 0.0 ? std::sqrt(term) : 0.0;
  }

  // Sums run in unit-id order so a permuted input gives identical bits.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return unit_ids[a] < unit_ids[b]; });
  std::vector<std::vector<std::uint32_t>> ordered_neighbors(weights.neighbors);
  for (auto& row : ordered_neighbors)
    std::sort(row.begin(), row.end(), [&](std::uint32_t a, std::uint32_t b) { return unit_ids[a] < unit_ids[b]; });

  hotspot_matrix h;
  h.unit_ids.assign(unit_ids.begin(), unit_ids.end());
  h.vocabulary.assign(vocabulary.begin(), vocabulary.end());
  h.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), n_words);
  h.means = Eigen::VectorXd::Zero(n_words);
  h.stddevs = Eigen::VectorXd::Zero(n_words);

  parallel_for(static_cast<std::size_t>(n_words), [&](std::size_t begin, std::size_t end) {
    std::vector<double> dev(n);
    for (auto w = static_cast<Eigen::Index>(begin); w < static_cast<Eigen::Index>(end); ++w) {
      auto col = frequencies.col(w);
      double sum = 0.0;
      bool constant = true;
      for (auto c : order) {
        double v = col(static_cast<Eigen::Index>(c));
        sum += v;
        constant = constant && v == col(0);
      }
      double mean = sum / nd;
      if (constant) {
        h.means(w) = col(0);
        continue;
      }
      double ss = 0.0;
      for (auto c : order) {
        dev[c] = col(static_cast<Eigen::Index>(c)) - mean;
        ss += dev[c] * dev[c];
      }
      double sd = std::sqrt(ss / nd);
      h.means(w) = mean;
      h.stddevs(w) = sd;
      if (!(sd > 0.0)) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (spread[c] == 0.0) continue;
        double num = 0.0;
        for (auto o : ordered_neighbors[c]) num += dev[o];
        h.values(static_cast<Eigen::Index>(c), w) = num / (sd * spread[c]);
      }
    }
  });
  return h;
}

void write_hotspots(const std::filesystem::path& path, const hotspot_matrix& h) {
  json header{
    {"kind", "hotspots"},
    {"units", h.unit_ids},
    {"vocabulary", h.vocabulary},
    {"means", std::vector<double>(h.means.data(), h.means.data() + h.means.size())},
    {"stddevs", std::vector<double>(h.stddevs.data(), h.stddevs.data() + h.stddevs.size())},
  };
  write_matrix(path, h.values, std::move(header));
}

hotspot_matrix read_hotspots(const std::filesystem::path& path) {
  auto file = read_matrix(path);
  hotspot_matrix h;
  try {
    require(file.header.value("kind", "") == "hotspots", errc::parse_error, path.string() + " is not a hotspot matrix");
    h.unit_ids = file.header.at("units").get<std::vector<std::string>>();
    h.vocabulary = file.header.at("vocabulary").get<std::vector<std::string>>();
    auto means = file.header.at("means").get<std::vector<double>>();
    auto sds = file.header.at("stddevs").get<std::vector<double>>();
    h.means = Eigen::Map<Eigen::VectorXd>(means.data(), static_cast<Eigen::Index>(means.size()));
    h.stddevs = Eigen::Map<Eigen::VectorXd>(sds.data(), static_cast<Eigen::Index>(sds.size()));
  } catch (const json::exception& e) {
    fail(errc::parse_error, path.string() + ": " + e.what());
  }
  h.values = std::move(file.values);
  require(h.values.rows() == static_cast<Eigen::Index>(h.unit_ids.size()) &&
            h.values.cols() == static_cast<Eigen::Index>(h.vocabulary.size()),
          errc::parse_error, path.string() + ": header does not match payload shape");
  return h;
}

void write_word_column(const std::filesystem::path& path, const hotspot_matrix& h, const std::string& word) {
  auto it = std::find(h.vocabulary.begin(), h.vocabulary.end(), word);
  require(it != h.vocabulary.end(), errc::invalid_argument, "word '" + word + "' is not in the vocabulary");
  auto w = static_cast<Eigen::Index>(it - h.vocabulary.begin());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << "unit_id,gstar\n";
  for (std::size_t c = 0; c < h.unit_ids.size(); ++c)
    out << csv::quote(h.unit_ids[c]) << ',' << csv::format_double(h.values(static_cast<Eigen::Index>(c), w)) << '\n';
}

}  // namespace lexreg
