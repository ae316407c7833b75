#include <lexreg/clustering.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

#include <lexreg/csv.hpp>
#include <lexreg/error.hpp>
#include <lexreg/parallel.hpp>

namespace lexreg {

using nlohmann::json;

namespace {

struct pair_key {
  double distance;
  std::size_t lo;
  std::size_t hi;

  bool operator<(const pair_key& o) const { return std::tie(distance, lo, hi) < std::tie(o.distance, o.lo, o.hi); }
};

}  // namespace

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  // Row-major access to points keeps the inner loop contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> p = points;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    for (auto i = static_cast<Eigen::Index>(begin); i < static_cast<Eigen::Index>(end); ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) d(j, i) = (p.row(i) - p.row(j)).norm();
    }
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i);
  return d;
}

linkage_tree ward_linkage(const Eigen::MatrixXd& points) {
  const auto n = static_cast<std::size_t>(points.rows());
  require(n >= 2, errc::insufficient_units, "Ward linkage needs at least 2 points");
  require(points.allFinite(), errc::non_finite_input, "linkage input contains NaN or infinity");

  Eigen::MatrixXd dist = pairwise_distances(points);
  std::vector<std::size_t> node(n), size(n, 1), nn(n);
  std::vector<bool> active(n, true);
  std::iota(node.begin(), node.end(), std::size_t{0});

  auto key = [&](std::size_t i, std::size_t j) {
    auto a = node[i], b = node[j];
    return pair_key{dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), std::min(a, b), std::max(a, b)};
  };
  auto refresh = [&](std::size_t i) {
    bool found = false;
    pair_key best{};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      auto k = key(i, j);
      if (!found || k < best) {
        best = k;
        nn[i] = j;
        found = true;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  linkage_tree tree;
  tree.n_leaves = n;
  tree.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = n;
    pair_key best{};
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      auto k = key(i, nn[i]);
      if (a == n || k < best) {
        best = k;
        a = i;
      }
    }
    std::size_t b = nn[a];
    const double d_ab = best.distance;
    const double na = static_cast<double>(size[a]), nb = static_cast<double>(size[b]);
    tree.merges.push_back({best.lo, best.hi, d_ab, size[a] + size[b]});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double nk = static_cast<double>(size[k]);
      const auto ka = static_cast<Eigen::Index>(k);
      double d_ak = dist(ka, static_cast<Eigen::Index>(a));
      double d_bk = dist(ka, static_cast<Eigen::Index>(b));
      double sq = ((na + nk) * d_ak * d_ak + (nb + nk) * d_bk * d_bk - nk * d_ab * d_ab) / (na + nb + nk);
      double updated = std::sqrt(std::max(0.0, sq));
      dist(ka, static_cast<Eigen::Index>(a)) = dist(static_cast<Eigen::Index>(a), ka) = updated;
    }
    active[b] = false;
    node[a] = n + step;
    size[a] += size[b];

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      if (nn[k] == a || nn[k] == b) {
        refresh(k);
      } else if (key(k, a) < key(k, nn[k])) {
        nn[k] = a;
      }
    }
    if (step + 2 < n) refresh(a);
  }

  // Dendrogram leaf order by depth-first traversal from the root.
  std::vector<std::size_t> stack{2 * n - 2};
  tree.leaf_order.reserve(n);
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    if (id < n) {
      tree.leaf_order.push_back(id);
      continue;
    }
    const auto& m = tree.merges[id - n];
    stack.push_back(m.right);
    stack.push_back(m.left);
  }
  return tree;
}

std::vector<std::size_t> cluster_assignment::members(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) out.push_back(i);
  return out;
}

std::vector<int> canonicalize_labels(std::span<const int> labels) {
  std::unordered_map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()) + 1);
    out.push_back(it->second);
  }
  return out;
}

cluster_assignment cut_tree(const linkage_tree& tree, int n_clusters) {
  const std::size_t n = tree.n_leaves;
  require(n_clusters >= 1 && static_cast<std::size_t>(n_clusters) <= n, errc::invalid_argument,
          "n_clusters=" + std::to_string(n_clusters) + " outside 1.." + std::to_string(n));
  require(tree.merges.size() + 1 == n, errc::invalid_argument, "linkage tree is incomplete");
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const std::size_t applied = n - static_cast<std::size_t>(n_clusters);
  for (std::size_t i = 0; i < applied; ++i) {
    parent[tree.merges[i].left] = n + i;
    parent[tree.merges[i].right] = n + i;
  }
  std::vector<int> raw(n);
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    std::size_t r = leaf;
    while (parent[r] != r) r = parent[r];
    raw[leaf] = static_cast<int>(r);
  }
  cluster_assignment out;
  out.n_clusters = n_clusters;
  out.labels = canonicalize_labels(raw);
  return out;
}

double silhouette_from_distances(const Eigen::MatrixXd& distances, std::span<const int> labels, int n_clusters) {
  require(n_clusters >= 2, errc::invalid_argument, "silhouette needs at least 2 clusters");
  const auto n = labels.size();
  require(static_cast<std::size_t>(distances.rows()) == n, errc::invalid_argument, "label count mismatch");
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_clusters), 0);
  for (int l : labels) {
    require(l >= 1 && l <= n_clusters, errc::invalid_argument, "label out of range");
    ++counts[static_cast<std::size_t>(l - 1)];
  }
  for (auto c : counts) require(c > 0, errc::invalid_argument, "empty cluster");

  std::vector<double> width(n, 0.0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> sums(static_cast<std::size_t>(n_clusters));
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(sums.begin(), sums.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j)
        sums[static_cast<std::size_t>(labels[j] - 1)] += distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      auto own = static_cast<std::size_t>(labels[i] - 1);
      if (counts[own] <= 1) continue;
      double a = sums[own] / static_cast<double>(counts[own] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < sums.size(); ++c)
        if (c != own) b = std::min(b, sums[c] / static_cast<double>(counts[c]));
      double denom = std::max(a, b);
      width[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
  });
  double total = 0.0;
  for (double s : width) total += s;
  return total / static_cast<double>(n);
}

double silhouette(const Eigen::MatrixXd& points, const cluster_assignment& assignment) {
  require(assignment.n_clusters >= 2, errc::invalid_argument, "silhouette needs at least 2 clusters");
  require(static_cast<std::size_t>(points.rows()) == assignment.labels.size(), errc::invalid_argument,
          "point count does not match assignment");
  return silhouette_from_distances(pairwise_distances(points), assignment.labels, assignment.n_clusters);
}

std::vector<sweep_entry> silhouette_sweep(const linkage_tree& tree, const Eigen::MatrixXd& points, int n_min,
                                          int n_max) {
  require(n_min >= 2 && n_min <= n_max && static_cast<std::size_t>(n_max) <= tree.n_leaves, errc::invalid_argument,
          "sweep bounds must satisfy 2 <= n_min <= n_max <= N");
  require(static_cast<std::size_t>(points.rows()) == tree.n_leaves, errc::invalid_argument,
          "point count does not match the tree");
  Eigen::MatrixXd d = pairwise_distances(points);
  std::vector<sweep_entry> out;
  for (int k = n_min; k <= n_max; ++k) {
    auto cut = cut_tree(tree, k);
    out.push_back({k, silhouette_from_distances(d, cut.labels, k)});
  }
  return out;
}

namespace {

// Maps hotspot rows to assignment labels, by unit id when the assignment has them.
std::vector<int> labels_for(const hotspot_matrix& h, const cluster_assignment& a) {
  if (a.unit_ids.empty()) {
    require(a.labels.size() == h.unit_ids.size(), errc::order_mismatch, "assignment does not cover the hotspot units");
    return a.labels;
  }
  std::unordered_map<std::string, int> by_id;
  for (std::size_t i = 0; i < a.unit_ids.size(); ++i) by_id.emplace(a.unit_ids[i], a.labels[i]);
  std::vector<int> out;
  out.reserve(h.unit_ids.size());
  for (const auto& id : h.unit_ids) {
    auto it = by_id.find(id);
    require(it != by_id.end(), errc::order_mismatch, "unit '" + id + "' has no cluster label");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

specificity_table specificity(const hotspot_matrix& hotspots, const cluster_assignment& assignment) {
  const int k = assignment.n_clusters;
  require(k >= 2, errc::invalid_argument, "specificity needs at least 2 clusters");
  auto labels = labels_for(hotspots, assignment);
  const Eigen::Index n_words = hotspots.values.cols();

  std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
  for (int l : labels) {
    require(l >= 1 && l <= k, errc::invalid_argument, "label out of range");
    counts[static_cast<std::size_t>(l - 1)] += 1.0;
  }
  for (double c : counts) require(c > 0.0, errc::invalid_argument, "empty cluster");

  specificity_table t;
  t.vocabulary = hotspots.vocabulary;
  t.n_clusters = k;
  t.cluster_means = Eigen::MatrixXd::Zero(k, n_words);
  t.values = Eigen::MatrixXd::Zero(k, n_words);
  t.signs = Eigen::MatrixXi::Zero(k, n_words);

  parallel_for(static_cast<std::size_t>(n_words), [&](std::size_t begin, std::size_t end) {
    for (auto w = static_cast<Eigen::Index>(begin); w < static_cast<Eigen::Index>(end); ++w) {
      for (std::size_t c = 0; c < labels.size(); ++c)
        t.cluster_means(labels[c] - 1, w) += hotspots.values(static_cast<Eigen::Index>(c), w);
      for (int C = 0; C < k; ++C) t.cluster_means(C, w) /= counts[static_cast<std::size_t>(C)];
      for (int C = 0; C < k; ++C) {
        double best = std::numeric_limits<double>::infinity();
        double gap = 0.0;
        for (int other = 0; other < k; ++other) {
          if (other == C) continue;
          double diff = t.cluster_means(C, w) - t.cluster_means(other, w);
          if (diff * diff < best) {
            best = diff * diff;
            gap = diff;
          }
        }
        t.values(C, w) = best;
        t.signs(C, w) = (gap > 0.0) - (gap < 0.0);
      }
    }
  });

  t.ranked.resize(static_cast<std::size_t>(k));
  for (int C = 0; C < k; ++C) {
    auto& r = t.ranked[static_cast<std::size_t>(C)];
    r.resize(static_cast<std::size_t>(n_words));
    std::iota(r.begin(), r.end(), std::size_t{0});
    std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) {
      return t.values(C, static_cast<Eigen::Index>(a)) > t.values(C, static_cast<Eigen::Index>(b));
    });
  }
  return t;
}

std::vector<characteristic_word> characteristic_words(const specificity_table& table, int cluster, int k) {
  require(cluster >= 1 && cluster <= table.n_clusters, errc::invalid_argument,
          "cluster " + std::to_string(cluster) + " outside 1.." + std::to_string(table.n_clusters));
  require(k >= 1, errc::invalid_argument, "k must be at least 1");
  const auto& ranked = table.ranked[static_cast<std::size_t>(cluster - 1)];
  std::vector<characteristic_word> out;
  for (std::size_t i = 0; i < ranked.size() && out.size() < static_cast<std::size_t>(k); ++i) {
    auto w = static_cast<Eigen::Index>(ranked[i]);
    out.push_back({table.vocabulary.at(ranked[i]), table.values(cluster - 1, w), table.signs(cluster - 1, w)});
  }
  return out;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  require(a.size() == b.size(), errc::invalid_argument, "partitions differ in length");
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [cell, count] : table) index += comb2(count);
  for (const auto& [l, count] : rows) sum_rows += comb2(count);
  for (const auto& [l, count] : cols) sum_cols += comb2(count);
  double expected = sum_rows * sum_cols / comb2(n);
  double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

void write_linkage(const std::filesystem::path& path, const linkage_tree& tree) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << "step,left,right,distance,size\n";
  for (std::size_t i = 0; i < tree.merges.size(); ++i) {
    const auto& m = tree.merges[i];
    out << i << ',' << m.left << ',' << m.right << ',' << csv::format_double(m.distance) << ',' << m.size << '\n';
  }
}

linkage_tree read_linkage(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::missing_artifact, "cannot open " + path.string());
  linkage_tree tree;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line_no == 1) continue;
    auto f = csv::split(line);
    require(f.size() == 5, errc::parse_error, path.string() + ":" + std::to_string(line_no) + ": bad merge row");
    tree.merges.push_back({csv::parse_uint(f[1]), csv::parse_uint(f[2]), csv::parse_double(f[3]), csv::parse_uint(f[4])});
  }
  tree.n_leaves = tree.merges.size() + 1;
  std::vector<std::size_t> stack{2 * tree.n_leaves - 2};
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    if (id < tree.n_leaves) {
      tree.leaf_order.push_back(id);
      continue;
    }
    require(id - tree.n_leaves < tree.merges.size(), errc::parse_error, path.string() + ": invalid node id");
    const auto& m = tree.merges[id - tree.n_leaves];
    require(m.left < id && m.right < id, errc::parse_error, path.string() + ": merges out of order");
    stack.push_back(m.right);
    stack.push_back(m.left);
  }
  return tree;
}

void write_assignment(const std::filesystem::path& path, const cluster_assignment& assignment) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << "unit_id,cluster\n";
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    auto id = i < assignment.unit_ids.size() ? assignment.unit_ids[i] : std::to_string(i);
    out << csv::quote(id) << ',' << assignment.labels[i] << '\n';
  }
}

cluster_assignment read_assignment(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::missing_artifact, "cannot open " + path.string());
  cluster_assignment a;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line_no == 1) continue;
    auto f = csv::split(line);
    require(f.size() == 2, errc::parse_error, path.string() + ":" + std::to_string(line_no) + ": bad row");
    a.unit_ids.push_back(f[0]);
    a.labels.push_back(static_cast<int>(csv::parse_uint(f[1])));
  }
  a.labels = canonicalize_labels(a.labels);
  a.n_clusters = a.labels.empty() ? 0 : *std::max_element(a.labels.begin(), a.labels.end());
  return a;
}

namespace {

json ring_json(const ring& r) {
  json out = json::array();
  for (auto [lon, lat] : r) out.push_back({lon, lat});
  return out;
}

json polygon_geometry(const unit_polygon& p) {
  auto rings = [](const std::vector<ring>& part) {
    json out = json::array();
    for (const auto& r : part) out.push_back(ring_json(r));
    return out;
  };
  if (p.parts.size() == 1) return json{{"type", "Polygon"}, {"coordinates", rings(p.parts.front())}};
  json coords = json::array();
  for (const auto& part : p.parts) coords.push_back(rings(part));
  return json{{"type", "MultiPolygon"}, {"coordinates", coords}};
}

}  // namespace

void write_assignment_geojson(const std::filesystem::path& path, const cluster_assignment& assignment,
                              std::span<const unit_geometry> centroids, const polygon_index* polygons) {
  std::unordered_map<std::string, const unit_geometry*> by_id;
  for (const auto& u : centroids) by_id.emplace(u.unit_id, &u);
  json features = json::array();
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    const auto& id = assignment.unit_ids.at(i);
    json geometry = nullptr;
    const unit_polygon* poly = polygons ? polygons->find(id) : nullptr;
    if (poly) {
      geometry = polygon_geometry(*poly);
    } else if (auto it = by_id.find(id); it != by_id.end()) {
      geometry = json{{"type", "Point"}, {"coordinates", {it->second->longitude, it->second->latitude}}};
    }
    features.push_back(json{{"type", "Feature"},
                            {"properties", {{"unit_id", id}, {"cluster", assignment.labels[i]}}},
                            {"geometry", geometry}});
  }
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << json{{"type", "FeatureCollection"}, {"features", features}}.dump() << '\n';
}

void write_specificity(const std::filesystem::path& path, const specificity_table& table, int cluster,
                       std::size_t k) {
  auto words = characteristic_words(table, cluster, static_cast<int>(std::max<std::size_t>(1, k)));
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << "rank,word,specificity,sign\n";
  for (std::size_t i = 0; i < words.size(); ++i)
    out << i + 1 << ',' << csv::quote(words[i].word) << ',' << csv::format_double(words[i].specificity) << ','
        << words[i].sign << '\n';
}

void write_sweep(const std::filesystem::path& path, std::span<const sweep_entry> sweep) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << "n_clusters,silhouette\n";
  for (const auto& e : sweep) out << e.n_clusters << ',' << csv::format_double(e.score) << '\n';
}

}  // namespace lexreg
