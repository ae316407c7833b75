#include <doctest.h>

#include <random>

#include <lexreg/clustering.hpp>
#include <lexreg/error.hpp>

#include "oracles.hpp"

using namespace lexreg;

namespace {

Eigen::MatrixXd random_points(std::mt19937_64& rng, int n, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  return x;
}

Eigen::MatrixXd blobs(std::mt19937_64& rng, int per_blob, double spread) {
  std::normal_distribution<double> noise(0.0, spread);
  const double centers[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {5.0, 8.5}};
  Eigen::MatrixXd x(3 * per_blob, 2);
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < per_blob; ++i) {
      x(b * per_blob + i, 0) = centers[b][0] + noise(rng);
      x(b * per_blob + i, 1) = centers[b][1] + noise(rng);
    }
  return x;
}

// Same partition regardless of label names.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  return canonicalize_labels(a) == canonicalize_labels(b);
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("two points") {
    Eigen::MatrixXd x(2, 2);
    x << 0, 0, 3, 4;
    auto t = ward_linkage(x);
    REQUIRE(t.merges.size() == 1);
    CHECK(t.merges[0].distance == doctest::Approx(5.0));
    CHECK(t.merges[0].size == 2);
    CHECK(t.merges[0].left == 0);
    CHECK(t.merges[0].right == 1);
  }

  TEST_CASE("two tight pairs") {
    Eigen::MatrixXd x(4, 1);
    x << 0.0, 10.0, 0.1, 10.2;
    auto t = ward_linkage(x);
    CHECK(t.merges[0].left == 0);
    CHECK(t.merges[0].right == 2);
    CHECK(t.merges[1].left == 1);
    CHECK(t.merges[1].right == 3);
    CHECK(t.merges[2].left == 4);
    CHECK(t.merges[2].right == 5);
    CHECK(t.merges[2].size == 4);
    auto two = cut_tree(t, 2);
    CHECK(two.labels == std::vector<int>{1, 2, 1, 2});
    CHECK(cut_tree(t, 1).labels == std::vector<int>{1, 1, 1, 1});
    CHECK(cut_tree(t, 4).labels == std::vector<int>{1, 2, 3, 4});
    CHECK_THROWS_AS(cut_tree(t, 0), error);
    CHECK_THROWS_AS(cut_tree(t, 5), error);
    std::set<std::size_t> leaves(t.leaf_order.begin(), t.leaf_order.end());
    CHECK(leaves.size() == 4);
  }

  TEST_CASE("Ward matches the naive oracle") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
      auto x = random_points(rng, 25, 3);
      auto t = ward_linkage(x);
      auto o = oracle::naive_ward(x);
      REQUIRE(t.merges.size() == o.size());
      for (std::size_t i = 0; i < o.size(); ++i) {
        CHECK(t.merges[i].left == o[i].left);
        CHECK(t.merges[i].right == o[i].right);
        CHECK(t.merges[i].size == o[i].size);
        CHECK(t.merges[i].distance == doctest::Approx(o[i].distance).epsilon(1e-9));
        if (i) CHECK(t.merges[i].distance >= t.merges[i - 1].distance);
      }
      CHECK(t.merges.back().size == 25);
    }
  }

  TEST_CASE("Ward ties go to the smaller node ids") {
    // A square: all four sides equal.
    Eigen::MatrixXd x(4, 2);
    x << 0, 0, 1, 0, 0, 1, 1, 1;
    auto t = ward_linkage(x);
    CHECK(t.merges[0].left == 0);
    CHECK(t.merges[0].right == 1);
    auto o = oracle::naive_ward(x);
    for (std::size_t i = 0; i < o.size(); ++i) {
      CHECK(t.merges[i].left == o[i].left);
      CHECK(t.merges[i].right == o[i].right);
    }
  }

  TEST_CASE("row permutation gives the same partitions") {
    std::mt19937_64 rng(67);
    auto x = random_points(rng, 30, 4);
    std::vector<std::size_t> perm(30);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd px(30, 4);
    for (std::size_t i = 0; i < 30; ++i) px.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(perm[i]));
    auto a = ward_linkage(x);
    auto b = ward_linkage(px);
    for (int n = 1; n <= 30; ++n) {
      auto la = cut_tree(a, n).labels;
      auto lb = cut_tree(b, n).labels;
      std::vector<int> back(30);
      for (std::size_t i = 0; i < 30; ++i) back[perm[i]] = lb[i];
      CHECK(same_partition(la, back));
    }
  }

  TEST_CASE("cuts refine") {
    std::mt19937_64 rng(71);
    auto t = ward_linkage(random_points(rng, 40, 2));
    for (int n = 2; n <= 40; ++n) {
      auto fine = cut_tree(t, n);
      auto coarse = cut_tree(t, n - 1);
      CHECK(fine.n_clusters == n);
      std::map<int, std::set<int>> parents;
      for (std::size_t i = 0; i < 40; ++i) parents[fine.labels[i]].insert(coarse.labels[i]);
      for (const auto& [label, p] : parents) CHECK(p.size() == 1);
      CHECK(fine.labels == canonicalize_labels(fine.labels));
    }
  }

  TEST_CASE("silhouette") {
    Eigen::MatrixXd x(4, 1);
    x << 0.0, 0.1, 10.0, 10.1;
    cluster_assignment a{2, {1, 1, 2, 2}, {}};
    double s = silhouette(x, a);
    CHECK(std::abs(s - oracle::silhouette(x, a.labels)) <= 1e-12);
    CHECK(s > 0.98);

    Eigen::MatrixXd same = Eigen::MatrixXd::Zero(4, 2);
    CHECK(silhouette(same, a) == 0.0);
    cluster_assignment one{1, {1, 1, 1, 1}, {}};
    CHECK_THROWS_AS(silhouette(x, one), error);

    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 20; ++trial) {
      auto pts = random_points(rng, 50, 3);
      int k = 2 + trial % 5;
      std::vector<int> labels(50);
      for (int i = 0; i < 50; ++i) labels[static_cast<std::size_t>(i)] = 1 + (i < k ? i : static_cast<int>(rng() % k));
      cluster_assignment r{k, labels, {}};
      CHECK(std::abs(silhouette(pts, r) - oracle::silhouette(pts, labels)) <= 1e-9);
    }
  }

  TEST_CASE("silhouette sweep") {
    std::mt19937_64 rng(79);
    auto x = blobs(rng, 20, 0.8);
    auto t = ward_linkage(x);
    auto sweep = silhouette_sweep(t, x, 2, 10);
    REQUIRE(sweep.size() == 9);
    auto best = std::max_element(sweep.begin(), sweep.end(), [](auto& a, auto& b) { return a.score < b.score; });
    CHECK(best->n_clusters == 3);
    for (const auto& e : sweep) CHECK(std::abs(e.score - silhouette(x, cut_tree(t, e.n_clusters))) <= 1e-12);
    CHECK(silhouette_sweep(t, x, 2, 2).size() == 1);
    CHECK_THROWS_AS(silhouette_sweep(t, x, 1, 3), error);
    CHECK_THROWS_AS(silhouette_sweep(t, x, 2, 61), error);
  }

  TEST_CASE("specificity hand cases") {
    hotspot_matrix h;
    h.unit_ids = {"a", "b", "c", "d"};
    h.vocabulary = {"w", "flat"};
    h.values = Eigen::MatrixXd(4, 2);
    h.values << 2.0, 1.0, 2.0, 1.0, -1.0, 1.0, -1.0, 1.0;
    cluster_assignment a{2, {1, 1, 2, 2}, {"a", "b", "c", "d"}};
    auto t = specificity(h, a);
    CHECK(t.values(0, 0) == 9.0);
    CHECK(t.values(1, 0) == 9.0);
    CHECK(t.values(0, 1) == 0.0);
    CHECK(t.signs(0, 0) == 1);
    CHECK(t.signs(1, 0) == -1);

    hotspot_matrix h3;
    h3.unit_ids = {"x", "y", "z"};
    h3.vocabulary = {"w"};
    h3.values = Eigen::MatrixXd(3, 1);
    h3.values << 3.0, 1.0, 0.0;
    cluster_assignment a3{3, {1, 2, 3}, {"x", "y", "z"}};
    auto t3 = specificity(h3, a3);
    CHECK(t3.values(0, 0) == 4.0);
    CHECK(t3.values(1, 0) == 1.0);
    CHECK(t3.values(2, 0) == 1.0);
    CHECK(t3.signs(2, 0) == -1);

    cluster_assignment single{1, {1, 1, 1}, {"x", "y", "z"}};
    CHECK_THROWS_AS(specificity(h3, single), error);
  }

  TEST_CASE("specificity properties") {
    std::mt19937_64 rng(83);
    hotspot_matrix h;
    for (int i = 0; i < 30; ++i) h.unit_ids.push_back("u" + std::to_string(i));
    for (int j = 0; j < 10; ++j) h.vocabulary.push_back("w" + std::to_string(j));
    h.values = random_points(rng, 30, 10);
    std::vector<int> labels(30);
    for (int i = 0; i < 30; ++i) labels[static_cast<std::size_t>(i)] = 1 + i % 4;
    cluster_assignment a{4, labels, h.unit_ids};
    auto t = specificity(h, a);
    CHECK(t.values.minCoeff() >= 0.0);
    // Relabel clusters 1<->3 and 2<->4.
    cluster_assignment swapped = a;
    for (auto& l : swapped.labels) l = (l + 1) % 4 + 1;
    auto ts = specificity(h, swapped);
    for (int c = 0; c < 4; ++c) CHECK(ts.values.row((c + 2) % 4) == t.values.row(c));

    cluster_assignment two{2, {}, h.unit_ids};
    for (int i = 0; i < 30; ++i) two.labels.push_back(i < 12 ? 1 : 2);
    auto t2 = specificity(h, two);
    CHECK(t2.values.row(0) == t2.values.row(1));
  }

  TEST_CASE("characteristic words") {
    specificity_table t;
    t.vocabulary = {"a", "b", "c"};
    t.n_clusters = 2;
    t.values = Eigen::MatrixXd(2, 3);
    t.values << 9, 4, 1, 1, 4, 9;
    t.signs = Eigen::MatrixXi(2, 3);
    t.signs << 1, -1, 1, -1, 1, -1;
    t.ranked = {{0, 1, 2}, {2, 1, 0}};
    auto top = characteristic_words(t, 1, 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].word == "a");
    CHECK(top[1].word == "b");
    CHECK(top[1].sign == -1);
    CHECK(characteristic_words(t, 2, 10).size() == 3);
    CHECK_THROWS_AS(characteristic_words(t, 3, 1), error);
  }

  TEST_CASE("adjusted rand index") {
    std::vector<int> a{1, 1, 2, 2, 3, 3};
    CHECK(adjusted_rand_index(a, std::vector<int>{2, 2, 3, 3, 1, 1}) == doctest::Approx(1.0));
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> x(40), y(40);
      for (int i = 0; i < 40; ++i) {
        x[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng() % 3);
        y[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng() % 4);
      }
      CHECK(adjusted_rand_index(x, y) == doctest::Approx(oracle::ari(x, y)).epsilon(1e-12));
    }
  }

  TEST_CASE("artifact round trips") {
    auto dir = std::filesystem::temp_directory_path() / "lexreg_cluster_rt";
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(97);
    auto t = ward_linkage(random_points(rng, 12, 2));
    write_linkage(dir / "l.csv", t);
    auto back = read_linkage(dir / "l.csv");
    CHECK(back.n_leaves == 12);
    CHECK(back.merges == t.merges);
    CHECK(back.leaf_order == t.leaf_order);
    auto a = cut_tree(t, 3);
    for (int i = 0; i < 12; ++i) a.unit_ids.push_back("u" + std::to_string(i));
    write_assignment(dir / "a.csv", a);
    auto ab = read_assignment(dir / "a.csv");
    CHECK(ab.labels == a.labels);
    CHECK(ab.unit_ids == a.unit_ids);
    CHECK(ab.n_clusters == 3);
  }
}
