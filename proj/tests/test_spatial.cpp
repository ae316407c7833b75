#include <doctest.h>

#include <random>

#include <lexreg/error.hpp>
#include <lexreg/spatial.hpp>

#include "oracles.hpp"

using namespace lexreg;

namespace {

std::vector<unit_geometry> random_sites(std::mt19937_64& rng, int n, double lat_span = 8.0, double lon_span = 10.0) {
  std::uniform_real_distribution<double> lat(35.0, 35.0 + lat_span), lon(-100.0, -100.0 + lon_span);
  std::vector<unit_geometry> out;
  for (int i = 0; i < n; ++i) out.push_back({"s" + std::to_string(1000 + i), lat(rng), lon(rng)});
  return out;
}

std::vector<oracle::site> to_sites(const std::vector<unit_geometry>& g) {
  std::vector<oracle::site> s;
  for (const auto& u : g) s.push_back({u.unit_id, u.latitude, u.longitude});
  return s;
}

std::vector<std::set<std::size_t>> as_sets(const proximity_matrix& w) {
  std::vector<std::set<std::size_t>> out;
  for (const auto& row : w.neighbors) out.emplace_back(row.begin(), row.end());
  return out;
}

std::vector<unit_geometry> line(int n, double spacing_deg = 0.5) {
  std::vector<unit_geometry> out;
  for (int i = 0; i < n; ++i) out.push_back({"u" + std::to_string(i), 40.0, -100.0 + spacing_deg * i});
  return out;
}

std::vector<std::vector<int>> dense(const proximity_matrix& w) {
  std::vector<std::vector<int>> d(w.size(), std::vector<int>(w.size(), 0));
  for (std::size_t c = 0; c < w.size(); ++c)
    for (auto o : w.neighbors[c]) d[c][o] = 1;
  return d;
}

std::vector<std::string> words(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("w" + std::to_string(i));
  return out;
}

std::vector<std::string> ids(const std::vector<unit_geometry>& g) {
  std::vector<std::string> out;
  for (const auto& u : g) out.push_back(u.unit_id);
  return out;
}

}  // namespace

TEST_SUITE("spatial") {
  TEST_CASE("haversine") {
    CHECK(haversine_km(0, 0, 0, 0) == 0.0);
    CHECK(haversine_km(0, 0, 0, 1) == doctest::Approx(111.195).epsilon(1e-4));
    CHECK(haversine_km(0, 0, 0, 180) == doctest::Approx(earth_radius_km * 3.14159265358979).epsilon(1e-12));
  }

  TEST_CASE("knn on a line") {
    auto g = line(5);
    auto w = knn_weights(g, 1);
    CHECK(w.neighbors[0] == std::vector<std::uint32_t>{0, 1});
    CHECK(w.neighbors[4] == std::vector<std::uint32_t>{3, 4});
    for (std::size_t c = 0; c < w.size(); ++c) CHECK(w.row_sum(c) == 2);
    // Middle units have two equidistant candidates; the smaller unit_id wins.
    CHECK(w.neighbors[2] == std::vector<std::uint32_t>{1, 2});

    auto identity = knn_weights(g, 0);
    for (std::size_t c = 0; c < identity.size(); ++c) CHECK(identity.neighbors[c] == std::vector<std::uint32_t>{static_cast<std::uint32_t>(c)});

    CHECK_THROWS_AS(knn_weights(g, 5), error);
    try {
      knn_weights(g, 5);
    } catch (const error& e) {
      CHECK(e.code() == errc::invalid_k);
    }
  }

  TEST_CASE("knn and band match brute force") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      auto g = random_sites(rng, 30);
      for (int k : {1, 5, 10, 29}) CHECK(as_sets(knn_weights(g, k)) == oracle::knn_sets(to_sites(g), k));
      for (double d : {50.0, 100.0, 250.0}) {
        auto w = distance_band_weights(g, d);
        CHECK(as_sets(w) == oracle::band_sets(to_sites(g), d));
        for (std::size_t c = 0; c < w.size(); ++c)
          for (auto o : w.neighbors[c]) CHECK(w.contains(o, c));
      }
    }
  }

  TEST_CASE("distance band pairs") {
    // 0.45 degrees of longitude at the equator is about 50 km.
    std::vector<unit_geometry> near{{"a", 0.0, 0.0}, {"b", 0.0, 0.45}};
    auto w = distance_band_weights(near, 100.0);
    CHECK(w.neighbors[0] == std::vector<std::uint32_t>{0, 1});
    std::vector<unit_geometry> far{{"a", 0.0, 0.0}, {"b", 0.0, 1.35}};
    auto w2 = distance_band_weights(far, 100.0);
    CHECK(w2.neighbors[0] == std::vector<std::uint32_t>{0});
    CHECK(w2.neighbors[1] == std::vector<std::uint32_t>{1});
  }

  TEST_CASE("geometry validation") {
    std::vector<unit_geometry> bad{{"a", 91.0, 0.0}, {"b", 0.0, 0.0}};
    CHECK_THROWS_AS(knn_weights(bad, 1), error);
    std::vector<unit_geometry> dup{{"a", 0.0, 0.0}, {"a", 1.0, 0.0}};
    CHECK_THROWS_AS(knn_weights(dup, 1), error);
  }

  TEST_CASE("G* constant column and identity weights") {
    auto g = line(6);
    auto identity = knn_weights(g, 0);
    Eigen::MatrixXd f(6, 2);
    f << 0.1, 0.3, 0.1, 0.1, 0.1, 0.0, 0.1, 0.2, 0.1, 0.5, 0.1, 0.1;
    auto h = getis_ord(f, ids(g), words(2), identity);
    CHECK(h.values.col(0).isZero(0.0));
    CHECK(h.stddevs(0) == 0.0);
    double mean = f.col(1).mean();
    double sd = std::sqrt((f.col(1).array() - mean).square().mean());
    for (int c = 0; c < 6; ++c) CHECK(h.values(c, 1) == doctest::Approx((f(c, 1) - mean) / sd).epsilon(1e-12));
  }

  TEST_CASE("G* five-unit line against exact arithmetic") {
    auto g = line(5);
    auto w = knn_weights(g, 1);
    Eigen::MatrixXd f(5, 1);
    f << 0.10, 0.10, 0.00, 0.00, 0.00;
    auto h = getis_ord(f, ids(g), words(1), w);
    std::vector<oracle::rational> exact{oracle::rational(1, 10), oracle::rational(1, 10), 0, 0, 0};
    auto expected = oracle::gstar_squared_exact(exact, dense(w));
    for (int c = 0; c < 5; ++c) {
      double got = h.values(c, 0);
      double want_sq = static_cast<double>(expected[static_cast<std::size_t>(c)].first);
      CHECK((got > 0) - (got < 0) == expected[static_cast<std::size_t>(c)].second);
      CHECK(got * got == doctest::Approx(want_sq).epsilon(1e-13));
    }
  }

  TEST_CASE("G* matches scalar oracle") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 0.01);
    for (int trial = 0; trial < 10; ++trial) {
      auto g = random_sites(rng, 12);
      auto w = trial % 2 ? knn_weights(g, 3) : distance_band_weights(g, 150.0);
      Eigen::MatrixXd f(12, 8);
      for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = u(rng);
      f.col(2).setConstant(0.004);
      auto h = getis_ord(f, ids(g), words(8), w);
      std::vector<std::vector<double>> fv(12, std::vector<double>(8));
      for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 8; ++j) fv[i][j] = f(i, j);
      auto expected = oracle::gstar(fv, dense(w));
      for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 8; ++j) CHECK(std::abs(h.values(i, j) - static_cast<double>(expected[i][j])) <= 1e-10);
      CHECK(h.values.col(2).isZero(0.0));
    }
  }

  TEST_CASE("G* properties") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 0.02);
    auto g = random_sites(rng, 25);
    auto w = knn_weights(g, 4);
    Eigen::MatrixXd f(25, 5);
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = u(rng);
    auto h = getis_ord(f, ids(g), words(5), w);

    SUBCASE("knn columns are an affine map of neighbourhood sums") {
      // Constant denominator: G = (S - (k+1) mean) / D for every row.
      for (Eigen::Index j = 0; j < 5; ++j) {
        std::vector<double> s(25);
        for (std::size_t c = 0; c < 25; ++c)
          for (auto o : w.neighbors[c]) s[c] += f(o, j);
        double slope = (h.values(1, j) - h.values(0, j)) / (s[1] - s[0]);
        double intercept = h.values(0, j) - slope * s[0];
        for (std::size_t c = 0; c < 25; ++c)
          CHECK(h.values(static_cast<Eigen::Index>(c), j) == doctest::Approx(intercept + slope * s[c]).epsilon(1e-9));
      }
    }
    SUBCASE("shift and positive scale leave columns unchanged") {
      Eigen::MatrixXd shifted = (f.array() * 3.5 + 0.25).matrix();
      auto h2 = getis_ord(shifted, ids(g), words(5), w);
      CHECK((h2.values - h.values).cwiseAbs().maxCoeff() <= 1e-9);
    }
    SUBCASE("unit permutation") {
      std::vector<std::size_t> perm(25);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<unit_geometry> pg;
      Eigen::MatrixXd pf(25, 5);
      for (std::size_t i = 0; i < 25; ++i) {
        pg.push_back(g[perm[i]]);
        pf.row(static_cast<Eigen::Index>(i)) = f.row(static_cast<Eigen::Index>(perm[i]));
      }
      auto ph = getis_ord(pf, ids(pg), words(5), knn_weights(pg, 4));
      for (std::size_t i = 0; i < 25; ++i)
        for (Eigen::Index j = 0; j < 5; ++j)
          CHECK(ph.values(static_cast<Eigen::Index>(i), j) == h.values(static_cast<Eigen::Index>(perm[i]), j));
      CHECK(ph.means == h.means);
      CHECK(ph.stddevs == h.stddevs);
    }
    SUBCASE("column sums equal in-degree weighted deviations") {
      std::vector<int> indeg(25, 0);
      for (const auto& row : w.neighbors)
        for (auto o : row) ++indeg[o];
      double n = 25, s1 = 5;
      double denom_factor = std::sqrt((n * s1 - s1 * s1) / (n - 1));
      for (Eigen::Index j = 0; j < 5; ++j) {
        double mean = f.col(j).mean();
        double sd = std::sqrt((f.col(j).array() - mean).square().mean());
        double direct = 0;
        for (int c = 0; c < 25; ++c) direct += indeg[static_cast<std::size_t>(c)] * (f(c, j) - mean);
        CHECK(h.values.col(j).sum() == doctest::Approx(direct / (sd * denom_factor)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("G* errors") {
    auto g = line(3);
    auto w = knn_weights(g, 1);
    Eigen::MatrixXd f = Eigen::MatrixXd::Random(3, 2);
    std::vector<std::string> swapped{"u1", "u0", "u2"};
    CHECK_THROWS_AS(getis_ord(f, swapped, words(2), w), error);
    try {
      getis_ord(f, swapped, words(2), w);
    } catch (const error& e) {
      CHECK(e.code() == errc::order_mismatch);
    }
    auto one = line(1);
    try {
      getis_ord(Eigen::MatrixXd::Ones(1, 1), ids(one), words(1), knn_weights(one, 0));
      CHECK(false);
    } catch (const error& e) {
      CHECK(e.code() == errc::insufficient_units);
    }
  }

  TEST_CASE("weights and hotspots round trip") {
    auto dir = std::filesystem::temp_directory_path() / "lexreg_spatial_rt";
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(31);
    auto g = random_sites(rng, 15);
    auto w = distance_band_weights(g, 200.0);
    write_weights(dir / "w.csv", dir / "w.json", w);
    CHECK(read_weights(dir / "w.csv", dir / "w.json") == w);
    Eigen::MatrixXd f = Eigen::MatrixXd::Random(15, 4).cwiseAbs();
    auto h = getis_ord(f, ids(g), words(4), w);
    write_hotspots(dir / "h.bin", h);
    auto back = read_hotspots(dir / "h.bin");
    CHECK(back.values == h.values);
    CHECK(back.unit_ids == h.unit_ids);
    CHECK(back.vocabulary == h.vocabulary);
    CHECK(back.means == h.means);
  }
}
