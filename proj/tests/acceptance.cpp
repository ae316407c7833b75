// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include <lexreg/clustering.hpp>
#include <lexreg/corpus.hpp>
#include <lexreg/hash.hpp>
#include <lexreg/parallel.hpp>
#include <lexreg/pca.hpp>
#include <lexreg/pipeline.hpp>
#include <lexreg/spatial.hpp>
#include <lexreg/synth.hpp>
#include <lexreg/temporal.hpp>

#include "oracles.hpp"

using namespace lexreg;
namespace fs = std::filesystem;

namespace {

struct verdict {
  enum { pass, fail, skip } status;
  std::string detail;
};

verdict pass(std::string d) { return {verdict::pass, std::move(d)}; }
verdict fail(std::string d) { return {verdict::fail, std::move(d)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<unit_geometry> random_sites(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> lat(30.0, 40.0), lon(-105.0, -90.0);
  std::vector<unit_geometry> out;
  for (int i = 0; i < n; ++i) out.push_back({"s" + std::to_string(100 + i), lat(rng), lon(rng)});
  return out;
}

std::vector<oracle::site> sites(const std::vector<unit_geometry>& g) {
  std::vector<oracle::site> s;
  for (const auto& u : g) s.push_back({u.unit_id, u.latitude, u.longitude});
  return s;
}

std::vector<std::string> ids_of(const std::vector<unit_geometry>& g) {
  std::vector<std::string> out;
  for (const auto& u : g) out.push_back(u.unit_id);
  return out;
}

std::vector<std::string> names(const char* prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::set<std::size_t>> as_sets(const proximity_matrix& w) {
  std::vector<std::set<std::size_t>> out;
  for (const auto& row : w.neighbors) out.emplace_back(row.begin(), row.end());
  return out;
}

// Library pipeline kept in memory: counts -> G* -> PCA -> Ward.
struct in_memory_run {
  count_matrix counts;
  proximity_matrix weights;
  hotspot_matrix hotspots;
  pc_model pca;
  linkage_tree tree;
};

in_memory_run run_corpus(const synth_output& out, int k = 10) {
  in_memory_run r;
  ingest_config ic;
  r.counts = build_count_matrix(out.documents, filter_users(out.documents, ic), passthrough_assigner(), ic);
  r.weights = knn_weights(align_geometry(out.geometry, r.counts.unit_ids), k);
  r.hotspots = getis_ord(relative_frequencies(r.counts), r.counts.unit_ids, r.counts.vocabulary, r.weights);
  r.pca = fit_pca(r.hotspots);
  r.tree = ward_linkage(r.pca.selected_scores());
  return r;
}

synth_config planted(std::uint64_t seed, int topic_words = 20) {
  auto c = planted_config(10, 10, 3, topic_words, 200);
  c.epsilon = 0.3;
  c.docs_per_unit = 2000;
  c.tokens_min = c.tokens_max = 50;  // exactly 1e5 tokens per unit
  c.seed = seed;
  return c;
}

std::vector<int> truth_for(const synth_output& out, const std::vector<std::string>& unit_ids) {
  std::map<std::string, int> by_id;
  for (std::size_t i = 0; i < out.truth.unit_ids.size(); ++i) by_id[out.truth.unit_ids[i]] = out.truth.labels[i];
  std::vector<int> t;
  for (const auto& id : unit_ids) t.push_back(by_id.at(id));
  return t;
}

verdict gstar_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  double worst = 0;
  bool constant_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_sites(rng, 10);
    auto w = trial % 3 == 2 ? distance_band_weights(g, 300.0) : knn_weights(g, static_cast<int>(rng() % 10));
    Eigen::MatrixXd f(10, 20);
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = u(rng);
    f.col(trial % 20).setConstant(0.01);
    f.col((trial + 7) % 20).setZero();
    auto h = getis_ord(f, ids_of(g), names("w", 20), w);
    std::vector<std::vector<double>> fv(10, std::vector<double>(20));
    std::vector<std::vector<int>> dense(10, std::vector<int>(10, 0));
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 20; ++j) fv[i][j] = f(i, j);
      for (auto o : w.neighbors[static_cast<std::size_t>(i)]) dense[i][o] = 1;
    }
    auto expected = oracle::gstar(fv, dense);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 20; ++j) worst = std::max(worst, std::abs(h.values(i, j) - static_cast<double>(expected[i][j])));
    for (int c : {trial % 20, (trial + 7) % 20})
      for (int i = 0; i < 10; ++i) constant_ok = constant_ok && h.values(i, c) == 0.0;
  }
  double secs = seconds_since(t0);
  auto d = fmt("max |diff| %.2e (tol 1e-10), constant columns exactly zero: %s, %.2fs (limit 5s)", worst,
               constant_ok ? "yes" : "no", secs);
  return worst <= 1e-10 && constant_ok && secs < 5.0 ? pass(d) : fail(d);
}

verdict weights_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1002);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 20 + static_cast<int>(rng() % 41);
    auto g = random_sites(rng, n);
    int k = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    double d = std::uniform_real_distribution<double>(25.0, 400.0)(rng);
    if (as_sets(knn_weights(g, k)) != oracle::knn_sets(sites(g), k)) ++mismatches;
    if (as_sets(distance_band_weights(g, d)) != oracle::band_sets(sites(g), d)) ++mismatches;
  }
  double secs = seconds_since(t0);
  auto d = fmt("%d mismatching weight sets out of 200, %.2fs (limit 5s)", mismatches, secs);
  return mismatches == 0 && secs < 5.0 ? pass(d) : fail(d);
}

verdict pca_oracle() {
  std::mt19937_64 rng(1003);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst_ratio = 0, worst_angle = 0, worst_rebuild = 0;
  int subspaces = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd x(10, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    auto m = fit_pca(x);
    auto o = oracle::covariance_eigen(x);
    for (Eigen::Index k = 0; k < 6; ++k) worst_ratio = std::max(worst_ratio, std::abs(m.explained_variance_ratio(k) - o.ratios(k)));
    for (Eigen::Index k = 1; k < 6; ++k) {
      if ((o.ratios(k - 1) - o.ratios(k)) < 1e-6) continue;
      Eigen::MatrixXd a = m.loadings.topRows(k).transpose();
      Eigen::MatrixXd b = o.components.leftCols(k);
      worst_angle = std::max(worst_angle, oracle::max_principal_angle(a, b));
      ++subspaces;
    }
    Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    worst_rebuild = std::max(worst_rebuild, (centered - m.scores * m.loadings).norm() / centered.norm());
  }
  auto d = fmt("ratio err %.2e (tol 1e-8), max principal angle %.2e over %d subspaces (tol 1e-6), "
               "reconstruction %.2e (tol 1e-8)",
               worst_ratio, worst_angle, subspaces, worst_rebuild);
  return worst_ratio <= 1e-8 && worst_angle < 1e-6 && worst_rebuild <= 1e-8 ? pass(d) : fail(d);
}

verdict broken_stick_check() {
  double worst = 0;
  for (int n : {1, 3, 10}) {
    auto b = broken_stick(n);
    auto e = oracle::broken_stick_exact(n);
    for (int k = 0; k < n; ++k)
      worst = std::max(worst, std::abs(b[static_cast<std::size_t>(k)] - static_cast<double>(e[static_cast<std::size_t>(k)])));
  }
  {
    auto b = broken_stick(10000);
    auto e = oracle::broken_stick_bigfloat(10000);
    for (int k = 0; k < 10000; ++k) {
      oracle::bigfloat diff = oracle::bigfloat(b[static_cast<std::size_t>(k)]) - e[static_cast<std::size_t>(k)];
      worst = std::max(worst, std::abs(static_cast<double>(diff)));
    }
  }
  bool floor_ok = select_components(std::vector<double>{0.5, 0.3, 0.2}, broken_stick(3)) == 1;
  std::mt19937_64 rng(1004);
  int constructed_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + static_cast<int>(rng() % 60);
    int m = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    auto stick = broken_stick(n);
    std::vector<double> evr(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) evr[static_cast<std::size_t>(k)] = stick[static_cast<std::size_t>(k)] * (k < m ? 1.01 : 0.99);
    if (select_components(evr, stick) != std::max(m, 1)) ++constructed_bad;
  }
  auto d = fmt("max |b - exact| %.2e over n in {1,3,10,10000} (tol 1e-12), floor rule %s, "
               "%d/200 constructed spectra wrong",
               worst, floor_ok ? "ok" : "wrong", constructed_bad);
  return worst <= 1e-12 && floor_ok && constructed_bad == 0 ? pass(d) : fail(d);
}

verdict ward_oracle() {
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int sequence_mismatch = 0, inversions = 0;
  double worst = 0;
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::MatrixXd x(25, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    auto t = ward_linkage(x);
    auto o = oracle::naive_ward(x);
    for (std::size_t i = 0; i < o.size(); ++i) {
      const auto& a = t.merges[i];
      if (a.left != o[i].left || a.right != o[i].right || a.size != o[i].size) ++sequence_mismatch;
      worst = std::max(worst, std::abs(a.distance - o[i].distance) / std::max(1.0, o[i].distance));
      if (i && a.distance < t.merges[i - 1].distance) ++inversions;
    }
  }
  auto d = fmt("%d merge mismatches over 30 instances, max rel height diff %.2e, %d inversions", sequence_mismatch,
               worst, inversions);
  return sequence_mismatch == 0 && inversions == 0 && worst <= 1e-9 ? pass(d) : fail(d);
}

verdict silhouette_check() {
  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd x(50, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    int k = 2 + static_cast<int>(rng() % 8);
    std::vector<int> labels(50);
    for (int i = 0; i < 50; ++i) labels[static_cast<std::size_t>(i)] = 1 + (i < k ? i : static_cast<int>(rng() % static_cast<std::uint64_t>(k)));
    worst = std::max(worst, std::abs(silhouette(x, cluster_assignment{k, labels, {}}) - oracle::silhouette(x, labels)));
  }
  int at_three = 0;
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double centers[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {5.0, 8.66}};
    Eigen::MatrixXd x(60, 2);
    for (int i = 0; i < 60; ++i) {
      x(i, 0) = centers[i / 20][0] + noise(rng);
      x(i, 1) = centers[i / 20][1] + noise(rng);
    }
    auto sweep = silhouette_sweep(ward_linkage(x), x, 2, 10);
    auto best = std::max_element(sweep.begin(), sweep.end(), [](auto& a, auto& b) { return a.score < b.score; });
    at_three += best->n_clusters == 3;
  }
  auto d = fmt("max |diff| %.2e on 100 random labelings (tol 1e-9), sweep maximum at n=3 in %d/100 (need 95)", worst,
               at_three);
  return worst <= 1e-9 && at_three >= 95 ? pass(d) : fail(d);
}

verdict specificity_check() {
  hotspot_matrix h2;
  h2.unit_ids = {"a", "b", "c"};
  h2.vocabulary = {"w"};
  h2.values = Eigen::MatrixXd(3, 1);
  h2.values << 2.0, 2.0, -1.0;
  auto t2 = specificity(h2, cluster_assignment{2, {1, 1, 2}, h2.unit_ids});
  bool two_ok = t2.values(0, 0) == 9.0 && t2.values(1, 0) == 9.0;
  hotspot_matrix h3 = h2;
  h3.values << 3.0, 1.0, 0.0;
  auto t3 = specificity(h3, cluster_assignment{3, {1, 2, 3}, h3.unit_ids});
  bool three_ok = t3.values(0, 0) == 4.0 && t3.values(2, 0) == 1.0;

  auto c = planted(77, 10);
  auto out = generate(c);
  auto r = run_corpus(out);
  auto cut = cut_tree(r.tree, 3);
  cut.unit_ids = r.counts.unit_ids;
  auto table = specificity(r.hotspots, cut);
  auto truth = truth_for(out, cut.unit_ids);
  int regions_ok = 0;
  for (int cl = 1; cl <= 3; ++cl) {
    std::map<int, int> votes;
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (cut.labels[i] == cl) ++votes[truth[i]];
    int region = std::max_element(votes.begin(), votes.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
    std::set<std::string> planted_words;
    for (const auto& [w, x] : c.region_lexicons[static_cast<std::size_t>(region - 1)]) planted_words.insert(w);
    std::set<std::string> top;
    for (const auto& w : characteristic_words(table, cl, 10)) top.insert(w.word);
    regions_ok += top == planted_words;
  }
  auto d = fmt("2-cluster symmetric %s, 3-cluster min rule %s, planted run: %d/3 regions have all 10 topic words in "
               "their top-10",
               two_ok ? "ok" : "wrong", three_ok ? "ok" : "wrong", regions_ok);
  return two_ok && three_ok && regions_ok == 3 ? pass(d) : fail(d);
}

verdict end_to_end() {
  auto t0 = std::chrono::steady_clock::now();
  int good = 0;
  double worst = 1.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto out = generate(planted(seed));
    auto r = run_corpus(out);
    auto cut = cut_tree(r.tree, 3);
    double ari = adjusted_rand_index(cut.labels, truth_for(out, r.counts.unit_ids));
    worst = std::min(worst, ari);
    good += ari >= 0.9;
  }
  double secs = seconds_since(t0);
  auto d = fmt("ARI >= 0.9 in %d/100 seeds (need 95), worst ARI %.3f, %.1fs (limit 120s)", good, worst, secs);
  return good >= 95 && secs < 120.0 ? pass(d) : fail(d);
}

verdict temporal_check() {
  double worst = 0;
  std::string medians;
  for (std::uint64_t pair = 0; pair < 5; ++pair) {
    auto a = planted(500 + 2 * pair);
    auto b = planted(501 + 2 * pair);
    a.time_start = parse_iso8601("2015-01-01");
    a.time_end = parse_iso8601("2017-01-01");
    b.time_start = parse_iso8601("2017-01-01");
    b.time_end = parse_iso8601("2019-01-01");
    auto ga = generate(a), gb = generate(b);
    synth_output all = ga;
    all.documents.insert(all.documents.end(), gb.documents.begin(), gb.documents.end());
    auto full = run_corpus(all);
    auto reference = cut_tree(full.tree, 2);
    reference.unit_ids = full.counts.unit_ids;

    period_spec spec{{{"first", a.time_start, a.time_end}, {"second", b.time_start, b.time_end}}};
    auto split = split_periods(all.documents, spec);
    ingest_config ic;
    auto retained = filter_users(all.documents, ic);
    double m[2];
    for (int p = 0; p < 2; ++p) {
      auto tally = tally_documents(split.streams[static_cast<std::size_t>(p)], retained, passthrough_assigner(), ic);
      auto counts = project_counts(tally, full.counts);
      auto h = getis_ord(relative_frequencies(counts, true), counts.unit_ids, counts.vocabulary, full.weights);
      m[p] = boxplot_stats(inter_cluster_distances(h, reference).distances).median;
    }
    double rel = std::abs(m[0] - m[1]) / (0.5 * (m[0] + m[1]));
    worst = std::max(worst, rel);
    medians += fmt("%s%.2f/%.2f", pair ? ", " : "", m[0], m[1]);
  }
  auto d = fmt("period medians %s; worst relative gap %.2f%% (limit 5%%)", medians.c_str(), 100 * worst);
  return worst <= 0.05 ? pass(d) : fail(d);
}

std::map<std::string, std::string> artifact_hashes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "report.json") out[e.path().filename().string()] = sha256_file(e.path());
  return out;
}

verdict determinism() {
  auto base = fs::temp_directory_path() / "lexreg_acceptance_determinism";
  fs::remove_all(base);
  auto j = nlohmann::json::parse(R"({
    "seed": 11,
    "clustering": {"n_clusters": 3},
    "temporal": {"max_pairs": 500},
    "synth": {"rows": 8, "cols": 8, "regions": 3, "docs_per_unit": 1200, "tokens_min": 40, "tokens_max": 60},
    "periods": [{"label": "2015", "start": "2015-01-01", "end": "2016-01-01"},
                {"label": "2016", "start": "2016-01-01", "end": "2017-01-01"}]
  })");
  auto config = run_config_from_json(j);
  std::map<std::string, std::string> first;
  bool identical = true;
  std::size_t files = 0;
  for (unsigned threads : {1u, 4u, 3u}) {
    set_thread_count(threads);
    config.paths.out_dir = base / ("t" + std::to_string(threads));
    run_pipeline(config);
    auto h = artifact_hashes(config.paths.out_dir);
    if (first.empty()) {
      first = h;
      files = h.size();
    } else {
      identical = identical && h == first;
    }
  }
  set_thread_count(1);
  config.paths.out_dir = base / "t1";
  pipeline again(config);
  again.run_all();
  bool all_hits = true;
  for (const auto& s : again.stages()) all_hits = all_hits && s.outcome == workspace::outcome::cache_hit;
  bool unchanged = artifact_hashes(config.paths.out_dir) == first;
  set_thread_count(0);
  auto d = fmt("%zu artifacts byte-identical across 1/4/3 threads: %s; rerun all cache hits: %s, bytes unchanged: %s",
               files, identical ? "yes" : "no", all_hits ? "yes" : "no", unchanged ? "yes" : "no");
  return identical && all_hits && unchanged && files > 0 ? pass(d) : fail(d);
}

verdict external_data() {
  const char* env = std::getenv("LEXREG_REFERENCE_DATA");
  if (!env || !*env) return {verdict::skip, "set LEXREG_REFERENCE_DATA to a directory with counts.csv, counts.json, geometry.csv"};
  fs::path dir = env;
  for (const auto* f : {"counts.csv", "counts.json", "geometry.csv"})
    if (!fs::exists(dir / f)) return {verdict::skip, std::string("missing ") + (dir / f).string()};

  auto counts = read_count_matrix(dir / "counts.csv", dir / "counts.json");
  auto w = knn_weights(align_geometry(read_centroids(dir / "geometry.csv"), counts.unit_ids), 10);
  auto h = getis_ord(relative_frequencies(counts), counts.unit_ids, counts.vocabulary, w);
  auto pca = fit_pca(h);
  auto points = pca.selected_scores();
  auto tree = ward_linkage(points);
  auto sweep = silhouette_sweep(tree, points, 2, 15);
  auto score = [&](int n) { return sweep[static_cast<std::size_t>(n - 2)].score; };
  bool drops = score(3) < score(2) && score(6) < score(5);
  auto cut = cut_tree(tree, 5);
  cut.unit_ids = counts.unit_ids;
  auto table = specificity(h, cut);
  bool texas = false;
  for (int c = 1; c <= 5; ++c) {
    std::set<std::string> top;
    for (const auto& word : characteristic_words(table, c, 5)) top.insert(word.word);
    texas = texas || (top.contains("whataburger") && top.contains("texas") && top.contains("tx"));
  }
  double cum = pca.cumulative_ratio(pca.n_selected);
  bool ok = counts.n_units() == 2576 && counts.n_words() == 10000 && std::abs(pca.n_selected - 326) <= 10 &&
            std::abs(cum - 0.92) <= 0.02 && drops && texas;
  auto d = fmt("N_c %zu, N_w %zu, N_PC %d, cumulative EVR %.3f, drops after 2 and 5: %s, Texas cluster found: %s",
               counts.n_units(), counts.n_words(), pca.n_selected, cum, drops ? "yes" : "no", texas ? "yes" : "no");
  return ok ? pass(d) : fail(d);
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<verdict()>> criteria[] = {
    {"G* oracle equivalence", gstar_oracle},
    {"weights oracles", weights_oracle},
    {"PCA oracle", pca_oracle},
    {"broken stick", broken_stick_check},
    {"Ward oracle", ward_oracle},
    {"silhouette", silhouette_check},
    {"specificity", specificity_check},
    {"end-to-end planted recovery", end_to_end},
    {"temporal stability on synthesis", temporal_check},
    {"determinism", determinism},
    {"published aggregated counts (optional)", external_data},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = fail(std::string("exception: ") + e.what());
    }
    const char* tag = v.status == verdict::pass ? "PASS" : v.status == verdict::skip ? "SKIP" : "FAIL";
    failures += v.status == verdict::fail;
    std::printf("[%s] %s: %s (%.1fs)\n", tag, name, v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
