#include <lexreg/pipeline.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <Eigen/Core>

#include <lexreg/clustering.hpp>
#include <lexreg/corpus.hpp>
#include <lexreg/csv.hpp>
#include <lexreg/error.hpp>
#include <lexreg/hash.hpp>
#include <lexreg/parallel.hpp>
#include <lexreg/pca.hpp>
#include <lexreg/spatial.hpp>
#include <lexreg/synth.hpp>
#include <lexreg/temporal.hpp>

#ifndef LEXREG_VERSION
#define LEXREG_VERSION "0.0.0"
#endif

namespace lexreg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* stage_version = "1";

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << j.dump(1) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), errc::missing_artifact, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(errc::parse_error, path.string() + ": " + e.what());
  }
}

std::map<std::string, fs::file_time_type> snapshot(const fs::path& dir) {
  std::map<std::string, fs::file_time_type> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.emplace(entry.path().filename().string(), entry.last_write_time());
  return files;
}

std::string safe_label(const std::string& label) {
  std::string out;
  for (char c : label) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return out;
}

}  // namespace

json software_fingerprint() {
  return json{
    {"name", "lexreg"},
    {"version", LEXREG_VERSION},
    {"compiler", __VERSION__},
    {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                std::to_string(EIGEN_MINOR_VERSION)},
    {"cplusplus", __cplusplus},
  };
}

workspace::workspace(fs::path out_dir) : dir_(std::move(out_dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  require(fs::is_directory(dir_), errc::io_error, "cannot create output directory " + dir_.string());
  auto path = dir_ / "manifest.json";
  if (fs::exists(path)) {
    try {
      manifest_ = read_json(path);
    } catch (const error&) {
      manifest_ = json::object();
    }
  }
  if (!manifest_.is_object() || !manifest_.contains("stages")) manifest_ = json{{"format", "lexreg.manifest/1"}, {"stages", json::object()}};
}

fs::path workspace::require_file(const std::string& name) const {
  auto path = dir_ / name;
  require(fs::is_regular_file(path), errc::missing_artifact,
          "missing artifact " + path.string() + " (run the producing stage first)");
  return path;
}

void workspace::save_manifest() const { write_json(dir_ / "manifest.json", manifest_); }

workspace::outcome workspace::run_stage(const std::string& stage, const std::string& key,
                                        const std::function<std::vector<std::string>()>& produce) {
  auto& stages = manifest_["stages"];
  if (stages.contains(stage)) {
    const auto& entry = stages.at(stage);
    if (entry.value("status", "") == "ok" && entry.value("key", "") == key) {
      bool intact = true;
      for (const auto& [name, hash] : entry.at("outputs").items()) {
        auto path = dir_ / name;
        if (!fs::is_regular_file(path) || sha256_file(path) != hash.get<std::string>()) {
          intact = false;
          break;
        }
      }
      if (intact) return outcome::cache_hit;
    }
  }

  auto before = snapshot(dir_);
  stages[stage] = json{{"key", key}, {"status", "running"}};
  save_manifest();
  try {
    auto outputs = produce();
    json hashes = json::object();
    for (const auto& name : outputs) hashes[name] = sha256_file(dir_ / name);
    stages[stage] = json{{"key", key}, {"status", "ok"}, {"outputs", hashes}};
    save_manifest();
  } catch (const std::exception& e) {
    json partial = json::array();
    for (const auto& [name, time] : snapshot(dir_)) {
      if (name == "manifest.json") continue;
      auto it = before.find(name);
      if (it == before.end() || it->second != time) partial.push_back(name);
    }
    stages[stage] = json{{"key", key}, {"status", "failed"}, {"error", e.what()}, {"partial_outputs", partial}};
    save_manifest();
    throw;
  }
  return outcome::ran;
}

pipeline::pipeline(run_config config) : config_(std::move(config)), ws_(config_.paths.out_dir) {
  config_.validate();
  if (config_.threads > 0) set_thread_count(config_.threads);
  config_.ingest.load_exclusions();
}

fs::path pipeline::input_path() const {
  if (config_.paths.input) {
    require(fs::is_regular_file(*config_.paths.input), errc::missing_artifact,
            "input " + config_.paths.input->string() + " does not exist");
    return *config_.paths.input;
  }
  return ws_.require_file("docs.jsonl");
}

std::optional<fs::path> pipeline::geometry_path() const {
  if (config_.paths.geometry) {
    require(fs::is_regular_file(*config_.paths.geometry), errc::missing_artifact,
            "geometry " + config_.paths.geometry->string() + " does not exist");
    return config_.paths.geometry;
  }
  if (fs::is_regular_file(ws_.file("geometry.csv"))) return ws_.file("geometry.csv");
  return std::nullopt;
}

std::optional<fs::path> pipeline::truth_path() const {
  if (config_.paths.truth && fs::is_regular_file(*config_.paths.truth)) return config_.paths.truth;
  if (!config_.paths.input && fs::is_regular_file(ws_.file("truth.csv"))) return ws_.file("truth.csv");
  return std::nullopt;
}

std::string pipeline::key_for(const std::string& stage, const json& slice, const std::vector<fs::path>& inputs) const {
  sha256_builder h;
  h.field("lexreg-stage").field(stage).field(stage_version).field(slice.dump());
  for (const auto& p : inputs) h.field(p.filename().string()).field(sha256_file(p));
  return h.hex();
}

void pipeline::record(const std::string& stage, const std::string& key, workspace::outcome outcome) {
  stages_.push_back({stage, key, outcome});
}

namespace {

unit_assigner make_assigner(const run_config& config, const std::optional<fs::path>& geometry) {
  if (config.paths.polygons) return polygon_assigner(polygon_index::from_geojson(*config.paths.polygons));
  if (geometry) return nearest_centroid_assigner(read_centroids(*geometry));
  return passthrough_assigner();
}

json ingest_slice(const run_config& c) {
  json slice = to_json(c.ingest);
  slice.erase("exclusion_list_path");
  slice["assigner"] = c.paths.polygons ? "polygon" : "centroid-or-explicit";
  return slice;
}

// Summary helpers stored alongside artifacts so reports survive cache hits.
void write_summary(const workspace& ws, const std::string& stage, const json& summary) {
  write_json(ws.file(stage + "_summary.json"), summary);
}

}  // namespace

void pipeline::synth() {
  require(config_.synth.has_value(), errc::invalid_config, "no synth section in the configuration");
  json slice = to_json(*config_.synth);
  auto key = key_for("synth", slice, {});
  auto outcome = ws_.run_stage("synth", key, [&] {
    auto out = generate(*config_.synth);
    write_documents(ws_.file("docs.jsonl"), out.documents);
    write_centroids(ws_.file("geometry.csv"), out.geometry);
    write_assignment(ws_.file("truth.csv"), out.truth);
    write_summary(ws_, "synth",
                  {{"documents", out.documents.size()}, {"units", out.geometry.size()}, {"regions", out.truth.n_clusters}});
    return std::vector<std::string>{"docs.jsonl", "geometry.csv", "truth.csv", "synth_summary.json"};
  });
  record("synth", key, outcome);
}

void pipeline::ingest() {
  auto input = input_path();
  auto geometry = geometry_path();
  std::vector<fs::path> inputs{input};
  if (geometry) inputs.push_back(*geometry);
  if (config_.paths.polygons) inputs.push_back(*config_.paths.polygons);
  if (config_.ingest.exclusion_list_path) inputs.push_back(*config_.ingest.exclusion_list_path);
  auto key = key_for("ingest", ingest_slice(config_), inputs);
  auto outcome = ws_.run_stage("ingest", key, [&] {
    auto docs = read_documents(input);
    auto retained = filter_users(docs, config_.ingest);
    auto users = profile_users(docs);
    ingest_diagnostics diag;
    auto counts = build_count_matrix(docs, retained, make_assigner(config_, geometry), config_.ingest, &diag);
    write_count_matrix(ws_.file("counts.csv"), ws_.file("counts.json"), counts, ingest_slice(config_));
    json diagnostics = to_json(diag);
    diagnostics["users_total"] = users.size();
    diagnostics["users_retained"] = retained.size();
    write_json(ws_.file("ingest_diagnostics.json"), diagnostics);
    std::uint64_t retained_tokens = 0;
    for (auto t : counts.unit_totals) retained_tokens += t;
    write_summary(ws_, "ingest",
                  {{"n_units", counts.n_units()},
                   {"n_words", counts.n_words()},
                   {"retained_unit_tokens", retained_tokens},
                   {"diagnostics", diagnostics}});
    return std::vector<std::string>{"counts.csv", "counts.json", "ingest_diagnostics.json", "ingest_summary.json"};
  });
  record("ingest", key, outcome);
}

void pipeline::weights() {
  auto geometry = geometry_path();
  require(geometry.has_value(), errc::missing_artifact, "weights need unit geometry (paths.geometry)");
  auto counts_meta = ws_.require_file("counts.json");
  auto key = key_for("weights", to_json(config_.weights), {*geometry, counts_meta});
  auto outcome = ws_.run_stage("weights", key, [&] {
    auto units = read_json(counts_meta).at("units").get<std::vector<std::string>>();
    auto aligned = align_geometry(read_centroids(*geometry), units);
    auto w = build_weights(aligned, config_.weights);
    write_weights(ws_.file("weights.csv"), ws_.file("weights.json"), w);
    std::size_t isolated = 0, links = 0;
    for (std::size_t c = 0; c < w.size(); ++c) {
      links += w.row_sum(c);
      if (w.row_sum(c) == 1) ++isolated;
    }
    json summary = to_json(config_.weights);
    summary["n_units"] = w.size();
    summary["mean_row_sum"] = w.size() ? static_cast<double>(links) / static_cast<double>(w.size()) : 0.0;
    summary["self_only_units"] = isolated;
    write_summary(ws_, "weights", summary);
    return std::vector<std::string>{"weights.csv", "weights.json", "weights_summary.json"};
  });
  record("weights", key, outcome);
}

void pipeline::hotspots() {
  auto counts_csv = ws_.require_file("counts.csv");
  auto counts_meta = ws_.require_file("counts.json");
  auto weights_csv = ws_.require_file("weights.csv");
  auto weights_meta = ws_.require_file("weights.json");
  auto key = key_for("hotspots", json::object(), {counts_csv, counts_meta, weights_csv, weights_meta});
  auto outcome = ws_.run_stage("hotspots", key, [&] {
    auto counts = read_count_matrix(counts_csv, counts_meta);
    auto w = read_weights(weights_csv, weights_meta);
    auto h = getis_ord(relative_frequencies(counts), counts.unit_ids, counts.vocabulary, w);
    write_hotspots(ws_.file("hotspots.bin"), h);
    std::size_t constant = 0;
    for (Eigen::Index i = 0; i < h.stddevs.size(); ++i)
      if (h.stddevs(i) == 0.0) ++constant;
    write_summary(ws_, "hotspots", {{"n_units", h.unit_ids.size()}, {"n_words", h.vocabulary.size()}, {"constant_words", constant}});
    return std::vector<std::string>{"hotspots.bin", "hotspots_summary.json"};
  });
  record("hotspots", key, outcome);
}

void pipeline::pca() {
  auto hotspots_bin = ws_.require_file("hotspots.bin");
  json slice{{"export_components", config_.export_components}, {"centering", "column-mean"}, {"scaling", "none"}};
  auto key = key_for("pca", slice, {hotspots_bin});
  auto outcome = ws_.run_stage("pca", key, [&] {
    auto model = fit_pca(read_hotspots(hotspots_bin));
    write_pc_model(ws_.file("pca.json"), ws_.file("pca_loadings.bin"), ws_.file("pca_scores.bin"), model);
    std::vector<std::string> outputs{"pca.json", "pca_loadings.bin", "pca_scores.bin"};
    int exported = std::min(config_.export_components, model.n_selected);
    for (int i = 1; i <= exported; ++i) {
      auto loadings = "pc" + std::to_string(i) + "_loadings.csv";
      auto scores = "pc" + std::to_string(i) + "_scores.csv";
      write_component_loadings(ws_.file(loadings), model, i);
      write_component_scores(ws_.file(scores), model, i);
      outputs.push_back(loadings);
      outputs.push_back(scores);
    }
    auto& evr = model.explained_variance_ratio;
    std::vector<double> head(evr.data(), evr.data() + std::min<Eigen::Index>(evr.size(), 10));
    write_summary(ws_, "pca",
                  {{"n_components", model.n_components()},
                   {"n_selected", model.n_selected},
                   {"floor_applied", model.floor_applied},
                   {"cumulative_ratio_selected", model.cumulative_ratio(model.n_selected)},
                   {"cumulative_ratio_first4", model.cumulative_ratio(4)},
                   {"explained_variance_ratio_head", head},
                   {"centering", "column-mean"},
                   {"scaling", "none"}});
    outputs.push_back("pca_summary.json");
    return outputs;
  });
  record("pca", key, outcome);
}

void pipeline::cluster() {
  auto header = ws_.require_file("pca.json");
  auto loadings = ws_.require_file("pca_loadings.bin");
  auto scores = ws_.require_file("pca_scores.bin");
  auto geometry = geometry_path();
  auto truth = truth_path();
  std::vector<fs::path> inputs{header, scores};
  if (geometry) inputs.push_back(*geometry);
  if (config_.paths.polygons) inputs.push_back(*config_.paths.polygons);
  if (truth) inputs.push_back(*truth);
  json slice{{"n_clusters", config_.n_clusters}, {"sweep_min", config_.sweep_min}, {"sweep_max", config_.sweep_max}};
  auto key = key_for("cluster", slice, inputs);
  auto outcome = ws_.run_stage("cluster", key, [&] {
    auto model = read_pc_model(header, loadings, scores);
    Eigen::MatrixXd points = model.selected_scores();
    const auto n = static_cast<int>(points.rows());
    require(config_.n_clusters <= n, errc::invalid_argument,
            "n_clusters=" + std::to_string(config_.n_clusters) + " exceeds the " + std::to_string(n) + " units");
    auto tree = ward_linkage(points);
    int sweep_max = std::min(config_.sweep_max, n);
    std::vector<sweep_entry> sweep;
    if (config_.sweep_min <= sweep_max) sweep = silhouette_sweep(tree, points, config_.sweep_min, sweep_max);
    auto assignment = cut_tree(tree, config_.n_clusters);
    assignment.unit_ids = model.unit_ids;

    write_linkage(ws_.file("linkage.csv"), tree);
    write_sweep(ws_.file("sweep.csv"), sweep);
    write_assignment(ws_.file("assignment.csv"), assignment);
    std::vector<unit_geometry> centroids;
    if (geometry) centroids = read_centroids(*geometry);
    std::optional<polygon_index> polygons;
    if (config_.paths.polygons) polygons = polygon_index::from_geojson(*config_.paths.polygons);
    write_assignment_geojson(ws_.file("assignment.geojson"), assignment, centroids, polygons ? &*polygons : nullptr);

    json sweep_json = json::array();
    for (const auto& e : sweep) sweep_json.push_back({{"n_clusters", e.n_clusters}, {"silhouette", e.score}});
    std::vector<std::size_t> sizes(static_cast<std::size_t>(assignment.n_clusters), 0);
    for (int l : assignment.labels) ++sizes[static_cast<std::size_t>(l - 1)];
    json summary{{"n_units", n}, {"n_dimensions", points.cols()}, {"sweep", sweep_json},
                 {"chosen_cut", config_.n_clusters}, {"cluster_sizes", sizes}};
    if (truth) {
      auto truth_assignment = read_assignment(*truth);
      std::map<std::string, int> by_id;
      for (std::size_t i = 0; i < truth_assignment.unit_ids.size(); ++i)
        by_id.emplace(truth_assignment.unit_ids[i], truth_assignment.labels[i]);
      std::vector<int> expected, found;
      for (std::size_t i = 0; i < assignment.unit_ids.size(); ++i) {
        auto it = by_id.find(assignment.unit_ids[i]);
        if (it == by_id.end()) continue;
        expected.push_back(it->second);
        found.push_back(assignment.labels[i]);
      }
      summary["truth_clusters"] = truth_assignment.n_clusters;
      summary["ari_vs_truth"] = adjusted_rand_index(found, expected);
      if (truth_assignment.n_clusters >= 1 && truth_assignment.n_clusters <= n) {
        auto at_truth = cut_tree(tree, truth_assignment.n_clusters);
        at_truth.unit_ids = model.unit_ids;
        std::vector<int> found_at_truth;
        for (std::size_t i = 0; i < at_truth.unit_ids.size(); ++i)
          if (by_id.contains(at_truth.unit_ids[i])) found_at_truth.push_back(at_truth.labels[i]);
        summary["ari_vs_truth_at_truth_cut"] = adjusted_rand_index(found_at_truth, expected);
      }
    }
    write_summary(ws_, "cluster", summary);
    return std::vector<std::string>{"linkage.csv", "sweep.csv", "assignment.csv", "assignment.geojson", "cluster_summary.json"};
  });
  record("cluster", key, outcome);
}

void pipeline::specificity() {
  auto hotspots_bin = ws_.require_file("hotspots.bin");
  auto assignment_csv = ws_.require_file("assignment.csv");
  json slice{{"top_words", config_.top_words}};
  auto key = key_for("specificity", slice, {hotspots_bin, assignment_csv});
  auto outcome = ws_.run_stage("specificity", key, [&] {
    auto h = read_hotspots(hotspots_bin);
    auto assignment = read_assignment(assignment_csv);
    auto table = lexreg::specificity(h, assignment);
    std::vector<std::string> outputs;
    json clusters = json::array();
    for (int c = 1; c <= table.n_clusters; ++c) {
      auto name = "specificity_cluster" + std::to_string(c) + ".csv";
      write_specificity(ws_.file(name), table, c, static_cast<std::size_t>(config_.top_words));
      outputs.push_back(name);
      json top = json::array();
      for (const auto& w : characteristic_words(table, c, std::min(5, config_.top_words)))
        top.push_back({{"word", w.word}, {"specificity", w.specificity}, {"sign", w.sign}});
      clusters.push_back({{"cluster", c}, {"size", assignment.members(c).size()}, {"top_words", top}});
    }
    write_summary(ws_, "specificity", {{"clusters", clusters}});
    outputs.push_back("specificity_summary.json");
    return outputs;
  });
  record("specificity", key, outcome);
}

void pipeline::temporal() {
  require(config_.periods.has_value(), errc::invalid_config, "no periods configured");
  auto input = input_path();
  auto geometry = geometry_path();
  auto counts_csv = ws_.require_file("counts.csv");
  auto counts_meta = ws_.require_file("counts.json");
  auto weights_csv = ws_.require_file("weights.csv");
  auto weights_meta = ws_.require_file("weights.json");
  auto linkage_csv = ws_.require_file("linkage.csv");
  std::vector<fs::path> inputs{input, counts_csv, counts_meta, weights_csv, weights_meta, linkage_csv};
  if (geometry) inputs.push_back(*geometry);
  if (config_.paths.polygons) inputs.push_back(*config_.paths.polygons);
  json slice{{"periods", to_json(*config_.periods)},
             {"max_pairs", config_.temporal_max_pairs},
             {"seed", config_.seed},
             {"ingest", ingest_slice(config_)}};
  auto key = key_for("temporal", slice, inputs);
  auto outcome = ws_.run_stage("temporal", key, [&] {
    auto docs = read_documents(input);
    auto retained = filter_users(docs, config_.ingest);
    auto assigner = make_assigner(config_, geometry);
    auto full = read_count_matrix(counts_csv, counts_meta);
    auto w = read_weights(weights_csv, weights_meta);
    auto tree = read_linkage(linkage_csv);
    auto reference = cut_tree(tree, 2);
    reference.unit_ids = full.unit_ids;

    auto split = split_periods(docs, *config_.periods);
    std::vector<distribution_stats> stats;
    std::vector<std::string> outputs;
    json periods = json::array();
    for (std::size_t p = 0; p < split.streams.size(); ++p) {
      const auto& label = config_.periods->periods[p].label;
      auto tally = tally_documents(split.streams[p], retained, assigner, config_.ingest);
      auto counts = project_counts(tally, full);
      auto h = getis_ord(relative_frequencies(counts, true), counts.unit_ids, counts.vocabulary, w);
      pair_sampling sampling{false, config_.temporal_max_pairs, config_.seed + p};
      auto distances = inter_cluster_distances(h, reference, sampling);
      auto s = boxplot_stats(distances.distances, label);
      stats.push_back(s);

      auto model = fit_pca(h);
      auto pc1 = "temporal_" + safe_label(label) + "_pc1_scores.csv";
      write_component_scores(ws_.file(pc1), model, 1);
      outputs.push_back(pc1);

      std::vector<std::string> thin;
      std::uint64_t tokens = 0;
      for (std::size_t c = 0; c < counts.n_units(); ++c) {
        tokens += counts.unit_totals[c];
        if (counts.unit_totals[c] < config_.ingest.min_tokens) thin.push_back(counts.unit_ids[c]);
      }
      periods.push_back({{"label", label},
                         {"documents", split.streams[p].size()},
                         {"tokens", tokens},
                         {"thin_units", thin},
                         {"missing_units", distances.missing_units},
                         {"pairs", s.count},
                         {"median", s.median},
                         {"q1", s.q1},
                         {"q3", s.q3},
                         {"whisker_low", s.whisker_low},
                         {"whisker_high", s.whisker_high}});
    }
    write_distribution_stats(ws_.file("temporal_stats.csv"), stats);
    outputs.push_back("temporal_stats.csv");
    write_summary(ws_, "temporal", {{"periods", periods}, {"dropped_documents", split.dropped}});
    outputs.push_back("temporal_summary.json");
    return outputs;
  });
  record("temporal", key, outcome);
}

json pipeline::report() const {
  json stages = json::array();
  for (const auto& s : stages_)
    stages.push_back({{"name", s.name}, {"key", s.key}, {"cache", s.outcome == workspace::outcome::cache_hit ? "hit" : "ran"}});
  json r{
    {"format", "lexreg.report/1"},
    {"status", "ok"},
    {"software", software_fingerprint()},
    {"config", to_json(config_)},
    {"stages", stages},
  };
  for (const auto* name : {"synth", "ingest", "weights", "hotspots", "pca", "cluster", "specificity", "temporal"}) {
    auto path = ws_.file(std::string(name) + "_summary.json");
    if (fs::is_regular_file(path)) r[name] = read_json(path);
  }
  if (r.contains("ingest")) {
    r["n_units"] = r["ingest"]["n_units"];
    r["n_words"] = r["ingest"]["n_words"];
  }
  if (r.contains("pca")) {
    r["n_pc"] = r["pca"]["n_selected"];
    r["cumulative_evr"] = r["pca"]["cumulative_ratio_selected"];
  }
  if (r.contains("cluster")) {
    r["sweep"] = r["cluster"]["sweep"];
    r["chosen_cut"] = r["cluster"]["chosen_cut"];
  }
  return r;
}

void pipeline::write_report(const json& report) const { write_json(ws_.file("report.json"), report); }

json pipeline::run_all() {
  std::string current;
  auto step = [&](const char* name, auto&& fn) {
    current = name;
    fn();
  };
  try {
    if (config_.synth && !config_.paths.input) step("synth", [&] { synth(); });
    step("ingest", [&] { ingest(); });
    step("weights", [&] { weights(); });
    step("hotspots", [&] { hotspots(); });
    step("pca", [&] { pca(); });
    step("cluster", [&] { cluster(); });
    step("specificity", [&] { specificity(); });
    if (config_.periods) step("temporal", [&] { temporal(); });
  } catch (const std::exception& e) {
    json failed = report();
    failed["status"] = "failed";
    failed["failed_stage"] = current;
    failed["error"] = e.what();
    failed["partial_outputs"] = ws_.manifest()["stages"].value(current, json::object()).value("partial_outputs", json::array());
    write_report(failed);
    throw;
  }
  auto r = report();
  write_report(r);
  return r;
}

json run_pipeline(const run_config& config) {
  pipeline p(config);
  return p.run_all();
}

}  // namespace lexreg
