#include <lexreg/config.hpp>

#include <cstdlib>
#include <fstream>

#include <lexreg/error.hpp>

namespace lexreg {

using nlohmann::json;

void run_config::validate() const {
  ingest.validate();
  if (weights.mode == weights_mode::knn) {
    require(weights.k >= 0, errc::invalid_config, "k_neighbors must be non-negative");
  } else {
    require(weights.band_km > 0.0, errc::invalid_config, "band_km must be positive");
  }
  require(n_clusters >= 2, errc::invalid_config,
          "n_clusters must be at least 2 (got " + std::to_string(n_clusters) + ")");
  require(sweep_min >= 2 && sweep_min <= sweep_max, errc::invalid_config, "sweep bounds must satisfy 2 <= min <= max");
  require(top_words >= 1, errc::invalid_config, "top_words must be at least 1");
  require(export_components >= 0, errc::invalid_config, "export_components must be non-negative");
  if (periods) {
    try {
      periods->validate();
    } catch (const error& e) {
      fail(errc::invalid_config, e.what());
    }
  }
  if (synth) synth->validate();
}

namespace {

std::optional<std::filesystem::path> optional_path(const json& j, const char* key,
                                                   const std::filesystem::path& base) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  std::filesystem::path p = j.at(key).get<std::string>();
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

json path_json(const std::optional<std::filesystem::path>& p) {
  if (!p) return nullptr;
  return p->string();
}

}  // namespace

run_config run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  run_config c;
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    c.threads = j.value("threads", 0u);

    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      c.paths.input = optional_path(p, "input", base_dir);
      c.paths.geometry = optional_path(p, "geometry", base_dir);
      c.paths.polygons = optional_path(p, "polygons", base_dir);
      c.paths.truth = optional_path(p, "truth", base_dir);
      if (auto out = optional_path(p, "out_dir", base_dir)) c.paths.out_dir = *out;
      c.ingest.exclusion_list_path = optional_path(p, "exclusion_list", base_dir);
    }
    if (const char* env = std::getenv(out_dir_env); env && *env) c.paths.out_dir = env;

    if (j.contains("ingest")) {
      const auto& in = j.at("ingest");
      c.ingest.max_rate_per_hour = in.value("max_rate_per_hour", c.ingest.max_rate_per_hour);
      if (in.contains("allowed_sources")) {
        c.ingest.allowed_sources.clear();
        for (const auto& s : in.at("allowed_sources")) c.ingest.allowed_sources.insert(parse_source(s.get<std::string>()));
      }
      c.ingest.min_words_after_clean = in.value("min_words_after_clean", c.ingest.min_words_after_clean);
      c.ingest.min_tokens = in.value("min_tokens", c.ingest.min_tokens);
      c.ingest.vocab_size = in.value("vocab_size", c.ingest.vocab_size);
      c.ingest.stemming = in.value("stemming", c.ingest.stemming);
      if (in.contains("excluded_words"))
        for (const auto& w : in.at("excluded_words")) c.ingest.excluded_words.insert(w.get<std::string>());
    }
    if (j.contains("weights")) c.weights = weights_descriptor_from_json(j.at("weights"));
    if (j.contains("clustering")) {
      const auto& cl = j.at("clustering");
      c.n_clusters = cl.value("n_clusters", c.n_clusters);
      c.sweep_min = cl.value("sweep_min", c.sweep_min);
      c.sweep_max = cl.value("sweep_max", c.sweep_max);
      c.top_words = cl.value("top_words", c.top_words);
    }
    if (j.contains("pca")) c.export_components = j.at("pca").value("export_components", c.export_components);
    if (j.contains("periods")) c.periods = period_spec_from_json(j.at("periods"));
    if (j.contains("temporal")) c.temporal_max_pairs = j.at("temporal").value("max_pairs", c.temporal_max_pairs);
    if (j.contains("synth")) {
      json s = j.at("synth");
      if (!s.contains("seed")) s["seed"] = c.seed;
      c.synth = synth_config_from_json(s);
    }
  } catch (const json::exception& e) {
    fail(errc::invalid_config, e.what());
  }
  return c;
}

run_config load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), errc::invalid_config, "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    fail(errc::invalid_config, path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

json to_json(const run_config& c) {
  json paths{
    {"input", path_json(c.paths.input)},
    {"geometry", path_json(c.paths.geometry)},
    {"polygons", path_json(c.paths.polygons)},
    {"truth", path_json(c.paths.truth)},
    {"out_dir", c.paths.out_dir.string()},
  };
  json out{
    {"seed", c.seed},
    {"threads", c.threads},
    {"paths", paths},
    {"ingest", to_json(c.ingest)},
    {"weights", to_json(c.weights)},
    {"clustering",
     {{"n_clusters", c.n_clusters}, {"sweep_min", c.sweep_min}, {"sweep_max", c.sweep_max}, {"top_words", c.top_words}}},
    {"pca", {{"export_components", c.export_components}, {"centering", "column-mean"}, {"scaling", "none"}}},
    {"temporal", {{"max_pairs", c.temporal_max_pairs}}},
  };
  out["periods"] = c.periods ? to_json(*c.periods) : json(nullptr);
  out["synth"] = c.synth ? to_json(*c.synth) : json(nullptr);
  return out;
}

}  // namespace lexreg
