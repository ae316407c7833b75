#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include <lexreg/corpus.hpp>
#include <lexreg/spatial.hpp>
#include <lexreg/synth.hpp>
#include <lexreg/temporal.hpp>

namespace lexreg {

struct run_paths {
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> geometry;
  std::optional<std::filesystem::path> polygons;
  std::optional<std::filesystem::path> truth;
  std::filesystem::path out_dir = "lexreg-out";
};

struct run_config {
  ingest_config ingest;
  weights_descriptor weights;
  int n_clusters = 5;
  int sweep_min = 2;
  int sweep_max = 15;
  // Characteristic words exported per cluster.
  int top_words = 20;
  // Components with per-component CSV extractions.
  int export_components = 4;
  std::optional<period_spec> periods;
  std::size_t temporal_max_pairs = 0;
  std::optional<synth_config> synth;
  run_paths paths;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  // Parameter checks that do not touch the filesystem.
  void validate() const;
};

// Environment override for the output directory.
inline constexpr const char* out_dir_env = "LEXREG_OUT_DIR";

// Relative paths are resolved against `base_dir`.
run_config run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
run_config load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const run_config& config);

}  // namespace lexreg
