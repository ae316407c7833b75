#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <lexreg/config.hpp>

namespace lexreg {

nlohmann::json software_fingerprint();

// Output directory with a manifest of content-addressed stage results. A
// stage is skipped when its key matches the manifest and every recorded
// output still has the recorded hash.
class workspace {
 public:
  explicit workspace(std::filesystem::path out_dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path file(const std::string& name) const { return dir_ / name; }

  // File that must already exist (written by an earlier stage or given by path).
  std::filesystem::path require_file(const std::string& name) const;

  enum class outcome { ran, cache_hit };

  // `produce` returns the names of the files it wrote. On failure the stage is
  // recorded as failed, with any files it left behind listed as partial.
  outcome run_stage(const std::string& stage, const std::string& key,
                    const std::function<std::vector<std::string>()>& produce);

  const nlohmann::json& manifest() const { return manifest_; }

 private:
  void save_manifest() const;

  std::filesystem::path dir_;
  nlohmann::json manifest_;
};

struct stage_record {
  std::string name;
  std::string key;
  workspace::outcome outcome;
};

// Stages read their inputs from the workspace (or configured paths) and write
// their outputs back to it. Each stage may be run on its own provided its
// inputs exist.
class pipeline {
 public:
  explicit pipeline(run_config config);

  void synth();
  void ingest();
  void weights();
  void hotspots();
  void pca();
  void cluster();
  void specificity();
  void temporal();

  // Every stage in order (synth only when configured without an input). The
  // report is written to report.json and returned.
  nlohmann::json run_all();

  nlohmann::json report() const;
  void write_report(const nlohmann::json& report) const;
  const std::vector<stage_record>& stages() const { return stages_; }
  workspace& work() { return ws_; }
  const run_config& config() const { return config_; }

 private:
  std::filesystem::path input_path() const;
  std::optional<std::filesystem::path> geometry_path() const;
  std::optional<std::filesystem::path> truth_path() const;
  std::string key_for(const std::string& stage, const nlohmann::json& slice,
                      const std::vector<std::filesystem::path>& inputs) const;
  void record(const std::string& stage, const std::string& key, workspace::outcome outcome);

  run_config config_;
  workspace ws_;
  std::vector<stage_record> stages_;
};

// Convenience wrapper: validate, run every stage, return the report.
nlohmann::json run_pipeline(const run_config& config);

}  // namespace lexreg
