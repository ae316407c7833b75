#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <lexreg/clustering.hpp>
#include <lexreg/corpus.hpp>
#include <lexreg/geometry.hpp>
#include <lexreg/timestamp.hpp>

namespace lexreg {

using lexicon = std::vector<std::pair<std::string, double>>;

struct synth_config {
  int rows = 10;
  int cols = 10;
  // Ground-truth region per unit, row-major over the grid (0-based ids).
  std::vector<int> region_map;
  std::vector<lexicon> region_lexicons;
  lexicon background;
  int docs_per_unit = 2000;
  int tokens_min = 40;
  int tokens_max = 60;
  // Probability that a token comes from the background lexicon.
  double epsilon = 0.3;
  std::uint64_t seed = 1;
  // Grid origin and spacing in degrees; 0.5 degree is roughly 55 km.
  double origin_lat = 35.0;
  double origin_lon = -100.0;
  double spacing_deg = 0.5;
  instant time_start = std::chrono::sys_days{std::chrono::year{2015} / 1 / 1};
  instant time_end = std::chrono::sys_days{std::chrono::year{2017} / 1 / 1};
  int users_per_unit = 20;

  void validate() const;
  std::size_t n_units() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
};

nlohmann::json to_json(const synth_config& config);
// Accepts either explicit lexicons or the compact planted form
// {"regions": R, "topic_words": T, "background_words": B}.
synth_config synth_config_from_json(const nlohmann::json& j);

// Regions as horizontal bands of rows. East-west spacing in km is the
// shorter one away from the equator, so nearest-neighbour sets reach further
// along a row than across rows and bands keep a clean interior.
// Region r owns topic words "t<r letter><2 letters>"; all units share the
// background words "b<3 letters>". Weights decay harmonically so word
// frequencies vary.
synth_config planted_config(int rows, int cols, int n_regions, int topic_words, int background_words);

struct synth_output {
  std::vector<geo_document> documents;
  cluster_assignment truth;
  std::vector<unit_geometry> geometry;
};

// Deterministic in the config (seed included). Documents are ordered by
// (unit, document index); every document is from a "mobile" source.
synth_output generate(const synth_config& config);

std::string synth_unit_id(int row, int col);

}  // namespace lexreg
