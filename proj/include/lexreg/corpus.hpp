#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include <lexreg/geometry.hpp>
#include <lexreg/timestamp.hpp>

namespace lexreg {

enum class source_kind { mobile, web, automation, other };

source_kind parse_source(std::string_view label);
std::string_view to_string(source_kind source);

struct geo_document {
  std::string doc_id;
  std::string user_id;
  std::optional<std::string> unit_id;
  std::optional<double> latitude;
  std::optional<double> longitude;
  instant timestamp{};
  source_kind source = source_kind::other;
  std::string text;
};

// JSON-lines record with fields doc_id, user_id, unit_id, lat, lon, ts,
// source, text. Exactly one of unit_id or (lat, lon) must be present.
geo_document parse_document(std::string_view json_line);
std::string to_json_line(const geo_document& doc);

std::vector<geo_document> read_documents(const std::filesystem::path& path);
void write_documents(const std::filesystem::path& path, std::span<const geo_document> docs);

struct user_profile {
  std::string user_id;
  instant first_seen{};
  instant last_seen{};
  std::uint64_t doc_count = 0;
  std::set<source_kind> sources_seen;

  double rate_per_hour() const;
};

// Eight bytes at a time with a multiply-xorshift mix; words are short.
struct word_hash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    constexpr std::uint64_t k = 0x9E3779B97F4A7C15ull;
    const char* p = s.data();
    const std::size_t n = s.size();
    auto mix = [&](std::uint64_t h, std::uint64_t chunk) {
      h = (h ^ chunk) * k;
      return h ^ (h >> 32);
    };
    std::uint64_t h = n * k;
    if (n >= 8) {
      std::uint64_t chunk;
      for (std::size_t i = 0; i + 8 < n; i += 8) {
        std::memcpy(&chunk, p + i, 8);
        h = mix(h, chunk);
      }
      std::memcpy(&chunk, p + n - 8, 8);
      return static_cast<std::size_t>(mix(h, chunk));
    }
    if (n >= 4) {
      std::uint32_t lo, hi;
      std::memcpy(&lo, p, 4);
      std::memcpy(&hi, p + n - 4, 4);
      return static_cast<std::size_t>(mix(h, (std::uint64_t{hi} << 32) | lo));
    }
    std::uint64_t chunk = 0;
    for (std::size_t i = 0; i < n; ++i) chunk |= std::uint64_t{static_cast<unsigned char>(p[i])} << (8 * i);
    return static_cast<std::size_t>(mix(h, chunk));
  }
};

// Compares short words with two overlapping loads instead of a memcmp call.
struct word_equal {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const noexcept {
    const std::size_t n = a.size();
    if (n != b.size()) return false;
    if (n >= 8 && n <= 16) return same_bytes<8>(a.data(), b.data()) && same_bytes<8>(a.data() + n - 8, b.data() + n - 8);
    if (n >= 4 && n < 8) return same_bytes<4>(a.data(), b.data()) && same_bytes<4>(a.data() + n - 4, b.data() + n - 4);
    return a == b;
  }

 private:
  template <std::size_t N>
  static bool same_bytes(const char* x, const char* y) noexcept {
    using word = std::conditional_t<N == 8, std::uint64_t, std::uint32_t>;
    word u, v;
    std::memcpy(&u, x, N);
    std::memcpy(&v, y, N);
    return u == v;
  }
};

// Hash containers keyed by word that accept string_view lookups.
using word_set = std::unordered_set<std::string, word_hash, word_equal>;
using word_counts = std::unordered_map<std::string, std::uint64_t, word_hash, word_equal>;

struct ingest_config {
  double max_rate_per_hour = 10.0;
  std::set<source_kind> allowed_sources{source_kind::mobile, source_kind::web};
  int min_words_after_clean = 5;
  std::uint64_t min_tokens = 50000;
  std::size_t vocab_size = 10000;
  std::optional<std::filesystem::path> exclusion_list_path;
  // Loaded from exclusion_list_path, or filled directly.
  word_set excluded_words;
  bool stemming = false;
  // Text -> keep. Empty means accept everything.
  std::function<bool(std::string_view)> language_predicate;

  void validate() const;
  // Reads exclusion_list_path into excluded_words when set.
  void load_exclusions();
};

nlohmann::json to_json(const ingest_config& config);

// UTF-8, one word per line, '#' starts a comment, blank lines ignored.
word_set parse_exclusion_list(std::istream& in);
word_set load_exclusion_list(const std::filesystem::path& path);

// First pass: per-user activity.
std::map<std::string, user_profile> profile_users(std::span<const geo_document> docs);

// A user is kept iff doc_count / max(span_hours, 1) <= max_rate_per_hour and
// every source the user posted from is allowed.
std::set<std::string> filter_users(std::span<const geo_document> docs, const ingest_config& config);

using unit_assigner = std::function<std::optional<std::string>(const geo_document&)>;

// Explicit unit_id only.
unit_assigner passthrough_assigner();
// Explicit unit_id passes through; coordinates map to the nearest centroid
// within max_km (unbounded when max_km <= 0).
unit_assigner nearest_centroid_assigner(std::vector<unit_geometry> centroids, double max_km = 0.0);
// Explicit unit_id passes through; coordinates map to the containing polygon.
unit_assigner polygon_assigner(polygon_index polygons);

struct ingest_diagnostics {
  std::uint64_t documents_seen = 0;
  std::uint64_t from_discarded_users = 0;
  std::uint64_t unassigned = 0;
  std::uint64_t too_short = 0;
  std::uint64_t rejected_language = 0;
  std::uint64_t documents_counted = 0;
  std::uint64_t tokens_counted = 0;
  std::uint64_t tokens_excluded = 0;
  std::uint64_t units_seen = 0;
  std::uint64_t units_below_threshold = 0;
  std::uint64_t distinct_forms = 0;

  void merge(const ingest_diagnostics& other);
};

nlohmann::json to_json(const ingest_diagnostics& d);

// Per-unit word tallies before thresholding and vocabulary truncation.
struct corpus_tally {
  std::unordered_map<std::string, word_counts> counts;
  std::unordered_map<std::string, std::uint64_t> totals;
  ingest_diagnostics diagnostics;

  void merge(corpus_tally&& other);
};

corpus_tally tally_documents(std::span<const geo_document> docs, const std::set<std::string>& retained_users,
                             const unit_assigner& assign, const ingest_config& config);

struct count_entry {
  std::uint32_t word;
  std::uint64_t count;

  friend bool operator==(const count_entry&, const count_entry&) = default;
};

struct count_matrix {
  std::vector<std::string> unit_ids;
  std::vector<std::string> vocabulary;
  // One row per unit, entries sorted by word index, zero counts omitted.
  std::vector<std::vector<count_entry>> rows;
  // Non-excluded tokens per unit, measured before vocabulary truncation.
  std::vector<std::uint64_t> unit_totals;

  std::size_t n_units() const { return unit_ids.size(); }
  std::size_t n_words() const { return vocabulary.size(); }
  std::uint64_t count(std::size_t unit, std::size_t word) const;

  friend bool operator==(const count_matrix&, const count_matrix&) = default;
};

// Applies the unit threshold and keeps the vocab_size most frequent forms
// (ties broken lexicographically). Units are ordered by unit_id.
count_matrix finalize_counts(const corpus_tally& tally, const ingest_config& config,
                             ingest_diagnostics* diagnostics = nullptr);

// Full two-pass build over `shards` contiguous pieces of the stream; the
// merged result does not depend on the shard count.
count_matrix build_count_matrix(std::span<const geo_document> docs, const std::set<std::string>& retained_users,
                                const unit_assigner& assign, const ingest_config& config,
                                ingest_diagnostics* diagnostics = nullptr, std::size_t shards = 0);

// Tally projected onto a reference unit set and vocabulary (no threshold, no
// truncation). Units without tokens get empty rows and zero totals.
count_matrix project_counts(const corpus_tally& tally, const count_matrix& reference);

// f[c, w] = counts[c, w] / unit_totals[c]. Units with a zero total are
// rejected unless allow_empty_units is set, in which case their row is zero.
Eigen::MatrixXd relative_frequencies(const count_matrix& counts, bool allow_empty_units = false);

// Triplet CSV `unit_id,word,count` plus a JSON sidecar with unit order,
// vocabulary order, unit totals and a config echo.
void write_count_matrix(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path,
                        const count_matrix& counts, const nlohmann::json& config_echo = {});
count_matrix read_count_matrix(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path);

}  // namespace lexreg
