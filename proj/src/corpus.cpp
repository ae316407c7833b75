#include <lexreg/corpus.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <lexreg/csv.hpp>
#include <lexreg/error.hpp>
#include <lexreg/parallel.hpp>
#include <lexreg/text.hpp>

namespace lexreg {

using nlohmann::json;

source_kind parse_source(std::string_view label) {
  if (label == "mobile") return source_kind::mobile;
  if (label == "web") return source_kind::web;
  if (label == "automation") return source_kind::automation;
  return source_kind::other;
}

std::string_view to_string(source_kind source) {
  switch (source) {
    case source_kind::mobile: return "mobile";
    case source_kind::web: return "web";
    case source_kind::automation: return "automation";
    case source_kind::other: return "other";
  }
  return "other";
}

namespace {

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  return it->dump();
}

std::optional<double> optional_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) fail(errc::parse_error, std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

std::string required_string(const json& j, const char* key) {
  auto value = optional_string(j, key);
  if (!value) fail(errc::parse_error, std::string("missing field '") + key + "'");
  return *value;
}

}  // namespace

geo_document parse_document(std::string_view json_line) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::exception& e) {
    fail(errc::parse_error, e.what());
  }
  require(j.is_object(), errc::parse_error, "document must be a JSON object");
  geo_document doc;
  doc.doc_id = required_string(j, "doc_id");
  doc.user_id = required_string(j, "user_id");
  doc.unit_id = optional_string(j, "unit_id");
  doc.latitude = optional_number(j, "lat");
  doc.longitude = optional_number(j, "lon");
  doc.timestamp = parse_iso8601(required_string(j, "ts"));
  doc.source = parse_source(optional_string(j, "source").value_or("other"));
  doc.text = optional_string(j, "text").value_or("");

  bool has_coords = doc.latitude.has_value() && doc.longitude.has_value();
  require(doc.latitude.has_value() == doc.longitude.has_value(), errc::parse_error,
          "document " + doc.doc_id + ": lat and lon must be given together");
  require(doc.unit_id.has_value() != has_coords, errc::parse_error,
          "document " + doc.doc_id + ": exactly one of unit_id or lat/lon is required");
  return doc;
}

std::string to_json_line(const geo_document& doc) {
  json j;
  j["doc_id"] = doc.doc_id;
  j["user_id"] = doc.user_id;
  if (doc.unit_id) j["unit_id"] = *doc.unit_id;
  if (doc.latitude) j["lat"] = *doc.latitude;
  if (doc.longitude) j["lon"] = *doc.longitude;
  j["ts"] = format_iso8601(doc.timestamp);
  j["source"] = std::string(to_string(doc.source));
  j["text"] = doc.text;
  return j.dump();
}

std::vector<geo_document> read_documents(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path.string());
  std::vector<geo_document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(parse_document(line));
    } catch (const error& e) {
      fail(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

void write_documents(const std::filesystem::path& path, std::span<const geo_document> docs) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  for (const auto& d : docs) out << to_json_line(d) << '\n';
}

double user_profile::rate_per_hour() const {
  double span_hours = std::chrono::duration<double>(last_seen - first_seen).count() / 3600.0;
  return static_cast<double>(doc_count) / std::max(span_hours, 1.0);
}

void ingest_config::validate() const {
  require(max_rate_per_hour > 0.0, errc::invalid_config, "max_rate_per_hour must be positive");
  require(min_words_after_clean > 0, errc::invalid_config, "min_words_after_clean must be positive");
  require(min_tokens > 0, errc::invalid_config, "min_tokens must be positive");
  require(vocab_size > 0, errc::invalid_config, "vocab_size must be positive");
  require(!allowed_sources.empty(), errc::invalid_config, "allowed_sources must not be empty");
}

void ingest_config::load_exclusions() {
  if (exclusion_list_path) excluded_words = load_exclusion_list(*exclusion_list_path);
}

json to_json(const ingest_config& c) {
  json sources = json::array();
  for (auto s : c.allowed_sources) sources.push_back(std::string(to_string(s)));
  std::vector<std::string> excluded(c.excluded_words.begin(), c.excluded_words.end());
  std::sort(excluded.begin(), excluded.end());
  return json{
    {"max_rate_per_hour", c.max_rate_per_hour},
    {"allowed_sources", sources},
    {"min_words_after_clean", c.min_words_after_clean},
    {"min_tokens", c.min_tokens},
    {"vocab_size", c.vocab_size},
    {"exclusion_list_path", c.exclusion_list_path ? json(c.exclusion_list_path->string()) : json(nullptr)},
    {"excluded_words", excluded},
    {"stemming", c.stemming},
    {"language_predicate", c.language_predicate ? "custom" : "accept_all"},
  };
}

word_set parse_exclusion_list(std::istream& in) {
  word_set words;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    auto end = line.find_last_not_of(" \t\r");
    std::string_view entry(line.data() + begin, end - begin + 1);
    std::string lowered;
    for (std::size_t pos = 0; pos < entry.size();) detail::append_utf8(lowered, detail::to_lower(detail::decode_utf8(entry, pos)));
    words.insert(std::move(lowered));
  }
  return words;
}

word_set load_exclusion_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open exclusion list " + path.string());
  return parse_exclusion_list(in);
}

std::map<std::string, user_profile> profile_users(std::span<const geo_document> docs) {
  std::map<std::string, user_profile> users;
  for (const auto& d : docs) {
    auto [it, inserted] = users.try_emplace(d.user_id);
    auto& p = it->second;
    if (inserted) {
      p.user_id = d.user_id;
      p.first_seen = p.last_seen = d.timestamp;
    } else {
      p.first_seen = std::min(p.first_seen, d.timestamp);
      p.last_seen = std::max(p.last_seen, d.timestamp);
    }
    ++p.doc_count;
    p.sources_seen.insert(d.source);
  }
  return users;
}

std::set<std::string> filter_users(std::span<const geo_document> docs, const ingest_config& config) {
  require(!docs.empty(), errc::empty_corpus, "document stream is empty");
  std::set<std::string> retained;
  for (const auto& [id, profile] : profile_users(docs)) {
    if (profile.rate_per_hour() > config.max_rate_per_hour) continue;
    bool sources_ok = std::all_of(profile.sources_seen.begin(), profile.sources_seen.end(),
                                  [&](source_kind s) { return config.allowed_sources.contains(s); });
    if (sources_ok) retained.insert(id);
  }
  return retained;
}

unit_assigner passthrough_assigner() {
  return [](const geo_document& d) { return d.unit_id; };
}

unit_assigner nearest_centroid_assigner(std::vector<unit_geometry> centroids, double max_km) {
  return [centroids = std::move(centroids), max_km](const geo_document& d) -> std::optional<std::string> {
    if (d.unit_id) return d.unit_id;
    if (!d.latitude || !d.longitude || centroids.empty()) return std::nullopt;
    double best = std::numeric_limits<double>::infinity();
    const unit_geometry* best_unit = nullptr;
    for (const auto& u : centroids) {
      double dist = haversine_km(*d.latitude, *d.longitude, u.latitude, u.longitude);
      if (dist < best || (dist == best && best_unit && u.unit_id < best_unit->unit_id)) {
        best = dist;
        best_unit = &u;
      }
    }
    if (max_km > 0.0 && best > max_km) return std::nullopt;
    return best_unit->unit_id;
  };
}

unit_assigner polygon_assigner(polygon_index polygons) {
  return [polygons = std::move(polygons)](const geo_document& d) -> std::optional<std::string> {
    if (d.unit_id) return d.unit_id;
    if (!d.latitude || !d.longitude) return std::nullopt;
    return polygons.locate(*d.latitude, *d.longitude);
  };
}

void ingest_diagnostics::merge(const ingest_diagnostics& o) {
  documents_seen += o.documents_seen;
  from_discarded_users += o.from_discarded_users;
  unassigned += o.unassigned;
  too_short += o.too_short;
  rejected_language += o.rejected_language;
  documents_counted += o.documents_counted;
  tokens_counted += o.tokens_counted;
  tokens_excluded += o.tokens_excluded;
}

json to_json(const ingest_diagnostics& d) {
  return json{
    {"documents_seen", d.documents_seen},
    {"from_discarded_users", d.from_discarded_users},
    {"unassigned", d.unassigned},
    {"too_short", d.too_short},
    {"rejected_language", d.rejected_language},
    {"documents_counted", d.documents_counted},
    {"tokens_counted", d.tokens_counted},
    {"tokens_excluded", d.tokens_excluded},
    {"units_seen", d.units_seen},
    {"units_below_threshold", d.units_below_threshold},
    {"distinct_forms", d.distinct_forms},
  };
}

void corpus_tally::merge(corpus_tally&& other) {
  for (auto& [unit, words] : other.counts) {
    auto& mine = counts[unit];
    if (mine.empty()) {
      mine = std::move(words);
      continue;
    }
    for (auto& [word, n] : words) mine[word] += n;
  }
  for (auto& [unit, n] : other.totals) totals[unit] += n;
  diagnostics.merge(other.diagnostics);
}

corpus_tally tally_documents(std::span<const geo_document> docs, const std::set<std::string>& retained_users,
                             const unit_assigner& assign, const ingest_config& config) {
  corpus_tally tally;
  auto& diag = tally.diagnostics;
  std::string scratch;
  std::vector<std::string_view> segments;
  for (const auto& d : docs) {
    ++diag.documents_seen;
    if (!retained_users.contains(d.user_id)) {
      ++diag.from_discarded_users;
      continue;
    }
    std::optional<std::string> unit;
    try {
      unit = assign(d);
    } catch (const std::exception&) {
      unit.reset();
    }
    if (!unit) {
      ++diag.unassigned;
      continue;
    }
    const auto min_words = static_cast<std::size_t>(config.min_words_after_clean);
    std::size_t kept;
    if (may_need_cleaning(d.text)) {
      kept_segments(d.text, segments);
      kept = segments.size();
    } else {
      segments.assign(1, d.text);
      kept = count_tokens(d.text, min_words);
    }
    if (kept < min_words) {
      ++diag.too_short;
      continue;
    }
    if (config.language_predicate && !config.language_predicate(*clean_text(d.text, 0))) {
      ++diag.rejected_language;
      continue;
    }
    ++diag.documents_counted;
    auto& unit_counts = tally.counts[*unit];
    auto& unit_total = tally.totals[*unit];
    auto count_word = [&](std::string_view word) {
      if (!config.excluded_words.empty() && config.excluded_words.contains(word)) {
        ++diag.tokens_excluded;
        return;
      }
      std::string stemmed;
      if (config.stemming) {
        stemmed = stem_plurals(word);
        word = stemmed;
      }
      if (auto it = unit_counts.find(word); it != unit_counts.end()) {
        ++it->second;
      } else {
        unit_counts.emplace(std::string(word), 1);
      }
      ++unit_total;
      ++diag.tokens_counted;
    };
    for (auto segment : segments) for_each_token(segment, scratch, count_word);
  }
  return tally;
}

std::uint64_t count_matrix::count(std::size_t unit, std::size_t word) const {
  const auto& row = rows.at(unit);
  auto it = std::lower_bound(row.begin(), row.end(), word,
                             [](const count_entry& e, std::size_t w) { return e.word < w; });
  return (it != row.end() && it->word == word) ? it->count : 0;
}

count_matrix finalize_counts(const corpus_tally& tally, const ingest_config& config,
                             ingest_diagnostics* diagnostics) {
  std::vector<std::string> units;
  std::uint64_t below = 0;
  for (const auto& [unit, total] : tally.totals) {
    if (total >= config.min_tokens)
      units.push_back(unit);
    else
      ++below;
  }
  std::sort(units.begin(), units.end());
  if (diagnostics) {
    *diagnostics = tally.diagnostics;
    diagnostics->units_seen = tally.totals.size();
    diagnostics->units_below_threshold = below;
  }
  require(!units.empty(), errc::empty_corpus,
          "no unit reaches min_tokens=" + std::to_string(config.min_tokens));

  std::unordered_map<std::string, std::uint64_t> corpus_freq;
  for (const auto& unit : units) {
    auto it = tally.counts.find(unit);
    if (it == tally.counts.end()) continue;
    for (const auto& [word, n] : it->second) corpus_freq[word] += n;
  }
  std::vector<std::pair<std::string, std::uint64_t>> forms(corpus_freq.begin(), corpus_freq.end());
  std::sort(forms.begin(), forms.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (diagnostics) diagnostics->distinct_forms = forms.size();
  if (forms.size() > config.vocab_size) forms.resize(config.vocab_size);

  count_matrix m;
  m.unit_ids = std::move(units);
  m.vocabulary.reserve(forms.size());
  std::unordered_map<std::string, std::uint32_t> index;
  for (auto& [word, n] : forms) {
    index.emplace(word, static_cast<std::uint32_t>(m.vocabulary.size()));
    m.vocabulary.push_back(word);
  }
  m.rows.resize(m.unit_ids.size());
  m.unit_totals.resize(m.unit_ids.size());
  for (std::size_t c = 0; c < m.unit_ids.size(); ++c) {
    m.unit_totals[c] = tally.totals.at(m.unit_ids[c]);
    auto it = tally.counts.find(m.unit_ids[c]);
    if (it == tally.counts.end()) continue;
    auto& row = m.rows[c];
    for (const auto& [word, n] : it->second) {
      auto w = index.find(word);
      if (w != index.end()) row.push_back({w->second, n});
    }
    std::sort(row.begin(), row.end(), [](const count_entry& a, const count_entry& b) { return a.word < b.word; });
  }
  return m;
}

count_matrix build_count_matrix(std::span<const geo_document> docs, const std::set<std::string>& retained_users,
                                const unit_assigner& assign, const ingest_config& config,
                                ingest_diagnostics* diagnostics, std::size_t shards) {
  config.validate();
  require(!docs.empty(), errc::empty_corpus, "document stream is empty");
  if (shards == 0) shards = thread_count();
  shards = std::max<std::size_t>(1, std::min(shards, docs.size()));

  std::vector<corpus_tally> parts(shards);
  std::size_t per_shard = (docs.size() + shards - 1) / shards;
  parallel_for(shards, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      std::size_t lo = std::min(docs.size(), s * per_shard);
      std::size_t hi = std::min(docs.size(), lo + per_shard);
      parts[s] = tally_documents(docs.subspan(lo, hi - lo), retained_users, assign, config);
    }
  });
  for (std::size_t s = 1; s < shards; ++s) parts[0].merge(std::move(parts[s]));
  return finalize_counts(parts[0], config, diagnostics);
}

count_matrix project_counts(const corpus_tally& tally, const count_matrix& reference) {
  count_matrix m;
  m.unit_ids = reference.unit_ids;
  m.vocabulary = reference.vocabulary;
  m.rows.resize(m.unit_ids.size());
  m.unit_totals.assign(m.unit_ids.size(), 0);
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::uint32_t w = 0; w < m.vocabulary.size(); ++w) index.emplace(m.vocabulary[w], w);
  for (std::size_t c = 0; c < m.unit_ids.size(); ++c) {
    if (auto t = tally.totals.find(m.unit_ids[c]); t != tally.totals.end()) m.unit_totals[c] = t->second;
    auto it = tally.counts.find(m.unit_ids[c]);
    if (it == tally.counts.end()) continue;
    auto& row = m.rows[c];
    for (const auto& [word, n] : it->second) {
      auto w = index.find(word);
      if (w != index.end()) row.push_back({w->second, n});
    }
    std::sort(row.begin(), row.end(), [](const count_entry& a, const count_entry& b) { return a.word < b.word; });
  }
  return m;
}

Eigen::MatrixXd relative_frequencies(const count_matrix& counts, bool allow_empty_units) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(counts.n_units()),
                                            static_cast<Eigen::Index>(counts.n_words()));
  for (std::size_t c = 0; c < counts.n_units(); ++c) {
    auto total = counts.unit_totals[c];
    if (total == 0) {
      require(allow_empty_units, errc::invalid_argument, "unit '" + counts.unit_ids[c] + "' has no tokens");
      continue;
    }
    for (const auto& e : counts.rows[c])
      f(static_cast<Eigen::Index>(c), e.word) = static_cast<double>(e.count) / static_cast<double>(total);
  }
  return f;
}

void write_count_matrix(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path,
                        const count_matrix& counts, const json& config_echo) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    require(out.good(), errc::io_error, "cannot write " + csv_path.string());
    out << "unit_id,word,count\n";
    for (std::size_t c = 0; c < counts.n_units(); ++c) {
      auto unit = csv::quote(counts.unit_ids[c]);
      for (const auto& e : counts.rows[c]) out << unit << ',' << csv::quote(counts.vocabulary[e.word]) << ',' << e.count << '\n';
    }
  }
  json meta{
    {"format", "lexreg.counts/1"},
    {"units", counts.unit_ids},
    {"vocabulary", counts.vocabulary},
    {"unit_totals", counts.unit_totals},
    {"config", config_echo},
  };
  std::ofstream out(meta_path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + meta_path.string());
  out << meta.dump(1) << '\n';
}

count_matrix read_count_matrix(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path) {
  std::ifstream meta_in(meta_path);
  require(meta_in.good(), errc::missing_artifact, "cannot open " + meta_path.string());
  count_matrix m;
  try {
    json meta = json::parse(meta_in);
    m.unit_ids = meta.at("units").get<std::vector<std::string>>();
    m.vocabulary = meta.at("vocabulary").get<std::vector<std::string>>();
    m.unit_totals = meta.at("unit_totals").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    fail(errc::parse_error, meta_path.string() + ": " + e.what());
  }
  require(m.unit_totals.size() == m.unit_ids.size(), errc::parse_error, meta_path.string() + ": unit_totals length");
  std::unordered_map<std::string, std::size_t> unit_index, word_index;
  for (std::size_t i = 0; i < m.unit_ids.size(); ++i) unit_index.emplace(m.unit_ids[i], i);
  for (std::size_t i = 0; i < m.vocabulary.size(); ++i) word_index.emplace(m.vocabulary[i], i);
  m.rows.resize(m.unit_ids.size());

  std::ifstream in(csv_path, std::ios::binary);
  require(in.good(), errc::missing_artifact, "cannot open " + csv_path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line_no == 1) continue;
    auto f = csv::split(line);
    require(f.size() == 3, errc::parse_error, csv_path.string() + ":" + std::to_string(line_no) + ": bad triplet");
    auto u = unit_index.find(f[0]);
    auto w = word_index.find(f[1]);
    require(u != unit_index.end() && w != word_index.end(), errc::parse_error,
            csv_path.string() + ":" + std::to_string(line_no) + ": unknown unit or word");
    m.rows[u->second].push_back({static_cast<std::uint32_t>(w->second), csv::parse_uint(f[2])});
  }
  for (auto& row : m.rows)
    std::sort(row.begin(), row.end(), [](const count_entry& a, const count_entry& b) { return a.word < b.word; });
  return m;
}

}  // namespace lexreg
