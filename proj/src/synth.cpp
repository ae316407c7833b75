#include <lexreg/synth.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include <lexreg/error.hpp>
#include <lexreg/parallel.hpp>

namespace lexreg {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Walker/Vose alias table: constant-time draws from a fixed categorical.
class alias_table {
 public:
  explicit alias_table(const std::vector<double>& weights) : prob_(weights.size()), alias_(weights.size()) {
    const std::size_t n = weights.size();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      auto s = small.back(), l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (auto i : large) prob_[i] = 1.0, alias_[i] = i;
    for (auto i : small) prob_[i] = 1.0, alias_[i] = i;
  }

  std::size_t operator()(std::mt19937_64& rng) const {
    std::uint64_t x = rng();
    auto column = static_cast<std::size_t>(((x >> 32) * prob_.size()) >> 32);
    double u = static_cast<double>(x & 0xFFFFFFFFull) * 0x1p-32;
    return u < prob_[column] ? column : alias_[column];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

std::string letters(int index, int width) {
  std::string s(static_cast<std::size_t>(width), 'a');
  for (int i = width - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = static_cast<char>('a' + index % 26);
    index /= 26;
  }
  return s;
}

std::vector<double> weights_of(const lexicon& lex) {
  std::vector<double> w;
  w.reserve(lex.size());
  for (const auto& [word, weight] : lex) w.push_back(weight);
  return w;
}

lexicon lexicon_from_json(const json& j) {
  lexicon lex;
  if (j.is_object()) {
    for (const auto& [word, weight] : j.items()) lex.emplace_back(word, weight.get<double>());
  } else {
    for (const auto& item : j) lex.emplace_back(item.at(0).get<std::string>(), item.at(1).get<double>());
  }
  return lex;
}

json lexicon_to_json(const lexicon& lex) {
  json out = json::array();
  for (const auto& [word, weight] : lex) out.push_back({word, weight});
  return out;
}

}  // namespace

void synth_config::validate() const {
  require(rows >= 1 && cols >= 1, errc::invalid_config, "grid must have at least one unit");
  require(region_map.size() == n_units(), errc::invalid_config, "region_map must have rows*cols entries");
  require(!region_lexicons.empty(), errc::invalid_config, "at least one region lexicon is required");
  for (int r : region_map)
    require(r >= 0 && static_cast<std::size_t>(r) < region_lexicons.size(), errc::invalid_config,
            "region_map refers to an unknown region");
  auto check_lexicon = [](const lexicon& lex, const std::string& what) {
    require(!lex.empty(), errc::invalid_config, what + " lexicon is empty");
    double total = 0.0;
    for (const auto& [word, weight] : lex) {
      require(weight >= 0.0 && std::isfinite(weight), errc::invalid_config, what + " lexicon has a negative weight");
      total += weight;
    }
    require(total > 0.0, errc::invalid_config, what + " lexicon has zero total weight");
  };
  for (std::size_t r = 0; r < region_lexicons.size(); ++r) check_lexicon(region_lexicons[r], "region " + std::to_string(r));
  require(epsilon >= 0.0 && epsilon <= 1.0, errc::invalid_config, "epsilon must lie in [0, 1]");
  if (epsilon > 0.0) check_lexicon(background, "background");
  require(docs_per_unit >= 1, errc::invalid_config, "docs_per_unit must be at least 1");
  require(tokens_min >= 1 && tokens_min <= tokens_max, errc::invalid_config, "need 1 <= tokens_min <= tokens_max");
  require(users_per_unit >= 1, errc::invalid_config, "users_per_unit must be at least 1");
  require(time_start < time_end, errc::invalid_config, "time range is empty");
  require(spacing_deg > 0.0, errc::invalid_config, "spacing_deg must be positive");
  require(std::abs(origin_lat) <= 90.0 && std::abs(origin_lat + spacing_deg * (rows - 1)) <= 90.0 &&
            std::abs(origin_lon) <= 180.0 && std::abs(origin_lon + spacing_deg * (cols - 1)) <= 180.0,
          errc::invalid_config, "grid leaves the valid coordinate range");
}

json to_json(const synth_config& c) {
  json lexicons = json::array();
  for (const auto& lex : c.region_lexicons) lexicons.push_back(lexicon_to_json(lex));
  return json{
    {"rows", c.rows},
    {"cols", c.cols},
    {"region_map", c.region_map},
    {"region_lexicons", lexicons},
    {"background", lexicon_to_json(c.background)},
    {"docs_per_unit", c.docs_per_unit},
    {"tokens_min", c.tokens_min},
    {"tokens_max", c.tokens_max},
    {"epsilon", c.epsilon},
    {"seed", c.seed},
    {"origin_lat", c.origin_lat},
    {"origin_lon", c.origin_lon},
    {"spacing_deg", c.spacing_deg},
    {"time_start", format_iso8601(c.time_start)},
    {"time_end", format_iso8601(c.time_end)},
    {"users_per_unit", c.users_per_unit},
  };
}

synth_config synth_config_from_json(const json& j) {
  synth_config c;
  try {
    int rows = j.value("rows", 10);
    int cols = j.value("cols", 10);
    if (j.contains("region_lexicons")) {
      c.rows = rows;
      c.cols = cols;
      for (const auto& lex : j.at("region_lexicons")) c.region_lexicons.push_back(lexicon_from_json(lex));
      c.background = lexicon_from_json(j.value("background", json::array()));
      c.region_map = j.at("region_map").get<std::vector<int>>();
    } else {
      c = planted_config(rows, cols, j.value("regions", 3), j.value("topic_words", 20), j.value("background_words", 200));
    }
    c.docs_per_unit = j.value("docs_per_unit", c.docs_per_unit);
    c.tokens_min = j.value("tokens_min", c.tokens_min);
    c.tokens_max = j.value("tokens_max", c.tokens_max);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.seed = j.value("seed", c.seed);
    c.origin_lat = j.value("origin_lat", c.origin_lat);
    c.origin_lon = j.value("origin_lon", c.origin_lon);
    c.spacing_deg = j.value("spacing_deg", c.spacing_deg);
    if (j.contains("time_start")) c.time_start = parse_iso8601(j.at("time_start").get<std::string>());
    if (j.contains("time_end")) c.time_end = parse_iso8601(j.at("time_end").get<std::string>());
    c.users_per_unit = j.value("users_per_unit", c.users_per_unit);
  } catch (const json::exception& e) {
    fail(errc::invalid_config, std::string("synth config: ") + e.what());
  }
  c.validate();
  return c;
}

synth_config planted_config(int rows, int cols, int n_regions, int topic_words, int background_words) {
  require(n_regions >= 1 && n_regions <= 26 && n_regions <= rows, errc::invalid_config,
          "n_regions must be in 1..min(26, rows)");
  require(topic_words >= 1 && background_words >= 0, errc::invalid_config, "lexicon sizes must be positive");
  require(topic_words <= 26 * 26 && background_words <= 26 * 26 * 26, errc::invalid_config,
          "at most 676 topic and 17576 background words");
  synth_config c;
  c.rows = rows;
  c.cols = cols;
  c.region_map.resize(c.n_units());
  for (int r = 0; r < rows; ++r)
    for (int col = 0; col < cols; ++col)
      c.region_map[static_cast<std::size_t>(r * cols + col)] = r * n_regions / rows;
  for (int region = 0; region < n_regions; ++region) {
    lexicon lex;
    std::string prefix = std::string("t") + static_cast<char>('a' + region);
    for (int i = 0; i < topic_words; ++i) lex.emplace_back(prefix + letters(i, 2), 1.0 / (1.0 + 0.1 * i));
    c.region_lexicons.push_back(std::move(lex));
  }
  for (int i = 0; i < background_words; ++i) c.background.emplace_back("b" + letters(i, 3), 1.0 / (1.0 + 0.05 * i));
  if (background_words == 0) c.epsilon = 0.0;
  return c;
}

std::string synth_unit_id(int row, int col) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "r%03dc%03d", row, col);
  return buf;
}

synth_output generate(const synth_config& config) {
  config.validate();
  const std::size_t n = config.n_units();
  synth_output out;
  out.geometry.reserve(n);
  std::vector<int> truth(n);
  for (int r = 0; r < config.rows; ++r) {
    for (int c = 0; c < config.cols; ++c) {
      auto u = static_cast<std::size_t>(r * config.cols + c);
      out.geometry.push_back({synth_unit_id(r, c), config.origin_lat + r * config.spacing_deg,
                              config.origin_lon + c * config.spacing_deg});
      truth[u] = config.region_map[u];
    }
  }
  out.truth.unit_ids.reserve(n);
  for (const auto& g : out.geometry) out.truth.unit_ids.push_back(g.unit_id);
  out.truth.labels = canonicalize_labels(truth);
  out.truth.n_clusters = *std::max_element(out.truth.labels.begin(), out.truth.labels.end());

  // One categorical draw per token over topic words then background words.
  std::vector<std::vector<const std::string*>> region_words;
  std::vector<std::vector<double>> region_weights;
  const auto background_weights = weights_of(config.background);
  const double background_total = std::accumulate(background_weights.begin(), background_weights.end(), 0.0);
  for (const auto& lex : config.region_lexicons) {
    auto topic = weights_of(lex);
    const double topic_total = std::accumulate(topic.begin(), topic.end(), 0.0);
    std::vector<const std::string*> words;
    std::vector<double> mix;
    for (std::size_t i = 0; i < lex.size(); ++i) {
      words.push_back(&lex[i].first);
      mix.push_back((1.0 - config.epsilon) * topic[i] / topic_total);
    }
    for (std::size_t i = 0; i < config.background.size() && background_total > 0.0; ++i) {
      words.push_back(&config.background[i].first);
      mix.push_back(config.epsilon * background_weights[i] / background_total);
    }
    region_words.push_back(std::move(words));
    region_weights.push_back(std::move(mix));
  }
  std::size_t longest_word = 0;
  for (const auto& words : region_words)
    for (const auto* w : words) longest_word = std::max(longest_word, w->size());
  const auto span_seconds = (config.time_end - config.time_start).count();

  std::vector<std::vector<geo_document>> per_unit(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(u + 1)));
      const auto region = static_cast<std::size_t>(config.region_map[u]);
      const auto& words = region_words[region];
      const alias_table pick(region_weights[region]);
      std::uniform_int_distribution<int> length(config.tokens_min, config.tokens_max);
      std::uniform_int_distribution<long long> when(0, span_seconds - 1);
      const auto& unit_id = out.geometry[u].unit_id;

      auto& docs = per_unit[u];
      docs.reserve(static_cast<std::size_t>(config.docs_per_unit));
      for (int i = 0; i < config.docs_per_unit; ++i) {
        geo_document d;
        d.doc_id = unit_id + "-" + std::to_string(i);
        d.user_id = unit_id + "-u" + std::to_string(i % config.users_per_unit);
        d.unit_id = unit_id;
        d.timestamp = config.time_start + std::chrono::seconds(when(rng));
        d.source = source_kind::mobile;
        int tokens = length(rng);
        d.text.reserve(static_cast<std::size_t>(tokens) * (longest_word + 1));
        for (int t = 0; t < tokens; ++t) {
          if (t) d.text.push_back(' ');
          d.text.append(*words[pick(rng)]);
        }
        docs.push_back(std::move(d));
      }
    }
  });
  std::size_t total = 0;
  for (const auto& docs : per_unit) total += docs.size();
  out.documents.reserve(total);
  for (auto& docs : per_unit)
    for (auto& d : docs) out.documents.push_back(std::move(d));
  return out;
}

}  // namespace lexreg
