// lexreg command-line front end.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <lexreg/config.hpp>
#include <lexreg/error.hpp>
#include <lexreg/pca.hpp>
#include <lexreg/pipeline.hpp>
#include <lexreg/spatial.hpp>

namespace {

enum exit_code : int { ok = 0, usage = 2, data = 3, internal = 4 };

struct options {
  std::string config;
  std::optional<int> k_neighbors;
  std::optional<double> band_km;
  std::optional<std::uint64_t> min_tokens;
  std::optional<std::size_t> vocab_size;
  std::optional<int> n_clusters;
  bool stemming = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> input;
  std::optional<std::string> geometry;
  std::optional<unsigned> threads;
  // extract
  std::optional<std::string> word;
  std::optional<int> component;
  std::optional<std::string> output;
};

void add_common(CLI::App* cmd, options& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--k-neighbors", o.k_neighbors, "k-nearest-neighbour weights with this k")->check(CLI::NonNegativeNumber);
  cmd->add_option("--band-km", o.band_km, "distance-band weights with this radius in km")->check(CLI::PositiveNumber);
  cmd->add_option("--min-tokens", o.min_tokens, "minimum tokens for a unit to be kept");
  cmd->add_option("--vocab-size", o.vocab_size, "number of word forms kept");
  cmd->add_option("--n-clusters", o.n_clusters, "number of clusters in the reported cut");
  cmd->add_flag("--stemming", o.stemming, "strip plural forms before counting");
  cmd->add_option("--seed", o.seed, "seed for synthesis and pair sampling");
  cmd->add_option("--out-dir", o.out_dir, "output directory (overrides LEXREG_OUT_DIR)");
  cmd->add_option("--input", o.input, "input documents (JSON lines)");
  cmd->add_option("--geometry", o.geometry, "unit centroids CSV");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

lexreg::run_config resolve(const options& o) {
  auto config = o.config.empty() ? lexreg::run_config_from_json(nlohmann::json::object()) : lexreg::load_run_config(o.config);
  if (o.k_neighbors && o.band_km)
    lexreg::fail(lexreg::errc::invalid_config, "--k-neighbors and --band-km are mutually exclusive");
  if (o.k_neighbors) {
    config.weights.mode = lexreg::weights_mode::knn;
    config.weights.k = *o.k_neighbors;
  }
  if (o.band_km) {
    config.weights.mode = lexreg::weights_mode::distance_band;
    config.weights.band_km = *o.band_km;
  }
  if (o.min_tokens) config.ingest.min_tokens = *o.min_tokens;
  if (o.vocab_size) config.ingest.vocab_size = *o.vocab_size;
  if (o.n_clusters) config.n_clusters = *o.n_clusters;
  if (o.stemming) config.ingest.stemming = true;
  if (o.seed) {
    config.seed = *o.seed;
    if (config.synth) config.synth->seed = *o.seed;
  }
  if (o.out_dir) config.paths.out_dir = *o.out_dir;
  if (o.input) config.paths.input = *o.input;
  if (o.geometry) config.paths.geometry = *o.geometry;
  if (o.threads) config.threads = *o.threads;
  config.validate();
  return config;
}

void print_stages(const lexreg::pipeline& p) {
  for (const auto& s : p.stages())
    std::cout << s.name << ": " << (s.outcome == lexreg::workspace::outcome::cache_hit ? "cache hit" : "ran") << '\n';
}

void extract(lexreg::pipeline& p, const options& o) {
  auto& ws = p.work();
  if (o.word.has_value() == o.component.has_value())
    lexreg::fail(lexreg::errc::invalid_config, "extract needs exactly one of --word or --component");
  if (o.word) {
    auto h = lexreg::read_hotspots(ws.require_file("hotspots.bin"));
    auto out = o.output ? std::filesystem::path(*o.output) : ws.file("gstar_" + *o.word + ".csv");
    lexreg::write_word_column(out, h, *o.word);
    std::cout << out.string() << '\n';
    return;
  }
  auto model = lexreg::read_pc_model(ws.require_file("pca.json"), ws.require_file("pca_loadings.bin"),
                                     ws.require_file("pca_scores.bin"));
  auto prefix = o.output ? std::filesystem::path(*o.output) : ws.file("pc" + std::to_string(*o.component));
  auto loadings = prefix;
  loadings += "_loadings.csv";
  auto scores = prefix;
  scores += "_scores.csv";
  lexreg::write_component_loadings(loadings, model, *o.component);
  lexreg::write_component_scores(scores, model, *o.component);
  std::cout << loadings.string() << '\n' << scores.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexical region discovery from geotagged text"};
  app.set_version_flag("--version", std::string(LEXREG_VERSION));
  app.require_subcommand(1);

  options o;
  struct command {
    const char* name;
    const char* help;
  };
  const command commands[] = {
    {"synth", "generate a synthetic corpus with planted regions"},
    {"ingest", "filter documents and build the unit x word count matrix"},
    {"weights", "build spatial weights over units"},
    {"hotspots", "compute Getis-Ord G* maps (rebuilds weights if needed)"},
    {"pca", "principal components of the hotspot maps"},
    {"cluster", "Ward clustering, silhouette sweep and cut"},
    {"specificity", "characteristic words per cluster"},
    {"temporal", "per-period inter-cluster distance statistics"},
    {"pipeline", "run every stage and write report.json"},
    {"extract", "CSV extraction of a word's G* map or a principal component"},
  };
  for (const auto& c : commands) {
    auto* cmd = app.add_subcommand(c.name, c.help);
    add_common(cmd, o);
    if (std::string(c.name) == "extract") {
      cmd->add_option("--word", o.word, "word whose G* column is written");
      cmd->add_option("--component", o.component, "1-based component to write")->check(CLI::PositiveNumber);
      cmd->add_option("-o,--output", o.output, "output path (or prefix for --component)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    lexreg::pipeline p(resolve(o));
    if (name == "pipeline") {
      auto report = p.run_all();
      print_stages(p);
      std::cout << "report: " << p.work().file("report.json").string() << '\n';
      return ok;
    }
    if (name == "extract") {
      extract(p, o);
      return ok;
    }
    if (name == "synth") p.synth();
    else if (name == "ingest") p.ingest();
    else if (name == "weights") p.weights();
    else if (name == "hotspots") {
      p.weights();
      p.hotspots();
    } else if (name == "pca") p.pca();
    else if (name == "cluster") p.cluster();
    else if (name == "specificity") p.specificity();
    else if (name == "temporal") p.temporal();
    print_stages(p);
    return ok;
  } catch (const lexreg::error& e) {
    std::cerr << "lexreg " << name << ": " << e.what() << '\n';
    switch (e.code()) {
      case lexreg::errc::invalid_config:
      case lexreg::errc::missing_artifact:
        return usage;
      default:
        return data;
    }
  } catch (const std::exception& e) {
    std::cerr << "lexreg " << name << ": internal error: " << e.what() << '\n';
    return internal;
  }
}
