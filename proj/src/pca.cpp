#include <lexreg/pca.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <Eigen/SVD>
#include <json.hpp>

#include <lexreg/csv.hpp>
#include <lexreg/error.hpp>
#include <lexreg/matrix_io.hpp>

namespace lexreg {

using nlohmann::json;

double pc_model::cumulative_ratio(int m) const {
  m = std::clamp<int>(m, 0, static_cast<int>(explained_variance_ratio.size()));
  return explained_variance_ratio.head(m).sum();
}

Eigen::MatrixXd pc_model::selected_scores() const { return scores.leftCols(n_selected); }

std::vector<double> broken_stick(int n_parts) {
  require(n_parts >= 1, errc::invalid_argument, "broken_stick needs n_parts >= 1");
  std::vector<double> b(static_cast<std::size_t>(n_parts));
  // Tail sums accumulate from the smallest term up.
  double tail = 0.0;
  for (int k = n_parts; k >= 1; --k) {
    tail += 1.0 / k;
    b[static_cast<std::size_t>(k - 1)] = tail / n_parts;
  }
  return b;
}

int select_components(std::span<const double> evr, std::span<const double> stick) {
  require(evr.size() == stick.size(), errc::invalid_argument, "evr and broken-stick lengths differ");
  require(!evr.empty(), errc::invalid_argument, "empty spectrum");
  std::size_t m = 0;
  while (m < evr.size() && evr[m] > stick[m]) ++m;
  return std::max<int>(1, static_cast<int>(m));
}

pc_model fit_pca(const Eigen::MatrixXd& data) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  require(n >= 2, errc::insufficient_units, "PCA needs at least 2 rows");
  require(p >= 1, errc::invalid_argument, "PCA needs at least 1 column");
  require(data.allFinite(), errc::non_finite_input, "PCA input contains NaN or infinity");

  pc_model model;
  model.column_means = data.colwise().mean().transpose();
  Eigen::MatrixXd centered = data.rowwise() - model.column_means.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::Index r = std::min(n, p);
  Eigen::VectorXd sv = svd.singularValues().head(r);
  Eigen::MatrixXd v = svd.matrixV().leftCols(r);

  std::vector<Eigen::Index> anchor(static_cast<std::size_t>(r));
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Index idx = 0;
    v.col(j).cwiseAbs().maxCoeff(&idx);
    if (v(idx, j) < 0.0) v.col(j) = -v.col(j);
    anchor[static_cast<std::size_t>(j)] = idx;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (sv(a) != sv(b)) return sv(a) > sv(b);
    return anchor[static_cast<std::size_t>(a)] < anchor[static_cast<std::size_t>(b)];
  });

  model.loadings.resize(r, p);
  model.singular_values.resize(r);
  for (Eigen::Index j = 0; j < r; ++j) {
    auto src = order[static_cast<std::size_t>(j)];
    model.loadings.row(j) = v.col(src).transpose();
    model.singular_values(j) = sv(src);
  }
  model.scores = centered * model.loadings.transpose();

  double total = model.singular_values.squaredNorm();
  model.explained_variance_ratio =
    total > 0.0 ? Eigen::VectorXd(model.singular_values.array().square() / total) : Eigen::VectorXd::Zero(r);

  model.broken_stick = broken_stick(static_cast<int>(p));
  std::vector<double> padded(static_cast<std::size_t>(p), 0.0);
  for (Eigen::Index j = 0; j < r; ++j) padded[static_cast<std::size_t>(j)] = model.explained_variance_ratio(j);
  model.n_selected = select_components(padded, model.broken_stick);
  model.floor_applied = !(padded[0] > model.broken_stick[0]);
  model.n_selected = std::min<int>(model.n_selected, static_cast<int>(r));
  return model;
}

pc_model fit_pca(const hotspot_matrix& hotspots) {
  pc_model model = fit_pca(hotspots.values);
  model.unit_ids = hotspots.unit_ids;
  model.vocabulary = hotspots.vocabulary;
  return model;
}

loading_extremes top_loadings(const pc_model& model, int component, int k) {
  require(component >= 1 && component <= model.n_selected, errc::invalid_argument,
          "component " + std::to_string(component) + " outside 1.." + std::to_string(model.n_selected));
  require(k >= 0, errc::invalid_argument, "k must be non-negative");
  auto row = model.loadings.row(component - 1);
  const auto p = static_cast<std::size_t>(row.size());
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), p);
  std::vector<std::size_t> idx(p);
  std::iota(idx.begin(), idx.end(), std::size_t{0});

  auto word = [&](std::size_t i) {
    return i < model.vocabulary.size() ? model.vocabulary[i] : std::to_string(i);
  };
  auto take = [&](auto better) {
    std::vector<std::size_t> sorted = idx;
    std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(kk), sorted.end(), better);
    std::vector<loading_entry> out;
    for (std::size_t i = 0; i < kk; ++i) out.push_back({word(sorted[i]), row(static_cast<Eigen::Index>(sorted[i]))});
    return out;
  };
  loading_extremes result;
  result.positive = take([&](std::size_t a, std::size_t b) {
    double la = row(static_cast<Eigen::Index>(a)), lb = row(static_cast<Eigen::Index>(b));
    return la != lb ? la > lb : a < b;
  });
  result.negative = take([&](std::size_t a, std::size_t b) {
    double la = row(static_cast<Eigen::Index>(a)), lb = row(static_cast<Eigen::Index>(b));
    return la != lb ? la < lb : a < b;
  });
  return result;
}

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(std::vector<double> v) {
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void write_pc_model(const std::filesystem::path& header_path, const std::filesystem::path& loadings_path,
                    const std::filesystem::path& scores_path, const pc_model& model) {
  json header{
    {"format", "lexreg.pca/1"},
    {"centering", "column-mean"},
    {"scaling", "none"},
    {"units", model.unit_ids},
    {"vocabulary", model.vocabulary},
    {"column_means", to_vector(model.column_means)},
    {"singular_values", to_vector(model.singular_values)},
    {"explained_variance_ratio", to_vector(model.explained_variance_ratio)},
    {"broken_stick", model.broken_stick},
    {"n_selected", model.n_selected},
    {"floor_applied", model.floor_applied},
    {"cumulative_ratio_selected", model.cumulative_ratio(model.n_selected)},
  };
  {
    std::ofstream out(header_path, std::ios::binary);
    require(out.good(), errc::io_error, "cannot write " + header_path.string());
    out << header.dump(1) << '\n';
  }
  write_matrix(loadings_path, model.loadings, json{{"kind", "pca_loadings"}});
  write_matrix(scores_path, model.scores, json{{"kind", "pca_scores"}});
}

pc_model read_pc_model(const std::filesystem::path& header_path, const std::filesystem::path& loadings_path,
                       const std::filesystem::path& scores_path) {
  std::ifstream in(header_path);
  require(in.good(), errc::missing_artifact, "cannot open " + header_path.string());
  pc_model model;
  try {
    json header = json::parse(in);
    model.unit_ids = header.at("units").get<std::vector<std::string>>();
    model.vocabulary = header.at("vocabulary").get<std::vector<std::string>>();
    model.column_means = from_vector(header.at("column_means").get<std::vector<double>>());
    model.singular_values = from_vector(header.at("singular_values").get<std::vector<double>>());
    model.explained_variance_ratio = from_vector(header.at("explained_variance_ratio").get<std::vector<double>>());
    model.broken_stick = header.at("broken_stick").get<std::vector<double>>();
    model.n_selected = header.at("n_selected").get<int>();
    model.floor_applied = header.value("floor_applied", false);
  } catch (const json::exception& e) {
    fail(errc::parse_error, header_path.string() + ": " + e.what());
  }
  model.loadings = read_matrix(loadings_path).values;
  model.scores = read_matrix(scores_path).values;
  return model;
}

void write_component_loadings(const std::filesystem::path& path, const pc_model& model, int component) {
  require(component >= 1 && component <= model.n_components(), errc::invalid_argument, "component out of range");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << "word,loading\n";
  auto row = model.loadings.row(component - 1);
  for (Eigen::Index w = 0; w < row.size(); ++w)
    out << csv::quote(model.vocabulary.at(static_cast<std::size_t>(w))) << ',' << csv::format_double(row(w)) << '\n';
}

void write_component_scores(const std::filesystem::path& path, const pc_model& model, int component) {
  require(component >= 1 && component <= model.scores.cols(), errc::invalid_argument, "component out of range");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << "unit_id,score\n";
  for (Eigen::Index c = 0; c < model.scores.rows(); ++c)
    out << csv::quote(model.unit_ids.at(static_cast<std::size_t>(c))) << ','
        << csv::format_double(model.scores(c, component - 1)) << '\n';
}

}  // namespace lexreg
