#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <lexreg/clustering.hpp>
#include <lexreg/config.hpp>
#include <lexreg/corpus.hpp>
#include <lexreg/error.hpp>
#include <lexreg/pca.hpp>
#include <lexreg/pipeline.hpp>
#include <lexreg/spatial.hpp>
#include <lexreg/synth.hpp>
#include <lexreg/temporal.hpp>

namespace py = pybind11;
using namespace lexreg;

namespace {

nlohmann::json from_py(const py::object& obj) {
  auto dumps = py::module_::import("json").attr("dumps");
  return nlohmann::json::parse(dumps(obj).cast<std::string>());
}

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

count_matrix counts_from_documents(const std::vector<geo_document>& docs, const py::object& config) {
  ingest_config ic;
  if (!config.is_none()) ic = run_config_from_json(nlohmann::json{{"ingest", from_py(config)}}).ingest;
  ic.load_exclusions();
  return build_count_matrix(docs, filter_users(docs, ic), passthrough_assigner(), ic);
}

}  // namespace

PYBIND11_MODULE(_lexreg, m) {
  m.attr("__version__") = LEXREG_VERSION;

  static py::handle error_type = py::exception<error>(m, "Error", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const error& e) {
      py::object instance = error_type(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  py::class_<geo_document>(m, "Document")
      .def_readonly("doc_id", &geo_document::doc_id)
      .def_readonly("user_id", &geo_document::user_id)
      .def_readonly("unit_id", &geo_document::unit_id)
      .def_readonly("text", &geo_document::text)
      .def("to_json", &to_json_line);

  py::class_<unit_geometry>(m, "UnitGeometry")
      .def(py::init<std::string, double, double>(), py::arg("unit_id"), py::arg("latitude"), py::arg("longitude"))
      .def_readonly("unit_id", &unit_geometry::unit_id)
      .def_readonly("latitude", &unit_geometry::latitude)
      .def_readonly("longitude", &unit_geometry::longitude);

  py::class_<cluster_assignment>(m, "Assignment")
      .def_readonly("n_clusters", &cluster_assignment::n_clusters)
      .def_readonly("labels", &cluster_assignment::labels)
      .def_readonly("unit_ids", &cluster_assignment::unit_ids);

  py::class_<synth_config>(m, "SynthConfig")
      .def_static("planted", &planted_config, py::arg("rows"), py::arg("cols"), py::arg("regions"),
                  py::arg("topic_words"), py::arg("background_words"))
      .def_static("from_dict", [](const py::object& d) { return synth_config_from_json(from_py(d)); })
      .def("to_dict", [](const synth_config& c) { return to_py(to_json(c)); })
      .def_readwrite("docs_per_unit", &synth_config::docs_per_unit)
      .def_readwrite("epsilon", &synth_config::epsilon)
      .def_readwrite("seed", &synth_config::seed)
      .def_readonly("region_map", &synth_config::region_map);

  py::class_<synth_output>(m, "SynthOutput")
      .def_readonly("documents", &synth_output::documents)
      .def_readonly("truth", &synth_output::truth)
      .def_readonly("geometry", &synth_output::geometry);
  m.def("generate", &generate, py::arg("config"));

  py::class_<count_matrix>(m, "CountMatrix")
      .def_readonly("unit_ids", &count_matrix::unit_ids)
      .def_readonly("vocabulary", &count_matrix::vocabulary)
      .def_readonly("unit_totals", &count_matrix::unit_totals)
      .def("frequencies", [](const count_matrix& c) { return relative_frequencies(c); });
  m.def("count_documents", &counts_from_documents, py::arg("documents"), py::arg("ingest") = py::none());

  py::class_<proximity_matrix>(m, "Weights")
      .def_readonly("unit_ids", &proximity_matrix::unit_ids)
      .def_readonly("neighbors", &proximity_matrix::neighbors);
  m.def("knn_weights", [](const std::vector<unit_geometry>& u, int k) { return knn_weights(u, k); },
        py::arg("units"), py::arg("k"));
  m.def("distance_band_weights",
        [](const std::vector<unit_geometry>& u, double band_km) { return distance_band_weights(u, band_km); },
        py::arg("units"), py::arg("band_km"));
  m.def("align_geometry",
        [](const std::vector<unit_geometry>& u, const std::vector<std::string>& ids) { return align_geometry(u, ids); },
        py::arg("units"), py::arg("unit_ids"));

  py::class_<hotspot_matrix>(m, "Hotspots")
      .def_readonly("unit_ids", &hotspot_matrix::unit_ids)
      .def_readonly("vocabulary", &hotspot_matrix::vocabulary)
      .def_readonly("values", &hotspot_matrix::values);
  m.def("getis_ord",
        [](const Eigen::MatrixXd& f, const std::vector<std::string>& ids, const std::vector<std::string>& vocab,
           const proximity_matrix& w) { return getis_ord(f, ids, vocab, w); },
        py::arg("frequencies"), py::arg("unit_ids"), py::arg("vocabulary"),
        py::arg("weights"));

  py::class_<pc_model>(m, "PCModel")
      .def_readonly("explained_variance_ratio", &pc_model::explained_variance_ratio)
      .def_readonly("loadings", &pc_model::loadings)
      .def_readonly("scores", &pc_model::scores)
      .def_readonly("broken_stick", &pc_model::broken_stick)
      .def_readonly("n_selected", &pc_model::n_selected)
      .def_readonly("floor_applied", &pc_model::floor_applied)
      .def("selected_scores", &pc_model::selected_scores);
  m.def("fit_pca", py::overload_cast<const Eigen::MatrixXd&>(&fit_pca), py::arg("data"));
  m.def("fit_pca", py::overload_cast<const hotspot_matrix&>(&fit_pca), py::arg("hotspots"));
  m.def("broken_stick", &broken_stick, py::arg("n_parts"));

  py::class_<linkage_tree>(m, "Linkage")
      .def_readonly("n_leaves", &linkage_tree::n_leaves)
      .def("matrix", [](const linkage_tree& t) {
        Eigen::MatrixXd z(static_cast<Eigen::Index>(t.merges.size()), 4);
        for (std::size_t i = 0; i < t.merges.size(); ++i) {
          const auto& r = t.merges[i];
          z.row(static_cast<Eigen::Index>(i)) << static_cast<double>(r.left), static_cast<double>(r.right),
              r.distance, static_cast<double>(r.size);
        }
        return z;
      });
  m.def("ward_linkage", &ward_linkage, py::arg("points"));
  m.def("cut_tree", &cut_tree, py::arg("tree"), py::arg("n_clusters"));
  m.def("silhouette_sweep",
        [](const linkage_tree& t, const Eigen::MatrixXd& points, int n_min, int n_max) {
          std::vector<std::pair<int, double>> out;
          for (const auto& e : silhouette_sweep(t, points, n_min, n_max)) out.emplace_back(e.n_clusters, e.score);
          return out;
        },
        py::arg("tree"), py::arg("points"), py::arg("n_min") = 2, py::arg("n_max") = 15);
  m.def("adjusted_rand_index", [](const std::vector<int>& a, const std::vector<int>& b) {
    return adjusted_rand_index(a, b);
  });
  m.def("characteristic_words",
        [](const hotspot_matrix& h, const cluster_assignment& a, int cluster, int k) {
          std::vector<std::tuple<std::string, double, int>> out;
          for (const auto& w : characteristic_words(specificity(h, a), cluster, k))
            out.emplace_back(w.word, w.specificity, w.sign);
          return out;
        },
        py::arg("hotspots"), py::arg("assignment"), py::arg("cluster"), py::arg("k"));
  m.def("inter_cluster_distances",
        [](const hotspot_matrix& h, const cluster_assignment& ref) { return inter_cluster_distances(h, ref).distances; },
        py::arg("hotspots"), py::arg("reference"));

  m.def("run_pipeline",
        [](const py::object& config, const std::string& out_dir) {
          auto c = run_config_from_json(from_py(config));
          if (!out_dir.empty()) c.paths.out_dir = out_dir;
          nlohmann::json report;
          {
            py::gil_scoped_release release;
            report = run_pipeline(c);
          }
          return to_py(report);
        },
        py::arg("config"), py::arg("out_dir") = "");
}
