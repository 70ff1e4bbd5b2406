// pybind11 bindings for the core pipeline: io, synthesis, features, training,
// classification, the CA baseline and metrics.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edgekit/baseline.hpp"
#include "edgekit/features.hpp"
#include "edgekit/io.hpp"
#include "edgekit/knn.hpp"
#include "edgekit/metrics.hpp"
#include "edgekit/net.hpp"
#include "edgekit/synth.hpp"

namespace py = pybind11;
using namespace edgekit;

namespace {

PointCloud cloud_from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> points,
                             py::object labels) {
  if (points.ndim() != 2 || points.shape(1) != 3)
    throw std::invalid_argument("points must have shape (n, 3)");
  PointCloud cloud;
  const auto n = static_cast<std::size_t>(points.shape(0));
  cloud.points.reserve(n);
  auto view = points.unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    cloud.points.emplace_back(view(i, 0), view(i, 1), view(i, 2));
  if (!labels.is_none()) {
    auto lab = py::cast<py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>>(labels);
    if (lab.ndim() != 1 || static_cast<std::size_t>(lab.shape(0)) != n)
      throw std::invalid_argument("labels must have shape (n,)");
    cloud.labels.assign(lab.data(), lab.data() + n);
  }
  validate(cloud);
  return cloud;
}

py::array_t<double> points_to_array(const PointCloud& cloud) {
  py::array_t<double> out({static_cast<py::ssize_t>(cloud.size()), py::ssize_t{3}});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (int j = 0; j < 3; ++j) view(static_cast<py::ssize_t>(i), j) = cloud.points[i][j];
  return out;
}

py::object labels_to_array(const PointCloud& cloud) {
  if (!cloud.has_labels()) return py::none();
  py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(cloud.size()));
  std::copy(cloud.labels.begin(), cloud.labels.end(), out.mutable_data());
  return out;
}

// (n, m, 12) float64 view of a feature set.
py::array_t<double> features_to_array(const FeatureSet& fs) {
  py::array_t<double> out({static_cast<py::ssize_t>(fs.count),
                           static_cast<py::ssize_t>(fs.m()),
                           static_cast<py::ssize_t>(kFeatureDim)});
  std::copy(fs.data.begin(), fs.data.end(), out.mutable_data());
  return out;
}

FeatureSet feature_set_from(py::array_t<double, py::array::c_style | py::array::forcecast> arr,
                            const std::vector<int>& scales, std::uint16_t mask) {
  if (arr.ndim() != 3 || arr.shape(2) != kFeatureDim ||
      arr.shape(1) != static_cast<py::ssize_t>(scales.size()))
    throw std::invalid_argument("features must have shape (n, len(scales), 12)");
  FeatureSet fs;
  fs.scales = scales;
  fs.feature_mask = mask;
  fs.count = static_cast<std::size_t>(arr.shape(0));
  fs.data.assign(arr.data(), arr.data() + arr.size());
  return fs;
}

py::dict scores_to_dict(const Scores& s) {
  py::dict d;
  d["precision"] = s.precision;
  d["recall"] = s.recall;
  d["mcc"] = s.mcc;
  d["f1"] = s.f1;
  d["accuracy"] = s.accuracy;
  d["iou"] = s.iou;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Point cloud sharp-edge and boundary classification";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<IoError>(m, "IoError");

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init([](py::array_t<double, py::array::c_style | py::array::forcecast> pts,
                       py::object labels) { return cloud_from_arrays(pts, labels); }),
           py::arg("points"), py::arg("labels") = py::none())
      .def_property_readonly("points", &points_to_array)
      .def_property_readonly("labels", &labels_to_array)
      .def("__len__", &PointCloud::size);

  m.def("read_ply", &read_ply, py::arg("path"));
  m.def("read_xyz", &read_xyz, py::arg("path"));
  m.def(
      "write_ply",
      [](const PointCloud& cloud, const std::string& path, bool binary) {
        write_ply(cloud, path, binary ? PlyFormat::BinaryLittleEndian : PlyFormat::Ascii);
      },
      py::arg("cloud"), py::arg("path"), py::arg("binary") = true);
  m.def(
      "write_classified_ply",
      [](const PointCloud& cloud, const std::vector<std::uint8_t>& predictions,
         const std::string& path) { write_classified_ply(cloud, predictions, path); },
      py::arg("cloud"), py::arg("predictions"), py::arg("path"));

  m.def(
      "generate",
      [](const std::string& kind, double size, double angle_deg, double radius, double density,
         double noise_sigma, double outlier_fraction, double label_epsilon,
         bool label_boundaries, std::uint64_t seed) {
        SceneSpec spec;
        spec.kind = primitive_from_string(kind);
        spec.size = size;
        spec.angle_deg = angle_deg;
        spec.radius = radius;
        spec.density = density;
        spec.noise_sigma = noise_sigma;
        spec.outlier_fraction = outlier_fraction;
        spec.label_epsilon = label_epsilon;
        spec.label_boundaries = label_boundaries;
        return generate(spec, seed);
      },
      py::arg("kind"), py::arg("size") = 60.0, py::arg("angle_deg") = 90.0,
      py::arg("radius") = 20.0, py::arg("density") = 1.0, py::arg("noise_sigma") = 0.0,
      py::arg("outlier_fraction") = 0.0, py::arg("label_epsilon") = 1.0,
      py::arg("label_boundaries") = true, py::arg("seed") = 0);

  m.def("parse_feature_mask", &parse_feature_mask, py::arg("text"));

  m.def(
      "extract_features",
      [](const PointCloud& cloud, const std::vector<int>& scales, const std::string& mask,
         int threads) {
        ScaleConfig config;
        config.scales = scales;
        config.feature_mask = parse_feature_mask(mask);
        KnnIndex index(cloud);
        return features_to_array(extract_features(cloud, index, config, threads));
      },
      py::arg("cloud"), py::arg("scales") = std::vector<int>{128, 64, 32, 16},
      py::arg("mask") = "all", py::arg("threads") = 0);

  py::class_<KnnIndex>(m, "KnnIndex")
      .def(py::init<const PointCloud&>(), py::arg("cloud"))
      .def("__len__", &KnnIndex::size)
      .def(
          "query",
          [](const KnnIndex& index, std::size_t point_index, std::size_t k) {
            return index.query(point_index, k);
          },
          py::arg("point_index"), py::arg("k"));

  py::class_<Model>(m, "Model")
      .def_property_readonly("scales", [](const Model& mdl) { return mdl.scales; })
      .def_property_readonly("classes", [](const Model& mdl) { return mdl.classes; })
      .def_property_readonly("parameter_count", &Model::parameter_count)
      .def("save", &save_model, py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("model", &TrainResult::model)
      .def_readonly("best_run", &TrainResult::best_run)
      .def_readonly("final_val_losses", &TrainResult::final_val_losses);

  m.def(
      "train",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> features,
         py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> labels,
         const std::vector<std::size_t>& validation, const std::vector<int>& scales,
         const std::string& mask, int classes, int iterations, int runs, int batch_size,
         double lr, double gamma, double dropout, std::uint64_t seed, int threads) {
        FeatureSet fs = feature_set_from(features, scales, parse_feature_mask(mask));
        std::vector<std::uint8_t> lab(labels.data(), labels.data() + labels.shape(0));
        TrainConfig config;
        config.iterations = iterations;
        config.runs = runs;
        config.batch_size = batch_size;
        config.lr = lr;
        config.gamma = gamma;
        config.dropout_p = dropout;
        config.seed = seed;
        config.threads = threads;
        return train(fs, lab, validation, classes, config);
      },
      py::arg("features"), py::arg("labels"), py::arg("validation") = std::vector<std::size_t>{},
      py::arg("scales") = std::vector<int>{128, 64, 32, 16}, py::arg("mask") = "all",
      py::arg("classes") = 3, py::arg("iterations") = 3000, py::arg("runs") = 5,
      py::arg("batch_size") = 16384, py::arg("lr") = 0.001, py::arg("gamma") = 2.0,
      py::arg("dropout") = 0.5, py::arg("seed") = 0, py::arg("threads") = 0);

  m.def(
      "classify",
      [](const Model& model,
         py::array_t<double, py::array::c_style | py::array::forcecast> features, int threads) {
        FeatureSet fs = feature_set_from(features, model.scales, model.feature_mask);
        Predictions pred = classify(model, fs, threads);
        py::array_t<std::uint8_t> labels(static_cast<py::ssize_t>(pred.labels.size()));
        std::copy(pred.labels.begin(), pred.labels.end(), labels.mutable_data());
        return py::make_tuple(labels, pred.probabilities);
      },
      py::arg("model"), py::arg("features"), py::arg("threads") = 0);

  m.def(
      "ca_classify",
      [](const PointCloud& cloud, int k, double threshold, int threads) {
        KnnIndex index(cloud);
        CaConfig config;
        config.k = k;
        config.threshold = threshold;
        std::vector<std::uint8_t> pred = ca_classify(cloud, index, config, threads);
        py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(pred.size()));
        std::copy(pred.begin(), pred.end(), out.mutable_data());
        return out;
      },
      py::arg("cloud"), py::arg("k") = 64, py::arg("threshold") = 0.025, py::arg("threads") = 0);

  m.def(
      "ca_ratios",
      [](const PointCloud& cloud, int k, int threads) {
        KnnIndex index(cloud);
        return ca_ratios(cloud, index, k, threads);
      },
      py::arg("cloud"), py::arg("k") = 64, py::arg("threads") = 0);

  m.def(
      "confusion",
      [](const std::vector<std::uint8_t>& predictions, const std::vector<std::uint8_t>& labels,
         std::uint8_t positive_class) {
        ConfusionMatrix cm = confusion(predictions, labels, positive_class);
        py::dict d;
        d["tp"] = cm.tp;
        d["fp"] = cm.fp;
        d["fn"] = cm.fn;
        d["tn"] = cm.tn;
        return d;
      },
      py::arg("predictions"), py::arg("labels"), py::arg("positive_class"));

  m.def(
      "scores",
      [](std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn) {
        ConfusionMatrix cm{tp, fp, fn, tn};
        return scores_to_dict(scores(cm));
      },
      py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"));

  m.attr("__version__") = "0.1.0";
}
