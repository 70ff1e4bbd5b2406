// Command-line front end: synth, features, train, classify, eval, bench.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "edgekit/baseline.hpp"
#include "edgekit/features.hpp"
#include "edgekit/io.hpp"
#include "edgekit/knn.hpp"
#include "edgekit/metrics.hpp"
#include "edgekit/net.hpp"
#include "edgekit/parallel.hpp"
#include "edgekit/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace edgekit;

namespace {

constexpr const char* kVersion = "0.1.0";

class StopWatch {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  double stop() {
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot hash " + path);
  std::uint64_t h = 0xCBF29CE484222325ull;
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ull;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Per-run metadata: command, config snapshot, input hashes, timings. Written
// next to the primary output; wall-clock values live only here.
struct RunManifest {
  json doc;

  explicit RunManifest(const std::string& command) {
    doc["command"] = command;
    doc["tool_version"] = kVersion;
    doc["config"] = json::object();
    doc["inputs"] = json::object();
    doc["outputs"] = json::array();
    doc["timings_seconds"] = json::object();
  }
  void config(const std::string& key, const json& value) { doc["config"][key] = value; }
  void input(const std::string& path) { doc["inputs"][path] = hex64(fnv1a_file(path)); }
  void output(const std::string& path) { doc["outputs"].push_back(path); }
  void timing(const std::string& phase, double seconds) { doc["timings_seconds"][phase] = seconds; }
  void write(const std::string& path) { atomic_write_file(path, doc.dump(2) + "\n"); }
};

std::vector<int> parse_scales(const std::string& text) {
  std::vector<int> scales;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) scales.push_back(std::stoi(tok));
  return scales;
}

PointCloud read_cloud(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".xyz" || ext == ".txt") return read_xyz(path);
  return read_ply(path);
}

// ---------------------------------------------------------------- synth ----

int cmd_synth(const std::string& profile_name, std::uint64_t seed, const std::string& out_dir,
              int threads) {
  (void)threads;
  RunManifest run("synth");
  run.config("profile", profile_name);
  run.config("seed", seed);
  run.config("out", out_dir);

  StopWatch sw;
  sw.start();
  Suite suite = generate_suite(profile_from_string(profile_name), seed);
  const double gen_s = sw.stop();

  sw.start();
  json manifest;
  manifest["profile"] = to_string(suite.profile);
  manifest["seed"] = suite.seed;
  manifest["tool_version"] = kVersion;
  json train_list = json::array();
  for (const auto& nc : suite.train) {
    const std::string rel = "train/" + nc.name + ".ply";
    write_ply(nc.cloud, out_dir + "/" + rel);
    auto counts = count_labels(nc.cloud);
    train_list.push_back({{"file", rel},
                          {"points", nc.cloud.size()},
                          {"non_edge", counts[0]},
                          {"sharp_edge", counts[1]},
                          {"boundary", counts[2]}});
  }
  manifest["train"] = train_list;
  json eval_list = json::array();
  for (const auto& nc : suite.eval) {
    const std::string rel = "eval/" + nc.name + ".ply";
    write_ply(nc.cloud, out_dir + "/" + rel);
    auto counts = count_labels(nc.cloud);
    eval_list.push_back({{"file", rel},
                         {"points", nc.cloud.size()},
                         {"non_edge", counts[0]},
                         {"sharp_edge", counts[1]},
                         {"boundary", counts[2]}});
  }
  manifest["eval"] = eval_list;
  json val_list = json::array();
  for (const auto& ref : suite.validation)
    val_list.push_back({{"cloud", suite.train[ref.cloud].name}, {"point", ref.point}});
  manifest["validation"] = val_list;
  json totals;
  totals["non_edge"] = suite.train_class_counts[0];
  totals["sharp_edge"] = suite.train_class_counts[1];
  totals["boundary"] = suite.train_class_counts[2];
  manifest["train_class_counts"] = totals;
  atomic_write_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
  const double write_s = sw.stop();

  run.timing("generate", gen_s);
  run.timing("write", write_s);
  run.output(out_dir + "/manifest.json");
  run.write(out_dir + "/run.json");

  std::cout << "wrote " << suite.train.size() << " training and " << suite.eval.size()
            << " evaluation clouds to " << out_dir << "\n"
            << "train class counts: non-edge " << suite.train_class_counts[0] << ", sharp-edge "
            << suite.train_class_counts[1] << ", boundary " << suite.train_class_counts[2]
            << "\n";
  return 0;
}

// ------------------------------------------------------------- features ----

int cmd_features(const std::string& in_path, const std::string& out_path,
                 const std::string& scales_text, const std::string& mask_text, int threads) {
  RunManifest run("features");
  run.config("in", in_path);
  run.config("out", out_path);
  run.config("scales", scales_text);
  run.config("mask", mask_text);
  run.config("threads", resolve_threads(threads));
  run.input(in_path);

  ScaleConfig config;
  config.scales = parse_scales(scales_text);
  config.feature_mask = parse_feature_mask(mask_text);
  config.validate();

  PointCloud cloud = read_cloud(in_path);
  StopWatch sw;
  sw.start();
  KnnIndex index(cloud);
  const double index_s = sw.stop();
  sw.start();
  FeatureSet features = extract_features(cloud, index, config, threads);
  const double extract_s = sw.stop();
  save_features(features, out_path);

  run.timing("index_build", index_s);
  run.timing("feature_extraction", extract_s);
  run.output(out_path);
  run.write(out_path + ".run.json");

  std::cout << "extracted " << features.count << " x " << features.m() << " x " << kFeatureDim
            << " features in " << extract_s << " s ("
            << static_cast<double>(features.count) / std::max(extract_s, 1e-9)
            << " points/s; index build " << index_s << " s)\n";
  return 0;
}

// ---------------------------------------------------------------- train ----

struct LoadedDataset {
  FeatureSet features;                  // concatenated over the train clouds
  std::vector<std::uint8_t> labels;
  std::vector<std::size_t> validation;  // flattened indices
};

LoadedDataset load_training_data(const std::string& data_dir, const ScaleConfig& config,
                                 int threads, bool two_class) {
  std::ifstream mf(data_dir + "/manifest.json");
  if (!mf) throw IoError("no manifest.json in " + data_dir + " (expected a synth dataset)");
  json manifest = json::parse(mf);

  LoadedDataset out;
  out.features.scales = config.scales;
  out.features.feature_mask = config.feature_mask;

  std::vector<std::string> names;
  std::vector<std::size_t> offsets;
  for (const auto& entry : manifest.at("train")) {
    const std::string rel = entry.at("file");
    const std::string path = data_dir + "/" + rel;
    PointCloud cloud = read_ply(path);
    if (!cloud.has_labels()) throw std::runtime_error("training cloud lacks labels: " + path);
    KnnIndex index(cloud);
    FeatureSet fs = extract_features(cloud, index, config, threads);
    offsets.push_back(out.features.count);
    names.push_back(fs::path(rel).stem().string());
    out.features.count += fs.count;
    out.features.data.insert(out.features.data.end(), fs.data.begin(), fs.data.end());
    for (auto l : cloud.labels)
      out.labels.push_back(two_class && l == 2 ? std::uint8_t{0} : l);
  }

  for (const auto& ref : manifest.at("validation")) {
    const std::string cloud_name = ref.at("cloud");
    const std::size_t point = ref.at("point");
    auto it = std::find(names.begin(), names.end(), cloud_name);
    if (it == names.end()) throw std::runtime_error("validation ref to unknown cloud " + cloud_name);
    out.validation.push_back(offsets[static_cast<std::size_t>(it - names.begin())] + point);
  }
  return out;
}

int cmd_train(const std::string& data_dir, const std::string& out_path,
              const std::string& log_path, const std::string& scales_text,
              const std::string& mask_text, int iterations, int runs, int batch_size,
              double lr, double gamma, double dropout, std::uint64_t seed, bool two_class,
              int threads) {
  RunManifest run("train");
  run.config("data", data_dir);
  run.config("out", out_path);
  run.config("scales", scales_text);
  run.config("mask", mask_text);
  run.config("iters", iterations);
  run.config("runs", runs);
  run.config("batch", batch_size);
  run.config("lr", lr);
  run.config("gamma", gamma);
  run.config("dropout", dropout);
  run.config("seed", seed);
  run.config("2c", two_class);
  run.config("threads", resolve_threads(threads));
  run.input(data_dir + "/manifest.json");

  ScaleConfig config;
  config.scales = parse_scales(scales_text);
  config.feature_mask = parse_feature_mask(mask_text);
  config.validate();

  StopWatch sw;
  sw.start();
  LoadedDataset data = load_training_data(data_dir, config, threads, two_class);
  const double prep_s = sw.stop();

  TrainConfig tc;
  tc.iterations = iterations;
  tc.runs = runs;
  tc.batch_size = batch_size;
  tc.lr = lr;
  tc.gamma = gamma;
  tc.dropout_p = dropout;
  tc.seed = seed;
  tc.threads = threads;

  sw.start();
  TrainResult result = train(data.features, data.labels, data.validation,
                             two_class ? 2 : 3, tc);
  const double train_s = sw.stop();

  save_model(result.model, out_path);

  std::string csv = "iteration,train_loss,val_loss\n";
  for (const auto& entry : result.log) {
    if (entry.run != result.best_run) continue;
    csv += std::to_string(entry.iteration) + "," + std::to_string(entry.train_loss) + "," +
           std::to_string(entry.val_loss) + "\n";
  }
  const std::string log_out = log_path.empty() ? out_path + ".log.csv" : log_path;
  atomic_write_file(log_out, csv);

  run.timing("preprocessing", prep_s);
  run.timing("training", train_s);
  run.output(out_path);
  run.output(log_out);
  json run_losses = json::array();
  for (double v : result.final_val_losses) run_losses.push_back(v);
  run.doc["final_val_losses"] = run_losses;
  run.doc["best_run"] = result.best_run;
  run.write(out_path + ".run.json");

  std::cout << "trained " << (two_class ? 2 : 3) << "-class model ("
            << result.model.parameter_count() << " parameters) on " << data.features.count
            << " points: preprocessing " << prep_s << " s, training " << train_s
            << " s, best run " << result.best_run << " (val loss "
            << result.final_val_losses[static_cast<std::size_t>(result.best_run)] << ")\n";
  return 0;
}

// ------------------------------------------------------------- classify ----

int cmd_classify(const std::string& model_path, const std::string& in_path,
                 const std::string& out_path, const std::string& csv_path, int threads) {
  RunManifest run("classify");
  run.config("model", model_path);
  run.config("in", in_path);
  run.config("out", out_path);
  run.config("threads", resolve_threads(threads));
  run.input(model_path);
  run.input(in_path);

  Model model = load_model(model_path);
  PointCloud cloud = read_cloud(in_path);

  // Preprocessing vs classification mirrors the timing phases reported for
  // the reference pipelines.
  StopWatch sw;
  sw.start();
  KnnIndex index(cloud);
  ScaleConfig config;
  config.scales = model.scales;
  config.feature_mask = model.feature_mask;
  FeatureSet features = extract_features(cloud, index, config, threads);
  const double prep_s = sw.stop();

  sw.start();
  Predictions pred = classify(model, features, threads);
  const double classify_s = sw.stop();

  write_classified_ply(cloud, pred.labels, out_path);
  if (!csv_path.empty()) {
    std::string csv = "index,label";
    for (int c = 0; c < model.classes; ++c) csv += ",p" + std::to_string(c);
    csv += "\n";
    for (std::size_t i = 0; i < pred.labels.size(); ++i) {
      csv += std::to_string(i) + "," + std::to_string(int(pred.labels[i]));
      for (int c = 0; c < model.classes; ++c)
        csv += "," + std::to_string(pred.probabilities(static_cast<long>(i), c));
      csv += "\n";
    }
    atomic_write_file(csv_path, csv);
    run.output(csv_path);
  }

  run.timing("preprocessing", prep_s);
  run.timing("classification", classify_s);
  run.output(out_path);
  run.write(out_path + ".run.json");

  std::cout << "classified " << cloud.size() << " points: preprocessing " << prep_s
            << " s, classification " << classify_s << " s\n";
  return 0;
}

// ----------------------------------------------------------------- eval ----

json scores_to_json(const Scores& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"mcc", s.mcc},
          {"f1", s.f1},               {"accuracy", s.accuracy}, {"iou", s.iou}};
}

int cmd_eval(const std::string& model_path, const std::string& data_dir,
             const std::string& report_path, const std::string& pr_csv_path,
             const std::string& baseline, double ca_threshold, int ca_k, int threads) {
  const bool use_ca = baseline == "ca";
  if (!use_ca && !baseline.empty()) throw std::invalid_argument("unknown baseline '" + baseline + "'");
  if (!use_ca && model_path.empty()) throw std::invalid_argument("eval needs --model (or --baseline ca)");

  RunManifest run("eval");
  run.config("model", model_path);
  run.config("data", data_dir);
  run.config("baseline", baseline);
  run.config("threshold", ca_threshold);
  run.config("ca_k", ca_k);
  run.config("threads", resolve_threads(threads));

  // Either a synth dataset directory (use its eval split) or a directory of
  // labeled PLY files.
  std::vector<std::string> files;
  if (fs::exists(data_dir + "/manifest.json")) {
    std::ifstream mf(data_dir + "/manifest.json");
    json manifest = json::parse(mf);
    for (const auto& entry : manifest.at("eval")) files.push_back(data_dir + "/" + entry.at("file").get<std::string>());
  } else {
    for (const auto& e : fs::directory_iterator(data_dir))
      if (e.path().extension() == ".ply") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
  }
  if (files.empty()) throw std::runtime_error("no evaluation clouds in " + data_dir);

  Model model;
  if (!use_ca) {
    model = load_model(model_path);
    run.input(model_path);
  }

  json per_cloud = json::array();
  std::vector<Scores> sharp_scores, boundary_scores;
  std::string pr_csv = "cloud,precision,recall\n";

  for (const auto& path : files) {
    PointCloud cloud = read_ply(path);
    if (!cloud.has_labels()) throw std::runtime_error("evaluation cloud lacks labels: " + path);
    KnnIndex index(cloud);

    std::vector<std::uint8_t> predicted;
    if (use_ca) {
      CaConfig cc;
      cc.k = ca_k;
      cc.threshold = ca_threshold;
      predicted = ca_classify(cloud, index, cc, threads);
    } else {
      ScaleConfig config;
      config.scales = model.scales;
      config.feature_mask = model.feature_mask;
      FeatureSet features = extract_features(cloud, index, config, threads);
      predicted = classify(model, features, threads).labels;
    }

    // 2c comparisons fold boundary into non-edge on the label side as well.
    std::vector<std::uint8_t> labels = cloud.labels;
    if (use_ca || model.classes == 2)
      for (auto& l : labels)
        if (l == 2) l = 0;

    const Scores sharp = scores(confusion(predicted, labels, 1));
    sharp_scores.push_back(sharp);
    json entry;
    entry["cloud"] = fs::path(path).stem().string();
    entry["points"] = cloud.size();
    entry["sharp_edge"] = scores_to_json(sharp);
    if (!use_ca && model.classes == 3) {
      const Scores bnd = scores(confusion(predicted, labels, 2));
      boundary_scores.push_back(bnd);
      entry["boundary"] = scores_to_json(bnd);
    }
    per_cloud.push_back(entry);
    pr_csv += fs::path(path).stem().string() + "," + std::to_string(sharp.precision) + "," +
              std::to_string(sharp.recall) + "\n";
  }

  json report;
  report["per_cloud"] = per_cloud;
  report["median"] = json::object();
  report["median"]["sharp_edge"] = scores_to_json(median_scores(sharp_scores));
  if (!boundary_scores.empty())
    report["median"]["boundary"] = scores_to_json(median_scores(boundary_scores));

  const std::string report_out = report_path.empty() ? data_dir + "/eval_report.json" : report_path;
  atomic_write_file(report_out, report.dump(2) + "\n");
  run.output(report_out);
  if (!pr_csv_path.empty()) {
    atomic_write_file(pr_csv_path, pr_csv);
    run.output(pr_csv_path);
  }
  run.write(report_out + ".run.json");

  std::cout << report["median"].dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- bench ----

int cmd_bench(const std::string& in_path, long synth_points, int repeats,
              const std::string& scales_text, int threads) {
  RunManifest run("bench");
  run.config("in", in_path);
  run.config("synth_points", synth_points);
  run.config("repeats", repeats);
  run.config("scales", scales_text);
  run.config("threads", resolve_threads(threads));

  PointCloud cloud;
  if (!in_path.empty()) {
    cloud = read_cloud(in_path);
    run.input(in_path);
  } else {
    // box surface sized so the jittered grid lands near the requested count
    SceneSpec spec;
    spec.kind = PrimitiveKind::Box;
    spec.size = std::sqrt(static_cast<double>(synth_points) / 3.76);
    cloud = generate(spec, 42);
  }

  ScaleConfig config;
  config.scales = parse_scales(scales_text);
  config.validate();
  Model model = Model::init(config.scales, config.feature_mask, 3, 7);

  auto median_of = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };

  std::vector<double> t_index, t_features, t_infer;
  StopWatch sw;
  for (int r = 0; r < repeats; ++r) {
    sw.start();
    KnnIndex index(cloud);
    t_index.push_back(sw.stop());
    sw.start();
    FeatureSet features = extract_features(cloud, index, config, threads);
    t_features.push_back(sw.stop());
    sw.start();
    classify(model, features, threads);
    t_infer.push_back(sw.stop());
  }

  const double idx_s = median_of(t_index), feat_s = median_of(t_features),
               inf_s = median_of(t_infer);
  run.timing("index_build", idx_s);
  run.timing("feature_extraction", feat_s);
  run.timing("classification", inf_s);
  run.write("bench.run.json");

  std::cout << "points: " << cloud.size() << " (" << repeats << " repeats, median)\n"
            << "  index build:        " << idx_s << " s\n"
            << "  feature extraction: " << feat_s << " s ("
            << static_cast<double>(cloud.size()) / std::max(feat_s, 1e-9) << " points/s)\n"
            << "  classification:     " << inf_s << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point cloud sharp-edge and boundary classification toolkit"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Read defaults from a TOML/INI config file");
  app.require_subcommand(1);

  int threads = 0;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  std::string sy_profile = "defaultpp";
  std::uint64_t sy_seed = 0;
  std::string sy_out = "dataset";
  synth->add_option("--profile", sy_profile, "default | defaultpp");
  synth->add_option("--seed", sy_seed, "Root seed; all randomness derives from it");
  synth->add_option("--out", sy_out, "Output directory")->required();
  synth->add_option("--threads", threads, "Worker threads (0 = auto)");

  // features
  auto* feats = app.add_subcommand("features", "Extract multi-scale features to a BNDF file");
  std::string ft_in, ft_out, ft_scales = "128,64,32,16", ft_mask = "all";
  feats->add_option("--in", ft_in, "Input cloud (.ply or .xyz)")->required();
  feats->add_option("--out", ft_out, "Output BNDF path")->required();
  feats->add_option("--scales", ft_scales, "Descending neighborhood sizes");
  feats->add_option("--mask", ft_mask, "Feature subset: all | no-sigma | sigma,d,s,c ...");
  feats->add_option("--threads", threads, "Worker threads (0 = auto)");

  // train
  auto* tr = app.add_subcommand("train", "Train a classifier on a synth dataset directory");
  std::string tr_data, tr_out = "model.bndm", tr_log, tr_scales = "128,64,32,16", tr_mask = "all";
  int tr_iters = 3000, tr_runs = 5, tr_batch = 16384;
  double tr_lr = 0.001, tr_gamma = 2.0, tr_dropout = 0.5;
  std::uint64_t tr_seed = 0;
  bool tr_2c = false;
  tr->add_option("--data", tr_data, "Dataset directory (from synth)")->required();
  tr->add_option("--out", tr_out, "Output model path");
  tr->add_option("--log", tr_log, "Training log CSV (default <out>.log.csv)");
  tr->add_option("--scales", tr_scales, "Descending neighborhood sizes");
  tr->add_option("--mask", tr_mask, "Feature subset");
  tr->add_option("--iters", tr_iters, "Optimizer steps (3000 default-style, 8000 abc-style)");
  tr->add_option("--runs", tr_runs, "Independent runs; best validation loss wins");
  tr->add_option("--batch", tr_batch, "Batch size");
  tr->add_option("--lr", tr_lr, "Adam learning rate");
  tr->add_option("--gamma", tr_gamma, "Focal loss gamma");
  tr->add_option("--dropout", tr_dropout, "Dropout probability");
  tr->add_option("--seed", tr_seed, "Root seed");
  tr->add_flag("--2c", tr_2c, "Two-class mode (non-edge vs sharp-edge)");
  tr->add_option("--threads", threads, "Worker threads (0 = auto)");

  // classify
  auto* cl = app.add_subcommand("classify", "Classify a cloud and write a colored PLY");
  std::string cl_model, cl_in, cl_out = "classified.ply", cl_csv;
  cl->add_option("--model", cl_model, "Model file")->required();
  cl->add_option("--in", cl_in, "Input cloud")->required();
  cl->add_option("--out", cl_out, "Output colored PLY");
  cl->add_option("--csv", cl_csv, "Optional per-point label/probability CSV");
  cl->add_option("--threads", threads, "Worker threads (0 = auto)");

  // eval
  auto* ev = app.add_subcommand("eval", "Score a model (or the CA baseline) on labeled clouds");
  std::string ev_model, ev_data, ev_report, ev_pr_csv, ev_baseline;
  double ev_threshold = 0.025;
  int ev_ca_k = 64;
  ev->add_option("--model", ev_model, "Model file");
  ev->add_option("--data", ev_data, "Dataset directory or directory of labeled PLYs")->required();
  ev->add_option("--report", ev_report, "Output JSON report path");
  ev->add_option("--pr-csv", ev_pr_csv, "Per-cloud precision/recall CSV");
  ev->add_option("--baseline", ev_baseline, "Evaluate a baseline instead of a model: ca");
  ev->add_option("--threshold", ev_threshold, "CA ratio threshold (paper presets: 0.025, 0.08)");
  ev->add_option("--ca-k", ev_ca_k, "CA neighborhood size");
  ev->add_option("--threads", threads, "Worker threads (0 = auto)");

  // bench
  auto* be = app.add_subcommand("bench", "Time index build, feature extraction and inference");
  std::string be_in, be_scales = "128,64,32,16";
  long be_points = 1000000;
  int be_repeats = 3;
  be->add_option("--in", be_in, "Input cloud (omit to use a synthetic one)");
  be->add_option("--synth-points", be_points, "Synthetic cloud size when --in is omitted");
  be->add_option("--repeats", be_repeats, "Repetitions; the median is reported");
  be->add_option("--scales", be_scales, "Descending neighborhood sizes");
  be->add_option("--threads", threads, "Worker threads (0 = auto)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(sy_profile, sy_seed, sy_out, threads);
    if (*feats) return cmd_features(ft_in, ft_out, ft_scales, ft_mask, threads);
    if (*tr)
      return cmd_train(tr_data, tr_out, tr_log, tr_scales, tr_mask, tr_iters, tr_runs, tr_batch,
                       tr_lr, tr_gamma, tr_dropout, tr_seed, tr_2c, threads);
    if (*cl) return cmd_classify(cl_model, cl_in, cl_out, cl_csv, threads);
    if (*ev)
      return cmd_eval(ev_model, ev_data, ev_report, ev_pr_csv, ev_baseline, ev_threshold,
                      ev_ca_k, threads);
    if (*be) return cmd_bench(be_in, be_points, be_repeats, be_scales, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
