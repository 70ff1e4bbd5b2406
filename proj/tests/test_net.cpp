#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "edgekit/net.hpp"
#include "test_support.hpp"

using namespace edgekit;
using namespace edgekit::test;

namespace {

Model random_model(int classes, std::uint64_t seed, std::vector<int> scales = {128, 64, 32, 16}) {
  Model model = Model::init(scales, kMaskAll, classes, seed);
  model.dropout_p = 0.5;
  return model;
}

std::vector<double> random_input(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (auto& v : x) v = dist(rng);
  return x;
}

struct Batch {
  std::vector<std::vector<double>> rows;
  std::vector<const double*> ptrs;
  std::vector<std::uint8_t> labels;
};

Batch random_batch(const Model& model, std::size_t n, std::uint64_t seed) {
  Batch b;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cls(0, model.classes - 1);
  for (std::size_t i = 0; i < n; ++i) {
    b.rows.push_back(random_input(model.input_dim(), seed * 131 + i));
    b.labels.push_back(static_cast<std::uint8_t>(cls(rng)));
  }
  for (auto& r : b.rows) b.ptrs.push_back(r.data());
  return b;
}

double batch_loss(const Model& model, const Batch& b, double gamma, bool training,
                  std::uint64_t mask_seed) {
  Eigen::MatrixXd probs;
  forward_batch(model, b.ptrs.data(), b.ptrs.size(), training, mask_seed, 0, probs);
  double loss = 0;
  for (std::size_t j = 0; j < b.labels.size(); ++j)
    loss += focal_loss(probs.col(static_cast<long>(j)), b.labels[j], gamma);
  return loss / static_cast<double>(b.labels.size());
}

// Every learnable parameter as a flat pointer list, model and gradient side
// by side, in a fixed order.
std::vector<std::pair<double*, double*>> param_pairs(Model& model, Gradients& grads) {
  std::vector<std::pair<double*, double*>> out;
  auto add = [&out](double* p, double* g, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) out.emplace_back(p + i, g + i);
  };
  add(model.w_pair.data(), grads.w_pair.data(), model.w_pair.size());
  add(model.b_pair.data(), grads.b_pair.data(), model.b_pair.size());
  add(model.w1.data(), grads.w1.data(), model.w1.size());
  add(model.b1.data(), grads.b1.data(), model.b1.size());
  add(model.w2.data(), grads.w2.data(), model.w2.size());
  add(model.b2.data(), grads.b2.data(), model.b2.size());
  add(model.w3.data(), grads.w3.data(), model.w3.size());
  add(model.b3.data(), grads.b3.data(), model.b3.size());
  return out;
}

// Largest relative finite-difference error over all parameters.
double max_fd_error(Model& model, const Batch& batch, double gamma, bool training,
                    std::uint64_t mask_seed) {
  Gradients grads = Gradients::zeros_like(model);
  backward_batch(model, batch.ptrs.data(), batch.labels.data(), batch.ptrs.size(), gamma,
                 training, mask_seed, 0, grads);
  auto params = param_pairs(model, grads);
  const double h = 1e-5;
  double worst = 0;
  for (auto [p, g] : params) {
    const double saved = *p;
    *p = saved + h;
    const double up = batch_loss(model, batch, gamma, training, mask_seed);
    *p = saved - h;
    const double down = batch_loss(model, batch, gamma, training, mask_seed);
    *p = saved;
    const double fd = (up - down) / (2 * h);
    const double rel = std::abs(*g - fd) / std::max({std::abs(*g), std::abs(fd), 1e-4});
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace

TEST_CASE("parameter counts anchor the compact architecture") {
  CHECK(random_model(3, 1).parameter_count() == 1639);
  // two-class head: replacing 16*3+3 with 16*2+2 removes 17 parameters
  CHECK(random_model(2, 1).parameter_count() == 1622);
}

TEST_CASE("zero weights give uniform class probabilities") {
  Model model = random_model(3, 2);
  model.w_pair.setZero();
  model.b_pair.setZero();
  model.w1.setZero();
  model.b1.setZero();
  model.w2.setZero();
  model.b2.setZero();
  model.w3.setZero();
  model.b3.setZero();
  auto x = random_input(model.input_dim(), 3);
  Eigen::VectorXd probs = forward(model, x.data());
  for (int c = 0; c < 3; ++c) CHECK(probs[c] == doctest::Approx(1.0 / 3));
}

TEST_CASE("inference is deterministic and ignores the mask seed") {
  Model model = random_model(3, 5);
  auto x = random_input(model.input_dim(), 6);
  Eigen::VectorXd a = forward(model, x.data(), false, 1);
  Eigen::VectorXd b = forward(model, x.data(), false, 999);
  CHECK(a == b);
  CHECK(a.sum() == doctest::Approx(1.0).epsilon(1e-9));
  for (int c = 0; c < 3; ++c) {
    CHECK(a[c] >= 0.0);
    CHECK(a[c] <= 1.0);
  }
}

TEST_CASE("softmax is shift invariant in the logits") {
  Model model = random_model(3, 7);
  auto x = random_input(model.input_dim(), 8);
  Eigen::VectorXd base = forward(model, x.data());
  model.b3.array() += 13.5;  // shifts every logit equally
  Eigen::VectorXd shifted = forward(model, x.data());
  int arg_base, arg_shift;
  base.maxCoeff(&arg_base);
  shifted.maxCoeff(&arg_shift);
  CHECK(arg_base == arg_shift);
  for (int c = 0; c < 3; ++c) CHECK(shifted[c] == doctest::Approx(base[c]).epsilon(1e-9));
}

TEST_CASE("focal loss closed forms") {
  Eigen::VectorXd p(3);
  p << 1.0, 0.0, 0.0;
  CHECK(focal_loss(p, 0, 2.0) == doctest::Approx(0.0));

  p << 0.5, 0.3, 0.2;
  CHECK(focal_loss(p, 0, 2.0) == doctest::Approx(0.25 * std::log(2.0)));  // 0.173286...
  CHECK(focal_loss(p, 0, 0.0) == doctest::Approx(-std::log(0.5)));        // plain cross-entropy
  CHECK(focal_loss(p, 1, 0.0) == doctest::Approx(-std::log(0.3)));
}

TEST_CASE("saturated correct predictions have vanishing gradients") {
  Model model = random_model(3, 9);
  model.w3.setZero();
  model.b3 << 60.0, 0.0, 0.0;  // p_0 ~ 1
  Batch batch = random_batch(model, 8, 10);
  std::fill(batch.labels.begin(), batch.labels.end(), std::uint8_t{0});
  Gradients grads = Gradients::zeros_like(model);
  backward_batch(model, batch.ptrs.data(), batch.labels.data(), batch.ptrs.size(), 2.0, false, 0,
                 0, grads);
  auto params = param_pairs(model, grads);
  for (auto [p, g] : params) CHECK(std::abs(*g) < 1e-12);
}

TEST_CASE("analytic gradients match central differences") {
  for (int rep = 0; rep < 4; ++rep) {
    Model model = random_model(rep % 2 ? 2 : 3, 100 + static_cast<std::uint64_t>(rep));
    Batch batch = random_batch(model, 8, 200 + static_cast<std::uint64_t>(rep));
    SUBCASE("") {}
    CHECK(max_fd_error(model, batch, 2.0, false, 0) < 1e-4);
  }
}

TEST_CASE("gradients stay correct with dropout active (fixed masks)") {
  Model model = random_model(3, 300);
  model.dropout_p = 0.5;
  Batch batch = random_batch(model, 8, 301);
  CHECK(max_fd_error(model, batch, 2.0, true, 12345) < 1e-4);
}

TEST_CASE("gradient of gamma=0 focal equals cross-entropy gradient") {
  Model model = random_model(3, 400);
  Batch batch = random_batch(model, 6, 401);
  CHECK(max_fd_error(model, batch, 0.0, false, 0) < 1e-4);
}

// Independent reference: an unshared-fusion forward pass written from
// scratch. The fusion gradient of the shared model must equal the sum of the
// three per-pair gradients of this clone evaluated at identical weights.
namespace {

double unshared_loss(const Model& model, const std::vector<Eigen::MatrixXd>& w_pairs,
                     const std::vector<Eigen::VectorXd>& b_pairs, const double* input,
                     int label, double gamma) {
  const int m = model.m();
  const int P = model.pair_count();
  Eigen::VectorXd x(model.input_dim());
  for (int i = 0; i < model.input_dim(); ++i) x[i] = input[i];
  for (int s = 0; s < m; ++s)
    for (int c = 0; c < kFeatureDim; ++c)
      if (!(model.feature_mask & (1u << c))) x[s * kFeatureDim + c] = 0;
  x = (x - model.mean).cwiseQuotient(model.stdev);

  auto leaky = [&](const Eigen::VectorXd& v) {
    return v.unaryExpr([&](double a) { return a > 0 ? a : model.leaky_slope * a; }).eval();
  };
  Eigen::VectorXd f(kPairOut * P);
  for (int p = 0; p < P; ++p)
    f.segment(p * kPairOut, kPairOut) =
        leaky(w_pairs[static_cast<std::size_t>(p)] * x.segment(p * kFeatureDim, kPairIn) +
              b_pairs[static_cast<std::size_t>(p)]);
  Eigen::VectorXd h1 = leaky(model.w1 * f + model.b1);
  Eigen::VectorXd h2 = leaky(model.w2 * h1 + model.b2);
  Eigen::VectorXd z = model.w3 * h2 + model.b3;
  z.array() -= z.maxCoeff();
  Eigen::VectorXd probs = z.array().exp();
  probs /= probs.sum();
  const double pt = std::max(probs[label], 1e-12);
  return -std::pow(1.0 - probs[label], gamma) * std::log(pt);
}

}  // namespace

TEST_CASE("shared fusion gradient equals the per-pair sum of an unshared clone") {
  Model model = random_model(3, 500);
  auto x = random_input(model.input_dim(), 501);
  const int label = 1;
  const double gamma = 2.0;

  const double* ptr = x.data();
  Gradients grads = Gradients::zeros_like(model);
  std::uint8_t lab = label;
  backward_batch(model, &ptr, &lab, 1, gamma, false, 0, 0, grads);

  const int P = model.pair_count();
  std::vector<Eigen::MatrixXd> w_pairs(static_cast<std::size_t>(P), model.w_pair);
  std::vector<Eigen::VectorXd> b_pairs(static_cast<std::size_t>(P), model.b_pair);

  const double h = 1e-6;
  for (int i = 0; i < kPairOut; ++i) {
    for (int j = 0; j < kPairIn; ++j) {
      double fd_sum = 0;
      for (int p = 0; p < P; ++p) {
        auto& wp = w_pairs[static_cast<std::size_t>(p)];
        const double saved = wp(i, j);
        wp(i, j) = saved + h;
        const double up = unshared_loss(model, w_pairs, b_pairs, x.data(), label, gamma);
        wp(i, j) = saved - h;
        const double down = unshared_loss(model, w_pairs, b_pairs, x.data(), label, gamma);
        wp(i, j) = saved;
        fd_sum += (up - down) / (2 * h);
      }
      CHECK(std::abs(grads.w_pair(i, j) - fd_sum) <
            1e-5 * std::max(1.0, std::abs(grads.w_pair(i, j))));
    }
  }
}

TEST_CASE("dropout expectation matches the no-dropout pre-activation") {
  Model model = random_model(3, 600);
  model.dropout_p = 0.5;
  auto x = random_input(model.input_dim(), 601);

  const Eigen::VectorXd clean = forward_trace(model, x.data(), false).hidden2_pre;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(kHidden2);
  const int draws = 100000;
  for (int d = 0; d < draws; ++d)
    mean += forward_trace(model, x.data(), true, static_cast<std::uint64_t>(d)).hidden2_pre;
  mean /= draws;
  for (int u = 0; u < kHidden2; ++u)
    CHECK(std::abs(mean[u] - clean[u]) <= 0.02 * std::max(1.0, std::abs(clean[u])));
}

TEST_CASE("dropout fires only on the trunk layers") {
  Model model = random_model(3, 650);
  model.dropout_p = 0.5;
  auto x = random_input(model.input_dim(), 651);
  ForwardTrace t = forward_trace(model, x.data(), true, 77);
  // fusion outputs never carry dropout zeros
  int fusion_zeros = 0, h1_zeros = 0;
  for (int i = 0; i < t.fusion_out.size(); ++i) fusion_zeros += t.fusion_out[i] == 0.0;
  for (int i = 0; i < t.hidden1_out.size(); ++i) h1_zeros += t.hidden1_out[i] == 0.0;
  CHECK(fusion_zeros == 0);
  CHECK(h1_zeros > 0);  // p=0.5 over 24 units: zero dropped units is (1/2)^24
}

TEST_CASE("adam first step moves by about the learning rate") {
  Model model = random_model(3, 700);
  const Model before = model;
  Gradients grads = Gradients::zeros_like(model);
  grads.w_pair.setOnes();
  grads.b_pair.setOnes();
  grads.w1.setOnes();
  grads.b1.setOnes();
  grads.w2.setOnes();
  grads.b2.setOnes();
  grads.w3.setOnes();
  grads.b3.setOnes();
  AdamState state = AdamState::zeros_like(model);
  TrainConfig config;
  adam_step(model, grads, state, config);
  CHECK(state.step == 1);
  const double step = before.w_pair(0, 0) - model.w_pair(0, 0);
  CHECK(step == doctest::Approx(config.lr).epsilon(1e-6));
  CHECK(before.w1(3, 5) - model.w1(3, 5) == doctest::Approx(config.lr).epsilon(1e-6));
}

TEST_CASE("zero gradient leaves parameters fixed while moments decay") {
  Model model = random_model(3, 710);
  Gradients ones = Gradients::zeros_like(model);
  ones.w_pair.setOnes();
  AdamState state = AdamState::zeros_like(model);
  TrainConfig config;
  adam_step(model, ones, state, config);  // build up a moment
  const Model snapshot = model;
  const double m_before = state.first.w_pair(0, 0);

  Gradients zero = Gradients::zeros_like(model);
  adam_step(model, zero, state, config);
  CHECK(state.first.w_pair(0, 0) == doctest::Approx(config.beta1 * m_before));
  // m decayed but nonzero: parameters still move slightly, as Adam defines
  CHECK(model.w_pair(0, 0) != snapshot.w_pair(0, 0));
  CHECK(std::abs(model.w_pair(0, 0) - snapshot.w_pair(0, 0)) < 2 * config.lr);

  // with zero moments everywhere, zero gradient changes nothing
  Model fresh = random_model(3, 711);
  const Model fresh_before = fresh;
  AdamState fresh_state = AdamState::zeros_like(fresh);
  adam_step(fresh, zero, fresh_state, config);
  CHECK(fresh.w_pair == fresh_before.w_pair);
  CHECK(fresh.w3 == fresh_before.w3);
}

TEST_CASE("two adam steps match a hand-rolled scalar trace") {
  Model model = random_model(3, 720);
  AdamState state = AdamState::zeros_like(model);
  TrainConfig config;

  // three watched parameters with distinct gradients over two steps
  const double g1[3] = {1.0, -0.5, 0.25};
  const double g2[3] = {-2.0, 0.75, 0.1};
  const double theta0[3] = {model.w_pair(0, 0), model.w_pair(1, 1), model.b3(2)};

  auto fill = [&](const double* g) {
    Gradients grads = Gradients::zeros_like(model);
    grads.w_pair(0, 0) = g[0];
    grads.w_pair(1, 1) = g[1];
    grads.b3(2) = g[2];
    return grads;
  };
  Gradients step1 = fill(g1);
  adam_step(model, step1, state, config);
  Gradients step2 = fill(g2);
  adam_step(model, step2, state, config);

  for (int i = 0; i < 3; ++i) {
    // independent scalar recomputation of textbook Adam with bias correction
    double m = 0, v = 0, theta = theta0[i];
    const double gs[2] = {g1[i], g2[i]};
    for (int t = 1; t <= 2; ++t) {
      m = 0.9 * m + 0.1 * gs[t - 1];
      v = 0.999 * v + 0.001 * gs[t - 1] * gs[t - 1];
      const double mhat = m / (1 - std::pow(0.9, t));
      const double vhat = v / (1 - std::pow(0.999, t));
      theta -= 0.001 * mhat / (std::sqrt(vhat) + 1e-8);
    }
    const double got = i == 0   ? model.w_pair(0, 0)
                       : i == 1 ? model.w_pair(1, 1)
                                : model.b3(2);
    CHECK(got == doctest::Approx(theta).epsilon(1e-12));
  }
}

namespace {

// Separable toy problem in feature space: class means far apart.
FeatureSet separable_features(std::size_t n, int classes, std::vector<std::uint8_t>& labels,
                              std::uint64_t seed) {
  FeatureSet fs;
  fs.scales = {32, 16};
  fs.count = n;
  fs.data.resize(n * fs.row_width());
  labels.resize(n);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cls(0, classes - 1);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = cls(rng);
    labels[i] = static_cast<std::uint8_t>(c);
    double* row = fs.point(i);
    for (std::size_t d = 0; d < fs.row_width(); ++d)
      row[d] = 3.0 * c * ((d % 3) + 1) + noise(rng);
  }
  return fs;
}

}  // namespace

TEST_CASE("training separates a linearly separable toy set") {
  std::vector<std::uint8_t> labels;
  FeatureSet fs = separable_features(4000, 2, labels, 42);
  std::vector<std::size_t> validation;
  for (std::size_t i = 0; i < 400; ++i) validation.push_back(i * 10);

  TrainConfig config;
  config.iterations = 500;
  config.batch_size = 256;
  config.runs = 1;
  config.seed = 7;
  TrainResult result = train(fs, labels, validation, 2, config);

  Predictions pred = classify(result.model, fs);
  std::size_t correct = 0;
  for (std::size_t idx : validation) correct += pred.labels[idx] == labels[idx];
  CHECK(static_cast<double>(correct) / static_cast<double>(validation.size()) >= 0.99);
}

TEST_CASE("best-run selection returns the argmin of final validation losses") {
  std::vector<std::uint8_t> labels;
  FeatureSet fs = separable_features(1500, 3, labels, 43);
  std::vector<std::size_t> validation;
  for (std::size_t i = 0; i < 150; ++i) validation.push_back(i * 10);

  TrainConfig config;
  config.iterations = 60;
  config.batch_size = 128;
  config.runs = 3;
  config.seed = 11;
  TrainResult result = train(fs, labels, validation, 3, config);
  REQUIRE(result.final_val_losses.size() == 3);
  for (double v : result.final_val_losses)
    CHECK(result.final_val_losses[static_cast<std::size_t>(result.best_run)] <= v);
}

TEST_CASE("fixed seeds reproduce the training log bit for bit") {
  std::vector<std::uint8_t> labels;
  FeatureSet fs = separable_features(1200, 2, labels, 44);
  std::vector<std::size_t> validation{3, 77, 200, 411, 800};

  TrainConfig config;
  config.iterations = 40;
  config.batch_size = 128;
  config.runs = 2;
  config.seed = 99;
  config.log_every = 10;

  TrainResult a = train(fs, labels, validation, 2, config);
  TrainResult b = train(fs, labels, validation, 2, config);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].train_loss == b.log[i].train_loss);
    CHECK(a.log[i].val_loss == b.log[i].val_loss);
  }

  // and the result does not depend on the worker count
  config.threads = 3;
  TrainResult c = train(fs, labels, validation, 2, config);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].train_loss == c.log[i].train_loss);
    CHECK(a.log[i].val_loss == c.log[i].val_loss);
  }
}

TEST_CASE("standardization absorbs affine rescaling of a raw feature column") {
  std::vector<std::uint8_t> labels;
  FeatureSet fs = separable_features(800, 2, labels, 45);
  Model model = Model::init(fs.scales, fs.feature_mask, 2, 5);

  // plant nontrivial standardization drawn from the data
  const int D = model.input_dim();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(D), sq = Eigen::VectorXd::Zero(D);
  for (std::size_t i = 0; i < fs.count; ++i) {
    Eigen::Map<const Eigen::VectorXd> x(fs.point(i), D);
    mean += x;
    sq += x.cwiseProduct(x);
  }
  mean /= static_cast<double>(fs.count);
  sq /= static_cast<double>(fs.count);
  model.mean = mean;
  model.stdev = (sq - mean.cwiseProduct(mean)).cwiseMax(0.0).cwiseSqrt().cwiseMax(1e-8);
  Predictions base = classify(model, fs);

  // rescale column 5 affinely and recompute that column's standardization
  const double a = 3.5, b = -2.0;
  FeatureSet scaled = fs;
  for (std::size_t i = 0; i < scaled.count; ++i) scaled.point(i)[5] = a * fs.point(i)[5] + b;
  Model adjusted = model;
  adjusted.mean[5] = a * model.mean[5] + b;
  adjusted.stdev[5] = a * model.stdev[5];
  Predictions moved = classify(adjusted, scaled);

  for (std::size_t i = 0; i < fs.count; ++i) {
    CHECK(moved.labels[i] == base.labels[i]);
    for (int c = 0; c < 2; ++c)
      CHECK(std::abs(moved.probabilities(static_cast<long>(i), c) -
                     base.probabilities(static_cast<long>(i), c)) < 1e-6);
  }
}

TEST_CASE("classify breaks probability ties toward the lowest class") {
  Model model = random_model(3, 800);
  model.w_pair.setZero();
  model.b_pair.setZero();
  model.w1.setZero();
  model.b1.setZero();
  model.w2.setZero();
  model.b2.setZero();
  model.w3.setZero();
  model.b3.setZero();
  FeatureSet fs;
  fs.scales = model.scales;
  fs.count = 5;
  fs.data.assign(5 * fs.row_width(), 1.0);
  Predictions pred = classify(model, fs);
  for (auto l : pred.labels) CHECK(l == 0);
}

TEST_CASE("a 2c model only ever emits classes 0 and 1") {
  Model model = random_model(2, 810);
  FeatureSet fs;
  fs.scales = model.scales;
  fs.count = 64;
  fs.data = random_input(static_cast<int>(64 * fs.row_width()), 811);
  Predictions pred = classify(model, fs);
  CHECK(pred.probabilities.cols() == 2);
  for (auto l : pred.labels) CHECK(l <= 1);
}

TEST_CASE("batch classification equals single-sample forwards") {
  Model model = random_model(3, 820);
  FeatureSet fs;
  fs.scales = model.scales;
  fs.count = 33;
  fs.data = random_input(static_cast<int>(33 * fs.row_width()), 821);
  Predictions pred = classify(model, fs);
  for (std::size_t i = 0; i < fs.count; ++i) {
    Eigen::VectorXd probs = forward(model, fs.point(i));
    for (int c = 0; c < 3; ++c)
      CHECK(pred.probabilities(static_cast<long>(i), c) == doctest::Approx(probs[c]).epsilon(1e-12));
  }
}

TEST_CASE("model round trip is bit exact and classification-stable") {
  Model model = random_model(3, 830);
  model.mean.setRandom();
  model.stdev.setConstant(1.7);
  TempDir dir;
  save_model(model, dir.file("m.bndm"));
  Model back = load_model(dir.file("m.bndm"));

  CHECK(back.scales == model.scales);
  CHECK(back.feature_mask == model.feature_mask);
  CHECK(back.classes == model.classes);
  CHECK(back.w_pair == model.w_pair);
  CHECK(back.b_pair == model.b_pair);
  CHECK(back.w1 == model.w1);
  CHECK(back.w2 == model.w2);
  CHECK(back.w3 == model.w3);
  CHECK(back.mean == model.mean);
  CHECK(back.stdev == model.stdev);

  save_model(back, dir.file("m2.bndm"));
  CHECK(slurp(dir.file("m.bndm")) == slurp(dir.file("m2.bndm")));

  FeatureSet fs;
  fs.scales = model.scales;
  fs.count = 1000;
  fs.data = random_input(static_cast<int>(1000 * fs.row_width()), 831);
  Predictions a = classify(model, fs);
  Predictions b = classify(back, fs);
  CHECK(a.labels == b.labels);
}

TEST_CASE("truncated or corrupt model files are rejected") {
  Model model = random_model(3, 840);
  TempDir dir;
  save_model(model, dir.file("m.bndm"));
  const std::string bytes = slurp(dir.file("m.bndm"));

  spit(dir.file("t.bndm"), bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(load_model(dir.file("t.bndm")), ParseError);

  spit(dir.file("w.bndm"), "WXYZ" + bytes.substr(4));
  CHECK_THROWS_AS(load_model(dir.file("w.bndm")), ParseError);

  spit(dir.file("x.bndm"), bytes + "junk");
  CHECK_THROWS_AS(load_model(dir.file("x.bndm")), ParseError);
}

TEST_CASE("training rejects malformed requests") {
  std::vector<std::uint8_t> labels;
  FeatureSet fs = separable_features(200, 2, labels, 46);
  TrainConfig config;
  config.iterations = 5;
  config.batch_size = 32;
  config.runs = 1;

  std::vector<std::uint8_t> bad = labels;
  bad[0] = 2;  // outside 2-class range
  CHECK_THROWS_AS(train(fs, bad, {}, 2, config), std::invalid_argument);

  std::vector<std::uint8_t> uniform(labels.size(), 0);
  CHECK_THROWS_AS(train(fs, uniform, {}, 2, config), std::invalid_argument);

  CHECK_THROWS_AS(train(fs, labels, {fs.count + 5}, 2, config), std::invalid_argument);
}
