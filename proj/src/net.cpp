#include "edgekit/net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "edgekit/binio.hpp"
#include "edgekit/io.hpp"
#include "edgekit/parallel.hpp"
#include "edgekit/rng.hpp"

namespace edgekit {

namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kStdFloor = 1e-8;
constexpr std::size_t kChunk = 1024;

}  // namespace

void TrainConfig::validate() const {
  if (lr <= 0 || beta1 <= 0 || beta1 >= 1 || beta2 <= 0 || beta2 >= 1 || adam_eps <= 0)
    throw std::invalid_argument("invalid Adam hyperparameters");
  if (batch_size < 1 || iterations < 1 || runs < 1 || log_every < 1)
    throw std::invalid_argument("batch size, iterations, runs and cadence must be positive");
  if (gamma < 0) throw std::invalid_argument("focal gamma must be >= 0");
  if (dropout_p < 0 || dropout_p >= 1) throw std::invalid_argument("dropout must lie in [0,1)");
}

std::int64_t Model::parameter_count() const {
  auto affine = [](const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
    return static_cast<std::int64_t>(w.size() + b.size());
  };
  return affine(w_pair, b_pair) + affine(w1, b1) + affine(w2, b2) + affine(w3, b3);
}

Model Model::init(const std::vector<int>& scales, std::uint16_t feature_mask, int classes,
                  std::uint64_t seed) {
  if (scales.size() < 2) throw std::invalid_argument("the network needs at least 2 scales");
  if (classes != 2 && classes != 3) throw std::invalid_argument("classes must be 2 or 3");

  Model model;
  model.scales = scales;
  model.feature_mask = feature_mask;
  model.classes = classes;
  model.mean = Eigen::VectorXd::Zero(model.input_dim());
  model.stdev = Eigen::VectorXd::Ones(model.input_dim());

  std::mt19937_64 rng(seed);
  auto glorot = [&rng](Eigen::MatrixXd& w, int out, int in) {
    w.resize(out, in);
    const double a = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-a, a);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j) w(i, j) = dist(rng);
  };
  glorot(model.w_pair, kPairOut, kPairIn);
  model.b_pair = Eigen::VectorXd::Zero(kPairOut);
  glorot(model.w1, kHidden1, kPairOut * model.pair_count());
  model.b1 = Eigen::VectorXd::Zero(kHidden1);
  glorot(model.w2, kHidden2, kHidden1);
  model.b2 = Eigen::VectorXd::Zero(kHidden2);
  glorot(model.w3, classes, kHidden2);
  model.b3 = Eigen::VectorXd::Zero(classes);
  return model;
}

Gradients Gradients::zeros_like(const Model& model) {
  Gradients g;
  g.w_pair = Eigen::MatrixXd::Zero(model.w_pair.rows(), model.w_pair.cols());
  g.b_pair = Eigen::VectorXd::Zero(model.b_pair.size());
  g.w1 = Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols());
  g.b1 = Eigen::VectorXd::Zero(model.b1.size());
  g.w2 = Eigen::MatrixXd::Zero(model.w2.rows(), model.w2.cols());
  g.b2 = Eigen::VectorXd::Zero(model.b2.size());
  g.w3 = Eigen::MatrixXd::Zero(model.w3.rows(), model.w3.cols());
  g.b3 = Eigen::VectorXd::Zero(model.b3.size());
  return g;
}

void Gradients::set_zero() {
  w_pair.setZero();
  b_pair.setZero();
  w1.setZero();
  b1.setZero();
  w2.setZero();
  b2.setZero();
  w3.setZero();
  b3.setZero();
}

void Gradients::accumulate(const Gradients& other) {
  w_pair += other.w_pair;
  b_pair += other.b_pair;
  w1 += other.w1;
  b1 += other.b1;
  w2 += other.w2;
  b2 += other.b2;
  w3 += other.w3;
  b3 += other.b3;
}

AdamState AdamState::zeros_like(const Model& model) {
  AdamState s;
  s.first = Gradients::zeros_like(model);
  s.second = Gradients::zeros_like(model);
  return s;
}

double focal_loss(const Eigen::VectorXd& probabilities, int true_class, double gamma) {
  if (true_class < 0 || true_class >= probabilities.size())
    throw std::invalid_argument("true class out of range");
  const double pt = std::max(probabilities[true_class], kProbFloor);
  return -std::pow(1.0 - probabilities[true_class], gamma) * std::log(pt);
}

namespace {

// Per-chunk activations; sized lazily and reused across iterations.
struct Workspace {
  Eigen::MatrixXd xs;          // D x n standardized inputs
  Eigen::MatrixXd zp, f;       // fusion pre/post activations, 12P x n
  Eigen::MatrixXd a1, d1;      // hidden 1 pre-activation and post-dropout
  Eigen::MatrixXd a2, d2;      // hidden 2
  Eigen::MatrixXd probs;       // C x n
  Eigen::MatrixXd m1, m2;      // dropout multipliers (0 or 1/(1-p)); ones at inference
  // backward scratch
  Eigen::MatrixXd dz3, da2, da1, df, dzp_scratch;
};

inline double leaky(double v, double slope) { return v > 0 ? v : slope * v; }
inline double leaky_grad(double v, double slope) { return v > 0 ? 1.0 : slope; }

void fill_dropout(Eigen::MatrixXd& mask, int units, std::size_t n, int unit_offset,
                  double p, std::uint64_t mask_seed, std::uint64_t first_sample_index) {
  mask.resize(units, static_cast<long>(n));
  if (p <= 0) {
    mask.setOnes();
    return;
  }
  const double inv_keep = 1.0 / (1.0 - p);
  const std::uint64_t threshold = static_cast<std::uint64_t>(p * 18446744073709551616.0);
  for (std::size_t j = 0; j < n; ++j)
    for (int u = 0; u < units; ++u)
      mask(u, static_cast<long>(j)) =
          counter_hash(mask_seed, first_sample_index + j, static_cast<std::uint64_t>(unit_offset + u)) < threshold
              ? 0.0
              : inv_keep;
}

// Shared forward over one gathered chunk.
void forward_chunk(const Model& model, const double* const* samples, std::size_t n,
                   bool training, std::uint64_t mask_seed, std::uint64_t first_sample_index,
                   Workspace& ws) {
  const int D = model.input_dim();
  const int P = model.pair_count();
  const double slope = model.leaky_slope;

  ws.xs.resize(D, static_cast<long>(n));
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::Map<const Eigen::VectorXd> x(samples[j], D);
    ws.xs.col(static_cast<long>(j)) = x;
  }
  // Columns excluded by the feature mask are forced to zero before
  // standardization, so a model applies its own mask regardless of how the
  // features were extracted.
  for (int s = 0; s < model.m(); ++s)
    for (int c = 0; c < kFeatureDim; ++c)
      if (!(model.feature_mask & (1u << c))) ws.xs.row(s * kFeatureDim + c).setZero();
  ws.xs.colwise() -= model.mean;
  ws.xs.array().colwise() /= model.stdev.array();

  ws.zp.resize(kPairOut * P, static_cast<long>(n));
  for (int p = 0; p < P; ++p) {
    ws.zp.middleRows(p * kPairOut, kPairOut).noalias() =
        model.w_pair * ws.xs.middleRows(p * kFeatureDim, kPairIn);
    ws.zp.middleRows(p * kPairOut, kPairOut).colwise() += model.b_pair;
  }
  ws.f = ws.zp.unaryExpr([slope](double v) { return leaky(v, slope); });

  const double dropout = training ? model.dropout_p : 0.0;
  fill_dropout(ws.m1, kHidden1, n, 0, dropout, mask_seed, first_sample_index);
  fill_dropout(ws.m2, kHidden2, n, kHidden1, dropout, mask_seed, first_sample_index);

  ws.a1.noalias() = model.w1 * ws.f;
  ws.a1.colwise() += model.b1;
  ws.d1 = ws.a1.unaryExpr([slope](double v) { return leaky(v, slope); }).cwiseProduct(ws.m1);

  ws.a2.noalias() = model.w2 * ws.d1;
  ws.a2.colwise() += model.b2;
  ws.d2 = ws.a2.unaryExpr([slope](double v) { return leaky(v, slope); }).cwiseProduct(ws.m2);

  ws.probs.noalias() = model.w3 * ws.d2;
  ws.probs.colwise() += model.b3;
  for (long j = 0; j < ws.probs.cols(); ++j) {
    auto col = ws.probs.col(j);
    const double mx = col.maxCoeff();
    col = (col.array() - mx).exp();
    col /= col.sum();
  }
}

double chunk_loss(const Workspace& ws, const std::uint8_t* labels, std::size_t n, double gamma) {
  double loss = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = ws.probs(labels[j], static_cast<long>(j));
    loss += -std::pow(1.0 - p, gamma) * std::log(std::max(p, kProbFloor));
  }
  return loss;
}

// Gradient of the summed (not yet averaged) focal loss over the chunk, scaled
// by `scale` (the caller passes 1/batch for a mean).
void backward_chunk(const Model& model, const std::uint8_t* labels, std::size_t n, double gamma,
                    double scale, Workspace& ws, Gradients& grads) {
  const int P = model.pair_count();
  const double slope = model.leaky_slope;

  ws.dz3.resize(model.classes, static_cast<long>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const long col = static_cast<long>(j);
    const int t = labels[j];
    const double pt = ws.probs(t, col);
    const double one_minus = 1.0 - pt;
    double common;
    if (one_minus <= 0) {
      common = -1.0;  // p_t saturated; the (delta - p) factor vanishes anyway
    } else {
      const double log_pt = std::log(std::max(pt, kProbFloor));
      common = gamma * pt * log_pt * std::pow(one_minus, gamma - 1.0) - std::pow(one_minus, gamma);
    }
    for (int c = 0; c < model.classes; ++c) {
      const double delta = c == t ? 1.0 : 0.0;
      ws.dz3(c, col) = scale * common * (delta - ws.probs(c, col));
    }
  }

  grads.w3.noalias() += ws.dz3 * ws.d2.transpose();
  grads.b3 += ws.dz3.rowwise().sum();

  ws.da2.noalias() = model.w3.transpose() * ws.dz3;
  ws.da2 = ws.da2.cwiseProduct(ws.m2)
               .cwiseProduct(ws.a2.unaryExpr([slope](double v) { return leaky_grad(v, slope); }));

  grads.w2.noalias() += ws.da2 * ws.d1.transpose();
  grads.b2 += ws.da2.rowwise().sum();

  ws.da1.noalias() = model.w2.transpose() * ws.da2;
  ws.da1 = ws.da1.cwiseProduct(ws.m1)
               .cwiseProduct(ws.a1.unaryExpr([slope](double v) { return leaky_grad(v, slope); }));

  grads.w1.noalias() += ws.da1 * ws.f.transpose();
  grads.b1 += ws.da1.rowwise().sum();

  ws.df.noalias() = model.w1.transpose() * ws.da1;
  for (int p = 0; p < P; ++p) {
    ws.dzp_scratch = ws.df.middleRows(p * kPairOut, kPairOut)
                         .cwiseProduct(ws.zp.middleRows(p * kPairOut, kPairOut)
                                           .unaryExpr([slope](double v) { return leaky_grad(v, slope); }));
    // the fusion map is shared: every pair contributes to the same block
    grads.w_pair.noalias() += ws.dzp_scratch * ws.xs.middleRows(p * kFeatureDim, kPairIn).transpose();
    grads.b_pair += ws.dzp_scratch.rowwise().sum();
  }
}

}  // namespace

void forward_batch(const Model& model, const double* const* samples, std::size_t n,
                   bool training, std::uint64_t mask_seed, std::uint64_t first_sample_index,
                   Eigen::MatrixXd& probs) {
  Workspace ws;
  forward_chunk(model, samples, n, training, mask_seed, first_sample_index, ws);
  probs = ws.probs;
}

Eigen::VectorXd forward(const Model& model, const double* input, bool training,
                        std::uint64_t mask_seed, std::uint64_t sample_index) {
  const double* samples[1] = {input};
  Eigen::MatrixXd probs;
  forward_batch(model, samples, 1, training, mask_seed, sample_index, probs);
  return probs.col(0);
}

ForwardTrace forward_trace(const Model& model, const double* input, bool training,
                           std::uint64_t mask_seed, std::uint64_t sample_index) {
  const double* samples[1] = {input};
  Workspace ws;
  forward_chunk(model, samples, 1, training, mask_seed, sample_index, ws);
  ForwardTrace trace;
  trace.standardized = ws.xs.col(0);
  trace.fusion_pre = ws.zp.col(0);
  trace.fusion_out = ws.f.col(0);
  trace.hidden1_pre = ws.a1.col(0);
  trace.hidden1_out = ws.d1.col(0);
  trace.hidden2_pre = ws.a2.col(0);
  trace.hidden2_out = ws.d2.col(0);
  trace.logits = model.w3 * ws.d2.col(0) + model.b3;  // ws.probs is post-softmax
  trace.probabilities = ws.probs.col(0);
  return trace;
}

double backward_batch(const Model& model, const double* const* samples,
                      const std::uint8_t* labels, std::size_t n, double gamma, bool training,
                      std::uint64_t mask_seed, std::uint64_t first_sample_index, Gradients& grads) {
  Workspace ws;
  forward_chunk(model, samples, n, training, mask_seed, first_sample_index, ws);
  backward_chunk(model, labels, n, gamma, 1.0 / static_cast<double>(n), ws, grads);
  return chunk_loss(ws, labels, n, gamma) / static_cast<double>(n);
}

void adam_step(Model& model, const Gradients& grads, AdamState& state, const TrainConfig& config) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));

  auto update = [&](Eigen::Ref<Eigen::MatrixXd> theta, const Eigen::MatrixXd& g,
                    Eigen::MatrixXd& m, Eigen::MatrixXd& v) {
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
    theta.array() -=
        config.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config.adam_eps);
  };
  auto update_vec = [&](Eigen::Ref<Eigen::VectorXd> theta, const Eigen::VectorXd& g,
                        Eigen::VectorXd& m, Eigen::VectorXd& v) {
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
    theta.array() -=
        config.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config.adam_eps);
  };

  update(model.w_pair, grads.w_pair, state.first.w_pair, state.second.w_pair);
  update_vec(model.b_pair, grads.b_pair, state.first.b_pair, state.second.b_pair);
  update(model.w1, grads.w1, state.first.w1, state.second.w1);
  update_vec(model.b1, grads.b1, state.first.b1, state.second.b1);
  update(model.w2, grads.w2, state.first.w2, state.second.w2);
  update_vec(model.b2, grads.b2, state.first.b2, state.second.b2);
  update(model.w3, grads.w3, state.first.w3, state.second.w3);
  update_vec(model.b3, grads.b3, state.first.b3, state.second.b3);
}

namespace {

void check_features_match(const Model& model, const FeatureSet& features) {
  if (features.scales != model.scales)
    throw std::invalid_argument("feature scale list does not match the model");
}

// Deterministic batch pass: fixed 1024-sample chunks, per-chunk gradients
// combined in chunk order, so the result is identical for any thread count.
double run_batch(const Model& model, const FeatureSet& features,
                 const std::vector<std::uint8_t>& labels,
                 const std::vector<std::size_t>& batch, double gamma, bool training,
                 std::uint64_t mask_seed, int threads, Gradients* total,
                 std::vector<Gradients>& chunk_grads, std::vector<Workspace>& chunk_ws) {
  const std::size_t n = batch.size();
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> chunk_loss_sums(nchunks, 0.0);
  if (total) {
    chunk_grads.resize(nchunks);
    for (auto& g : chunk_grads) {
      if (g.w_pair.size() == 0) g = Gradients::zeros_like(model);
      else g.set_zero();
    }
  }
  if (chunk_ws.size() < nchunks) chunk_ws.resize(nchunks);

  parallel_chunks(n, kChunk, threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    const std::size_t len = end - begin;
    std::vector<const double*> samples(len);
    std::vector<std::uint8_t> lab(len);
    for (std::size_t j = 0; j < len; ++j) {
      samples[j] = features.point(batch[begin + j]);
      lab[j] = labels[batch[begin + j]];
    }
    Workspace& ws = chunk_ws[c];
    forward_chunk(model, samples.data(), len, training, mask_seed, begin, ws);
    chunk_loss_sums[c] = chunk_loss(ws, lab.data(), len, gamma);
    if (total)
      backward_chunk(model, lab.data(), len, gamma, 1.0 / static_cast<double>(n), ws,
                     chunk_grads[c]);
  });

  if (total) {
    total->set_zero();
    for (const auto& g : chunk_grads) total->accumulate(g);
  }
  double loss = 0;
  for (double l : chunk_loss_sums) loss += l;
  return loss / static_cast<double>(n);
}

}  // namespace

double evaluate_loss(const Model& model, const FeatureSet& features,
                     const std::vector<std::uint8_t>& labels,
                     const std::vector<std::size_t>& indices, double gamma, int threads) {
  check_features_match(model, features);
  std::vector<Gradients> no_grads;
  std::vector<Workspace> ws;
  return run_batch(model, features, labels, indices, gamma, false, 0, threads, nullptr, no_grads,
                   ws);
}

TrainResult train(const FeatureSet& features, const std::vector<std::uint8_t>& labels,
                  const std::vector<std::size_t>& validation, int classes,
                  const TrainConfig& config) {
  config.validate();
  if (labels.size() != features.count)
    throw std::invalid_argument("label count does not match feature count");
  for (auto l : labels)
    if (l >= classes)
      throw std::invalid_argument("label " + std::to_string(int(l)) + " outside the " +
                                  std::to_string(classes) + "-class range");

  // Training pool excludes the validation samples.
  std::vector<bool> held_out(features.count, false);
  for (std::size_t idx : validation) {
    if (idx >= features.count) throw std::invalid_argument("validation index out of range");
    held_out[idx] = true;
  }
  std::vector<std::size_t> pool;
  pool.reserve(features.count);
  for (std::size_t i = 0; i < features.count; ++i)
    if (!held_out[i]) pool.push_back(i);
  if (pool.empty()) throw std::invalid_argument("training pool is empty");

  std::vector<std::size_t> class_present(static_cast<std::size_t>(classes), 0);
  for (std::size_t i : pool) ++class_present[labels[i]];
  int distinct = 0;
  for (auto c : class_present)
    if (c > 0) ++distinct;
  if (distinct < 2) throw std::invalid_argument("training pool needs at least two classes");

  // Standardization statistics from the pool, frozen into every run's model.
  const int D = static_cast<int>(features.row_width());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(D);
  for (std::size_t i : pool) {
    Eigen::Map<const Eigen::VectorXd> x(features.point(i), D);
    mean += x;
    sq += x.cwiseProduct(x);
  }
  mean /= static_cast<double>(pool.size());
  sq /= static_cast<double>(pool.size());
  Eigen::VectorXd stdev =
      (sq - mean.cwiseProduct(mean)).cwiseMax(0.0).cwiseSqrt().cwiseMax(kStdFloor);

  TrainResult result;
  result.final_val_losses.assign(static_cast<std::size_t>(config.runs),
                                 std::numeric_limits<double>::quiet_NaN());
  std::vector<Model> run_models;

  for (int run = 0; run < config.runs; ++run) {
    Model model = Model::init(features.scales, features.feature_mask, classes,
                              derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(run)));
    model.dropout_p = config.dropout_p;
    model.mean = mean;
    model.stdev = stdev;

    AdamState state = AdamState::zeros_like(model);
    Gradients grads = Gradients::zeros_like(model);
    std::vector<Gradients> chunk_grads;
    std::vector<Workspace> chunk_ws;

    std::mt19937_64 sampler(derive_seed(config.seed, 2000 + static_cast<std::uint64_t>(run)));
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const std::uint64_t mask_root = derive_seed(config.seed, 3000 + static_cast<std::uint64_t>(run));

    std::vector<std::size_t> batch(static_cast<std::size_t>(config.batch_size));
    bool aborted = false;
    double val_loss = std::numeric_limits<double>::quiet_NaN();

    for (int it = 0; it < config.iterations; ++it) {
      for (auto& b : batch) b = pool[pick(sampler)];
      const std::uint64_t mask_seed = derive_seed(mask_root, static_cast<std::uint64_t>(it));
      const double train_loss = run_batch(model, features, labels, batch, config.gamma, true,
                                          mask_seed, config.threads, &grads, chunk_grads, chunk_ws);
      if (!std::isfinite(train_loss)) {
        aborted = true;
        result.log.push_back({run, it, train_loss, std::numeric_limits<double>::quiet_NaN()});
        break;
      }
      adam_step(model, grads, state, config);

      const bool last = it + 1 == config.iterations;
      if ((it + 1) % config.log_every == 0 || last) {
        val_loss = validation.empty()
                       ? std::numeric_limits<double>::quiet_NaN()
                       : evaluate_loss(model, features, labels, validation, config.gamma,
                                       config.threads);
        result.log.push_back({run, it + 1, train_loss, val_loss});
      }
    }

    if (!aborted) {
      result.final_val_losses[static_cast<std::size_t>(run)] = val_loss;
      run_models.push_back(std::move(model));
    } else {
      run_models.emplace_back();  // placeholder, never selected
    }
  }

  int best = -1;
  for (int run = 0; run < config.runs; ++run) {
    const double v = result.final_val_losses[static_cast<std::size_t>(run)];
    if (!std::isfinite(v)) continue;
    if (best < 0 || v < result.final_val_losses[static_cast<std::size_t>(best)]) best = run;
  }
  if (best < 0) throw std::runtime_error("every training run diverged (non-finite loss)");
  result.best_run = best;
  result.model = std::move(run_models[static_cast<std::size_t>(best)]);
  return result;
}

Predictions classify(const Model& model, const FeatureSet& features, int threads) {
  check_features_match(model, features);
  Predictions out;
  out.labels.assign(features.count, 0);
  out.probabilities.resize(static_cast<long>(features.count), model.classes);

  parallel_chunks(features.count, kChunk, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    const std::size_t len = end - begin;
    std::vector<const double*> samples(len);
    for (std::size_t j = 0; j < len; ++j) samples[j] = features.point(begin + j);
    Workspace ws;
    forward_chunk(model, samples.data(), len, false, 0, begin, ws);
    for (std::size_t j = 0; j < len; ++j) {
      const long col = static_cast<long>(j);
      int arg = 0;
      for (int c = 1; c < model.classes; ++c)
        if (ws.probs(c, col) > ws.probs(arg, col)) arg = c;  // ties keep the lowest class
      out.labels[begin + j] = static_cast<std::uint8_t>(arg);
      out.probabilities.row(static_cast<long>(begin + j)) = ws.probs.col(col).transpose();
    }
  });
  return out;
}

void save_model(const Model& model, const std::string& path) {
  std::ostringstream os(std::ios::binary);
  os.write("BNDM", 4);
  write_le<std::uint32_t>(os, 1);
  write_le<std::uint8_t>(os, static_cast<std::uint8_t>(model.classes));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.scales.size()));
  for (int s : model.scales) write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s));
  write_le<std::uint16_t>(os, model.feature_mask);
  write_le<std::uint32_t>(os, kPairOut);
  write_le<std::uint32_t>(os, kHidden1);
  write_le<std::uint32_t>(os, kHidden2);
  write_le<double>(os, model.leaky_slope);
  write_le<double>(os, model.dropout_p);
  auto blob = [&os](const double* p, std::int64_t count) {
    os.write(reinterpret_cast<const char*>(p), count * 8);
  };
  blob(model.mean.data(), model.mean.size());
  blob(model.stdev.data(), model.stdev.size());
  blob(model.w_pair.data(), model.w_pair.size());
  blob(model.b_pair.data(), model.b_pair.size());
  blob(model.w1.data(), model.w1.size());
  blob(model.b1.data(), model.b1.size());
  blob(model.w2.data(), model.w2.size());
  blob(model.b2.data(), model.b2.size());
  blob(model.w3.data(), model.w3.size());
  blob(model.b3.data(), model.b3.size());
  atomic_write_file(path, os.str());
}

Model load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "BNDM")
    throw ParseError("not a BNDM model file: " + path);
  const auto version = read_le<std::uint32_t>(is, "version");
  if (version != 1) throw ParseError("unsupported model version " + std::to_string(version));

  Model model;
  model.classes = read_le<std::uint8_t>(is, "class count");
  if (model.classes != 2 && model.classes != 3) throw ParseError("corrupt class count in " + path);
  const auto m = read_le<std::uint32_t>(is, "scale count");
  if (m < 2 || m > 64) throw ParseError("corrupt scale count in " + path);
  model.scales.resize(m);
  for (auto& s : model.scales) s = static_cast<int>(read_le<std::uint32_t>(is, "scale"));
  model.feature_mask = read_le<std::uint16_t>(is, "feature mask");
  const auto pair_out = read_le<std::uint32_t>(is, "fusion width");
  const auto h1 = read_le<std::uint32_t>(is, "hidden width 1");
  const auto h2 = read_le<std::uint32_t>(is, "hidden width 2");
  if (pair_out != kPairOut || h1 != kHidden1 || h2 != kHidden2)
    throw ParseError("architecture mismatch in " + path);
  model.leaky_slope = read_le<double>(is, "leaky slope");
  model.dropout_p = read_le<double>(is, "dropout");

  auto blob = [&is, &path](double* p, std::int64_t count, const char* what) {
    if (!is.read(reinterpret_cast<char*>(p), count * 8))
      throw ParseError("truncated model file (" + std::string(what) + ") in " + path);
  };
  const int D = model.input_dim();
  model.mean.resize(D);
  model.stdev.resize(D);
  blob(model.mean.data(), D, "mean");
  blob(model.stdev.data(), D, "std");
  model.w_pair.resize(kPairOut, kPairIn);
  model.b_pair.resize(kPairOut);
  model.w1.resize(kHidden1, kPairOut * model.pair_count());
  model.b1.resize(kHidden1);
  model.w2.resize(kHidden2, kHidden1);
  model.b2.resize(kHidden2);
  model.w3.resize(model.classes, kHidden2);
  model.b3.resize(model.classes);
  blob(model.w_pair.data(), model.w_pair.size(), "fusion weights");
  blob(model.b_pair.data(), model.b_pair.size(), "fusion bias");
  blob(model.w1.data(), model.w1.size(), "w1");
  blob(model.b1.data(), model.b1.size(), "b1");
  blob(model.w2.data(), model.w2.size(), "w2");
  blob(model.b2.data(), model.b2.size(), "b2");
  blob(model.w3.data(), model.w3.size(), "w3");
  blob(model.b3.data(), model.b3.size(), "b3");
  // a well-formed file ends exactly here
  char extra;
  if (is.read(&extra, 1)) throw ParseError("trailing bytes after model data in " + path);
  return model;
}

}  // namespace edgekit
