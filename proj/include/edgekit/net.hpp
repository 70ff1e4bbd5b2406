#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "edgekit/features.hpp"
#include "edgekit/types.hpp"

namespace edgekit {

// Layer widths of the fusion/classification network. Adjacent-scale feature
// rows are concatenated (24 values) and passed through one shared affine map
// to 12 units; the concatenated pair outputs feed a 24 -> 16 -> classes trunk.
// With the default four scales and three classes this is 1639 parameters.
inline constexpr int kPairIn = 2 * kFeatureDim;  // 24
inline constexpr int kPairOut = 12;
inline constexpr int kHidden1 = 24;
inline constexpr int kHidden2 = 16;

struct TrainConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 16384;
  int iterations = 3000;   // default-style; 8000 for abc-style data
  double gamma = 2.0;      // focal loss
  double dropout_p = 0.5;
  int runs = 5;
  std::uint64_t seed = 0;
  int log_every = 50;
  int threads = 0;

  void validate() const;
};

struct Model {
  std::vector<int> scales;  // descending, at least 2 entries
  std::uint16_t feature_mask = kMaskAll;
  int classes = 3;
  double leaky_slope = 0.01;
  double dropout_p = 0.5;

  Eigen::VectorXd mean;  // per-column standardization over the 12m inputs
  Eigen::VectorXd stdev;  // floored at 1e-8

  Eigen::MatrixXd w_pair;  // kPairOut x kPairIn, shared across pairs
  Eigen::VectorXd b_pair;
  Eigen::MatrixXd w1;  // kHidden1 x kPairOut*(m-1)
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // kHidden2 x kHidden1
  Eigen::VectorXd b2;
  Eigen::MatrixXd w3;  // classes x kHidden2
  Eigen::VectorXd b3;

  int m() const { return static_cast<int>(scales.size()); }
  int input_dim() const { return m() * kFeatureDim; }
  int pair_count() const { return m() - 1; }
  std::int64_t parameter_count() const;

  // Zero standardization (mean 0 / std 1) and Glorot-uniform weights.
  static Model init(const std::vector<int>& scales, std::uint16_t feature_mask, int classes,
                    std::uint64_t seed);
};

// Gradient (or any per-parameter accumulator) with the same block shapes.
struct Gradients {
  Eigen::MatrixXd w_pair;
  Eigen::VectorXd b_pair;
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
  Eigen::MatrixXd w3;
  Eigen::VectorXd b3;

  static Gradients zeros_like(const Model& model);
  void set_zero();
  void accumulate(const Gradients& other);
};

struct AdamState {
  Gradients first;   // first-moment accumulators
  Gradients second;  // second-moment accumulators
  long step = 0;

  static AdamState zeros_like(const Model& model);
};

// -(1-p_t)^gamma * log(p_t); p_t floored at 1e-12 before the log.
double focal_loss(const Eigen::VectorXd& probabilities, int true_class, double gamma);

// Single-sample forward pass; `input` is the m x 12 feature row block
// flattened row-major (largest scale first). Dropout fires only in training
// mode and is deterministic in (mask_seed, sample_index).
Eigen::VectorXd forward(const Model& model, const double* input, bool training = false,
                        std::uint64_t mask_seed = 0, std::uint64_t sample_index = 0);

// Intermediate activations of a single-sample forward pass, for inspection.
struct ForwardTrace {
  Eigen::VectorXd standardized;  // 12m
  Eigen::VectorXd fusion_pre;    // 12(m-1)
  Eigen::VectorXd fusion_out;
  Eigen::VectorXd hidden1_pre;   // before activation/dropout
  Eigen::VectorXd hidden1_out;   // after dropout
  Eigen::VectorXd hidden2_pre;
  Eigen::VectorXd hidden2_out;
  Eigen::VectorXd logits;
  Eigen::VectorXd probabilities;
};

ForwardTrace forward_trace(const Model& model, const double* input, bool training = false,
                           std::uint64_t mask_seed = 0, std::uint64_t sample_index = 0);

// Batch forward over gathered samples; probs comes back classes x n.
void forward_batch(const Model& model, const double* const* samples, std::size_t n,
                   bool training, std::uint64_t mask_seed, std::uint64_t first_sample_index,
                   Eigen::MatrixXd& probs);

// Mean-focal-loss gradient over a batch. Dropout masks are the ones the
// forward pass under the same (mask_seed, sample indices) would draw.
double backward_batch(const Model& model, const double* const* samples,
                      const std::uint8_t* labels, std::size_t n, double gamma, bool training,
                      std::uint64_t mask_seed, std::uint64_t first_sample_index, Gradients& grads);

void adam_step(Model& model, const Gradients& grads, AdamState& state, const TrainConfig& config);

struct TrainLogEntry {
  int run = 0;
  int iteration = 0;
  double train_loss = 0;
  double val_loss = 0;
};

struct TrainResult {
  Model model;
  int best_run = 0;
  std::vector<double> final_val_losses;  // one per run; NaN marks an aborted run
  std::vector<TrainLogEntry> log;        // selected run's entries first-class; all runs kept
};

// Runs `config.runs` trainings from distinct sub-seeds and keeps the run with
// the lowest final validation focal loss. Batches are sampled uniformly with
// replacement from every index not in `validation`; standardization comes
// from that pool and is frozen into the model. Deterministic for a fixed
// seed, independent of the thread count.
TrainResult train(const FeatureSet& features, const std::vector<std::uint8_t>& labels,
                  const std::vector<std::size_t>& validation, int classes,
                  const TrainConfig& config);

// Validation-style loss over explicit indices, dropout disabled.
double evaluate_loss(const Model& model, const FeatureSet& features,
                     const std::vector<std::uint8_t>& labels,
                     const std::vector<std::size_t>& indices, double gamma, int threads = 0);

struct Predictions {
  std::vector<std::uint8_t> labels;
  Eigen::MatrixXd probabilities;  // n x classes
};

Predictions classify(const Model& model, const FeatureSet& features, int threads = 0);

// BNDM container; load -> save is byte-identical.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace edgekit
