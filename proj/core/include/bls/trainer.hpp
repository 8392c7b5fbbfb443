#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bls/log_record.hpp"
#include "bls/pruning.hpp"
#include "bls/score.hpp"

namespace bls::train {

struct DatasetSpec {
  std::size_t n_samples = 2000;
  std::size_t n_features = 20;
  std::size_t n_classes = 5;
  // Standard deviation of points around their class center; centers are
  // drawn from a standard normal.
  double cluster_spread = 2.0;
  // Fraction of training labels replaced by a different, uniformly drawn class.
  double label_noise = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

// Row-major feature matrix with integer labels.
struct LabeledSet {
  std::size_t n_features = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * n_features, n_features);
  }

  friend bool operator==(const LabeledSet&, const LabeledSet&) = default;
};

struct Dataset {
  std::size_t n_classes = 0;
  LabeledSet train;
  LabeledSet test;
  // Training labels before label noise was applied.
  std::vector<int> clean_train_labels;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// k Gaussian clusters in d dimensions with a fixed 80/20 train/test split
// (the first 80% of generated points train). Label noise touches only the
// training split. Deterministic in spec.seed.
Dataset make_synthetic_dataset(const DatasetSpec& spec);

struct Softmax {};
struct Mlp {
  std::size_t hidden = 32;
};
using Architecture = std::variant<Softmax, Mlp>;

struct ModelSpec {
  Architecture arch = Softmax{};
  std::uint64_t init_seed = 7;
};

// Softmax regression or a one-hidden-layer tanh MLP, trained with
// cross-entropy. Parameters live in one flat vector.
class Model {
 public:
  Model(const ModelSpec& spec, std::size_t n_features, std::size_t n_classes);

  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_classes() const { return n_classes_; }

  // Mean cross-entropy over `batch`. When `grad` is non-null it receives the
  // gradient of that mean; when `per_sample` is non-null it receives each
  // member's loss in batch order. Throws DivergenceError on non-finite logits.
  double loss(const LabeledSet& data, std::span<const SampleId> batch, std::vector<double>* grad = nullptr,
              std::vector<double>* per_sample = nullptr) const;

  int predict(std::span<const double> x) const;
  double accuracy(const LabeledSet& data) const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  void logits(std::span<const double> x, std::span<double> hidden, std::span<double> out) const;

  bool mlp_ = false;
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> params_;
};

// Mean loss of `batch`. With per_sample non-null the individual losses are
// reported too; the mean itself never depends on them.
double mean_batch_loss(const Model& model, const LabeledSet& data, std::span<const SampleId> batch,
                       std::vector<double>* per_sample = nullptr);

// theta <- theta - lr * batch_scale * grad(mean batch loss). Returns the
// unscaled mean batch loss.
double sgd_step(Model& model, const LabeledSet& data, std::span<const SampleId> batch, double lr,
                double batch_scale);

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;
  EmaConfig ema{};
  pruning::PrunePolicy policy = pruning::NoPruning{};
  std::size_t cycle_len_epochs = 1;
  // Log per-sample losses next to each batch record (oracle mode).
  bool instrument_per_sample = false;
  // Keep the batch-loss log in RunMetrics::log.
  bool keep_log = false;
  // Keep a copy of the parameters after every step.
  bool record_trajectory = false;
  std::uint64_t seed = 11;

  pruning::CycleSchedule schedule() const { return {cycle_len_epochs, epochs}; }
  void validate(std::size_t n_train) const;
};

struct RunMetrics {
  double final_train_acc = 0.0;
  double final_test_acc = 0.0;
  double pruned_percent = 0.0;
  double wall_time_s = 0.0;
  // Mean of the (unscaled) batch losses of each epoch.
  std::vector<double> loss_curve;
  std::vector<std::size_t> kept_per_cycle;
  // Sample visits actually made, tallied step by step.
  std::size_t sample_visits = 0;
  std::size_t steps = 0;
  ScoreTable final_scores;
  std::vector<double> final_params;
  std::vector<std::vector<double>> trajectory;
  std::vector<LogRecord> log;
};

// Full loop with the score handler wired in: per cycle, select the active set
// and draw batches; per step, compute the mean batch loss, pass it through
// the handler, and take an SGD step on the returned (scaled) loss.
// Throws DivergenceError with epoch/step context if training blows up.
RunMetrics run_experiment(const Dataset& data, const ModelSpec& model_spec, const TrainConfig& cfg);

// Reference loop without any score wiring: same sampler seeds, every sample
// every epoch, unit loss scale.
RunMetrics run_plain_sgd(const Dataset& data, const ModelSpec& model_spec, const TrainConfig& cfg);

struct SweepRow {
  double alpha = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double pruned_percent = 0.0;
  double wall_time_s = 0.0;
};

// One run per alpha with all other settings and seeds fixed.
std::vector<SweepRow> alpha_sweep(const Dataset& data, const ModelSpec& model_spec, const TrainConfig& base,
                                  std::span<const double> alphas);

}  // namespace bls::train
