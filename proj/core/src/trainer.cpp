#include "bls/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "bls/errors.hpp"
#include "bls/handler.hpp"
#include "bls/rng.hpp"

namespace bls::train {

void DatasetSpec::validate() const {
  if (n_samples == 0) throw std::invalid_argument("dataset: n_samples must be positive");
  if (n_features == 0) throw std::invalid_argument("dataset: n_features must be positive");
  if (n_classes < 2) throw std::invalid_argument("dataset: n_classes must be at least 2");
  if (n_classes > n_samples) {
    throw std::invalid_argument("dataset: n_classes (" + std::to_string(n_classes) + ") exceeds n_samples (" +
                                std::to_string(n_samples) + ")");
  }
  if (!(cluster_spread > 0.0) || !std::isfinite(cluster_spread)) {
    throw std::invalid_argument("dataset: cluster_spread must be positive");
  }
  if (!(label_noise >= 0.0 && label_noise < 1.0)) {
    throw std::invalid_argument("dataset: label_noise must lie in [0, 1)");
  }
  if (n_samples * 4 / 5 == 0 || n_samples - n_samples * 4 / 5 == 0) {
    throw std::invalid_argument("dataset: too few samples for an 80/20 split");
  }
}

Dataset make_synthetic_dataset(const DatasetSpec& spec) {
  spec.validate();
  const std::size_t d = spec.n_features;
  const std::size_t k = spec.n_classes;
  std::mt19937_64 gen(derive_seed(spec.seed, streams::kData));
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> centers(k * d);
  for (double& c : centers) c = normal(gen);

  const std::size_t n_train = spec.n_samples * 4 / 5;
  Dataset ds;
  ds.n_classes = k;
  ds.train.n_features = d;
  ds.test.n_features = d;
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    auto& split = i < n_train ? ds.train : ds.test;
    const auto label = static_cast<int>(gen() % k);
    for (std::size_t j = 0; j < d; ++j) {
      split.features.push_back(centers[static_cast<std::size_t>(label) * d + j] + spec.cluster_spread * normal(gen));
    }
    split.labels.push_back(label);
  }

  ds.clean_train_labels = ds.train.labels;
  std::mt19937_64 noise_gen(derive_seed(spec.seed, streams::kData, 1));
  for (int& y : ds.train.labels) {
    if (uniform01(noise_gen) < spec.label_noise) {
      // Shift by 1..k-1 so the new label always differs.
      const auto shift = 1 + static_cast<int>(noise_gen() % (k - 1));
      y = (y + shift) % static_cast<int>(k);
    }
  }
  return ds;
}

Model::Model(const ModelSpec& spec, std::size_t n_features, std::size_t n_classes)
    : n_features_(n_features), n_classes_(n_classes) {
  if (n_features == 0 || n_classes < 2) throw std::invalid_argument("model: bad input/output dimensions");
  std::mt19937_64 gen(derive_seed(spec.init_seed, streams::kInit));
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = n_features;
  const std::size_t k = n_classes;
  if (const auto* mlp = std::get_if<Mlp>(&spec.arch)) {
    if (mlp->hidden == 0) throw std::invalid_argument("model: hidden width must be positive");
    mlp_ = true;
    hidden_ = mlp->hidden;
    const std::size_t h = hidden_;
    params_.assign(h * d + h + k * h + k, 0.0);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(d));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(h));
    for (std::size_t i = 0; i < h * d; ++i) params_[i] = s1 * normal(gen);
    for (std::size_t i = 0; i < k * h; ++i) params_[h * d + h + i] = s2 * normal(gen);
  } else {
    params_.assign(k * d + k, 0.0);
    for (std::size_t i = 0; i < k * d; ++i) params_[i] = 0.01 * normal(gen);
  }
}

void Model::logits(std::span<const double> x, std::span<double> hidden, std::span<double> out) const {
  const std::size_t d = n_features_;
  const std::size_t k = n_classes_;
  std::span<const double> in = x;
  std::size_t in_dim = d;
  std::size_t offset = 0;
  if (mlp_) {
    const std::size_t h = hidden_;
    const double* w1 = params_.data();
    const double* b1 = w1 + h * d;
    for (std::size_t u = 0; u < h; ++u) {
      double a = b1[u];
      for (std::size_t j = 0; j < d; ++j) a += w1[u * d + j] * x[j];
      hidden[u] = std::tanh(a);
    }
    in = hidden;
    in_dim = h;
    offset = h * d + h;
  }
  const double* w = params_.data() + offset;
  const double* b = w + k * in_dim;
  for (std::size_t c = 0; c < k; ++c) {
    double z = b[c];
    for (std::size_t j = 0; j < in_dim; ++j) z += w[c * in_dim + j] * in[j];
    out[c] = z;
  }
}

double Model::loss(const LabeledSet& data, std::span<const SampleId> batch, std::vector<double>* grad,
                   std::vector<double>* per_sample) const {
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  const std::size_t d = n_features_;
  const std::size_t k = n_classes_;
  const std::size_t h = hidden_;
  std::vector<double> hid(h);
  std::vector<double> z(k);
  std::vector<double> dz(k);
  std::vector<double> dh(h);
  if (grad) grad->assign(params_.size(), 0.0);
  if (per_sample) per_sample->clear();

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (SampleId id : batch) {
    if (id >= data.size()) throw std::out_of_range("loss: sample " + std::to_string(id) + " out of range");
    const auto x = data.row(id);
    const auto y = static_cast<std::size_t>(data.labels[id]);
    logits(x, hid, z);
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (std::size_t c = 0; c < k; ++c) denom += std::exp(z[c] - zmax);
    const double lse = zmax + std::log(denom);
    const double li = lse - z[y];
    if (!std::isfinite(li)) throw DivergenceError("non-finite logits for sample " + std::to_string(id));
    total += li;
    if (per_sample) per_sample->push_back(li);
    if (!grad) continue;

    for (std::size_t c = 0; c < k; ++c) dz[c] = (std::exp(z[c] - lse) - (c == y ? 1.0 : 0.0)) * inv_b;
    double* g = grad->data();
    if (mlp_) {
      const double* w2 = params_.data() + h * d + h;
      double* gw1 = g;
      double* gb1 = g + h * d;
      double* gw2 = g + h * d + h;
      double* gb2 = gw2 + k * h;
      std::fill(dh.begin(), dh.end(), 0.0);
      for (std::size_t c = 0; c < k; ++c) {
        gb2[c] += dz[c];
        for (std::size_t u = 0; u < h; ++u) {
          gw2[c * h + u] += dz[c] * hid[u];
          dh[u] += w2[c * h + u] * dz[c];
        }
      }
      for (std::size_t u = 0; u < h; ++u) {
        const double da = dh[u] * (1.0 - hid[u] * hid[u]);
        gb1[u] += da;
        for (std::size_t j = 0; j < d; ++j) gw1[u * d + j] += da * x[j];
      }
    } else {
      double* gb = g + k * d;
      for (std::size_t c = 0; c < k; ++c) {
        gb[c] += dz[c];
        for (std::size_t j = 0; j < d; ++j) g[c * d + j] += dz[c] * x[j];
      }
    }
  }
  return total / static_cast<double>(batch.size());
}

int Model::predict(std::span<const double> x) const {
  std::vector<double> hid(hidden_);
  std::vector<double> z(n_classes_);
  logits(x, hid, z);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double Model::accuracy(const LabeledSet& data) const {
  if (data.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(data.row(i)) == data.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double mean_batch_loss(const Model& model, const LabeledSet& data, std::span<const SampleId> batch,
                       std::vector<double>* per_sample) {
  return model.loss(data, batch, nullptr, per_sample);
}

namespace {

void apply_gradient(Model& model, const std::vector<double>& grad, double step) {
  auto p = model.params();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(grad[i])) throw DivergenceError("non-finite gradient component " + std::to_string(i));
    p[i] -= step * grad[i];
  }
  for (double v : p) {
    if (!std::isfinite(v)) throw DivergenceError("non-finite parameter after update");
  }
}

std::string where(std::size_t epoch, std::size_t step) {
  return "epoch " + std::to_string(epoch) + ", step " + std::to_string(step) + ": ";
}

}  // namespace

double sgd_step(Model& model, const LabeledSet& data, std::span<const SampleId> batch, double lr,
                double batch_scale) {
  std::vector<double> grad;
  const double loss = model.loss(data, batch, &grad);
  apply_gradient(model, grad, lr * batch_scale);
  return loss;
}

void TrainConfig::validate(std::size_t n_train) const {
  if (epochs == 0) throw std::invalid_argument("train: epochs must be positive");
  if (batch_size == 0 || batch_size > n_train) {
    throw std::invalid_argument("train: batch_size must lie in [1, " + std::to_string(n_train) + "]");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("train: learning_rate must be positive");
  }
  ema.validate();
  pruning::validate(policy);
  schedule().validate();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void finish(RunMetrics& m, const Model& model, const Dataset& data, Clock::time_point t0) {
  m.final_train_acc = model.accuracy(data.train);
  m.final_test_acc = model.accuracy(data.test);
  m.final_params.assign(model.params().begin(), model.params().end());
  m.pruned_percent = pruning::pruned_percent(m.kept_per_cycle, data.train.size());
  m.wall_time_s = seconds_since(t0);
}

}  // namespace

RunMetrics run_experiment(const Dataset& data, const ModelSpec& model_spec, const TrainConfig& cfg) {
  cfg.validate(data.train.size());
  const auto t0 = Clock::now();
  const auto schedule = cfg.schedule();
  Model model(model_spec, data.train.n_features, data.n_classes);
  Handler handler(data.train.size(), cfg.ema, cfg.policy, schedule, cfg.seed);

  RunMetrics m;
  std::vector<double> grad;
  std::vector<double> per_sample;
  for (std::size_t cycle = 0; cycle < schedule.num_cycles(); ++cycle) {
    const auto& active = handler.begin_cycle(cycle);
    m.kept_per_cycle.push_back(active.kept_count());
    auto sampler = handler.sampler(cfg.batch_size);
    for (std::size_t e = 0; e < schedule.epochs_in(cycle); ++e) {
      const std::size_t epoch = schedule.first_epoch(cycle) + e;
      double epoch_loss = 0.0;
      std::size_t epoch_batches = 0;
      for (const auto& batch : sampler.next_epoch()) {
        handler.set_pending(batch);
        double loss = 0.0;
        try {
          loss = model.loss(data.train, batch, &grad, cfg.instrument_per_sample ? &per_sample : nullptr);
          handler.update(loss);
          apply_gradient(model, grad, cfg.learning_rate * handler.last_scale());
        } catch (const DivergenceError& e) {
          throw DivergenceError(where(epoch, m.steps) + e.what());
        }
        if (cfg.keep_log) {
          LogRecord rec{m.steps, batch, loss, std::nullopt};
          if (cfg.instrument_per_sample) rec.per_sample_losses = per_sample;
          m.log.push_back(std::move(rec));
        }
        if (cfg.record_trajectory) m.trajectory.emplace_back(model.params().begin(), model.params().end());
        epoch_loss += loss;
        ++epoch_batches;
        m.sample_visits += batch.size();
        ++m.steps;
      }
      m.loss_curve.push_back(epoch_loss / static_cast<double>(epoch_batches));
    }
  }
  m.final_scores = handler.table();
  finish(m, model, data, t0);
  return m;
}

RunMetrics run_plain_sgd(const Dataset& data, const ModelSpec& model_spec, const TrainConfig& cfg) {
  cfg.validate(data.train.size());
  const auto t0 = Clock::now();
  const auto schedule = cfg.schedule();
  Model model(model_spec, data.train.n_features, data.n_classes);
  const auto everyone = pruning::ActiveSet::full(data.train.size());

  RunMetrics m;
  std::vector<double> grad;
  for (std::size_t cycle = 0; cycle < schedule.num_cycles(); ++cycle) {
    m.kept_per_cycle.push_back(everyone.kept_count());
    pruning::Sampler sampler(everyone, cfg.batch_size, derive_seed(cfg.seed, streams::kSampler, cycle));
    for (std::size_t e = 0; e < schedule.epochs_in(cycle); ++e) {
      const std::size_t epoch = schedule.first_epoch(cycle) + e;
      double epoch_loss = 0.0;
      std::size_t epoch_batches = 0;
      for (const auto& batch : sampler.next_epoch()) {
        double loss = 0.0;
        try {
          loss = model.loss(data.train, batch, &grad);
          apply_gradient(model, grad, cfg.learning_rate * 1.0);
        } catch (const DivergenceError& e) {
          throw DivergenceError(where(epoch, m.steps) + e.what());
        }
        if (cfg.keep_log) m.log.push_back(LogRecord{m.steps, batch, loss, std::nullopt});
        if (cfg.record_trajectory) m.trajectory.emplace_back(model.params().begin(), model.params().end());
        epoch_loss += loss;
        ++epoch_batches;
        m.sample_visits += batch.size();
        ++m.steps;
      }
      m.loss_curve.push_back(epoch_loss / static_cast<double>(epoch_batches));
    }
  }
  finish(m, model, data, t0);
  return m;
}

std::vector<SweepRow> alpha_sweep(const Dataset& data, const ModelSpec& model_spec, const TrainConfig& base,
                                  std::span<const double> alphas) {
  std::vector<SweepRow> rows;
  rows.reserve(alphas.size());
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw std::invalid_argument("alpha_sweep: alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
    TrainConfig cfg = base;
    cfg.ema.alpha = alpha;
    cfg.keep_log = false;
    cfg.record_trajectory = false;
    const auto m = run_experiment(data, model_spec, cfg);
    rows.push_back({alpha, m.final_train_acc, m.final_test_acc, m.pruned_percent, m.wall_time_s});
  }
  return rows;
}

}  // namespace bls::train
