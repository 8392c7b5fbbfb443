#include "bls/score.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bls {

namespace {

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void EmaConfig::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("ema alpha must lie in (0, 1] (or be 0 for last-loss scoring), got " +
                                describe(alpha));
  }
  if (init == InitPolicy::kFixedValue && !std::isfinite(init_value)) {
    throw std::invalid_argument("ema init_value must be finite, got " + describe(init_value));
  }
}

double ema_update(double score_prev, double batch_loss, double alpha) {
  if (!std::isfinite(score_prev)) {
    throw std::invalid_argument("ema_update: non-finite previous score " + describe(score_prev));
  }
  if (!std::isfinite(batch_loss)) {
    throw std::invalid_argument("ema_update: non-finite batch loss " + describe(batch_loss));
  }
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > 1.0) {
    throw std::invalid_argument("ema_update: alpha must lie in (0, 1], got " + describe(alpha));
  }
  return alpha * score_prev + (1.0 - alpha) * batch_loss;
}

ScoreTable::ScoreTable(std::size_t n_samples, const EmaConfig& cfg) {
  cfg.validate();
  const double start = cfg.init == InitPolicy::kFixedValue ? cfg.init_value : 0.0;
  scores_.assign(n_samples, start);
  counts_.assign(n_samples, 0);
  initialized_.assign(n_samples, 0);
}

void ScoreTable::check_batch(std::span<const SampleId> ids, double mean_loss) const {
  if (ids.empty()) throw std::invalid_argument("apply_batch: empty batch");
  if (!std::isfinite(mean_loss)) {
    throw std::invalid_argument("apply_batch: non-finite batch loss " + describe(mean_loss));
  }
  for (SampleId id : ids) {
    if (id >= scores_.size()) {
      throw std::out_of_range("apply_batch: sample index " + std::to_string(id) +
                              " out of range for table of size " + std::to_string(scores_.size()));
    }
  }
  std::vector<SampleId> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
    throw std::invalid_argument("apply_batch: duplicate sample index " + std::to_string(*dup));
  }
}

void ScoreTable::apply_batch(std::span<const SampleId> ids, double mean_loss, const EmaConfig& cfg) {
  check_batch(ids, mean_loss);
  const bool first_observed = cfg.init == InitPolicy::kFirstObservedBatchLoss;
  for (SampleId id : ids) {
    double& s = scores_[id];
    if (cfg.last_loss_only() || (first_observed && !initialized_[id])) {
      s = mean_loss;
    } else {
      s = cfg.alpha * s + (1.0 - cfg.alpha) * mean_loss;
    }
    initialized_[id] = 1;
    ++counts_[id];
  }
}

ScoreSnapshot ScoreTable::snapshot() const {
  ScoreSnapshot snap;
  snap.scores = scores_;
  snap.update_counts = counts_;
  snap.initialized.assign(initialized_.begin(), initialized_.end());
  return snap;
}

}  // namespace bls
