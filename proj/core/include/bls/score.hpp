#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bls {

// Index of a training sample, stable across epochs.
using SampleId = std::uint32_t;

enum class InitPolicy {
  // The first observed batch loss becomes the score verbatim.
  kFirstObservedBatchLoss,
  // Every score starts at EmaConfig::init_value and is EMA-blended from there.
  kFixedValue,
};

struct EmaConfig {
  // Decay factor in (0, 1]. 1.0 freezes scores after initialization.
  // 0.0 selects the last-loss ablation: the score is the most recent batch loss.
  double alpha = 0.7;
  InitPolicy init = InitPolicy::kFirstObservedBatchLoss;
  double init_value = 0.0;

  bool last_loss_only() const { return alpha == 0.0; }

  // Throws std::invalid_argument on out-of-range alpha or non-finite init_value.
  void validate() const;

  static EmaConfig last_loss() { return EmaConfig{0.0, InitPolicy::kFirstObservedBatchLoss, 0.0}; }
};

// alpha * score_prev + (1 - alpha) * batch_loss.
// Rejects non-finite inputs and alpha outside (0, 1].
double ema_update(double score_prev, double batch_loss, double alpha);

// One training step: the samples that formed the batch and its mean loss.
struct BatchRecord {
  std::uint64_t step = 0;
  std::vector<SampleId> sample_ids;
  double mean_loss = 0.0;
};

// Point-in-time copy of a ScoreTable.
struct ScoreSnapshot {
  std::vector<double> scores;
  std::vector<std::uint32_t> update_counts;
  std::vector<bool> initialized;

  std::size_t size() const { return scores.size(); }
};

// Per-sample Batch Loss Scores.
//
// A sample's score moves only when the sample is part of the applied batch;
// every other entry is left untouched. Scores are kept in double precision.
//
// Not internally synchronized: writers (apply_batch) must be serialized by the
// caller, and reads must not overlap a write.
class ScoreTable {
 public:
  ScoreTable() = default;
  ScoreTable(std::size_t n_samples, const EmaConfig& cfg);

  std::size_t size() const { return scores_.size(); }

  double score(SampleId id) const { return scores_.at(id); }
  std::uint32_t update_count(SampleId id) const { return counts_.at(id); }
  bool initialized(SampleId id) const { return initialized_.at(id) != 0; }

  std::span<const double> scores() const { return scores_; }
  std::span<const std::uint32_t> update_counts() const { return counts_; }
  std::span<const std::uint8_t> initialized_flags() const { return initialized_; }

  // Applies one batch's mean loss to each member of `ids`.
  // Throws std::out_of_range naming the index and the table size, and
  // std::invalid_argument on duplicates, an empty batch, or a non-finite loss.
  // The table is unchanged when an exception is thrown.
  void apply_batch(std::span<const SampleId> ids, double mean_loss, const EmaConfig& cfg);
  void apply_batch(const BatchRecord& batch, const EmaConfig& cfg) {
    apply_batch(batch.sample_ids, batch.mean_loss, cfg);
  }

  ScoreSnapshot snapshot() const;

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

 private:
  void check_batch(std::span<const SampleId> ids, double mean_loss) const;

  std::vector<double> scores_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint8_t> initialized_;
};

}  // namespace bls
