#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "bls/score.hpp"

namespace bls::pruning {

// Keeps every sample with factor 1.0.
struct NoPruning {};

// InfoBatch-like soft pruning. Initialized samples scoring strictly below the
// mean score are each dropped with probability prune_prob; survivors get a
// loss rescale of 1 / (1 - prune_prob) when `rescale` is set. Pruning is
// switched off for the final anneal_tail fraction of epochs.
struct ThresholdSoftPrune {
  double prune_prob = 0.5;
  bool rescale = true;
  double anneal_tail = 0.125;
};

enum class Progress { kEasyToHard, kStatic };

// SeTa-like difficulty window over the score ranking. EasyToHard slides the
// window linearly from the lowest scores (first cycle) to the highest
// (last cycle); Static always keeps the lowest-score window.
struct WindowSelect {
  double keep_fraction = 0.7;
  Progress progress = Progress::kEasyToHard;
};

using PrunePolicy = std::variant<NoPruning, ThresholdSoftPrune, WindowSelect>;

// Throws std::invalid_argument if a parameter is outside its range.
void validate(const PrunePolicy& policy);

struct CycleSchedule {
  std::size_t cycle_len_epochs = 1;
  std::size_t total_epochs = 1;

  std::size_t num_cycles() const { return (total_epochs + cycle_len_epochs - 1) / cycle_len_epochs; }
  std::size_t first_epoch(std::size_t cycle) const { return cycle * cycle_len_epochs; }
  // Epochs in `cycle`; the last cycle may be short.
  std::size_t epochs_in(std::size_t cycle) const;
  void validate() const;
};

// Samples kept for one cycle and their loss-rescale factors.
class ActiveSet {
 public:
  ActiveSet() = default;

  // Every sample kept with factor 1.0.
  static ActiveSet full(std::size_t n_samples, std::size_t cycle = 0);
  // factors[i] == 0 marks sample i as pruned; kept samples need factors >= 1.
  static ActiveSet from_factors(std::vector<double> factors, std::size_t cycle);

  std::size_t cycle_index() const { return cycle_; }
  std::size_t dataset_size() const { return factor_.size(); }
  // Ascending ids.
  std::span<const SampleId> kept() const { return kept_; }
  std::size_t kept_count() const { return kept_.size(); }
  bool is_kept(SampleId id) const { return factor_.at(id) > 0.0; }
  // Rescale factor of a kept sample (>= 1.0); 0.0 for pruned samples.
  double rescale(SampleId id) const { return factor_.at(id); }
  double pruned_fraction() const;

  // Mean rescale factor over a batch of kept samples. Throws
  // std::invalid_argument if the batch is empty or holds a pruned sample.
  double batch_scale(std::span<const SampleId> batch) const;

  friend bool operator==(const ActiveSet&, const ActiveSet&) = default;

 private:
  std::size_t cycle_ = 0;
  std::vector<SampleId> kept_;
  std::vector<double> factor_;
};

// Picks the samples to train on during `cycle`. Deterministic in
// (table, policy, cycle, schedule, seed).
// Samples that were never scored are always kept.
ActiveSet select_active_set(const ScoreTable& table, const PrunePolicy& policy, std::size_t cycle,
                            const CycleSchedule& schedule, std::uint64_t seed);

// Percentage of sample visits skipped: 100 * (1 - sum|kept| / (cycles * N)).
double pruned_percent(std::span<const ActiveSet> history, std::size_t n_samples);
// Same from recorded kept counts.
double pruned_percent(std::span<const std::size_t> kept_counts, std::size_t n_samples);

// Seeded epoch-wise shuffler over an active set. Each call to next_epoch()
// yields a fresh permutation of the kept ids chunked into batches of
// batch_size (the last one may be short). Replaying with the same seed
// reproduces the stream.
class Sampler {
 public:
  Sampler(const ActiveSet& active, std::size_t batch_size, std::uint64_t seed);

  std::vector<std::vector<SampleId>> next_epoch();
  std::size_t epochs_drawn() const { return epoch_; }

 private:
  std::vector<SampleId> ids_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::size_t epoch_ = 0;
};

}  // namespace bls::pruning
