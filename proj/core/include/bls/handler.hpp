#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bls/pruning.hpp"
#include "bls/score.hpp"

namespace bls {

// Training-loop adapter: wraps a dataset's score table, hands out the
// per-cycle sampler, and turns each step's mean batch loss into a score
// update plus the (possibly rescaled) loss to backpropagate.
//
//   Handler h(n, ema, policy, schedule, seed);
//   for cycle: auto sampler = h.begin_cycle(cycle, batch_size);
//     for batch in sampler.next_epoch(): h.set_pending(batch);
//       loss = model(batch); loss = h.update(loss); backprop(loss);
//
// Single-writer: calls must be serialized by the caller.
class Handler {
 public:
  Handler(std::size_t n_samples, EmaConfig ema, pruning::PrunePolicy policy, pruning::CycleSchedule schedule,
          std::uint64_t seed);

  // Recomputes the active set from the current scores.
  const pruning::ActiveSet& begin_cycle(std::size_t cycle);
  pruning::Sampler sampler(std::size_t batch_size) const;

  // Installs the batch whose loss the next update() call will receive.
  // Every id must be in the current active set.
  void set_pending(std::span<const SampleId> batch);
  bool has_pending() const { return pending_.has_value(); }

  // Applies the EMA update to the pending batch and returns the loss scaled by
  // the batch's mean rescale factor. Throws StateError("no batch in flight")
  // when nothing is pending.
  double update(double mean_batch_loss);
  double last_scale() const { return last_scale_; }

  const ScoreTable& table() const { return table_; }
  ScoreSnapshot scores_snapshot() const { return table_.snapshot(); }
  const pruning::ActiveSet& active() const { return active_; }
  const std::vector<pruning::ActiveSet>& history() const { return history_; }
  const EmaConfig& ema() const { return ema_; }
  std::uint64_t steps() const { return step_; }

 private:
  EmaConfig ema_;
  pruning::PrunePolicy policy_;
  pruning::CycleSchedule schedule_;
  std::uint64_t seed_;
  ScoreTable table_;
  pruning::ActiveSet active_;
  std::vector<pruning::ActiveSet> history_;
  std::optional<std::vector<SampleId>> pending_;
  double last_scale_ = 1.0;
  std::uint64_t step_ = 0;
};

}  // namespace bls
