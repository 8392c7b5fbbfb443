#include "bls/handler.hpp"

#include <utility>

#include "bls/errors.hpp"
#include "bls/rng.hpp"

namespace bls {

Handler::Handler(std::size_t n_samples, EmaConfig ema, pruning::PrunePolicy policy,
                 pruning::CycleSchedule schedule, std::uint64_t seed)
    : ema_(ema),
      policy_(std::move(policy)),
      schedule_(schedule),
      seed_(seed),
      table_(n_samples, ema),
      active_(pruning::ActiveSet::full(n_samples)) {
  if (n_samples == 0) throw std::invalid_argument("handler: dataset is empty");
  pruning::validate(policy_);
  schedule_.validate();
}

const pruning::ActiveSet& Handler::begin_cycle(std::size_t cycle) {
  active_ = pruning::select_active_set(table_, policy_, cycle, schedule_, seed_);
  history_.push_back(active_);
  return active_;
}

pruning::Sampler Handler::sampler(std::size_t batch_size) const {
  return pruning::Sampler(active_, batch_size, derive_seed(seed_, streams::kSampler, active_.cycle_index()));
}

void Handler::set_pending(std::span<const SampleId> batch) {
  // Validates membership up front so update() cannot fail halfway.
  last_scale_ = active_.batch_scale(batch);
  pending_.emplace(batch.begin(), batch.end());
}

double Handler::update(double mean_batch_loss) {
  if (!pending_) throw StateError("no batch in flight");
  table_.apply_batch(*pending_, mean_batch_loss, ema_);
  pending_.reset();
  ++step_;
  return mean_batch_loss * last_scale_;
}

}  // namespace bls
