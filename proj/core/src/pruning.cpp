#include "bls/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "bls/rng.hpp"

namespace bls::pruning {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool in_closed(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

}  // namespace

void validate(const PrunePolicy& policy) {
  std::visit(Overloaded{
                 [](const NoPruning&) {},
                 [](const ThresholdSoftPrune& p) {
                   if (!in_closed(p.prune_prob, 0.0, 1.0)) {
                     throw std::invalid_argument("prune_prob must lie in [0, 1]");
                   }
                   if (p.rescale && p.prune_prob == 1.0) {
                     throw std::invalid_argument("prune_prob = 1 leaves nothing to rescale; disable rescale");
                   }
                   if (!in_closed(p.anneal_tail, 0.0, 1.0) || p.anneal_tail == 1.0) {
                     throw std::invalid_argument("anneal_tail must lie in [0, 1)");
                   }
                 },
                 [](const WindowSelect& p) {
                   if (!in_closed(p.keep_fraction, 0.0, 1.0) || p.keep_fraction == 0.0) {
                     throw std::invalid_argument("keep_fraction must lie in (0, 1]");
                   }
                 },
             },
             policy);
}

std::size_t CycleSchedule::epochs_in(std::size_t cycle) const {
  const std::size_t first = first_epoch(cycle);
  if (first >= total_epochs) return 0;
  return std::min(cycle_len_epochs, total_epochs - first);
}

void CycleSchedule::validate() const {
  if (cycle_len_epochs == 0) throw std::invalid_argument("cycle_len_epochs must be positive");
  if (total_epochs == 0) throw std::invalid_argument("total_epochs must be positive");
}

ActiveSet ActiveSet::full(std::size_t n_samples, std::size_t cycle) {
  return from_factors(std::vector<double>(n_samples, 1.0), cycle);
}

ActiveSet ActiveSet::from_factors(std::vector<double> factors, std::size_t cycle) {
  ActiveSet set;
  set.cycle_ = cycle;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const double f = factors[i];
    if (f == 0.0) continue;
    if (!(f >= 1.0) || !std::isfinite(f)) {
      throw std::invalid_argument("rescale factor of sample " + std::to_string(i) + " must be >= 1");
    }
    set.kept_.push_back(static_cast<SampleId>(i));
  }
  set.factor_ = std::move(factors);
  return set;
}

double ActiveSet::pruned_fraction() const {
  if (factor_.empty()) return 0.0;
  return 1.0 - static_cast<double>(kept_.size()) / static_cast<double>(factor_.size());
}

double ActiveSet::batch_scale(std::span<const SampleId> batch) const {
  if (batch.empty()) throw std::invalid_argument("batch_scale: empty batch");
  double sum = 0.0;
  for (SampleId id : batch) {
    if (id >= factor_.size() || factor_[id] == 0.0) {
      throw std::invalid_argument("batch_scale: sample " + std::to_string(id) + " is not in the active set");
    }
    sum += factor_[id];
  }
  return sum / static_cast<double>(batch.size());
}

namespace {

std::vector<double> threshold_soft_prune(const ScoreTable& table, const ThresholdSoftPrune& p, std::size_t cycle,
                                         const CycleSchedule& schedule, std::uint64_t seed) {
  const std::size_t n = table.size();
  std::vector<double> factors(n, 1.0);
  const double first_epoch = static_cast<double>(schedule.first_epoch(cycle));
  const double prune_until = static_cast<double>(schedule.total_epochs) * (1.0 - p.anneal_tail);
  if (p.prune_prob == 0.0 || first_epoch >= prune_until) return factors;

  const auto scores = table.scores();
  const auto init = table.initialized_flags();
  // Mean taken relative to a reference score so that a table of identical
  // scores yields exactly that score (plain summation can round past it and
  // put every sample strictly below the mean).
  std::optional<double> ref;
  double offset_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!init[i]) continue;
    if (!ref) ref = scores[i];
    offset_sum += scores[i] - *ref;
    ++count;
  }
  if (count == 0) return factors;
  const double mean = *ref + offset_sum / static_cast<double>(count);
  const double kept_factor = p.rescale ? 1.0 / (1.0 - p.prune_prob) : 1.0;

  std::mt19937_64 gen(derive_seed(seed, streams::kPrune, cycle));
  for (std::size_t i = 0; i < n; ++i) {
    if (!init[i] || !(scores[i] < mean)) continue;
    factors[i] = uniform01(gen) < p.prune_prob ? 0.0 : kept_factor;
  }
  return factors;
}

std::vector<double> window_select(const ScoreTable& table, const WindowSelect& p, std::size_t cycle,
                                  const CycleSchedule& schedule) {
  const std::size_t n = table.size();
  const double exact = p.keep_fraction * static_cast<double>(n);
  if (exact < 1.0) throw std::invalid_argument("keep_fraction * N must be at least 1");
  const auto budget = static_cast<std::size_t>(std::ceil(exact));

  const auto init = table.initialized_flags();
  const auto scores = table.scores();
  std::vector<SampleId> ranked;
  ranked.reserve(n);
  std::vector<double> factors(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (init[i]) {
      ranked.push_back(static_cast<SampleId>(i));
    } else {
      factors[i] = 1.0;
    }
  }
  const std::size_t unscored = n - ranked.size();
  const std::size_t width = budget > unscored ? budget - unscored : 0;
  if (width == 0) return factors;

  std::sort(ranked.begin(), ranked.end(), [&](SampleId a, SampleId b) {
    return scores[a] != scores[b] ? scores[a] < scores[b] : a < b;
  });
  const std::size_t slack = ranked.size() - width;
  std::size_t start = 0;
  const std::size_t cycles = schedule.num_cycles();
  if (p.progress == Progress::kEasyToHard && cycles > 1) {
    const double t = static_cast<double>(std::min(cycle, cycles - 1)) / static_cast<double>(cycles - 1);
    start = static_cast<std::size_t>(std::llround(t * static_cast<double>(slack)));
  }
  for (std::size_t r = start; r < start + width; ++r) factors[ranked[r]] = 1.0;
  return factors;
}

}  // namespace

ActiveSet select_active_set(const ScoreTable& table, const PrunePolicy& policy, std::size_t cycle,
                            const CycleSchedule& schedule, std::uint64_t seed) {
  if (table.size() == 0) throw std::invalid_argument("select_active_set: empty dataset");
  validate(policy);
  schedule.validate();
  auto factors = std::visit(
      Overloaded{
          [&](const NoPruning&) { return std::vector<double>(table.size(), 1.0); },
          [&](const ThresholdSoftPrune& p) { return threshold_soft_prune(table, p, cycle, schedule, seed); },
          [&](const WindowSelect& p) { return window_select(table, p, cycle, schedule); },
      },
      policy);
  return ActiveSet::from_factors(std::move(factors), cycle);
}

double pruned_percent(std::span<const std::size_t> kept_counts, std::size_t n_samples) {
  if (kept_counts.empty()) throw std::invalid_argument("pruned_percent: empty history");
  if (n_samples == 0) throw std::invalid_argument("pruned_percent: empty dataset");
  const double kept = std::accumulate(kept_counts.begin(), kept_counts.end(), 0.0,
                                      [](double acc, std::size_t c) { return acc + static_cast<double>(c); });
  const double visits = static_cast<double>(kept_counts.size()) * static_cast<double>(n_samples);
  return 100.0 * (1.0 - kept / visits);
}

double pruned_percent(std::span<const ActiveSet> history, std::size_t n_samples) {
  std::vector<std::size_t> counts;
  counts.reserve(history.size());
  for (const auto& a : history) counts.push_back(a.kept_count());
  return pruned_percent(counts, n_samples);
}

Sampler::Sampler(const ActiveSet& active, std::size_t batch_size, std::uint64_t seed)
    : ids_(active.kept().begin(), active.kept().end()), batch_size_(batch_size), seed_(seed) {
  if (batch_size < 1) throw std::invalid_argument("sampler: batch size must be at least 1");
  if (ids_.empty()) throw std::invalid_argument("sampler: active set is empty");
}

std::vector<std::vector<SampleId>> Sampler::next_epoch() {
  std::vector<SampleId> order = ids_;
  std::mt19937_64 gen(derive_seed(seed_, streams::kSampler, epoch_++));
  std::shuffle(order.begin(), order.end(), gen);
  std::vector<std::vector<SampleId>> batches;
  batches.reserve((order.size() + batch_size_ - 1) / batch_size_);
  for (std::size_t i = 0; i < order.size(); i += batch_size_) {
    const std::size_t end = std::min(order.size(), i + batch_size_);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

}  // namespace bls::pruning
