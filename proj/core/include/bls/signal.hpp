#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bls/log_record.hpp"
#include "bls/score.hpp"

namespace bls::signal {

// Split of one batch's mean loss from a single member's point of view:
// its own loss scaled by 1/B, and the averaged contribution of the other B-1
// members (batch composition noise).
struct Decomposition {
  double signal = 0.0;
  double noise = 0.0;
  std::size_t batch_size = 0;

  double total() const { return signal + noise; }
};

// First-order IIR low-pass filter induced by the score recurrence,
// h[n] = (1 - alpha) * alpha^n for n >= 0. DC gain is 1.
class FilterSpec {
 public:
  // Throws std::invalid_argument unless 0 < alpha < 1.
  explicit FilterSpec(double alpha);

  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

// Batch losses seen by one sample, in participation order. values[0] is the
// first observation (k = 1); s0 is the score before any observation.
struct ObservationSequence {
  std::vector<double> values;
  double s0 = 0.0;
};

Decomposition decompose_batch(std::span<const double> per_sample_losses, std::size_t target_index);

double impulse_response(const FilterSpec& spec, std::size_t n);

// Score after the k-th observation in convolution form:
//   sum_{j=0}^{k-1} h[j] * values[k-1-j] + alpha^k * s0.
// Direct summation; k must lie in [1, values.size()].
double convolution_score(const ObservationSequence& seq, const FilterSpec& spec, std::size_t k);

// Same recurrence evaluated step by step; returns the score after every
// observation (k = 1..n).
std::vector<double> recursive_scores(std::span<const double> values, double s0, double alpha);

// |H(e^{jw})| = (1 - alpha) / sqrt(1 - 2 alpha cos w + alpha^2), w in [0, pi].
double frequency_response_mag(const FilterSpec& spec, double omega);

struct ResponsePoint {
  double omega = 0.0;
  double magnitude = 0.0;
};

// Uniform grid of n_points >= 2 frequencies over [0, pi], both ends included.
std::vector<ResponsePoint> frequency_response_table(const FilterSpec& spec, std::size_t n_points);

// Signal and noise sequences of one sample across an instrumented run.
struct DecomposedRun {
  std::vector<double> signal;
  std::vector<double> noise;
  // Mean loss of each batch the sample was in, aligned with signal/noise.
  std::vector<double> mean_loss;
};

// Extracts the per-step decomposition for `id`. Records that do not contain
// `id` are skipped; every record that does must carry per-sample losses.
DecomposedRun decompose_run(std::span<const LogRecord> log, SampleId id);

// decompose_run for every sample at once, indexed by SampleId.
std::vector<DecomposedRun> decompose_run_all(std::span<const LogRecord> log, std::size_t n_samples);

}  // namespace bls::signal
