#include "bls/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bls::signal {

FilterSpec::FilterSpec(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("filter alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

Decomposition decompose_batch(std::span<const double> per_sample_losses, std::size_t target_index) {
  const std::size_t b = per_sample_losses.size();
  if (b == 0) throw std::invalid_argument("decompose_batch: empty batch");
  if (target_index >= b) {
    throw std::out_of_range("decompose_batch: target index " + std::to_string(target_index) +
                            " out of range for batch of size " + std::to_string(b));
  }
  double others = 0.0;
  for (std::size_t j = 0; j < b; ++j) {
    if (j != target_index) others += per_sample_losses[j];
  }
  const double scale = static_cast<double>(b);
  return Decomposition{per_sample_losses[target_index] / scale, others / scale, b};
}

double impulse_response(const FilterSpec& spec, std::size_t n) {
  return (1.0 - spec.alpha()) * std::pow(spec.alpha(), static_cast<double>(n));
}

double convolution_score(const ObservationSequence& seq, const FilterSpec& spec, std::size_t k) {
  if (k == 0 || k > seq.values.size()) {
    throw std::out_of_range("convolution_score: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(seq.values.size()) + "]");
  }
  const double a = spec.alpha();
  double acc = 0.0;
  double weight = 1.0 - a;  // h[0]
  for (std::size_t j = 0; j < k; ++j) {
    acc += weight * seq.values[k - 1 - j];
    weight *= a;
  }
  return acc + std::pow(a, static_cast<double>(k)) * seq.s0;
}

std::vector<double> recursive_scores(std::span<const double> values, double s0, double alpha) {
  std::vector<double> out;
  out.reserve(values.size());
  double s = s0;
  for (double v : values) {
    s = ema_update(s, v, alpha);
    out.push_back(s);
  }
  return out;
}

double frequency_response_mag(const FilterSpec& spec, double omega) {
  if (!(omega >= 0.0 && omega <= std::numbers::pi)) {
    throw std::out_of_range("frequency_response_mag: omega must lie in [0, pi]");
  }
  const double a = spec.alpha();
  return (1.0 - a) / std::sqrt(1.0 - 2.0 * a * std::cos(omega) + a * a);
}

std::vector<ResponsePoint> frequency_response_table(const FilterSpec& spec, std::size_t n_points) {
  if (n_points < 2) throw std::invalid_argument("frequency_response_table: need at least 2 points");
  std::vector<ResponsePoint> table;
  table.reserve(n_points);
  const double step = std::numbers::pi / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    // Pin the last point to pi exactly.
    const double w = i + 1 == n_points ? std::numbers::pi : step * static_cast<double>(i);
    table.push_back({w, frequency_response_mag(spec, w)});
  }
  return table;
}

namespace {

void append_member(DecomposedRun& run, const LogRecord& rec, std::size_t pos) {
  if (!rec.per_sample_losses) {
    throw std::invalid_argument("decompose_run: step " + std::to_string(rec.step) +
                                " has no per-sample losses (run was not instrumented)");
  }
  const auto d = decompose_batch(*rec.per_sample_losses, pos);
  run.signal.push_back(d.signal);
  run.noise.push_back(d.noise);
  run.mean_loss.push_back(rec.mean_loss);
}

}  // namespace

DecomposedRun decompose_run(std::span<const LogRecord> log, SampleId id) {
  DecomposedRun run;
  for (const auto& rec : log) {
    for (std::size_t pos = 0; pos < rec.indices.size(); ++pos) {
      if (rec.indices[pos] == id) {
        append_member(run, rec, pos);
        break;
      }
    }
  }
  return run;
}

std::vector<DecomposedRun> decompose_run_all(std::span<const LogRecord> log, std::size_t n_samples) {
  std::vector<DecomposedRun> runs(n_samples);
  for (const auto& rec : log) {
    for (std::size_t pos = 0; pos < rec.indices.size(); ++pos) {
      const SampleId id = rec.indices[pos];
      if (id >= n_samples) {
        throw std::out_of_range("decompose_run_all: sample index " + std::to_string(id) +
                                " out of range for " + std::to_string(n_samples) + " samples");
      }
      append_member(runs[id], rec, pos);
    }
  }
  return runs;
}

}  // namespace bls::signal
