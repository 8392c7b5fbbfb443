#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bls::spectral {

enum class Window { kRectangular, kHann };
enum class Detrend { kNone, kMeanRemoval };

struct WelchConfig {
  std::size_t segment_len = 64;
  std::size_t overlap = 32;
  Window window = Window::kHann;
  Detrend detrend = Detrend::kMeanRemoval;

  // Throws std::invalid_argument if segment_len == 0 or overlap >= segment_len.
  void validate() const;
};

// One-sided power spectral density on normalized frequencies
// (cycles per update, 0 .. 0.5).
struct PsdEstimate {
  std::vector<double> freqs;
  std::vector<double> power;
  std::size_t n_segments = 0;

  std::size_t bins() const { return freqs.size(); }
};

// Welch's averaged, windowed periodogram. Each segment is detrended on its
// own. Scaling is power per unit normalized frequency with window-power
// compensation: for a rectangular window and one segment, the result is the
// one-sided periodogram |X_k|^2 / n (interior bins doubled), so
// sum(power) / n equals the mean square of the sequence.
PsdEstimate welch_psd(std::span<const double> sequence, const WelchConfig& cfg);

struct MeanPsd {
  PsdEstimate psd;
  std::size_t used = 0;
  // Sequences shorter than one segment.
  std::size_t dropped = 0;
  // Segments summed over all used sequences; psd.n_segments holds the same.
  std::size_t total_segments = 0;
};

// Bin-wise mean of per-sequence Welch estimates, each sequence weighted
// equally. Sequences shorter than one segment are dropped; the rest keep
// their own length, truncated to the last whole segment (the frequency grid
// depends only on segment_len). Throws std::invalid_argument if the
// collection is empty or nothing survives.
MeanPsd mean_psd(std::span<const std::vector<double>> sequences, const WelchConfig& cfg);

struct SeparationReport {
  std::vector<double> ratio;  // noise / signal, per bin
  bool all_bins_noise_dominant = false;
  double high_freq_ratio = 0.0;  // mean ratio over the top quartile of bins
  double low_freq_ratio = 0.0;   // mean ratio over the bottom quartile of bins
};

// Throws std::invalid_argument if the frequency grids differ.
SeparationReport separation_report(const PsdEstimate& signal_psd, const PsdEstimate& noise_psd);

}  // namespace bls::spectral
