#include "bls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bls::spectral {

void WelchConfig::validate() const {
  if (segment_len == 0) throw std::invalid_argument("welch: segment_len must be positive");
  if (overlap >= segment_len) {
    throw std::invalid_argument("welch: overlap (" + std::to_string(overlap) +
                                ") must be smaller than segment_len (" + std::to_string(segment_len) + ")");
  }
}

namespace {

std::vector<double> make_window(Window kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (kind == Window::kHann && n > 1) {
    // Periodic Hann, the usual choice for spectral estimation.
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    }
  }
  return w;
}

// Direct DFT restricted to the one-sided bins; twiddles are tabulated once.
class OneSidedDft {
 public:
  explicit OneSidedDft(std::size_t n) : n_(n), cos_(n), sin_(n) {
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      cos_[i] = std::cos(phase);
      sin_[i] = std::sin(phase);
    }
  }

  std::size_t bins() const { return n_ / 2 + 1; }

  // Accumulates |X_k|^2 for k in [0, n/2] into out.
  void add_power(std::span<const double> x, std::span<double> out) const {
    for (std::size_t k = 0; k < bins(); ++k) {
      double re = 0.0;
      double im = 0.0;
      std::size_t idx = 0;
      for (std::size_t t = 0; t < n_; ++t) {
        re += x[t] * cos_[idx];
        im -= x[t] * sin_[idx];
        idx += k;
        if (idx >= n_) idx -= n_;
      }
      out[k] += re * re + im * im;
    }
  }

 private:
  std::size_t n_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace

PsdEstimate welch_psd(std::span<const double> sequence, const WelchConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.segment_len;
  if (sequence.size() < n) {
    throw std::invalid_argument("welch_psd: sequence of length " + std::to_string(sequence.size()) +
                                " is shorter than one segment; need at least " + std::to_string(n));
  }
  const std::size_t hop = n - cfg.overlap;
  const auto window = make_window(cfg.window, n);
  double window_power = 0.0;
  for (double w : window) window_power += w * w;

  const OneSidedDft dft(n);
  PsdEstimate est;
  est.power.assign(dft.bins(), 0.0);
  std::vector<double> seg(n);
  for (std::size_t start = 0; start + n <= sequence.size(); start += hop) {
    const auto src = sequence.subspan(start, n);
    double mean = 0.0;
    if (cfg.detrend == Detrend::kMeanRemoval) {
      for (double v : src) mean += v;
      mean /= static_cast<double>(n);
    }
    for (std::size_t i = 0; i < n; ++i) seg[i] = (src[i] - mean) * window[i];
    dft.add_power(seg, est.power);
    ++est.n_segments;
  }

  const double scale = 1.0 / (window_power * static_cast<double>(est.n_segments));
  est.freqs.resize(dft.bins());
  for (std::size_t k = 0; k < dft.bins(); ++k) {
    est.freqs[k] = static_cast<double>(k) / static_cast<double>(n);
    // Fold negative frequencies onto the positive side; DC and Nyquist are unique.
    const bool unique = k == 0 || (n % 2 == 0 && k == n / 2);
    est.power[k] *= scale * (unique ? 1.0 : 2.0);
  }
  return est;
}

MeanPsd mean_psd(std::span<const std::vector<double>> sequences, const WelchConfig& cfg) {
  cfg.validate();
  if (sequences.empty()) throw std::invalid_argument("mean_psd: empty collection");

  MeanPsd out;
  for (const auto& s : sequences) {
    if (s.size() < cfg.segment_len) {
      ++out.dropped;
      continue;
    }
    auto est = welch_psd(s, cfg);
    out.total_segments += est.n_segments;
    if (out.psd.power.empty()) {
      out.psd = std::move(est);
    } else {
      for (std::size_t k = 0; k < est.power.size(); ++k) out.psd.power[k] += est.power[k];
    }
    ++out.used;
  }
  if (out.used == 0) {
    throw std::invalid_argument("mean_psd: no sequence reaches the segment length " +
                                std::to_string(cfg.segment_len));
  }
  out.psd.n_segments = out.total_segments;
  for (double& p : out.psd.power) p /= static_cast<double>(out.used);
  return out;
}

SeparationReport separation_report(const PsdEstimate& signal_psd, const PsdEstimate& noise_psd) {
  if (signal_psd.freqs != noise_psd.freqs || signal_psd.power.size() != noise_psd.power.size() ||
      signal_psd.freqs.empty()) {
    throw std::invalid_argument("separation_report: signal and noise PSDs are on different frequency grids");
  }
  const std::size_t bins = signal_psd.power.size();
  SeparationReport rep;
  rep.ratio.resize(bins);
  rep.all_bins_noise_dominant = true;
  for (std::size_t k = 0; k < bins; ++k) {
    const double s = signal_psd.power[k];
    const double v = noise_psd.power[k];
    if (s > 0.0) {
      rep.ratio[k] = v / s;
    } else {
      rep.ratio[k] = v > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
    if (!(v > s)) rep.all_bins_noise_dominant = false;
  }
  const std::size_t quart = std::max<std::size_t>(1, bins / 4);
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t k = 0; k < quart; ++k) {
    lo += rep.ratio[k];
    hi += rep.ratio[bins - 1 - k];
  }
  rep.low_freq_ratio = lo / static_cast<double>(quart);
  rep.high_freq_ratio = hi / static_cast<double>(quart);
  return rep;
}

}  // namespace bls::spectral
