#pragma once

// Independent reference computations used only by tests. None of these call
// into the library code path they are used to check.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace bls::oracle {

// Score recurrence unrolled directly from its definition.
inline std::vector<double> ema_recursive(std::span<const double> losses, double s0, double alpha) {
  std::vector<double> out;
  double s = s0;
  for (double l : losses) {
    s = alpha * s + (1.0 - alpha) * l;
    out.push_back(s);
  }
  return out;
}

// One-sided periodogram |X_k|^2 / n with interior bins doubled, by a
// textbook complex DFT (std::polar twiddles, no tabulation).
inline std::vector<double> periodogram(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(n));
    }
    const bool unique = k == 0 || (n % 2 == 0 && k == n / 2);
    p[k] = std::norm(acc) / static_cast<double>(n) * (unique ? 1.0 : 2.0);
  }
  return p;
}

// Central finite-difference gradient of f at x.
inline std::vector<double> finite_difference_gradient(const std::function<double(const std::vector<double>&)>& f,
                                                      std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double up = f(x);
    x[i] = orig - h;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Numerically stable cross-entropy of one example given raw logits.
inline double cross_entropy(std::span<const double> logits, std::size_t label) {
  double m = logits[0];
  for (double z : logits) m = std::max(m, z);
  double s = 0.0;
  for (double z : logits) s += std::exp(z - m);
  return m + std::log(s) - logits[label];
}

inline std::vector<double> random_sequence(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

}  // namespace bls::oracle
