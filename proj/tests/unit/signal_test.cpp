#include "bls/signal.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bls/score.hpp"
#include "support/oracles.hpp"

namespace bls::signal {
namespace {

TEST(DecomposeBatch, SingleSampleHasNoNoise) {
  const std::vector<double> losses{3.25};
  const auto d = decompose_batch(losses, 0);
  EXPECT_EQ(d.signal, 3.25);
  EXPECT_EQ(d.noise, 0.0);
  EXPECT_EQ(d.batch_size, 1u);
}

TEST(DecomposeBatch, HandEvaluated) {
  const std::vector<double> losses{1, 2, 3, 4};
  const auto d = decompose_batch(losses, 0);
  EXPECT_DOUBLE_EQ(d.signal, 0.25);
  EXPECT_DOUBLE_EQ(d.noise, 2.25);
}

TEST(DecomposeBatch, Errors) {
  EXPECT_THROW(decompose_batch(std::vector<double>{}, 0), std::invalid_argument);
  EXPECT_THROW(decompose_batch(std::vector<double>{1.0, 2.0}, 2), std::out_of_range);
}

TEST(DecomposeBatch, SumsToMean) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 2000; ++t) {
    const auto losses = oracle::random_sequence(gen, 1 + gen() % 64, 0.0, 10.0);
    double mean = 0.0;
    for (double l : losses) mean += l;
    mean /= static_cast<double>(losses.size());
    const auto d = decompose_batch(losses, gen() % losses.size());
    ASSERT_NEAR(d.total() - mean, 0.0, 1e-12);
  }
}

TEST(FilterSpec, RejectsClosedEndpoints) {
  EXPECT_THROW(FilterSpec(0.0), std::invalid_argument);
  EXPECT_THROW(FilterSpec(1.0), std::invalid_argument);
  EXPECT_NO_THROW(FilterSpec(0.5));
}

TEST(ImpulseResponse, Values) {
  const FilterSpec spec(0.7);
  EXPECT_DOUBLE_EQ(impulse_response(spec, 0), 0.3);
  EXPECT_NEAR(impulse_response(spec, 2), 0.147, 1e-15);
}

TEST(ImpulseResponse, UnitDcGain) {
  for (double a : {0.1, 0.5, 0.9}) {
    const FilterSpec spec(a);
    double sum = 0.0;
    for (std::size_t n = 0; n < 2000; ++n) sum += impulse_response(spec, n);
    EXPECT_NEAR(sum, 1.0, 1e-12) << a;
  }
}

TEST(ConvolutionScore, SingleStep) {
  const ObservationSequence seq{{3.0}, 1.0};
  EXPECT_DOUBLE_EQ(convolution_score(seq, FilterSpec(0.5), 1), 2.0);
}

TEST(ConvolutionScore, ConstantIsFixedPoint) {
  const ObservationSequence seq{std::vector<double>(30, 1.75), 1.75};
  const FilterSpec spec(0.7);
  for (std::size_t k = 1; k <= 30; ++k) EXPECT_NEAR(convolution_score(seq, spec, k), 1.75, 1e-14);
}

TEST(ConvolutionScore, KOutOfRange) {
  const ObservationSequence seq{{1.0, 2.0}, 0.0};
  EXPECT_THROW(convolution_score(seq, FilterSpec(0.5), 0), std::out_of_range);
  EXPECT_THROW(convolution_score(seq, FilterSpec(0.5), 3), std::out_of_range);
}

TEST(ConvolutionScore, MatchesRecursion) {
  std::mt19937_64 gen(9);
  for (int t = 0; t < 200; ++t) {
    const double a = std::uniform_real_distribution<double>(0.01, 0.99)(gen);
    ObservationSequence seq{oracle::random_sequence(gen, 1 + gen() % 128, 0.0, 10.0),
                            std::uniform_real_distribution<double>(-10, 10)(gen)};
    const auto rec = oracle::ema_recursive(seq.values, seq.s0, a);
    const auto lib = recursive_scores(seq.values, seq.s0, a);
    const FilterSpec spec(a);
    for (std::size_t k = 1; k <= seq.values.size(); ++k) {
      ASSERT_NEAR(convolution_score(seq, spec, k), rec[k - 1], 1e-10);
      ASSERT_NEAR(lib[k - 1], rec[k - 1], 1e-12);
    }
  }
}

TEST(ConvolutionScore, Linearity) {
  std::mt19937_64 gen(10);
  for (int t = 0; t < 100; ++t) {
    const FilterSpec spec(std::uniform_real_distribution<double>(0.01, 0.99)(gen));
    const std::size_t n = 1 + gen() % 100;
    const auto s = oracle::random_sequence(gen, n, 0.0, 1.0);
    const auto z = oracle::random_sequence(gen, n, 0.0, 5.0);
    std::vector<double> sum(n);
    for (std::size_t i = 0; i < n; ++i) sum[i] = s[i] + z[i];
    const double s0_signal = 0.3;
    const double s0_noise = 1.1;
    const ObservationSequence total{sum, s0_signal + s0_noise};
    const ObservationSequence sig{s, s0_signal};
    const ObservationSequence noi{z, s0_noise};
    for (std::size_t k = 1; k <= n; ++k) {
      ASSERT_NEAR(convolution_score(total, spec, k),
                  convolution_score(sig, spec, k) + convolution_score(noi, spec, k), 1e-10);
    }
  }
}

TEST(FrequencyResponse, DcAndNyquist) {
  for (int i = 1; i <= 9; ++i) {
    const double a = i / 10.0;
    const FilterSpec spec(a);
    EXPECT_NEAR(frequency_response_mag(spec, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(frequency_response_mag(spec, std::numbers::pi), (1 - a) / (1 + a), 1e-12);
  }
  EXPECT_NEAR(frequency_response_mag(FilterSpec(0.7), std::numbers::pi), 0.3 / 1.7, 1e-12);
  EXPECT_NEAR(frequency_response_mag(FilterSpec(0.7), std::numbers::pi), 0.176471, 1e-6);
}

TEST(FrequencyResponse, MatchesComplexTransferFunction) {
  for (double a : {0.2, 0.7}) {
    for (double w : {0.1, 1.0, 2.5}) {
      const std::complex<double> h = (1 - a) / (1.0 - a * std::polar(1.0, -w));
      EXPECT_NEAR(frequency_response_mag(FilterSpec(a), w), std::abs(h), 1e-14);
    }
  }
}

TEST(FrequencyResponse, StrictlyDecreasingAndSmoothingOrder) {
  double prev_pi = 2.0;
  for (int i = 1; i <= 9; ++i) {
    const FilterSpec spec(i / 10.0);
    const auto table = frequency_response_table(spec, 1000);
    ASSERT_EQ(table.front().omega, 0.0);
    ASSERT_EQ(table.back().omega, std::numbers::pi);
    for (std::size_t j = 1; j < table.size(); ++j) ASSERT_LT(table[j].magnitude, table[j - 1].magnitude);
    EXPECT_LE(table.back().magnitude, prev_pi);
    prev_pi = table.back().magnitude;
  }
}

TEST(FrequencyResponse, RejectsOmegaOutsideRange) {
  EXPECT_THROW(frequency_response_mag(FilterSpec(0.5), -0.1), std::out_of_range);
  EXPECT_THROW(frequency_response_mag(FilterSpec(0.5), 3.2), std::out_of_range);
}

std::vector<LogRecord> instrumented_log() {
  return {
      {0, {0, 1, 2}, 2.0, std::vector<double>{1.0, 2.0, 3.0}},
      {1, {3, 1}, 1.5, std::vector<double>{2.5, 0.5}},
      {2, {2, 0}, 1.0, std::vector<double>{0.5, 1.5}},
  };
}

TEST(DecomposeRun, PairsSumToBatchMeanAndCountParticipation) {
  const auto log = instrumented_log();
  const auto run = decompose_run(log, 1);
  ASSERT_EQ(run.signal.size(), 2u);
  EXPECT_DOUBLE_EQ(run.signal[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(run.noise[0], 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(run.signal[1], 0.25);
  EXPECT_DOUBLE_EQ(run.noise[1], 1.25);
  for (std::size_t k = 0; k < run.signal.size(); ++k) {
    EXPECT_NEAR(run.signal[k] + run.noise[k], run.mean_loss[k], 1e-12);
  }
  EXPECT_TRUE(decompose_run(log, 42).signal.empty());
}

TEST(DecomposeRun, ReconstructionFeedsTheSameScores) {
  const auto log = instrumented_log();
  const EmaConfig cfg{0.7};
  ScoreTable table(4, cfg);
  for (const auto& rec : log) table.apply_batch(rec.indices, rec.mean_loss, cfg);
  for (SampleId id = 0; id < 4; ++id) {
    const auto run = decompose_run(log, id);
    ScoreTable rebuilt(1, cfg);
    const std::vector<SampleId> only{0};
    for (std::size_t k = 0; k < run.signal.size(); ++k) rebuilt.apply_batch(only, run.signal[k] + run.noise[k], cfg);
    EXPECT_NEAR(rebuilt.score(0), table.score(id), 1e-12) << id;
  }
}

TEST(DecomposeRun, RequiresInstrumentation) {
  const std::vector<LogRecord> log{{0, {0}, 1.0, std::nullopt}};
  EXPECT_THROW(decompose_run(log, 0), std::invalid_argument);
}

TEST(DecomposeRunAll, AgreesWithPerSampleExtraction) {
  const auto log = instrumented_log();
  const auto all = decompose_run_all(log, 4);
  for (SampleId id = 0; id < 4; ++id) {
    const auto one = decompose_run(log, id);
    EXPECT_EQ(all[id].signal, one.signal);
    EXPECT_EQ(all[id].noise, one.noise);
  }
}

}  // namespace
}  // namespace bls::signal
