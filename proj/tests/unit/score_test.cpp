#include "bls/score.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "bls/signal.hpp"
#include "support/oracles.hpp"

namespace bls {
namespace {

TEST(EmaUpdate, FixedPointForAnyAlpha) {
  for (double a : {0.1, 0.5, 0.7, 0.99, 1.0}) EXPECT_EQ(ema_update(2.0, 2.0, a), 2.0);
}

TEST(EmaUpdate, AlphaOneIsIdentity) { EXPECT_EQ(ema_update(5.0, 0.0, 1.0), 5.0); }

TEST(EmaUpdate, HalfBlend) { EXPECT_DOUBLE_EQ(ema_update(1.0, 3.0, 0.5), 2.0); }

TEST(EmaUpdate, RejectsNonFiniteWithValueInMessage) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  try {
    ema_update(1.0, inf, 0.5);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("inf"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ema_update(nan, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(ema_update(1.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(ema_update(1.0, 1.0, 1.5), std::invalid_argument);
}

TEST(EmaConfig, Validation) {
  EXPECT_NO_THROW((EmaConfig{0.7}).validate());
  EXPECT_NO_THROW((EmaConfig{1.0}).validate());
  EXPECT_NO_THROW(EmaConfig::last_loss().validate());
  EXPECT_THROW((EmaConfig{1.5}).validate(), std::invalid_argument);
  EXPECT_THROW((EmaConfig{-0.1}).validate(), std::invalid_argument);
}

TEST(ScoreTable, FreshTableIsUninitialized) {
  ScoreTable t(4, EmaConfig{});
  for (SampleId i = 0; i < 4; ++i) {
    EXPECT_FALSE(t.initialized(i));
    EXPECT_EQ(t.update_count(i), 0u);
  }
}

TEST(ScoreTable, FirstObservedInitialization) {
  const EmaConfig cfg{0.7};
  ScoreTable t(10, cfg);
  const std::vector<SampleId> batch{1, 4, 7};
  t.apply_batch(batch, 0.7, cfg);
  for (SampleId id : batch) {
    EXPECT_EQ(t.score(id), 0.7);
    EXPECT_TRUE(t.initialized(id));
    EXPECT_EQ(t.update_count(id), 1u);
  }
  EXPECT_FALSE(t.initialized(0));
}

TEST(ScoreTable, TwoStepRecurrence) {
  const EmaConfig cfg{0.7, InitPolicy::kFixedValue, 1.0};
  ScoreTable t(3, cfg);
  const std::vector<SampleId> batch{2};
  t.apply_batch(batch, 2.0, cfg);
  EXPECT_NEAR(t.score(2), 1.3, 1e-15);
  t.apply_batch(batch, 4.0, cfg);
  EXPECT_NEAR(t.score(2), 2.11, 1e-15);
}

TEST(ScoreTable, NonMembersUnchanged) {
  const EmaConfig cfg{0.5, InitPolicy::kFixedValue, 3.0};
  ScoreTable t(5, cfg);
  const std::vector<SampleId> batch{0, 1};
  t.apply_batch(batch, 1.0, cfg);
  for (SampleId j : {2, 3, 4}) {
    EXPECT_EQ(t.score(j), 3.0);
    EXPECT_EQ(t.update_count(j), 0u);
  }
}

TEST(ScoreTable, LastLossMode) {
  const auto cfg = EmaConfig::last_loss();
  ScoreTable t(2, cfg);
  const std::vector<SampleId> batch{0};
  t.apply_batch(batch, 5.0, cfg);
  t.apply_batch(batch, 1.25, cfg);
  EXPECT_EQ(t.score(0), 1.25);
  EXPECT_EQ(t.update_count(0), 2u);
}

TEST(ScoreTable, AlphaOneFreezesAfterInit) {
  const EmaConfig cfg{1.0};
  ScoreTable t(1, cfg);
  const std::vector<SampleId> batch{0};
  t.apply_batch(batch, 0.4, cfg);
  t.apply_batch(batch, 9.0, cfg);
  EXPECT_EQ(t.score(0), 0.4);
}

TEST(ScoreTable, OutOfRangeNamesIndexAndSize) {
  const EmaConfig cfg{};
  ScoreTable t(3, cfg);
  const std::vector<SampleId> batch{0, 5};
  try {
    t.apply_batch(batch, 1.0, cfg);
    FAIL();
  } catch (const std::out_of_range& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('5'), std::string::npos);
    EXPECT_NE(msg.find('3'), std::string::npos);
  }
  // Strong guarantee: the valid member was not touched.
  EXPECT_EQ(t.update_count(0), 0u);
}

TEST(ScoreTable, RejectsDuplicatesEmptyAndNonFinite) {
  const EmaConfig cfg{};
  ScoreTable t(3, cfg);
  const std::vector<SampleId> dup{1, 1};
  EXPECT_THROW(t.apply_batch(dup, 1.0, cfg), std::invalid_argument);
  EXPECT_THROW(t.apply_batch(std::vector<SampleId>{}, 1.0, cfg), std::invalid_argument);
  const std::vector<SampleId> ok{0};
  EXPECT_THROW(t.apply_batch(ok, std::nan(""), cfg), std::invalid_argument);
}

TEST(ScoreTable, SnapshotIsPointInTime) {
  const EmaConfig cfg{};
  ScoreTable t(2, cfg);
  const std::vector<SampleId> batch{0};
  t.apply_batch(batch, 2.0, cfg);
  const auto snap = t.snapshot();
  t.apply_batch(batch, 4.0, cfg);
  EXPECT_EQ(snap.scores[0], 2.0);
  EXPECT_EQ(snap.update_counts[0], 1u);
  EXPECT_TRUE(snap.initialized[0]);
  EXPECT_FALSE(snap.initialized[1]);
}

// Randomized batch streams: a score only moves when its sample participates,
// counts equal participation, and first-observed scores stay inside the
// range of the losses the sample has seen.
TEST(ScoreTableProperty, ParticipationInvariants) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 40;
    const EmaConfig cfg{std::uniform_real_distribution<double>(0.01, 1.0)(gen)};
    ScoreTable t(n, cfg);
    std::vector<std::uint32_t> participation(n, 0);
    std::vector<double> lo(n, 1e300), hi(n, -1e300);
    std::vector<SampleId> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    for (int step = 0; step < 60; ++step) {
      std::shuffle(ids.begin(), ids.end(), gen);
      const std::size_t b = 1 + gen() % n;
      const std::span<const SampleId> batch(ids.data(), b);
      const double loss = std::uniform_real_distribution<double>(0.0, 10.0)(gen);
      const auto before = t.snapshot();
      t.apply_batch(batch, loss, cfg);
      std::vector<bool> member(n, false);
      for (SampleId id : batch) {
        member[id] = true;
        ++participation[id];
        lo[id] = std::min(lo[id], loss);
        hi[id] = std::max(hi[id], loss);
      }
      for (SampleId i = 0; i < n; ++i) {
        if (!member[i]) ASSERT_EQ(t.score(i), before.scores[i]);
        ASSERT_EQ(t.update_count(i), participation[i]);
        if (participation[i] > 0) {
          ASSERT_GE(t.score(i), lo[i] - 1e-12);
          ASSERT_LE(t.score(i), hi[i] + 1e-12);
        }
      }
    }
  }
}

TEST(ScoreTableProperty, DisjointBatchesCommute) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 100; ++trial) {
    const EmaConfig cfg{0.7};
    const std::size_t n = 20;
    ScoreTable a(n, cfg);
    // Shared warm-up history.
    std::vector<SampleId> all(n);
    std::iota(all.begin(), all.end(), 0);
    a.apply_batch(all, 1.5, cfg);
    ScoreTable b = a;
    std::shuffle(all.begin(), all.end(), gen);
    const std::span<const SampleId> first(all.data(), 7);
    const std::span<const SampleId> second(all.data() + 7, 9);
    const double l1 = std::uniform_real_distribution<double>(0, 5)(gen);
    const double l2 = std::uniform_real_distribution<double>(0, 5)(gen);
    a.apply_batch(first, l1, cfg);
    a.apply_batch(second, l2, cfg);
    b.apply_batch(second, l2, cfg);
    b.apply_batch(first, l1, cfg);
    ASSERT_EQ(a, b);
  }
}

// Cross-check against the convolution form: after k updates a sample's score
// equals (H * L)[k] + alpha^k s0.
TEST(ScoreTableProperty, MatchesConvolutionForm) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double alpha = std::uniform_real_distribution<double>(0.01, 0.99)(gen);
    const double s0 = std::uniform_real_distribution<double>(-5, 5)(gen);
    const EmaConfig cfg{alpha, InitPolicy::kFixedValue, s0};
    ScoreTable t(3, cfg);
    signal::ObservationSequence seq{{}, s0};
    const signal::FilterSpec spec(alpha);
    const std::size_t len = 1 + gen() % 64;
    for (std::size_t k = 1; k <= len; ++k) {
      const double loss = std::uniform_real_distribution<double>(0, 10)(gen);
      seq.values.push_back(loss);
      const std::vector<SampleId> batch{1};
      t.apply_batch(batch, loss, cfg);
      ASSERT_NEAR(t.score(1), signal::convolution_score(seq, spec, k), 1e-10);
    }
  }
}

}  // namespace
}  // namespace bls
