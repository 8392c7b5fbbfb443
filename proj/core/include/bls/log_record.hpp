#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bls/score.hpp"

namespace bls {

// One line of a batch-loss log. per_sample_losses is only present for
// instrumented runs and is aligned with `indices`.
struct LogRecord {
  std::uint64_t step = 0;
  std::vector<SampleId> indices;
  double mean_loss = 0.0;
  std::optional<std::vector<double>> per_sample_losses;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

}  // namespace bls
