#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bls/log_record.hpp"
#include "bls/pruning.hpp"
#include "bls/score.hpp"
#include "bls/signal.hpp"
#include "bls/spectral.hpp"
#include "bls/trainer.hpp"

namespace bls::io {

// 17 significant digits; parses back to the same double.
std::string format_real(double v);

// CSV writers. Each emits a header row followed by data rows with a fixed
// column order.
void write_scores_csv(std::ostream& out, const ScoreTable& table);         // id,score,update_count
void write_decisions_csv(std::ostream& out, const pruning::ActiveSet& a);  // id,kept,rescale
void write_psd_csv(std::ostream& out, const spectral::PsdEstimate& psd);   // freq,power
void write_filter_csv(std::ostream& out, std::span<const signal::ResponsePoint> table);  // omega,magnitude
void write_sweep_csv(std::ostream& out, std::span<const train::SweepRow> rows);

struct MetricsLabel {
  std::string arch;
  std::string policy;
  double alpha = 0.0;
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;
};
std::string metrics_header();
std::string metrics_row(const MetricsLabel& label, const train::RunMetrics& m);

// Opens `path` for writing and hands the stream to `fn`.
template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn);

struct ReplayResult {
  ScoreTable table;
  pruning::ActiveSet next;
  std::size_t records = 0;
};

// Feeds every record through ScoreTable::apply_batch, then selects the active
// set for `cycle`. n_samples = 0 sizes the table to the largest index + 1.
ReplayResult replay(std::span<const LogRecord> log, std::size_t n_samples, const EmaConfig& ema,
                    const pruning::PrunePolicy& policy, const pruning::CycleSchedule& schedule, std::size_t cycle,
                    std::uint64_t seed);

// One-line key=value summary of a replay's next-cycle decisions.
std::string replay_summary(const ReplayResult& r);

// One-line key=value summary of a separation report.
std::string separation_summary(const spectral::SeparationReport& rep);

}  // namespace bls::io

#include <fstream>
#include <stdexcept>

template <class Fn>
void bls::io::write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}
