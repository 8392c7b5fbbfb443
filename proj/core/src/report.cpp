#include "bls/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace bls::io {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_scores_csv(std::ostream& out, const ScoreTable& table) {
  out << "id,score,update_count\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto id = static_cast<SampleId>(i);
    out << i << ',' << format_real(table.score(id)) << ',' << table.update_count(id) << '\n';
  }
}

void write_decisions_csv(std::ostream& out, const pruning::ActiveSet& a) {
  out << "id,kept,rescale\n";
  for (std::size_t i = 0; i < a.dataset_size(); ++i) {
    const auto id = static_cast<SampleId>(i);
    const bool kept = a.is_kept(id);
    out << i << ',' << (kept ? 1 : 0) << ',' << format_real(kept ? a.rescale(id) : 0.0) << '\n';
  }
}

void write_psd_csv(std::ostream& out, const spectral::PsdEstimate& psd) {
  out << "freq,power\n";
  for (std::size_t k = 0; k < psd.bins(); ++k) {
    out << format_real(psd.freqs[k]) << ',' << format_real(psd.power[k]) << '\n';
  }
}

void write_filter_csv(std::ostream& out, std::span<const signal::ResponsePoint> table) {
  out << "omega,magnitude\n";
  for (const auto& p : table) out << format_real(p.omega) << ',' << format_real(p.magnitude) << '\n';
}

void write_sweep_csv(std::ostream& out, std::span<const train::SweepRow> rows) {
  out << "alpha,train_acc,test_acc,pruned_percent,wall_time_s\n";
  for (const auto& r : rows) {
    out << format_real(r.alpha) << ',' << format_real(r.train_acc) << ',' << format_real(r.test_acc) << ','
        << format_real(r.pruned_percent) << ',' << format_real(r.wall_time_s) << '\n';
  }
}

std::string metrics_header() {
  return "arch,policy,alpha,epochs,batch_size,seed,final_train_acc,final_test_acc,pruned_percent,wall_time_s,steps,"
         "final_loss";
}

std::string metrics_row(const MetricsLabel& label, const train::RunMetrics& m) {
  std::ostringstream os;
  os << label.arch << ',' << label.policy << ',' << format_real(label.alpha) << ',' << label.epochs << ','
     << label.batch_size << ',' << label.seed << ',' << format_real(m.final_train_acc) << ','
     << format_real(m.final_test_acc) << ',' << format_real(m.pruned_percent) << ',' << format_real(m.wall_time_s)
     << ',' << m.steps << ',' << format_real(m.loss_curve.empty() ? 0.0 : m.loss_curve.back());
  return os.str();
}

ReplayResult replay(std::span<const LogRecord> log, std::size_t n_samples, const EmaConfig& ema,
                    const pruning::PrunePolicy& policy, const pruning::CycleSchedule& schedule, std::size_t cycle,
                    std::uint64_t seed) {
  if (n_samples == 0) {
    for (const auto& rec : log) {
      for (SampleId id : rec.indices) n_samples = std::max<std::size_t>(n_samples, std::size_t{id} + 1);
    }
  }
  if (n_samples == 0) throw std::invalid_argument("replay: empty log and no dataset size given");
  ReplayResult r{ScoreTable(n_samples, ema), {}, 0};
  for (const auto& rec : log) {
    r.table.apply_batch(rec.indices, rec.mean_loss, ema);
    ++r.records;
  }
  r.next = pruning::select_active_set(r.table, policy, cycle, schedule, seed);
  return r;
}

std::string replay_summary(const ReplayResult& r) {
  std::size_t rescaled = 0;
  for (SampleId id : r.next.kept()) {
    if (r.next.rescale(id) > 1.0) ++rescaled;
  }
  std::ostringstream os;
  os << "records=" << r.records << " samples=" << r.table.size() << " kept=" << r.next.kept_count()
     << " pruned=" << r.table.size() - r.next.kept_count() << " rescaled=" << rescaled
     << " pruned_fraction=" << format_real(r.next.pruned_fraction());
  return os.str();
}

std::string separation_summary(const spectral::SeparationReport& rep) {
  std::ostringstream os;
  os << "all_bins_noise_dominant=" << (rep.all_bins_noise_dominant ? "true" : "false")
     << " high_freq_ratio=" << format_real(rep.high_freq_ratio) << " low_freq_ratio=" << format_real(rep.low_freq_ratio)
     << " bins=" << rep.ratio.size();
  return os.str();
}

}  // namespace bls::io
