#include "cli.hpp"

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <exception>
#include <ostream>
#include <sstream>
#include <vector>

#include "bls/config.hpp"
#include "bls/errors.hpp"
#include "bls/log_io.hpp"
#include "bls/report.hpp"
#include "bls/signal.hpp"
#include "bls/spectral.hpp"
#include "bls/trainer.hpp"

namespace bls::cli {

namespace {

std::string policy_name(const pruning::PrunePolicy& p) {
  if (std::holds_alternative<pruning::ThresholdSoftPrune>(p)) return "threshold";
  if (std::holds_alternative<pruning::WindowSelect>(p)) return "window";
  return "none";
}

void run_train(const io::RunConfig& cfg, std::ostream& out) {
  const auto data = train::make_synthetic_dataset(cfg.dataset());
  auto tc = cfg.train();
  const std::string log_path = cfg.get("out.log");
  tc.keep_log = !log_path.empty();
  const auto metrics = train::run_experiment(data, cfg.model(), tc);

  const io::MetricsLabel label{cfg.get("model.arch"), policy_name(tc.policy), tc.ema.alpha, tc.epochs,
                               tc.batch_size, tc.seed};
  const std::string csv = io::metrics_header() + "\n" + io::metrics_row(label, metrics) + "\n";
  out << csv;
  if (const auto& path = cfg.get("out.metrics"); !path.empty()) {
    io::write_file(path, [&](std::ostream& f) { f << csv; });
  }
  if (!log_path.empty()) io::write_log(log_path, metrics.log);
}

void run_sweep(const io::RunConfig& cfg, std::ostream& out) {
  const auto data = train::make_synthetic_dataset(cfg.dataset());
  const auto alphas = cfg.get_real_list("sweep.alphas");
  const auto rows = train::alpha_sweep(data, cfg.model(), cfg.train(), alphas);
  io::write_sweep_csv(out, rows);
  if (const auto& path = cfg.get("out.sweep"); !path.empty()) {
    io::write_file(path, [&](std::ostream& f) { io::write_sweep_csv(f, rows); });
  }
}

void run_replay(const io::RunConfig& cfg, std::ostream& out) {
  const auto& path = cfg.get("replay.log");
  if (path.empty()) throw io::ConfigError("replay needs replay.log");
  const auto log = io::parse_log(std::filesystem::path(path));
  const auto tc = cfg.train();
  const auto result = io::replay(log, cfg.get_size("replay.n_samples"), tc.ema, tc.policy, tc.schedule(),
                                 cfg.get_size("replay.cycle"), tc.seed);
  io::write_file(cfg.get("out.scores"), [&](std::ostream& f) { io::write_scores_csv(f, result.table); });
  io::write_file(cfg.get("out.decisions"), [&](std::ostream& f) { io::write_decisions_csv(f, result.next); });
  out << io::replay_summary(result) << '\n';
}

void run_psd(const io::RunConfig& cfg, std::ostream& out) {
  const auto& path = cfg.get("psd.log");
  if (path.empty()) throw io::ConfigError("psd needs psd.log");
  const auto log = io::parse_log(std::filesystem::path(path));
  std::size_t n = 0;
  for (const auto& rec : log) {
    for (SampleId id : rec.indices) n = std::max<std::size_t>(n, std::size_t{id} + 1);
  }
  const auto runs = signal::decompose_run_all(log, n);
  std::vector<std::vector<double>> signal_seqs;
  std::vector<std::vector<double>> noise_seqs;
  for (const auto& r : runs) {
    signal_seqs.push_back(r.signal);
    noise_seqs.push_back(r.noise);
  }
  const auto welch = cfg.welch();
  const auto sig = spectral::mean_psd(signal_seqs, welch);
  const auto noi = spectral::mean_psd(noise_seqs, welch);
  const auto rep = spectral::separation_report(sig.psd, noi.psd);
  io::write_file(cfg.get("out.signal_psd"), [&](std::ostream& f) { io::write_psd_csv(f, sig.psd); });
  io::write_file(cfg.get("out.noise_psd"), [&](std::ostream& f) { io::write_psd_csv(f, noi.psd); });
  out << io::separation_summary(rep) << " sequences=" << sig.used << " dropped=" << sig.dropped << '\n';
}

void run_filter(const io::RunConfig& cfg, std::ostream& out) {
  const signal::FilterSpec spec(cfg.get_real("alpha"));
  const auto table = signal::frequency_response_table(spec, cfg.get_size("filter.points"));
  io::write_filter_csv(out, table);
}

// Range checks on every value-bearing section, so that a bad value is a
// config error rather than a failure midway through a run.
void validate_values(const io::RunConfig& cfg) {
  const auto data = cfg.dataset();
  data.validate();
  cfg.train().validate(data.n_samples * 4 / 5);
  cfg.welch().validate();
  static_cast<void>(signal::FilterSpec(cfg.get_real("alpha")));
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Batch Loss Score toolkit", "bls"};
  app.require_subcommand(1, 1);

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const io::RunConfig&, std::ostream&);
  };
  static constexpr Command kCommands[] = {
      {"train", "train on the synthetic task and print a metrics CSV row", run_train},
      {"sweep-alpha", "train once per EMA decay in sweep.alphas", run_sweep},
      {"replay", "replay a batch-loss log into scores and next-cycle decisions", run_replay},
      {"psd", "Welch PSD of the signal/noise split of an instrumented log", run_psd},
      {"filter", "tabulate the EMA filter's magnitude response", run_filter},
  };

  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : kCommands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--set", overrides, "override one key (key=value); repeatable")->take_all();
    subs.emplace_back(sub, &c);
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n' << app.help();
    return kUsage;
  }

  const Command* chosen = nullptr;
  for (const auto& [sub, cmd] : subs) {
    if (sub->parsed()) chosen = cmd;
  }

  io::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& o : overrides) cfg.set_assignment(o);
    validate_values(cfg);
  } catch (const std::invalid_argument& e) {
    err << "error: config: " << one_line(e.what()) << '\n';
    return kUsage;
  }

  try {
    chosen->run(cfg, out);
  } catch (const io::ConfigError& e) {
    err << "error: config: " << one_line(e.what()) << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: parse: " << one_line(e.what()) << '\n';
    return kFailure;
  } catch (const DivergenceError& e) {
    err << "error: divergence: " << one_line(e.what()) << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: runtime: " << one_line(e.what()) << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace bls::cli
