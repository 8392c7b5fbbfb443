#include "bls/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace bls::io {

namespace {

using K = ValueKind;

const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> keys = {
      {"data.n_samples", K::kInt, "2000", "total synthetic samples (80% train, 20% test)", {}},
      {"data.n_features", K::kInt, "20", "feature dimension", {}},
      {"data.n_classes", K::kInt, "5", "number of Gaussian clusters / classes", {}},
      {"data.cluster_spread", K::kReal, "2.0", "std-dev of points around their class center", {}},
      {"data.label_noise", K::kReal, "0.1", "fraction of training labels flipped to another class", {}},
      {"data.seed", K::kInt, "1", "dataset generation seed", {}},
      {"model.arch", K::kString, "softmax", "softmax | mlp", {"softmax", "mlp"}},
      {"model.hidden", K::kInt, "32", "hidden width for model.arch = mlp", {}},
      {"model.init_seed", K::kInt, "7", "parameter initialization seed", {}},
      {"train.epochs", K::kInt, "50", "training epochs", {}},
      {"train.batch_size", K::kInt, "32", "minibatch size B", {}},
      {"train.learning_rate", K::kReal, "0.1", "SGD step size", {}},
      {"train.cycle_len_epochs", K::kInt, "1", "epochs between pruning decisions", {}},
      {"train.instrument_per_sample", K::kBool, "false", "log per-sample losses (oracle mode)", {}},
      {"train.seed", K::kInt, "11", "sampler and pruning seed", {}},
      {"ema.alpha", K::kReal, "0.7", "EMA decay in (0, 1]; 0 scores by the last batch loss only", {}},
      {"ema.init", K::kString, "first_observed", "first_observed | fixed", {"first_observed", "fixed"}},
      {"ema.init_value", K::kReal, "0.0", "starting score for ema.init = fixed", {}},
      {"policy.kind", K::kString, "threshold", "none | threshold | window", {"none", "threshold", "window"}},
      {"policy.prune_prob", K::kReal, "0.6", "threshold: drop probability for below-mean samples", {}},
      {"policy.rescale", K::kBool, "true", "threshold: rescale kept below-mean samples by 1/(1-p)", {}},
      {"policy.anneal_tail", K::kReal, "0.125", "threshold: final fraction of epochs without pruning", {}},
      {"policy.keep_fraction", K::kReal, "0.7", "window: fraction of samples kept per cycle", {}},
      {"policy.progress", K::kString, "easy_to_hard", "window: easy_to_hard | static", {"easy_to_hard", "static"}},
      {"welch.segment_len", K::kInt, "64", "Welch segment length", {}},
      {"welch.overlap", K::kInt, "32", "Welch segment overlap", {}},
      {"welch.window", K::kString, "hann", "hann | rectangular", {"hann", "rectangular"}},
      {"welch.detrend", K::kString, "mean", "mean | none", {"mean", "none"}},
      {"alpha", K::kReal, "0.7", "filter: EMA decay whose frequency response is tabulated", {}},
      {"filter.points", K::kInt, "129", "filter: grid points over [0, pi]", {}},
      {"sweep.alphas", K::kRealList, "0.5,0.6,0.7,0.8,0.9,1.0", "sweep-alpha: comma-separated decay factors", {}},
      {"replay.log", K::kString, "", "replay: batch-loss log to replay", {}},
      {"replay.n_samples", K::kInt, "0", "replay: dataset size (0 = largest index + 1)", {}},
      {"replay.cycle", K::kInt, "0", "replay: cycle index passed to the pruning policy", {}},
      {"psd.log", K::kString, "", "psd: instrumented batch-loss log", {}},
      {"out.metrics", K::kString, "", "train: also write the metrics CSV here", {}},
      {"out.log", K::kString, "", "train: write the batch-loss log here", {}},
      {"out.sweep", K::kString, "", "sweep-alpha: also write the sweep CSV here", {}},
      {"out.scores", K::kString, "scores.csv", "replay: score table CSV", {}},
      {"out.decisions", K::kString, "decisions.csv", "replay: keep/prune decisions CSV", {}},
      {"out.signal_psd", K::kString, "signal_psd.csv", "psd: mean signal PSD CSV", {}},
      {"out.noise_psd", K::kString, "noise_psd.csv", "psd: mean noise PSD CSV", {}},
  };
  return keys;
}

const KeySpec* find_key(std::string_view name) {
  const auto& keys = registry();
  auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == name; });
  return it == keys.end() ? nullptr : &*it;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    out = false;
    return true;
  }
  return false;
}

bool parse_list(std::string_view s, std::vector<double>& out) {
  out.clear();
  while (true) {
    const auto comma = s.find(',');
    double v = 0.0;
    if (!parse_number(s.substr(0, comma), v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) return true;
    s.remove_prefix(comma + 1);
  }
}

void check_value(const KeySpec& spec, std::string_view value) {
  bool ok = true;
  switch (spec.kind) {
    case K::kInt: {
      long long v = 0;
      ok = parse_number(value, v);
      break;
    }
    case K::kReal: {
      double v = 0.0;
      ok = parse_number(value, v);
      break;
    }
    case K::kBool: {
      bool v = false;
      ok = parse_bool(value, v);
      break;
    }
    case K::kRealList: {
      std::vector<double> v;
      ok = parse_list(value, v);
      break;
    }
    case K::kString:
      ok = spec.choices.empty() ||
           std::find(spec.choices.begin(), spec.choices.end(), value) != spec.choices.end();
      break;
  }
  if (!ok) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(spec.name) + "' (" +
                      std::string(spec.doc) + ")");
  }
}

}  // namespace

std::span<const KeySpec> config_keys() { return registry(); }

RunConfig::RunConfig() {
  for (const auto& k : registry()) values_.emplace(std::string(k.name), std::string(k.default_value));
}

void RunConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("unknown config key '" + std::string(key) + "'");
  check_value(*spec, value);
  values_.find(key)->second = std::string(value);
}

void RunConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void RunConfig::load_text(std::string_view text, const std::string& source) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      set_assignment(line);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path.string());
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

long long RunConfig::get_int(std::string_view key) const {
  long long v = 0;
  if (!parse_number(get(key), v)) throw ConfigError("key '" + std::string(key) + "' is not an integer");
  return v;
}

std::size_t RunConfig::get_size(std::string_view key) const {
  const long long v = get_int(key);
  if (v < 0) throw ConfigError("key '" + std::string(key) + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

double RunConfig::get_real(std::string_view key) const {
  double v = 0.0;
  if (!parse_number(get(key), v)) throw ConfigError("key '" + std::string(key) + "' is not a number");
  return v;
}

bool RunConfig::get_bool(std::string_view key) const {
  bool v = false;
  if (!parse_bool(get(key), v)) throw ConfigError("key '" + std::string(key) + "' is not a boolean");
  return v;
}

std::vector<double> RunConfig::get_real_list(std::string_view key) const {
  std::vector<double> v;
  if (!parse_list(get(key), v)) throw ConfigError("key '" + std::string(key) + "' is not a number list");
  return v;
}

train::DatasetSpec RunConfig::dataset() const {
  train::DatasetSpec s;
  s.n_samples = get_size("data.n_samples");
  s.n_features = get_size("data.n_features");
  s.n_classes = get_size("data.n_classes");
  s.cluster_spread = get_real("data.cluster_spread");
  s.label_noise = get_real("data.label_noise");
  s.seed = get_size("data.seed");
  return s;
}

train::ModelSpec RunConfig::model() const {
  train::ModelSpec m;
  if (get("model.arch") == "mlp") {
    m.arch = train::Mlp{get_size("model.hidden")};
  } else {
    m.arch = train::Softmax{};
  }
  m.init_seed = get_size("model.init_seed");
  return m;
}

EmaConfig RunConfig::ema() const {
  EmaConfig e;
  e.alpha = get_real("ema.alpha");
  e.init = get("ema.init") == "fixed" ? InitPolicy::kFixedValue : InitPolicy::kFirstObservedBatchLoss;
  e.init_value = get_real("ema.init_value");
  return e;
}

pruning::PrunePolicy RunConfig::policy() const {
  const auto& kind = get("policy.kind");
  if (kind == "threshold") {
    return pruning::ThresholdSoftPrune{get_real("policy.prune_prob"), get_bool("policy.rescale"),
                                       get_real("policy.anneal_tail")};
  }
  if (kind == "window") {
    return pruning::WindowSelect{get_real("policy.keep_fraction"), get("policy.progress") == "static"
                                                                      ? pruning::Progress::kStatic
                                                                      : pruning::Progress::kEasyToHard};
  }
  return pruning::NoPruning{};
}

train::TrainConfig RunConfig::train() const {
  train::TrainConfig t;
  t.epochs = get_size("train.epochs");
  t.batch_size = get_size("train.batch_size");
  t.learning_rate = get_real("train.learning_rate");
  t.cycle_len_epochs = get_size("train.cycle_len_epochs");
  t.instrument_per_sample = get_bool("train.instrument_per_sample");
  t.seed = get_size("train.seed");
  t.ema = ema();
  t.policy = policy();
  return t;
}

spectral::WelchConfig RunConfig::welch() const {
  spectral::WelchConfig w;
  w.segment_len = get_size("welch.segment_len");
  w.overlap = get_size("welch.overlap");
  w.window = get("welch.window") == "rectangular" ? spectral::Window::kRectangular : spectral::Window::kHann;
  w.detrend = get("welch.detrend") == "none" ? spectral::Detrend::kNone : spectral::Detrend::kMeanRemoval;
  return w;
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace bls::io
