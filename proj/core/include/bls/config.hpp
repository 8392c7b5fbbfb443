#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bls/pruning.hpp"
#include "bls/score.hpp"
#include "bls/spectral.hpp"
#include "bls/trainer.hpp"

namespace bls::io {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ValueKind { kInt, kReal, kBool, kString, kRealList };

struct KeySpec {
  std::string_view name;
  ValueKind kind;
  std::string_view default_value;
  std::string_view doc;
  // Allowed spellings for enumerated string keys; empty means free text.
  std::vector<std::string_view> choices;
};

// Every recognised configuration key with its default.
std::span<const KeySpec> config_keys();

// Flat dotted-key configuration. Values are layered: defaults, then a
// `key = value` file (# starts a comment), then explicit overrides.
// Unknown keys and ill-typed values are rejected when set.
class RunConfig {
 public:
  RunConfig();

  void set(std::string_view key, std::string_view value);
  // "key=value" as given on the command line.
  void set_assignment(std::string_view assignment);
  void load_text(std::string_view text, const std::string& source = "<config>");
  void load_file(const std::filesystem::path& path);

  const std::string& get(std::string_view key) const;
  long long get_int(std::string_view key) const;
  std::size_t get_size(std::string_view key) const;
  double get_real(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<double> get_real_list(std::string_view key) const;

  train::DatasetSpec dataset() const;
  train::ModelSpec model() const;
  EmaConfig ema() const;
  pruning::PrunePolicy policy() const;
  train::TrainConfig train() const;
  spectral::WelchConfig welch() const;

  // Sorted "key = value" lines, suitable for load_text.
  std::string dump() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace bls::io
