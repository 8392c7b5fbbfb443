#include "bls/log_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "bls/errors.hpp"

namespace bls::io {

namespace {

using nlohmann::json;

void append_double(std::string& out, double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("log: cannot serialize non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

double as_number(const json& v, const char* key, std::size_t line_no) {
  if (!v.is_number()) throw ParseError(std::string("'") + key + "' must be a number", line_no);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(std::string("'") + key + "' must be finite", line_no);
  return d;
}

}  // namespace

LogRecord parse_log_line(const std::string& line, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed record: ") + e.what(), line_no);
  }
  if (!obj.is_object()) throw ParseError("record must be an object", line_no);

  for (const auto& [key, _] : obj.items()) {
    if (key != "step" && key != "indices" && key != "mean_loss" && key != "per_sample_losses") {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
  }
  for (const char* key : {"step", "indices", "mean_loss"}) {
    if (!obj.contains(key)) throw ParseError(std::string("missing key '") + key + "'", line_no);
  }

  LogRecord rec;
  const auto& step = obj["step"];
  if (!step.is_number_unsigned()) throw ParseError("'step' must be a non-negative integer", line_no);
  rec.step = step.get<std::uint64_t>();

  const auto& indices = obj["indices"];
  if (!indices.is_array() || indices.empty()) throw ParseError("'indices' must be a non-empty array", line_no);
  std::unordered_set<SampleId> seen;
  rec.indices.reserve(indices.size());
  for (const auto& v : indices) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > std::numeric_limits<SampleId>::max()) {
      throw ParseError("'indices' entries must be non-negative 32-bit integers", line_no);
    }
    const auto id = v.get<SampleId>();
    if (!seen.insert(id).second) throw ParseError("duplicate index " + std::to_string(id), line_no);
    rec.indices.push_back(id);
  }

  rec.mean_loss = as_number(obj["mean_loss"], "mean_loss", line_no);

  if (obj.contains("per_sample_losses")) {
    const auto& losses = obj["per_sample_losses"];
    if (!losses.is_array()) throw ParseError("'per_sample_losses' must be an array", line_no);
    if (losses.size() != rec.indices.size()) {
      throw ParseError("'per_sample_losses' has " + std::to_string(losses.size()) + " entries but 'indices' has " +
                           std::to_string(rec.indices.size()),
                       line_no);
    }
    std::vector<double> values;
    values.reserve(losses.size());
    double sum = 0.0;
    for (const auto& v : losses) {
      values.push_back(as_number(v, "per_sample_losses", line_no));
      sum += values.back();
    }
    const double mean = sum / static_cast<double>(values.size());
    if (std::abs(mean - rec.mean_loss) > 1e-9 * std::max(1.0, std::abs(rec.mean_loss))) {
      throw ParseError("consistency: mean of per_sample_losses differs from mean_loss", line_no);
    }
    rec.per_sample_losses = std::move(values);
  }
  return rec;
}

std::string format_log_line(const LogRecord& rec) {
  std::string out = "{\"step\":" + std::to_string(rec.step) + ",\"indices\":[";
  for (std::size_t i = 0; i < rec.indices.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(rec.indices[i]);
  }
  out += "],\"mean_loss\":";
  append_double(out, rec.mean_loss);
  if (rec.per_sample_losses) {
    out += ",\"per_sample_losses\":[";
    for (std::size_t i = 0; i < rec.per_sample_losses->size(); ++i) {
      if (i) out += ',';
      append_double(out, (*rec.per_sample_losses)[i]);
    }
    out += ']';
  }
  out += '}';
  return out;
}

std::optional<LogRecord> LogReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto rec = parse_log_line(line, line_);
    if (last_step_ && rec.step <= *last_step_) {
      throw ParseError("step " + std::to_string(rec.step) + " does not follow step " + std::to_string(*last_step_),
                       line_);
    }
    last_step_ = rec.step;
    return rec;
  }
  return std::nullopt;
}

std::vector<LogRecord> parse_log(std::istream& in) {
  LogReader reader(in);
  std::vector<LogRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

std::vector<LogRecord> parse_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log " + path.string());
  return parse_log(in);
}

void write_log(std::ostream& out, std::span<const LogRecord> log) {
  for (const auto& rec : log) out << format_log_line(rec) << '\n';
}

void write_log(const std::filesystem::path& path, std::span<const LogRecord> log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write log " + path.string());
  write_log(out, log);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace bls::io
