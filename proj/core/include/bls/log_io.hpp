#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bls/log_record.hpp"

namespace bls::io {

// Newline-delimited batch-loss log. Each line is one flat object:
//   {"step":0,"indices":[3,7],"mean_loss":1.5,"per_sample_losses":[1.0,2.0]}
// per_sample_losses is optional. Steps strictly increase from line to line.
// Blank lines are ignored.

// Parses one line. Throws ParseError (with `line_no`) on malformed input,
// unknown keys, duplicate indices, or per-sample losses whose mean differs
// from mean_loss by more than 1e-9 (relative to max(1, |mean_loss|)).
LogRecord parse_log_line(const std::string& line, std::size_t line_no = 0);

// Serializes with 17 significant digits so that parsing reproduces every
// double exactly. Throws std::invalid_argument on non-finite values.
std::string format_log_line(const LogRecord& rec);

// Streaming reader enforcing step order across lines.
class LogReader {
 public:
  explicit LogReader(std::istream& in) : in_(in) {}

  std::optional<LogRecord> next();
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::optional<std::uint64_t> last_step_;
};

std::vector<LogRecord> parse_log(std::istream& in);
// Throws std::runtime_error if the file cannot be opened.
std::vector<LogRecord> parse_log(const std::filesystem::path& path);

void write_log(std::ostream& out, std::span<const LogRecord> log);
void write_log(const std::filesystem::path& path, std::span<const LogRecord> log);

}  // namespace bls::io
