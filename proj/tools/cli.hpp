#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace bls::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

// Runs one subcommand (train, sweep-alpha, replay, psd, filter). args holds
// everything after the program name. Failures print a single
// "error: <kind>: <message>" line to `err`.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace bls::cli
