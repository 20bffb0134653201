#pragma once

#include "evmag/trace.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace evmag {

/// Simulated-time backstop for `run` when no --until is given.
inline constexpr SimTime kDefaultRunHorizonMs = 600'000;

/// Entry point behind the evmagsim binary; takes argv[1..] and the output
/// streams so tests can drive it in-process.
/// Exit codes: 0 success, 1 runtime/usage error, 2 scenario parse errors.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace evmag
