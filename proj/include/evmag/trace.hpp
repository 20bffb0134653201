#pragma once

// =============================================================================
// Trace: the ordered, deterministic event log a simulation run produces.
// Text form, one record per line:
//
//   t=<ms> seq=<n> <KIND> k1=v1 k2=v2 ...
//
// Keys appear in fixed declaration order. Values never contain spaces, with
// one exception: a `text=` attribute is always last and runs verbatim to the
// end of the line (UI messages are logged word for word).
// =============================================================================

#include "evmag/errors.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evmag {

using SimTime = std::int64_t; // milliseconds

struct TraceRecord {
    SimTime t = 0;
    std::uint64_t seq = 0;
    std::string kind;
    std::vector<std::pair<std::string, std::string>> attrs;

    std::string to_line() const;
};

/// Fixed-point rendering used for every floating attribute (6 fractional digits).
std::string format_fixed(double value);

/// Parses one `t=.. seq=.. KIND k=v ...` line. Throws DomainError on malformed input.
TraceRecord parse_trace_line(std::string_view line);

/// Whole trace as text, one line per record, each newline-terminated.
std::string format_trace(const std::vector<TraceRecord>& records);

/// Parses a whole trace document (inverse of format_trace).
std::vector<TraceRecord> parse_trace(std::string_view text);

} // namespace evmag
