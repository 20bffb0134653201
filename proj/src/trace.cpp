#include "evmag/trace.hpp"

#include <charconv>
#include <cstdio>

namespace evmag {

std::string format_fixed(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

std::string TraceRecord::to_line() const {
    std::string line = "t=" + std::to_string(t) + " seq=" + std::to_string(seq) + " " + kind;
    for (const auto& [key, value] : attrs) {
        line += " ";
        line += key;
        line += "=";
        line += value;
    }
    return line;
}

namespace {

std::string_view next_token(std::string_view& rest) {
    while (!rest.empty() && rest.front() == ' ') {
        rest.remove_prefix(1);
    }
    const std::size_t end = rest.find(' ');
    std::string_view tok = rest.substr(0, end);
    rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
    return tok;
}

std::int64_t parse_keyed_int(std::string_view tok, std::string_view key) {
    if (tok.substr(0, key.size()) != key || tok.size() <= key.size() || tok[key.size()] != '=') {
        throw DomainError("trace line missing " + std::string(key) + "= field");
    }
    const std::string_view digits = tok.substr(key.size() + 1);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw DomainError("bad integer in trace field " + std::string(tok));
    }
    return value;
}

} // namespace

TraceRecord parse_trace_line(std::string_view line) {
    std::string_view rest = line;
    TraceRecord rec;
    rec.t = parse_keyed_int(next_token(rest), "t");
    rec.seq = static_cast<std::uint64_t>(parse_keyed_int(next_token(rest), "seq"));
    const std::string_view kind = next_token(rest);
    if (kind.empty()) {
        throw DomainError("trace line missing record kind: " + std::string(line));
    }
    rec.kind = std::string(kind);
    while (true) {
        while (!rest.empty() && rest.front() == ' ') {
            rest.remove_prefix(1);
        }
        if (rest.empty()) {
            break;
        }
        const std::size_t eq = rest.find('=');
        if (eq == std::string_view::npos) {
            throw DomainError("trace attribute without '=': " + std::string(rest));
        }
        const std::string key(rest.substr(0, eq));
        rest.remove_prefix(eq + 1);
        if (key == "text") {
            rec.attrs.emplace_back(key, std::string(rest)); // verbatim to end of line
            break;
        }
        const std::size_t end = rest.find(' ');
        rec.attrs.emplace_back(key, std::string(rest.substr(0, end)));
        rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
    }
    return rec;
}

std::string format_trace(const std::vector<TraceRecord>& records) {
    std::string out;
    for (const TraceRecord& rec : records) {
        out += rec.to_line();
        out += '\n';
    }
    return out;
}

std::vector<TraceRecord> parse_trace(std::string_view text) {
    std::vector<TraceRecord> records;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        const std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty()) {
            records.push_back(parse_trace_line(line));
        }
        pos = nl + 1;
    }
    return records;
}

} // namespace evmag
