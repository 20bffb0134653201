#include "evmag/cli.hpp"

#include "evmag/csv.hpp"
#include "evmag/scenario.hpp"
#include "evmag/summary.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace evmag {

namespace {

const char* kUsage =
    "usage: evmagsim <command> ...\n"
    "  run <file.scn> [--trace <path>] [--csv <path>] [--until <ms>] [--seed <n>]\n"
    "  check <file.scn>\n"
    "  report <trace-file>\n";

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw IoError("cannot open: " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw IoError("cannot open for writing: " + path);
    }
    file << content;
    if (!file) {
        throw IoError("write failed: " + path);
    }
}

void print_parse_errors(const std::string& path, const std::vector<ParseError>& errors,
                        std::ostream& err) {
    for (const ParseError& e : errors) {
        err << path << ":" << e.to_string() << "\n";
    }
    err << errors.size() << " error(s) in " << path << "\n";
}

int cmd_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty()) {
        err << "run: missing scenario file\n" << kUsage;
        return 1;
    }
    const std::string path = args[0];
    std::optional<std::string> trace_path;
    std::optional<std::string> csv_path;
    SimTime until = kDefaultRunHorizonMs;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& flag = args[i];
        const auto take_value = [&](const char* name) -> std::optional<std::string> {
            if (i + 1 >= args.size()) {
                err << "run: " << name << " needs a value\n";
                return std::nullopt;
            }
            return args[++i];
        };
        if (flag == "--trace") {
            if (auto v = take_value("--trace")) {
                trace_path = *v;
            } else {
                return 1;
            }
        } else if (flag == "--csv") {
            if (auto v = take_value("--csv")) {
                csv_path = *v;
            } else {
                return 1;
            }
        } else if (flag == "--until" || flag == "--seed") {
            const auto v = take_value(flag.c_str());
            if (!v) {
                return 1;
            }
            std::int64_t value = 0;
            const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), value);
            if (ec != std::errc{} || ptr != v->data() + v->size() || value < 0) {
                err << "run: bad value for " << flag << ": " << *v << "\n";
                return 1;
            }
            if (flag == "--until") {
                until = value;
            }
            // --seed is accepted for interface stability; the engine is
            // deterministic and does not consume randomness.
        } else {
            err << "run: unknown flag " << flag << "\n" << kUsage;
            return 1;
        }
    }

    const std::string text = read_file(path);
    ParseResult parsed = parse_scenario(text);
    if (!parsed.ok()) {
        print_parse_errors(path, parsed.errors, err);
        return 2;
    }

    World world = make_world(*parsed.scenario);
    world.run_until(until);

    if (trace_path) {
        write_file(*trace_path, format_trace(world.trace()));
    }
    if (csv_path) {
        write_battery_csv(world.charge_records(), parsed.scenario->pack.cells, *csv_path);
    }
    out << summarize_trace(world.trace()).to_string() << "\n";
    return 0;
}

int cmd_check(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.size() != 1) {
        err << "check: expected exactly one scenario file\n" << kUsage;
        return 1;
    }
    const std::string text = read_file(args[0]);
    ParseResult parsed = parse_scenario(text);
    if (!parsed.ok()) {
        print_parse_errors(args[0], parsed.errors, err);
        return 2;
    }
    out << "ok: " << parsed.scenario->sockets.size() << " socket(s), "
        << parsed.scenario->events.size() << " event(s)\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.size() != 1) {
        err << "report: expected exactly one trace file\n" << kUsage;
        return 1;
    }
    const std::string text = read_file(args[0]);
    const std::vector<TraceRecord> records = parse_trace(text);
    out << summarize_trace(records).to_string() << "\n";
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.empty()) {
            err << kUsage;
            return 1;
        }
        const std::string& command = args[0];
        const std::vector<std::string> rest(args.begin() + 1, args.end());
        if (command == "run") {
            return cmd_run(rest, out, err);
        }
        if (command == "check") {
            return cmd_check(rest, out, err);
        }
        if (command == "report") {
            return cmd_report(rest, out, err);
        }
        err << "unknown command: " << command << "\n" << kUsage;
        return 1;
    } catch (const SimError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace evmag
