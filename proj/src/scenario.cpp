#include "evmag/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace evmag {

namespace {

// Shortest exact decimal form; reparsing gives back the identical double.
std::string fmt_num(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string fmt_vec(const Vec2& v) {
    return fmt_num(v.x) + "," + fmt_num(v.y);
}

struct Token {
    std::string text;
    int column = 0; // 1-based start position in the raw line
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        tokens.push_back(Token{std::string(line.substr(start, i - start)),
                               static_cast<int>(start) + 1});
    }
    return tokens;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ParseResult run();

private:
    struct Field {
        std::string value;
        int column = 0;
        bool used = false;
    };
    using Fields = std::map<std::string, Field>;

    void error(int line, int column, const std::string& message) {
        errors_.push_back(ParseError{line, column, message});
    }

    // Splits `key=value` tokens; bare words are rejected.
    Fields collect_fields(const std::vector<Token>& tokens, std::size_t from, int line);
    void check_unused(const Fields& fields, int line);

    std::optional<double> parse_float(const Field& f, int line, const std::string& key);
    std::optional<std::int64_t> parse_int(const Field& f, int line, const std::string& key);
    std::optional<Vec2> parse_pair(const Field& f, int line, const std::string& key);
    std::optional<std::vector<double>> parse_float_list(const Field& f, int line,
                                                        const std::string& key);

    void parse_pack(const std::vector<Token>& tokens, int line);
    void parse_socket(const std::vector<Token>& tokens, int line);
    void parse_policy(const std::vector<Token>& tokens, int line);
    void parse_interlock(const std::vector<Token>& tokens, int line);
    void parse_set(const std::vector<Token>& tokens, int line);
    void parse_at(const std::vector<Token>& tokens, int line);

    std::string_view text_;
    std::vector<ParseError> errors_;
    Scenario scenario_;
    bool pack_seen_ = false;
    bool policy_seen_ = false;
    bool interlock_seen_ = false;
    bool pack_soc_given_ = false;
    std::map<int, int> socket_lines_;              // id -> declaring line
    std::vector<std::pair<int, int>> plug_refs_;   // (socket id, line)
};

Parser::Fields Parser::collect_fields(const std::vector<Token>& tokens, std::size_t from,
                                      int line) {
    Fields fields;
    for (std::size_t i = from; i < tokens.size(); ++i) {
        const Token& tok = tokens[i];
        const std::size_t eq = tok.text.find('=');
        if (eq == std::string::npos || eq == 0) {
            error(line, tok.column, "expected key=value, got '" + tok.text + "'");
            continue;
        }
        const std::string key = tok.text.substr(0, eq);
        if (fields.count(key) != 0) {
            error(line, tok.column, "duplicate key '" + key + "'");
            continue;
        }
        fields[key] = Field{tok.text.substr(eq + 1), tok.column, false};
    }
    return fields;
}

void Parser::check_unused(const Fields& fields, int line) {
    for (const auto& [key, field] : fields) {
        if (!field.used) {
            error(line, field.column, "unknown key '" + key + "'");
        }
    }
}

std::optional<double> Parser::parse_float(const Field& f, int line, const std::string& key) {
    double value = 0.0;
    const char* begin = f.value.data();
    const char* end = begin + f.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || f.value.empty()) {
        error(line, f.column, "bad number for '" + key + "': '" + f.value + "'");
        return std::nullopt;
    }
    return value;
}

std::optional<std::int64_t> Parser::parse_int(const Field& f, int line, const std::string& key) {
    std::int64_t value = 0;
    const char* begin = f.value.data();
    const char* end = begin + f.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || f.value.empty()) {
        error(line, f.column, "bad integer for '" + key + "': '" + f.value + "'");
        return std::nullopt;
    }
    return value;
}

std::optional<Vec2> Parser::parse_pair(const Field& f, int line, const std::string& key) {
    const std::size_t comma = f.value.find(',');
    if (comma == std::string::npos) {
        error(line, f.column, "'" + key + "' needs two comma-separated numbers");
        return std::nullopt;
    }
    Field fx{f.value.substr(0, comma), f.column, true};
    Field fy{f.value.substr(comma + 1), f.column, true};
    const auto x = parse_float(fx, line, key);
    const auto y = parse_float(fy, line, key);
    if (!x || !y) {
        return std::nullopt;
    }
    return Vec2{*x, *y};
}

std::optional<std::vector<double>> Parser::parse_float_list(const Field& f, int line,
                                                            const std::string& key) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= f.value.size()) {
        std::size_t comma = f.value.find(',', pos);
        if (comma == std::string::npos) {
            comma = f.value.size();
        }
        Field item{f.value.substr(pos, comma - pos), f.column, true};
        const auto v = parse_float(item, line, key);
        if (!v) {
            return std::nullopt;
        }
        values.push_back(*v);
        pos = comma + 1;
        if (comma == f.value.size()) {
            break;
        }
    }
    return values;
}

void Parser::parse_pack(const std::vector<Token>& tokens, int line) {
    if (pack_seen_) {
        error(line, tokens[0].column, "duplicate pack declaration");
        return;
    }
    pack_seen_ = true;
    Fields fields = collect_fields(tokens, 1, line);
    PackConfig pack;

    const auto take_float = [&](const char* key, double& out, auto predicate,
                                const char* constraint) {
        auto it = fields.find(key);
        if (it == fields.end()) {
            error(line, tokens[0].column, std::string("pack is missing '") + key + "'");
            return;
        }
        it->second.used = true;
        if (const auto v = parse_float(it->second, line, key)) {
            if (!predicate(*v)) {
                error(line, it->second.column, std::string("'") + key + "' " + constraint);
            } else {
                out = *v;
            }
        }
    };

    if (auto it = fields.find("cells"); it != fields.end()) {
        it->second.used = true;
        if (const auto v = parse_int(it->second, line, "cells")) {
            if (*v < 1 || *v > 1024) {
                error(line, it->second.column, "'cells' must be in [1, 1024]");
            } else {
                pack.cells = static_cast<int>(*v);
            }
        }
    } else {
        error(line, tokens[0].column, "pack is missing 'cells'");
    }
    take_float("capacity_ah", pack.params.capacity_ah,
               [](double v) { return v > 0.0; }, "must be positive");
    take_float("vmin", pack.params.v_min, [](double) { return true; }, "");
    take_float("vmax", pack.params.v_max, [](double) { return true; }, "");
    take_float("rint", pack.params.r_int_ohm, [](double v) { return v >= 0.0; },
               "must be >= 0");
    if (pack.params.v_max <= pack.params.v_min) {
        error(line, tokens[0].column, "pack needs vmax > vmin");
    }

    if (auto it = fields.find("soc"); it != fields.end()) {
        it->second.used = true;
        pack_soc_given_ = true;
        if (const auto socs = parse_float_list(it->second, line, "soc")) {
            if (static_cast<int>(socs->size()) != pack.cells) {
                error(line, it->second.column,
                      "soc list has " + std::to_string(socs->size()) + " entries for " +
                          std::to_string(pack.cells) + " cells");
            } else {
                for (double s : *socs) {
                    if (s < 0.0 || s > 1.0) {
                        error(line, it->second.column, "soc entries must be in [0, 1]");
                        break;
                    }
                }
                pack.initial_soc = *socs;
            }
        }
    }
    if (!pack_soc_given_) {
        pack.initial_soc.assign(static_cast<std::size_t>(pack.cells), 0.2);
    }
    check_unused(fields, line);
    scenario_.pack = pack;
}

void Parser::parse_socket(const std::vector<Token>& tokens, int line) {
    Fields fields = collect_fields(tokens, 1, line);
    SocketSpec socket;
    bool have_id = false;

    if (auto it = fields.find("id"); it != fields.end()) {
        it->second.used = true;
        if (const auto v = parse_int(it->second, line, "id")) {
            socket.id = static_cast<int>(*v);
            have_id = true;
            if (auto prev = socket_lines_.find(socket.id); prev != socket_lines_.end()) {
                error(line, it->second.column,
                      "duplicate socket id " + std::to_string(socket.id) +
                          " (first declared at line " + std::to_string(prev->second) + ")");
                have_id = false;
            }
        }
    } else {
        error(line, tokens[0].column, "socket is missing 'id'");
    }

    bool have_location = false;
    if (auto it = fields.find("location"); it != fields.end()) {
        it->second.used = true;
        if (it->second.value == "front") {
            socket.location = SocketLocation::Front;
            have_location = true;
        } else if (it->second.value == "driver") {
            socket.location = SocketLocation::DriverSide;
            have_location = true;
        } else if (it->second.value == "rear") {
            socket.location = SocketLocation::RearSide;
            have_location = true;
        } else {
            error(line, it->second.column,
                  "location must be front, driver or rear, got '" + it->second.value + "'");
        }
    } else {
        error(line, tokens[0].column, "socket is missing 'location'");
    }
    if (have_location) {
        socket.escape_direction = default_escape_direction(socket.location);
    }

    if (auto it = fields.find("escape"); it != fields.end()) {
        it->second.used = true;
        if (const auto v = parse_pair(it->second, line, "escape")) {
            if (norm(*v) == 0.0) {
                error(line, it->second.column, "escape direction must be nonzero");
            } else {
                socket.escape_direction = is_unit(*v) ? *v : normalized(*v);
            }
        }
    }
    if (auto it = fields.find("aperture"); it != fields.end()) {
        it->second.used = true;
        if (const auto v = parse_float(it->second, line, "aperture")) {
            if (!(*v > 0.0) || *v > 90.0) {
                error(line, it->second.column, "aperture must be in (0, 90]");
            } else {
                socket.aperture_half_angle_deg = *v;
            }
        }
    }
    if (auto it = fields.find("rmax"); it != fields.end()) {
        it->second.used = true;
        if (const auto v = parse_float(it->second, line, "rmax")) {
            if (!(*v > 0.0)) {
                error(line, it->second.column, "rmax must be positive");
            } else {
                socket.r_max_mm = *v;
            }
        }
    }
    check_unused(fields, line);
    if (have_id) {
        socket_lines_[socket.id] = line;
        scenario_.sockets.push_back(socket);
    }
}

void Parser::parse_policy(const std::vector<Token>& tokens, int line) {
    if (policy_seen_) {
        error(line, tokens[0].column, "duplicate policy declaration");
        return;
    }
    policy_seen_ = true;
    if (tokens.size() < 2) {
        error(line, tokens[0].column, "policy needs electromagnet, hall or alarm");
        return;
    }
    const std::string& which = tokens[1].text;
    Fields fields = collect_fields(tokens, 2, line);
    if (which == "electromagnet") {
        scenario_.policy = SafetyPolicy::electromagnet();
    } else if (which == "hall") {
        auto it = fields.find("threshold_a");
        if (it == fields.end()) {
            error(line, tokens[1].column, "hall policy needs threshold_a");
        } else {
            it->second.used = true;
            if (const auto v = parse_float(it->second, line, "threshold_a")) {
                if (!(*v > 0.0)) {
                    error(line, it->second.column, "threshold_a must be positive");
                } else {
                    scenario_.policy = SafetyPolicy::hall_resistance(*v);
                }
            }
        }
    } else if (which == "alarm") {
        auto it = fields.find("threshold_n");
        if (it == fields.end()) {
            error(line, tokens[1].column, "alarm policy needs threshold_n");
        } else {
            it->second.used = true;
            if (const auto v = parse_float(it->second, line, "threshold_n")) {
                if (!(*v > 0.0)) {
                    error(line, it->second.column, "threshold_n must be positive");
                } else {
                    scenario_.policy = SafetyPolicy::alarm_only(*v);
                }
            }
        }
    } else {
        error(line, tokens[1].column, "unknown policy '" + which + "'");
    }
    check_unused(fields, line);
}

void Parser::parse_interlock(const std::vector<Token>& tokens, int line) {
    if (interlock_seen_) {
        error(line, tokens[0].column, "duplicate interlock declaration");
        return;
    }
    interlock_seen_ = true;
    if (tokens.size() != 2 || (tokens[1].text != "on" && tokens[1].text != "off")) {
        error(line, tokens.size() > 1 ? tokens[1].column : tokens[0].column,
              "interlock must be 'on' or 'off'");
        return;
    }
    scenario_.interlock = tokens[1].text == "on";
}

void Parser::parse_set(const std::vector<Token>& tokens, int line) {
    if (tokens.size() != 2) {
        error(line, tokens[0].column, "set needs exactly one param=value");
        return;
    }
    Fields fields = collect_fields(tokens, 1, line);
    if (fields.empty()) {
        return; // collect_fields already reported
    }
    auto& [key, field] = *fields.begin();
    field.used = true;
    EngineParams& p = scenario_.params;

    const auto set_float = [&](double& out, auto predicate, const char* constraint) {
        if (const auto v = parse_float(field, line, key)) {
            if (!predicate(*v)) {
                error(line, field.column, "'" + key + "' " + constraint);
            } else {
                out = *v;
            }
        }
    };

    if (key == "omega") {
        set_float(p.omega_deg_per_ms, [](double v) { return v > 0.0; }, "must be positive");
    } else if (key == "tick_interval") {
        if (const auto v = parse_int(field, line, key)) {
            if (*v < 1) {
                error(line, field.column, "'tick_interval' must be >= 1 ms");
            } else {
                p.tick_interval_ms = *v;
            }
        }
    } else if (key == "align_threshold") {
        set_float(p.motion.align_threshold, [](double v) { return v > 0.0 && v <= 1.0; },
                  "must be in (0, 1]");
    } else if (key == "k_tension") {
        set_float(p.motion.k_tension_n_per_mm, [](double v) { return v > 0.0; },
                  "must be positive");
    } else if (key == "t_damage") {
        set_float(p.motion.t_damage_n, [](double v) { return v > 0.0; }, "must be positive");
    } else if (key == "charge_current") {
        set_float(p.charge_current_a, [](double v) { return v >= 0.0; }, "must be >= 0");
    } else if (key == "drive_speed") {
        set_float(p.drive_speed_mps, [](double v) { return v >= 0.0; }, "must be >= 0");
    } else if (key == "drive_direction") {
        if (const auto v = parse_pair(field, line, key)) {
            if (norm(*v) == 0.0) {
                error(line, field.column, "'drive_direction' must be nonzero");
            } else {
                p.drive_direction = is_unit(*v) ? *v : normalized(*v);
            }
        }
    } else if (key == "debounce") {
        if (const auto v = parse_int(field, line, key)) {
            if (*v < 1) {
                error(line, field.column, "'debounce' must be >= 1");
            } else {
                p.n_debounce = static_cast<int>(*v);
            }
        }
    } else if (key == "speed_epsilon") {
        set_float(p.speed_epsilon_mps, [](double v) { return v >= 0.0; }, "must be >= 0");
    } else if (key == "hall_r0") {
        set_float(p.hall_r0_ohm, [](double v) { return v > 0.0; }, "must be positive");
    } else if (key == "hall_k") {
        set_float(p.hall_k_per_newton, [](double v) { return v >= 0.0; }, "must be >= 0");
    } else if (key == "hall_supply_offset") {
        set_float(p.hall_supply_offset_v, [](double v) { return v > 0.0; }, "must be positive");
    } else if (key == "plug_gap") {
        set_float(p.plug_gap_mm, [](double v) { return v >= 0.0; }, "must be >= 0");
    } else if (key == "plug_polarity" || key == "socket_pole") {
        Polarity pole;
        if (field.value == "north") {
            pole = Polarity::North;
        } else if (field.value == "south") {
            pole = Polarity::South;
        } else {
            error(line, field.column, "'" + key + "' must be north or south");
            return;
        }
        if (key == "plug_polarity") {
            p.plug_polarity = pole;
        } else {
            p.socket_pole_override = pole;
        }
    } else {
        error(line, field.column, "unknown parameter '" + key + "'");
    }
}

void Parser::parse_at(const std::vector<Token>& tokens, int line) {
    if (tokens.size() < 3) {
        error(line, tokens[0].column, "at needs a time and an action");
        return;
    }
    const Token& time_tok = tokens[1];
    SimTime t = 0;
    {
        std::string_view tv = time_tok.text;
        if (tv.size() < 3 || tv.substr(tv.size() - 2) != "ms") {
            error(line, time_tok.column, "time must look like <int>ms, got '" + time_tok.text + "'");
            return;
        }
        tv.remove_suffix(2);
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(tv.data(), tv.data() + tv.size(), value);
        if (ec != std::errc{} || ptr != tv.data() + tv.size()) {
            error(line, time_tok.column, "bad time '" + time_tok.text + "'");
            return;
        }
        if (value < 0) {
            error(line, time_tok.column, "time must be >= 0");
            return;
        }
        t = value;
    }

    const std::string& action = tokens[2].text;
    ScenarioEvent event;
    event.t = t;

    if (action == "plug") {
        Fields fields = collect_fields(tokens, 3, line);
        event.kind = ScenarioEvent::Kind::Plug;
        if (auto it = fields.find("socket"); it != fields.end()) {
            it->second.used = true;
            if (const auto v = parse_int(it->second, line, "socket")) {
                event.socket_id = static_cast<int>(*v);
                plug_refs_.emplace_back(event.socket_id, line);
            } else {
                check_unused(fields, line);
                return;
            }
        } else {
            error(line, tokens[2].column, "plug needs socket=<id>");
            check_unused(fields, line);
            return;
        }
        if (auto it = fields.find("angle"); it != fields.end()) {
            it->second.used = true;
            if (const auto v = parse_float(it->second, line, "angle")) {
                event.angle_deg = *v;
            }
        }
        check_unused(fields, line);
    } else if (action == "vehicle") {
        event.kind = ScenarioEvent::Kind::Vehicle;
        if (tokens.size() != 4 || (tokens[3].text != "static" && tokens[3].text != "start")) {
            error(line, tokens.size() > 3 ? tokens[3].column : tokens[2].column,
                  "vehicle must be 'static' or 'start'");
            return;
        }
        event.vehicle = tokens[3].text == "start" ? VehicleState::Start : VehicleState::Static;
    } else if (action == "move") {
        event.kind = ScenarioEvent::Kind::Move;
        Fields fields = collect_fields(tokens, 3, line);
        bool ok = true;
        if (auto it = fields.find("dir"); it != fields.end()) {
            it->second.used = true;
            if (const auto v = parse_pair(it->second, line, "dir")) {
                if (norm(*v) == 0.0) {
                    error(line, it->second.column, "'dir' must be nonzero");
                    ok = false;
                } else {
                    event.dir = is_unit(*v) ? *v : normalized(*v);
                }
            } else {
                ok = false;
            }
        } else {
            error(line, tokens[2].column, "move needs dir=<x>,<y>");
            ok = false;
        }
        if (auto it = fields.find("dist"); it != fields.end()) {
            it->second.used = true;
            if (const auto v = parse_float(it->second, line, "dist")) {
                if (*v < 0.0) {
                    error(line, it->second.column, "'dist' must be >= 0");
                    ok = false;
                } else {
                    event.dist_mm = *v;
                }
            } else {
                ok = false;
            }
        } else {
            error(line, tokens[2].column, "move needs dist=<mm>");
            ok = false;
        }
        check_unused(fields, line);
        if (!ok) {
            return;
        }
    } else if (action == "fault") {
        event.kind = ScenarioEvent::Kind::Fault;
        if (tokens.size() < 4) {
            error(line, tokens[2].column, "fault needs driveoff, stuckmagnet or dropout");
            return;
        }
        const std::string& which = tokens[3].text;
        Fields fields = collect_fields(tokens, 4, line);
        if (which == "driveoff") {
            event.fault = FaultKind::DriveOffWhileCharging;
        } else if (which == "stuckmagnet") {
            event.fault = FaultKind::StuckElectromagnet;
        } else if (which == "dropout") {
            event.fault = FaultKind::SensorDropout;
            if (auto it = fields.find("ms"); it != fields.end()) {
                it->second.used = true;
                if (const auto v = parse_int(it->second, line, "ms")) {
                    if (*v <= 0) {
                        error(line, it->second.column, "dropout duration must be positive");
                    } else {
                        event.dropout_ms = *v;
                    }
                }
            } else {
                error(line, tokens[3].column, "dropout needs ms=<duration>");
            }
        } else {
            error(line, tokens[3].column, "unknown fault '" + which + "'");
            check_unused(fields, line);
            return;
        }
        check_unused(fields, line);
    } else {
        error(line, tokens[2].column, "unknown action '" + action + "'");
        return;
    }
    scenario_.events.push_back(event);
}

ParseResult Parser::run() {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
        std::size_t nl = text_.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text_.size();
        }
        std::string_view raw = text_.substr(pos, nl - pos);
        ++line_no;
        pos = nl + 1;
        if (pos > text_.size() && raw.empty()) {
            break;
        }
        const std::size_t hash = raw.find('#');
        if (hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        const std::vector<Token> tokens = tokenize(raw);
        if (tokens.empty()) {
            continue;
        }
        const std::string& directive = tokens[0].text;
        if (directive == "pack") {
            parse_pack(tokens, line_no);
        } else if (directive == "socket") {
            parse_socket(tokens, line_no);
        } else if (directive == "policy") {
            parse_policy(tokens, line_no);
        } else if (directive == "interlock") {
            parse_interlock(tokens, line_no);
        } else if (directive == "set") {
            parse_set(tokens, line_no);
        } else if (directive == "at") {
            parse_at(tokens, line_no);
        } else {
            error(line_no, tokens[0].column, "unknown directive '" + directive + "'");
        }
    }

    // Referential checks.
    for (const auto& [socket_id, line] : plug_refs_) {
        if (socket_lines_.count(socket_id) == 0) {
            error(line, 1, "undeclared socket " + std::to_string(socket_id));
        }
    }

    if (!pack_seen_) {
        scenario_.pack.initial_soc.assign(static_cast<std::size_t>(scenario_.pack.cells), 0.2);
    }
    std::stable_sort(scenario_.events.begin(), scenario_.events.end(),
                     [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.t < b.t; });

    ParseResult result;
    std::sort(errors_.begin(), errors_.end(), [](const ParseError& a, const ParseError& b) {
        return a.line != b.line ? a.line < b.line : a.column < b.column;
    });
    result.errors = std::move(errors_);
    if (result.errors.empty()) {
        result.scenario = std::move(scenario_);
    }
    return result;
}

} // namespace

std::string ParseError::to_string() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

ParseResult parse_scenario(std::string_view text) {
    return Parser(text).run();
}

std::string serialize_scenario(const Scenario& s) {
    std::string out;
    out += "pack cells=" + std::to_string(s.pack.cells) +
           " capacity_ah=" + fmt_num(s.pack.params.capacity_ah) +
           " vmin=" + fmt_num(s.pack.params.v_min) + " vmax=" + fmt_num(s.pack.params.v_max) +
           " rint=" + fmt_num(s.pack.params.r_int_ohm) + " soc=";
    for (std::size_t i = 0; i < s.pack.initial_soc.size(); ++i) {
        if (i != 0) {
            out += ",";
        }
        out += fmt_num(s.pack.initial_soc[i]);
    }
    out += "\n";

    std::vector<SocketSpec> sockets = s.sockets;
    std::sort(sockets.begin(), sockets.end(),
              [](const SocketSpec& a, const SocketSpec& b) { return a.id < b.id; });
    for (const SocketSpec& socket : sockets) {
        out += "socket id=" + std::to_string(socket.id) +
               " location=" + to_string(socket.location) +
               " escape=" + fmt_vec(socket.escape_direction) +
               " aperture=" + fmt_num(socket.aperture_half_angle_deg) +
               " rmax=" + fmt_num(socket.r_max_mm) + "\n";
    }

    switch (s.policy.kind()) {
    case SafetyPolicy::Kind::Electromagnet:
        out += "policy electromagnet\n";
        break;
    case SafetyPolicy::Kind::HallResistance:
        out += "policy hall threshold_a=" + fmt_num(s.policy.threshold_current_a()) + "\n";
        break;
    case SafetyPolicy::Kind::AlarmOnly:
        out += "policy alarm threshold_n=" + fmt_num(s.policy.threshold_tension_n()) + "\n";
        break;
    }
    out += std::string("interlock ") + (s.interlock ? "on" : "off") + "\n";

    const EngineParams& p = s.params;
    out += "set align_threshold=" + fmt_num(p.motion.align_threshold) + "\n";
    out += "set charge_current=" + fmt_num(p.charge_current_a) + "\n";
    out += "set debounce=" + std::to_string(p.n_debounce) + "\n";
    out += "set drive_direction=" + fmt_vec(p.drive_direction) + "\n";
    out += "set drive_speed=" + fmt_num(p.drive_speed_mps) + "\n";
    out += "set hall_k=" + fmt_num(p.hall_k_per_newton) + "\n";
    out += "set hall_r0=" + fmt_num(p.hall_r0_ohm) + "\n";
    out += "set hall_supply_offset=" + fmt_num(p.hall_supply_offset_v) + "\n";
    out += "set k_tension=" + fmt_num(p.motion.k_tension_n_per_mm) + "\n";
    out += "set omega=" + fmt_num(p.omega_deg_per_ms) + "\n";
    out += "set plug_gap=" + fmt_num(p.plug_gap_mm) + "\n";
    out += std::string("set plug_polarity=") + to_string(p.plug_polarity) + "\n";
    if (p.socket_pole_override) {
        out += std::string("set socket_pole=") + to_string(*p.socket_pole_override) + "\n";
    }
    out += "set speed_epsilon=" + fmt_num(p.speed_epsilon_mps) + "\n";
    out += "set t_damage=" + fmt_num(p.motion.t_damage_n) + "\n";
    out += "set tick_interval=" + std::to_string(p.tick_interval_ms) + "\n";

    for (const ScenarioEvent& e : s.events) {
        out += "at " + std::to_string(e.t) + "ms ";
        switch (e.kind) {
        case ScenarioEvent::Kind::Plug:
            out += "plug socket=" + std::to_string(e.socket_id) + " angle=" + fmt_num(e.angle_deg);
            break;
        case ScenarioEvent::Kind::Vehicle:
            out += std::string("vehicle ") + to_string(e.vehicle);
            break;
        case ScenarioEvent::Kind::Move:
            out += "move dir=" + fmt_vec(e.dir) + " dist=" + fmt_num(e.dist_mm);
            break;
        case ScenarioEvent::Kind::Fault:
            out += std::string("fault ") + to_string(e.fault);
            if (e.fault == FaultKind::SensorDropout) {
                out += " ms=" + std::to_string(e.dropout_ms);
            }
            break;
        }
        out += "\n";
    }
    return out;
}

WorldConfig Scenario::to_world_config() const {
    WorldConfig config;
    config.pack = PackState::make(pack.params, pack.initial_soc, 0.0);
    config.sockets = sockets;
    config.policy = policy;
    config.interlock_enabled = interlock;
    config.params = params;
    return config;
}

World make_world(const Scenario& scenario) {
    World world(scenario.to_world_config());
    for (const ScenarioEvent& e : scenario.events) {
        switch (e.kind) {
        case ScenarioEvent::Kind::Plug:
            world.schedule(Event::plug_inserted(e.socket_id, e.angle_deg), e.t);
            break;
        case ScenarioEvent::Kind::Vehicle:
            world.schedule(Event::vehicle_command(e.vehicle), e.t);
            break;
        case ScenarioEvent::Kind::Move:
            world.schedule(Event::motion_step(e.dir, e.dist_mm, false), e.t);
            break;
        case ScenarioEvent::Kind::Fault:
            world.inject_fault(e.fault, e.t, e.dropout_ms);
            break;
        }
    }
    return world;
}

} // namespace evmag
