#include <doctest.h>

#include "evmag/scenario.hpp"
#include "support/scenario_gen.hpp"

#include <random>
#include <sstream>
#include <vector>

using namespace evmag;

namespace {

Scenario parse_ok(const std::string& text) {
    const ParseResult result = parse_scenario(text);
    if (!result.ok()) {
        for (const ParseError& e : result.errors) {
            INFO(e.to_string());
        }
    }
    REQUIRE(result.ok());
    return *result.scenario;
}

std::vector<ParseError> parse_errors(const std::string& text) {
    const ParseResult result = parse_scenario(text);
    REQUIRE_FALSE(result.ok());
    CHECK_FALSE(result.scenario.has_value());
    return result.errors;
}

bool has_error_at_line(const std::vector<ParseError>& errors, int line) {
    for (const ParseError& e : errors) {
        if (e.line == line) {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("minimal scenario fills defaults") {
    const Scenario s = parse_ok("pack cells=4 capacity_ah=50 vmin=3.0 vmax=4.2 rint=0.05\n"
                                "socket id=130 location=front\n"
                                "at 1000ms plug socket=130\n");
    CHECK(s.pack.cells == 4);
    CHECK(s.pack.initial_soc == std::vector<double>{0.2, 0.2, 0.2, 0.2});
    REQUIRE(s.sockets.size() == 1);
    CHECK(s.sockets[0].escape_direction == Vec2{1.0, 0.0});
    CHECK(s.sockets[0].aperture_half_angle_deg == 45.0);
    CHECK(s.sockets[0].r_max_mm == 10.0);
    CHECK(s.policy.kind() == SafetyPolicy::Kind::Electromagnet);
    CHECK(s.interlock);
    CHECK(s.params.tick_interval_ms == 10);
    REQUIRE(s.events.size() == 1);
    CHECK(s.events[0].kind == ScenarioEvent::Kind::Plug);
    CHECK(s.events[0].angle_deg == 0.0);
}

TEST_CASE("driver-side sockets default to a lateral escape direction") {
    const Scenario s = parse_ok("socket id=131 location=driver\n");
    CHECK(s.sockets[0].escape_direction == Vec2{0.0, 1.0});
}

TEST_CASE("escape vectors are normalized at parse time") {
    const Scenario s = parse_ok("socket id=130 location=front escape=3,4\n");
    CHECK(s.sockets[0].escape_direction.x == doctest::Approx(0.6));
    CHECK(s.sockets[0].escape_direction.y == doctest::Approx(0.8));
}

TEST_CASE("events are sorted by time, ties keep declaration order") {
    const Scenario s = parse_ok("socket id=130 location=front\n"
                                "at 500ms vehicle start\n"
                                "at 100ms plug socket=130\n"
                                "at 500ms vehicle static\n");
    REQUIRE(s.events.size() == 3);
    CHECK(s.events[0].kind == ScenarioEvent::Kind::Plug);
    CHECK(s.events[1].vehicle == VehicleState::Start);
    CHECK(s.events[2].vehicle == VehicleState::Static);
}

TEST_CASE("undeclared socket reference is an error with the right line") {
    const auto errors = parse_errors("socket id=130 location=front\n"
                                     "at 100ms plug socket=999\n");
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].line == 2);
    CHECK(errors[0].message == "undeclared socket 999");
}

TEST_CASE("duplicate socket ids name both lines") {
    const auto errors = parse_errors("socket id=130 location=front\n"
                                     "socket id=131 location=driver\n"
                                     "socket id=130 location=rear\n");
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].line == 3);
    CHECK(errors[0].message.find("130") != std::string::npos);
    CHECK(errors[0].message.find("line 1") != std::string::npos);
}

TEST_CASE("all errors are collected, not just the first") {
    const auto errors = parse_errors("junk line here\n"
                                     "socket id=130 location=top\n"
                                     "at 100ms plug socket=999\n"
                                     "set warp_speed=9\n");
    CHECK(errors.size() == 4);
    CHECK(has_error_at_line(errors, 1));
    CHECK(has_error_at_line(errors, 2));
    CHECK(has_error_at_line(errors, 3));
    CHECK(has_error_at_line(errors, 4));
}

TEST_CASE("curated malformed inputs each point at the offending line") {
    const struct {
        const char* text;
        int line;
    } cases[] = {
        {"socket id=130 location=front\nfleep\n", 2},
        {"pack cells=4 capacity_ah=50 vmin=3 vmax=4.2 rint=0.05 soc=0.2,0.2\n", 1},
        {"pack cells=0 capacity_ah=50 vmin=3 vmax=4.2 rint=0.05\n", 1},
        {"pack cells=4 capacity_ah=50 vmin=4.2 vmax=3 rint=0.05\n", 1},
        {"socket id=130 location=front\nsocket id=130 location=rear\n", 2},
        {"socket id=130 location=front aperture=120\n", 1},
        {"socket id=130 location=front escape=0,0\n", 1},
        {"policy hall\n", 1},
        {"interlock maybe\n", 1},
        {"socket id=130 location=front\nat 100 plug socket=130\n", 2},
        {"at -5ms vehicle start\n", 1},
        {"socket id=130 location=front\nat 10ms plug socket=130 angle=fast\n", 2},
        {"at 10ms fault dropout\n", 1},
        {"socket id=130 location=front\nat 10ms move dir=1,0\n", 2},
        {"set tick_interval=0\n", 1},
    };
    for (const auto& c : cases) {
        CAPTURE(c.text);
        const auto errors = parse_errors(c.text);
        CHECK(has_error_at_line(errors, c.line));
    }
}

TEST_CASE("error positions always index into the input") {
    const char* inputs[] = {
        "socket id=130 location=top\n",
        "junk\n# comment\nmore junk\n",
        "pack cells=x capacity_ah=50 vmin=3 vmax=4 rint=0\n",
        "at 10ms plug socket=1\nat 20ms fault wat\n",
        "set =5\n",
    };
    for (const char* text : inputs) {
        const auto errors = parse_errors(text);
        std::vector<std::string> lines;
        std::istringstream stream{std::string(text)};
        for (std::string line; std::getline(stream, line);) {
            lines.push_back(line);
        }
        for (const ParseError& e : errors) {
            REQUIRE(e.line >= 1);
            REQUIRE(e.line <= static_cast<int>(lines.size()));
            REQUIRE(e.column >= 1);
            REQUIRE(e.column <= static_cast<int>(lines[e.line - 1].size()) + 1);
        }
    }
}

TEST_CASE("comments and blank lines are ignored") {
    const Scenario s = parse_ok("# a comment line\n"
                                "\n"
                                "socket id=130 location=front # trailing comment\n");
    CHECK(s.sockets.size() == 1);
}

TEST_CASE("set directives reach the engine parameters") {
    const Scenario s = parse_ok("set omega=0.45\n"
                                "set tick_interval=5\n"
                                "set drive_direction=-1,0\n"
                                "set t_damage=60\n"
                                "set plug_polarity=south\n"
                                "set socket_pole=south\n");
    CHECK(s.params.omega_deg_per_ms == doctest::Approx(0.45));
    CHECK(s.params.tick_interval_ms == 5);
    CHECK(s.params.drive_direction.x == doctest::Approx(-1.0));
    CHECK(s.params.motion.t_damage_n == doctest::Approx(60.0));
    CHECK(s.params.plug_polarity == Polarity::South);
    REQUIRE(s.params.socket_pole_override.has_value());
    CHECK(*s.params.socket_pole_override == Polarity::South);
}

TEST_CASE("serialization is canonical and round-trips") {
    const std::string shuffled = "interlock off\n"
                                 "at 100ms plug socket=134 angle=2.5\n"
                                 "policy alarm threshold_n=50\n"
                                 "socket id=134 location=rear rmax=7 aperture=30\n"
                                 "set omega=0.2\n"
                                 "pack cells=2 capacity_ah=10 vmin=3.1 vmax=4.1 rint=0.02 soc=0.5,0.25\n";
    const Scenario first = parse_ok(shuffled);
    const std::string canonical = serialize_scenario(first);
    const Scenario second = parse_ok(canonical);
    CHECK(first == second);
    // Canonical form is a fixed point.
    CHECK(serialize_scenario(second) == canonical);
    // Key order normalized: socket fields echo in declaration order with defaults.
    CHECK(canonical.find("socket id=134 location=rear escape=1,0 aperture=30 rmax=7\n") !=
          std::string::npos);
}

TEST_CASE("round-trip identity over generated scenarios") {
    std::mt19937 rng(20250808);
    for (int i = 0; i < 200; ++i) {
        const std::string text = testgen::random_scenario_text(rng);
        CAPTURE(text);
        const ParseResult first = parse_scenario(text);
        REQUIRE(first.ok());
        const std::string canonical = serialize_scenario(*first.scenario);
        const ParseResult second = parse_scenario(canonical);
        REQUIRE(second.ok());
        REQUIRE(*first.scenario == *second.scenario);
        REQUIRE(serialize_scenario(*second.scenario) == canonical);
    }
}

TEST_CASE("scenario builds a runnable world") {
    const Scenario s = parse_ok("socket id=130 location=front\n"
                                "at 100ms plug socket=130\n"
                                "at 2000ms vehicle start\n");
    World world = make_world(s);
    world.run_until(10'000);
    CHECK(world.controller_phase().kind() == ControllerPhaseKind::Complete);
}
