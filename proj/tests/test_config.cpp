#include <doctest.h>

#include <string>

#include "qkdsim/config.hpp"
#include "qkdsim/errors.hpp"
#include "qkdsim/session.hpp"

using namespace qkdsim;
using nlohmann::json;

namespace {

json minimal_doc() {
    return json{{"schemaVersion", 1},
                {"k", 2},
                {"photons", 100},
                {"seed", 42},
                {"timing", {{"deltaT", 1}, {"distanceD", 10}}},
                {"attack", {{"type", "none"}}}};
}

std::string thrown_message(const json& doc) {
    try {
        parse_session_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("minimal config parses and fills defaults") {
    auto cfg = parse_session_config(minimal_doc());
    CHECK(cfg.k == 2);
    CHECK(cfg.photons == 100);
    CHECK(cfg.seed == 42);
    CHECK(cfg.timing.epsilon == cfg.timing.deltaT);  // defaults to deltaT
    CHECK(cfg.timing.mu == 0);
    CHECK(cfg.timing.loop_delay() == 2);
    CHECK(cfg.timing.meanEmissionGap == 4 * 4 * 2);
    CHECK(cfg.timing.evePositionTime == 5);  // mid-channel
    CHECK(cfg.timing.eveDomainLength == 2);
    CHECK(cfg.disclosurePolicy == "one-random-axis");
    CHECK(cfg.abortThreshold == 0);
    CHECK(std::holds_alternative<NoAttack>(cfg.attack));
}

TEST_CASE("unknown fields are rejected by name") {
    auto doc = minimal_doc();
    doc["speling"] = 1;
    CHECK(thrown_message(doc).find("unknown field '$.speling'") != std::string::npos);

    doc = minimal_doc();
    doc["timing"]["warp"] = 9;
    CHECK(thrown_message(doc).find("unknown field 'timing.warp'") != std::string::npos);
}

TEST_CASE("missing required fields are named") {
    auto doc = minimal_doc();
    doc.erase("seed");
    CHECK(thrown_message(doc).find("missing required field '$.seed'") !=
          std::string::npos);

    doc = minimal_doc();
    doc["timing"].erase("deltaT");
    CHECK(thrown_message(doc).find("'timing.deltaT'") != std::string::npos);
}

TEST_CASE("attack section parses every type") {
    auto doc = minimal_doc();

    doc["attack"] = {{"type", "path-measure-resend"}, {"resendPolicy", "guess-resend"}};
    auto cfg = parse_session_config(doc);
    CHECK(std::get<PathMeasureResend>(cfg.attack).policy == ResendPolicy::GuessResend);

    doc["attack"] = {{"type", "full-state-measure-resend"}, {"shortcutGain", 4}};
    cfg = parse_session_config(doc);
    CHECK(std::get<FullStateMeasureResend>(cfg.attack).shortcutGain == 4);

    doc["attack"] = {{"type", "controlled-phase"}, {"theta", 1.5}};
    cfg = parse_session_config(doc);
    const auto& probe = std::get<CausalAncillaUnitary>(cfg.attack);
    CHECK(probe.steps.size() == 2);
    CHECK(probe.bufferDelays == std::vector<Tick>{2, 0, 2, 0});

    doc["attack"] = {{"type", "causal-ancilla-unitary"},
                     {"ancillaDim", 1},
                     {"bufferDelays", {0, 0, 0, 0}},
                     {"steps",
                      {{{"support", {0}},
                        {"unitary",
                         {{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}},
                          {{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}},
                          {{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}},
                          {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 1.0}}}}}}}};
    cfg = parse_session_config(doc);
    const auto& manual = std::get<CausalAncillaUnitary>(cfg.attack);
    REQUIRE(manual.steps.size() == 1);
    CHECK(manual.steps[0].support == std::vector<int>{0});
    CHECK(manual.steps[0].unitary.entries(3, 3) == cxd(0.0, 1.0));
}

TEST_CASE("invalid attack values are rejected") {
    auto doc = minimal_doc();
    doc["attack"] = {{"type", "mitm"}};
    CHECK(thrown_message(doc).find("unknown attack.type 'mitm'") != std::string::npos);

    doc["attack"] = {{"type", "path-measure-resend"}, {"resendPolicy", "mirror"}};
    CHECK_THROWS_AS(parse_session_config(doc), ConfigError);

    doc["attack"] = {{"type", "full-state-measure-resend"}, {"shortcutGain", -1}};
    CHECK_THROWS_AS(parse_session_config(doc), ConfigError);

    doc["attack"] = {{"type", "controlled-phase"}};
    CHECK(thrown_message(doc).find("'attack.theta'") != std::string::npos);
}

TEST_CASE("top-level value validation") {
    auto doc = minimal_doc();
    doc["photons"] = 0;
    CHECK_THROWS_AS(parse_session_config(doc), ConfigError);

    doc = minimal_doc();
    doc["schemaVersion"] = 2;
    CHECK_THROWS_AS(parse_session_config(doc), ConfigError);

    doc = minimal_doc();
    doc["disclosurePolicy"] = "all-bits";
    CHECK_THROWS_AS(parse_session_config(doc), ConfigError);

    doc = minimal_doc();
    doc["timing"]["deltaT"] = 0;
    CHECK_THROWS_AS(parse_session_config(doc), ConfigError);
}

TEST_CASE("config echo re-parses to the same echo") {
    auto doc = minimal_doc();
    doc["attack"] = {{"type", "controlled-phase"}, {"theta", 0.25}};
    doc["abortThreshold"] = 3;
    auto cfg = parse_session_config(doc);
    auto echo = config_echo(cfg);
    auto reparsed = parse_session_config(echo);
    CHECK(config_echo(reparsed).dump() == echo.dump());
}

TEST_CASE("result documents are byte-stable across runs") {
    auto cfg = parse_session_config(minimal_doc());
    auto a = result_json(cfg, run_session(cfg)).dump(2);
    auto b = result_json(cfg, run_session(cfg)).dump(2);
    CHECK(a == b);
    CHECK(a.find("\"keyRatePerPhoton\": 1.0") != std::string::npos);
    CHECK(a.find("timestamp") == std::string::npos);
}
