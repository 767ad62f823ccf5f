#include "qkdsim/config.hpp"

#include <fstream>
#include <set>

#include "qkdsim/errors.hpp"
#include "qkdsim/security.hpp"

namespace qkdsim {

namespace {

using nlohmann::json;

void check_fields(const json& obj, const std::string& context,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
    if (!obj.is_object())
        throw ConfigError("config: '" + context + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!required.count(key) && !optional.count(key))
            throw ConfigError("config: unknown field '" + context + "." + key + "'");
    }
    for (const auto& key : required) {
        if (!obj.contains(key))
            throw ConfigError("config: missing required field '" + context + "." + key + "'");
    }
}

Eigen::MatrixXcd parse_complex_matrix(const json& rows, const std::string& context) {
    if (!rows.is_array() || rows.empty())
        throw ConfigError("config: '" + context + "' must be a nonempty array of rows");
    const size_t n = rows.size();
    Eigen::MatrixXcd m(n, n);
    for (size_t r = 0; r < n; ++r) {
        const auto& row = rows[r];
        if (!row.is_array() || row.size() != n)
            throw ConfigError("config: '" + context + "' must be square");
        for (size_t c = 0; c < n; ++c) {
            const auto& entry = row[c];
            if (!entry.is_array() || entry.size() != 2)
                throw ConfigError("config: '" + context + "' entries must be [re, im] pairs");
            m(r, c) = cxd(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    return m;
}

Attack parse_attack(const json& doc, const TimingConfig& timing, int k) {
    check_fields(doc, "attack", {"type"},
                 {"resendPolicy", "shortcutGain", "ancillaDim", "steps", "bufferDelays",
                  "theta"});
    const std::string type = doc.at("type").get<std::string>();
    if (type == "none") return NoAttack{};
    if (type == "path-measure-resend") {
        PathMeasureResend atk;
        if (doc.contains("resendPolicy")) {
            const std::string policy = doc["resendPolicy"].get<std::string>();
            if (policy == "forward-collapsed")
                atk.policy = ResendPolicy::ForwardCollapsed;
            else if (policy == "guess-resend")
                atk.policy = ResendPolicy::GuessResend;
            else
                throw ConfigError("config: unknown attack.resendPolicy '" + policy + "'");
        }
        return atk;
    }
    if (type == "full-state-measure-resend") {
        FullStateMeasureResend atk;
        if (doc.contains("shortcutGain")) atk.shortcutGain = doc["shortcutGain"].get<Tick>();
        if (atk.shortcutGain < 0)
            throw ConfigError("config: attack.shortcutGain must be >= 0");
        return atk;
    }
    if (type == "controlled-phase") {
        if (!doc.contains("theta"))
            throw ConfigError("config: missing required field 'attack.theta'");
        return controlled_phase_attack(doc["theta"].get<double>(), k, timing);
    }
    if (type == "causal-ancilla-unitary") {
        CausalAncillaUnitary atk;
        if (!doc.contains("ancillaDim"))
            throw ConfigError("config: missing required field 'attack.ancillaDim'");
        atk.ancillaDim = doc["ancillaDim"].get<int>();
        if (atk.ancillaDim < 1)
            throw ConfigError("config: attack.ancillaDim must be >= 1");
        if (doc.contains("bufferDelays"))
            atk.bufferDelays = doc["bufferDelays"].get<std::vector<Tick>>();
        if (doc.contains("steps")) {
            for (const auto& stepDoc : doc["steps"]) {
                check_fields(stepDoc, "attack.steps[]", {"support", "unitary"}, {});
                ProbeStep step;
                step.support = stepDoc["support"].get<std::vector<int>>();
                step.unitary.entries =
                    parse_complex_matrix(stepDoc["unitary"], "attack.steps[].unitary");
                atk.steps.push_back(std::move(step));
            }
        }
        return atk;
    }
    throw ConfigError("config: unknown attack.type '" + type + "'");
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

void SessionConfig::validate() const {
    if (schemaVersion != 1) throw ConfigError("config: unsupported schemaVersion");
    if (k < 1 || k > 10) throw ConfigError("config: k must be in [1, 10]");
    if (photons < 1) throw ConfigError("config: photons must be >= 1");
    if (abortThreshold < 0) throw ConfigError("config: abortThreshold must be >= 0");
    if (disclosurePolicy != "one-random-axis")
        throw ConfigError("config: unknown disclosurePolicy '" + disclosurePolicy + "'");
    timing.validate();
}

SessionConfig parse_session_config(const nlohmann::json& doc) {
    check_fields(doc, "$", {"schemaVersion", "k", "photons", "seed", "timing", "attack"},
                 {"disclosurePolicy", "abortThreshold", "outputPath"});
    SessionConfig cfg;
    cfg.schemaVersion = doc.at("schemaVersion").get<int>();
    cfg.k = doc.at("k").get<int>();
    cfg.photons = doc.at("photons").get<long>();
    cfg.seed = doc.at("seed").get<uint64_t>();

    const auto& t = doc.at("timing");
    check_fields(t, "timing", {"deltaT", "distanceD"},
                 {"epsilon", "mu", "meanEmissionGap", "evePositionTime", "eveDomainLength"});
    cfg.timing.k = cfg.k;
    cfg.timing.deltaT = t.at("deltaT").get<Tick>();
    cfg.timing.epsilon = t.contains("epsilon") ? t["epsilon"].get<Tick>() : cfg.timing.deltaT;
    cfg.timing.distanceD = t.at("distanceD").get<Tick>();
    cfg.timing.mu = t.contains("mu") ? t["mu"].get<Tick>() : 0;
    cfg.timing.meanEmissionGap = t.contains("meanEmissionGap")
                                     ? t["meanEmissionGap"].get<Tick>()
                                     : 4 * (1 << cfg.k) * cfg.timing.loop_delay();
    cfg.timing.evePositionTime = t.contains("evePositionTime")
                                     ? t["evePositionTime"].get<Tick>()
                                     : (cfg.timing.distanceD + cfg.timing.mu) / 2;
    cfg.timing.eveDomainLength = t.contains("eveDomainLength")
                                     ? t["eveDomainLength"].get<Tick>()
                                     : cfg.timing.loop_delay();

    cfg.attack = parse_attack(doc.at("attack"), cfg.timing, cfg.k);

    if (doc.contains("disclosurePolicy"))
        cfg.disclosurePolicy = doc["disclosurePolicy"].get<std::string>();
    if (doc.contains("abortThreshold"))
        cfg.abortThreshold = doc["abortThreshold"].get<long>();
    if (doc.contains("outputPath")) cfg.outputPath = doc["outputPath"].get<std::string>();

    cfg.validate();
    return cfg;
}

SessionConfig load_session_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_session_config(doc);
}

nlohmann::ordered_json config_echo(const SessionConfig& cfg) {
    nlohmann::ordered_json doc;
    doc["schemaVersion"] = cfg.schemaVersion;
    doc["k"] = cfg.k;
    doc["photons"] = cfg.photons;
    doc["seed"] = cfg.seed;
    doc["timing"] = {{"deltaT", cfg.timing.deltaT},
                     {"epsilon", cfg.timing.epsilon},
                     {"distanceD", cfg.timing.distanceD},
                     {"mu", cfg.timing.mu},
                     {"meanEmissionGap", cfg.timing.meanEmissionGap},
                     {"evePositionTime", cfg.timing.evePositionTime},
                     {"eveDomainLength", cfg.timing.eveDomainLength}};

    nlohmann::ordered_json atk;
    if (std::holds_alternative<NoAttack>(cfg.attack)) {
        atk["type"] = "none";
    } else if (const auto* pmr = std::get_if<PathMeasureResend>(&cfg.attack)) {
        atk["type"] = "path-measure-resend";
        atk["resendPolicy"] = pmr->policy == ResendPolicy::ForwardCollapsed
                                  ? "forward-collapsed"
                                  : "guess-resend";
    } else if (const auto* fsr = std::get_if<FullStateMeasureResend>(&cfg.attack)) {
        atk["type"] = "full-state-measure-resend";
        atk["shortcutGain"] = fsr->shortcutGain;
    } else {
        const auto& probe = std::get<CausalAncillaUnitary>(cfg.attack);
        atk["type"] = "causal-ancilla-unitary";
        atk["ancillaDim"] = probe.ancillaDim;
        atk["bufferDelays"] = probe.bufferDelays;
        nlohmann::ordered_json steps = nlohmann::ordered_json::array();
        for (const auto& step : probe.steps) {
            nlohmann::ordered_json s;
            s["support"] = step.support;
            s["unitary"] = matrix_to_json(step.unitary.entries);
            steps.push_back(s);
        }
        atk["steps"] = steps;
    }
    doc["attack"] = atk;
    doc["disclosurePolicy"] = cfg.disclosurePolicy;
    doc["abortThreshold"] = cfg.abortThreshold;
    if (!cfg.outputPath.empty()) doc["outputPath"] = cfg.outputPath;
    return doc;
}

}  // namespace qkdsim
