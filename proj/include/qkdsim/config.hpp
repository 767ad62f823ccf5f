#ifndef QKDSIM_CONFIG_HPP
#define QKDSIM_CONFIG_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qkdsim/adversary.hpp"
#include "qkdsim/timing.hpp"

namespace qkdsim {

/// Full session description as read from the JSON config file. Unknown
/// fields are rejected, not ignored; `seed` is mandatory.
struct SessionConfig {
    int schemaVersion = 1;
    int k = 2;
    long photons = 0;
    uint64_t seed = 0;
    TimingConfig timing;
    Attack attack = NoAttack{};
    std::string disclosurePolicy = "one-random-axis";
    long abortThreshold = 0;
    std::string outputPath;

    void validate() const;
};

SessionConfig parse_session_config(const nlohmann::json& doc);
SessionConfig load_session_config(const std::string& path);

/// Config echo that re-parses to an equivalent SessionConfig.
nlohmann::ordered_json config_echo(const SessionConfig& cfg);

}  // namespace qkdsim

#endif
