#ifndef QKDSIM_SESSION_HPP
#define QKDSIM_SESSION_HPP

#include <json.hpp>

#include "qkdsim/config.hpp"
#include "qkdsim/protocol.hpp"

namespace qkdsim {

/// Full protocol session: emit, prepare, attack, decode, disclose, verify.
/// Deterministic given (config, seed); photon n draws from RNG stream n.
SessionStats run_session(const SessionConfig& cfg);

/// Result document: config echo plus session outcome. Contains no timestamps,
/// so identical configs produce byte-identical payloads.
nlohmann::ordered_json result_json(const SessionConfig& cfg, const SessionStats& stats);

}  // namespace qkdsim

#endif
