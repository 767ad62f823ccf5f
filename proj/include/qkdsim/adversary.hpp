#ifndef QKDSIM_ADVERSARY_HPP
#define QKDSIM_ADVERSARY_HPP

#include <optional>
#include <variant>
#include <vector>

#include "qkdsim/optics.hpp"
#include "qkdsim/protocol.hpp"
#include "qkdsim/timing.hpp"

namespace qkdsim {

struct NoAttack {};

enum class ResendPolicy { ForwardCollapsed, GuessResend };

/// Projective path measurement on each component as it transits Eve's domain
/// (one path measurement in total); timing unchanged.
struct PathMeasureResend {
    ResendPolicy policy = ResendPolicy::ForwardCollapsed;
};

/// Eve buffers all components, decodes in the signal basis (learning i
/// exactly), re-prepares, and forwards. Costs (2^k - 1) loop delays minus
/// whatever a straight-line shortcut saves her.
struct FullStateMeasureResend {
    Tick shortcutGain = 0;
};

/// One masked unitary applied while the listed paths sit in Eve's domain.
struct ProbeStep {
    std::vector<int> support;
    ModeUnitary unitary;  // dim 2^k * ancillaDim
};

/// Coherent ancilla attack: sequence of causally masked unitaries plus the
/// per-component buffering needed to line multi-path windows up.
struct CausalAncillaUnitary {
    int ancillaDim = 2;
    std::vector<ProbeStep> steps;
    std::vector<Tick> bufferDelays;  // per component; empty means all zero
};

using Attack =
    std::variant<NoAttack, PathMeasureResend, FullStateMeasureResend, CausalAncillaUnitary>;

struct EveRecord {
    int photonId = 0;
    std::optional<Eigen::VectorXcd> ancillaFinal;  // realized Phi branch
    std::optional<int> guessedBits;                // classical data, packed bits
};

struct AttackResult {
    std::variant<PhotonState, JointState> state;
    Schedule schedule;  // component arrivals after any buffering
    EveRecord record;
};

AttackResult apply_attack(const PhotonState& state, const Schedule& schedule,
                          const Attack& attack, const TimingConfig& cfg, Rng& rng);

/// Eve's knowledge of the kept key bits, in bits per photon. Classical
/// records score by empirical mutual information; coherent records by the
/// Holevo bound of the realized ancilla ensemble.
double eve_information(const std::vector<EveRecord>& records,
                       const std::vector<int>& sentIndices,
                       const std::vector<int>& disclosedAxes, int k);

/// Exact per-photon detection probability by enumeration over Alice's
/// choices, measurement outcomes, and disclosure axes. No sampling.
double detection_probability_oracle(const Attack& attack, const TimingConfig& cfg, int k);

/// Holevo bound chi = S(rho_bar) - sum_i p_i S(rho_i) in bits.
double holevo_information(const std::vector<double>& weights,
                          const std::vector<Eigen::MatrixXcd>& densities);

}  // namespace qkdsim

#endif
