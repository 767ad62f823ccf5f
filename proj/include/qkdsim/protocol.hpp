#ifndef QKDSIM_PROTOCOL_HPP
#define QKDSIM_PROTOCOL_HPP

#include <string>
#include <utility>
#include <vector>

#include "qkdsim/optics.hpp"
#include "qkdsim/rng.hpp"
#include "qkdsim/timing.hpp"

namespace qkdsim {

/// Alice's state: amps[p] = 2^{-k/2} (-1)^{popcount(i & p)}. For k=2 this is
/// the four-state table with ordering (a, b, c, d).
PhotonState alice_prepare(int i, int k);

/// Butterfly cascade then path measurement; an undisturbed state decodes
/// deterministically to j = i.
int bob_decode(const PhotonState& state, Rng& rng);

/// Joint-state variant: Bob measures the path after the cascade; returns the
/// outcome and Eve's ancilla conditioned on it.
std::pair<int, Eigen::VectorXcd> bob_decode_joint(const JointState& joint, Rng& rng);

/// k=2 naming: Branch 1 iff bit 0 of j is set, Detector 1 iff bit 1 is set.
std::pair<int, int> outcome_to_branch_detector(int j, int k);

struct Disclosure {
    int axis = 0;                // which bit of the outcome is broadcast
    int bit = 0;
    std::vector<int> keptBits;   // remaining bits, ascending axis order
};

Disclosure bob_disclose(int j, Rng& rng, int k);

struct SiftRecord {
    int photonId = 0;
    int sent = 0;      // Alice's state index i
    int received = 0;  // Bob's outcome j
    ArrivalFlag arrivalFlag = ArrivalFlag::OK;
    int disclosedAxis = 0;
    int disclosedBit = 0;
    std::vector<int> keptBits;
};

struct SessionStats {
    long totalPhotons = 0;
    std::string keyBits;  // '0'/'1' per kept bit, photon order then axis order
    long timingViolations = 0;
    long bitMismatches = 0;
    bool detected = false;
    double keyRatePerPhoton = 0.0;
    double eveInformationBits = 0.0;
};

/// Alice's verification pass: counts timing violations and disclosed-bit
/// mismatches; aborts (detected, key discarded) past the threshold.
SessionStats alice_verify(const std::vector<SiftRecord>& records, int k,
                          long abortThreshold = 0);

}  // namespace qkdsim

#endif
