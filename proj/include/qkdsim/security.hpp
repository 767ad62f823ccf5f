#ifndef QKDSIM_SECURITY_HPP
#define QKDSIM_SECURITY_HPP

#include <vector>

#include "qkdsim/adversary.hpp"
#include "qkdsim/optics.hpp"
#include "qkdsim/rng.hpp"

namespace qkdsim {

/// Ancilla states extracted from one Kraus component u acting on each signal
/// state tensored with the reference ancilla (first basis vector).
struct PhiExtraction {
    std::vector<Eigen::VectorXcd> phis;  // normalized, one per state index
    double commonC = 0.0;                // mean per-path amplitude magnitude
    double magnitudeResidual = 0.0;      // spread of per-path magnitudes
    double phaseResidual = 0.0;          // norm outside the signal-state subspace
};

PhiExtraction extract_phi_states(const ModeUnitary& u, int k, int dE);

/// Squared amplitude that u moves from the last-released component onto
/// components that exited Eve's domain before it entered. Zero for any
/// mask-respecting sequential attack; 1 for a full first/last swap.
double causality_residual(const ModeUnitary& u, int k, int dE);

struct ConstraintResiduals {
    double magnitudeResidual = 0.0;
    double phaseResidual = 0.0;
    double causalityResidual = 0.0;
    double phiSpread = 0.0;  // max pairwise sine distance among the phi states
};

struct ProofTolerances {
    double constraintTol = 1e-10;  // no-detection / causality filter
    double conclusionTol = 1e-8;   // allowed phi spread once constraints hold
    double infoTol = 1e-6;         // Holevo bits for constrained attacks
};

struct ProofVerdict {
    ConstraintResiduals residuals;
    bool constraintsSatisfied = false;
    bool pass = false;               // constraints satisfied -> phi spread small
    bool walshEquivalenceOk = false; // Walsh sums vanish iff phis pairwise equal
    double holevoBits = 0.0;
};

ProofVerdict verify_proof_instance(const ModeUnitary& u, int k, int dE,
                                   const ProofTolerances& tol = {});

/// Norms of the nontrivial Walsh combinations sum_i (-1)^{popcount(i & q)} phi_i,
/// q = 1 .. 2^k - 1. For k=2 these are the three constraint sums.
std::vector<double> walsh_sum_norms(const std::vector<Eigen::VectorXcd>& phis);

double sine_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
double phi_spread(const std::vector<Eigen::VectorXcd>& phis);

/// Product of per-window unitaries, one per single-path causal window:
/// block diagonal in the path index. `compliant` uses the same ancilla block
/// for every window (and therefore satisfies the no-detection constraints).
ModeUnitary random_causal_attack(int k, int dE, Rng& rng, bool compliant);

struct ProofReport {
    int samples = 0;
    int filtered = 0;  // samples passing the no-detection + causality filter
    double maxFilteredPhiSpread = 0.0;
    double maxFilteredHolevoBits = 0.0;
    bool allVerdictsPass = false;
    bool pass = false;
};

ProofReport run_proof_sampling(int samples, int dE, uint64_t seed, int k = 2,
                               const ProofTolerances& tol = {});

/// Entangling probe coupling each component pair with angle theta. Joint
/// access to a pair costs one loop delay of buffering on its earlier
/// component, charged to bufferDelays (theta = 0 degenerates to no attack).
CausalAncillaUnitary controlled_phase_attack(double theta, int k, const TimingConfig& cfg);

struct TradeoffRow {
    double theta = 0.0;
    double detectionProbability = 0.0;
    double eveInformationBits = 0.0;
};

std::vector<TradeoffRow> tradeoff_scan(const std::vector<double>& thetas,
                                       const TimingConfig& cfg);

}  // namespace qkdsim

#endif
