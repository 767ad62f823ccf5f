#ifndef QKDSIM_OPTICS_HPP
#define QKDSIM_OPTICS_HPP

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "qkdsim/rng.hpp"

namespace qkdsim {

using cxd = std::complex<double>;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kMeasureNormTol = 1e-9;

/// Single photon in coherent superposition over 2^k path modes.
/// Path index ordering for k=2: |a>=0, |b>=1, |c>=2, |d>=3; bit 0
/// distinguishes within a pair, bit 1 distinguishes the pairs.
struct PhotonState {
    int k = 1;
    Eigen::VectorXcd amps;

    int dim() const { return 1 << k; }
    void validate() const;

    static PhotonState basis(int k, int path);
};

/// Photon plus Eve's ancilla; amps has shape [2^k x d_E].
struct JointState {
    int k = 1;
    int ancillaDim = 1;
    Eigen::MatrixXcd amps;

    int pathDim() const { return 1 << k; }
    void validate() const;
};

/// Unitary matrix acting on photon modes (or photon x ancilla).
struct ModeUnitary {
    Eigen::MatrixXcd entries;

    int dim() const { return static_cast<int>(entries.rows()); }
    void validate() const;  // throws UnitarityError if U†U != I within 1e-10
};

// 50-50 beamsplitter, real symmetric convention (1/sqrt2)[[1,1],[1,-1]].
PhotonState apply_beamsplitter(const PhotonState& state, int modeA, int modeB);

PhotonState apply_phase(const PhotonState& state, int mode, double phase);

/// Full balanced beamsplitter cascade: normalized Walsh-Hadamard transform
/// of the amplitude vector. Self-inverse.
PhotonState butterfly_transform(const PhotonState& state);

/// Projective path measurement; returns sampled path and collapsed state.
std::pair<int, PhotonState> measure_path(const PhotonState& state, Rng& rng);

JointState tensor_with_ancilla(const PhotonState& state, const Eigen::VectorXcd& ancilla);

/// Applies u (dim 2^k * d_E) to the joint state. u must act as the identity
/// on every path index outside `support`; violation raises CausalityMaskError.
/// Joint index convention: row = path * d_E + ancilla.
JointState apply_joint_unitary(const JointState& joint, const ModeUnitary& u,
                               const std::vector<int>& support);

/// Haar-distributed random unitary (Gaussian matrix + phase-fixed QR).
ModeUnitary haar_unitary(int dim, Rng& rng);

}  // namespace qkdsim

#endif
