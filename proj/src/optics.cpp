#include "qkdsim/optics.hpp"

#include <algorithm>
#include <cmath>

#include "qkdsim/errors.hpp"

namespace qkdsim {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
}

void PhotonState::validate() const {
    if (k < 1) throw ConfigError("PhotonState: k must be >= 1");
    if (amps.size() != (1 << k))
        throw ConfigError("PhotonState: amplitude vector length must be 2^k");
    const double norm2 = amps.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTol)
        throw NormalizationError("PhotonState: squared norm deviates from 1 by " +
                                 std::to_string(std::abs(norm2 - 1.0)));
}

PhotonState PhotonState::basis(int k, int path) {
    if (path < 0 || path >= (1 << k))
        throw IndexError("PhotonState::basis: path out of range");
    PhotonState s;
    s.k = k;
    s.amps = Eigen::VectorXcd::Zero(1 << k);
    s.amps[path] = 1.0;
    return s;
}

void JointState::validate() const {
    if (k < 1) throw ConfigError("JointState: k must be >= 1");
    if (ancillaDim < 1) throw ConfigError("JointState: ancillaDim must be >= 1");
    if (amps.rows() != (1 << k) || amps.cols() != ancillaDim)
        throw ConfigError("JointState: amplitude matrix must be 2^k x d_E");
    const double norm2 = amps.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTol)
        throw NormalizationError("JointState: squared norm deviates from 1 by " +
                                 std::to_string(std::abs(norm2 - 1.0)));
}

void ModeUnitary::validate() const {
    const auto n = entries.rows();
    if (n == 0 || n != entries.cols())
        throw UnitarityError("ModeUnitary: matrix must be square and nonempty");
    Eigen::MatrixXcd gram = entries.adjoint() * entries;
    gram -= Eigen::MatrixXcd::Identity(n, n);
    if (gram.cwiseAbs().maxCoeff() > kUnitaryTol)
        throw UnitarityError("ModeUnitary: U†U deviates from identity");
}

PhotonState apply_beamsplitter(const PhotonState& state, int modeA, int modeB) {
    const int d = state.dim();
    if (modeA < 0 || modeA >= d || modeB < 0 || modeB >= d)
        throw IndexError("apply_beamsplitter: mode index out of range");
    if (modeA == modeB)
        throw IndexError("apply_beamsplitter: modes must differ");
    PhotonState out = state;
    const cxd a = state.amps[modeA];
    const cxd b = state.amps[modeB];
    out.amps[modeA] = (a + b) * kInvSqrt2;
    out.amps[modeB] = (a - b) * kInvSqrt2;
    return out;
}

PhotonState apply_phase(const PhotonState& state, int mode, double phase) {
    if (mode < 0 || mode >= state.dim())
        throw IndexError("apply_phase: mode index out of range");
    PhotonState out = state;
    out.amps[mode] *= cxd(std::cos(phase), std::sin(phase));
    return out;
}

PhotonState butterfly_transform(const PhotonState& state) {
    PhotonState out = state;
    const int d = state.dim();
    // In-place radix-2 butterfly; equals H^{⊗k} with the real convention.
    for (int stride = 1; stride < d; stride <<= 1) {
        for (int base = 0; base < d; base += 2 * stride) {
            for (int off = 0; off < stride; ++off) {
                const cxd x = out.amps[base + off];
                const cxd y = out.amps[base + off + stride];
                out.amps[base + off] = (x + y) * kInvSqrt2;
                out.amps[base + off + stride] = (x - y) * kInvSqrt2;
            }
        }
    }
    return out;
}

std::pair<int, PhotonState> measure_path(const PhotonState& state, Rng& rng) {
    const double norm2 = state.amps.squaredNorm();
    if (std::abs(norm2 - 1.0) > kMeasureNormTol)
        throw NormalizationError("measure_path: state is not normalized");
    const double r = rng.next_double() * norm2;
    double acc = 0.0;
    int picked = state.dim() - 1;  // guards against accumulated rounding
    for (int p = 0; p < state.dim(); ++p) {
        acc += std::norm(state.amps[p]);
        if (r < acc) {
            picked = p;
            break;
        }
    }
    return {picked, PhotonState::basis(state.k, picked)};
}

JointState tensor_with_ancilla(const PhotonState& state, const Eigen::VectorXcd& ancilla) {
    if (std::abs(ancilla.squaredNorm() - 1.0) > kMeasureNormTol)
        throw NormalizationError("tensor_with_ancilla: ancilla is not normalized");
    JointState joint;
    joint.k = state.k;
    joint.ancillaDim = static_cast<int>(ancilla.size());
    joint.amps = state.amps * ancilla.transpose();
    return joint;
}

JointState apply_joint_unitary(const JointState& joint, const ModeUnitary& u,
                               const std::vector<int>& support) {
    const int paths = joint.pathDim();
    const int dE = joint.ancillaDim;
    const int n = paths * dE;
    if (u.dim() != n)
        throw ConfigError("apply_joint_unitary: unitary dimension must be 2^k * d_E");
    u.validate();

    std::vector<bool> inSupport(paths, false);
    for (int p : support) {
        if (p < 0 || p >= paths)
            throw IndexError("apply_joint_unitary: support path out of range");
        inSupport[p] = true;
    }
    // Causality mask: rows/columns touching a path outside the support must
    // be exactly the identity.
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (inSupport[r / dE] && inSupport[c / dE]) continue;
            const cxd expect = (r == c) ? cxd(1.0) : cxd(0.0);
            if (std::abs(u.entries(r, c) - expect) > kUnitaryTol)
                throw CausalityMaskError(
                    "apply_joint_unitary: unitary acts outside its causal support");
        }
    }

    Eigen::VectorXcd flat(n);
    for (int p = 0; p < paths; ++p)
        for (int e = 0; e < dE; ++e) flat[p * dE + e] = joint.amps(p, e);
    Eigen::VectorXcd outFlat = u.entries * flat;

    JointState out = joint;
    for (int p = 0; p < paths; ++p)
        for (int e = 0; e < dE; ++e) out.amps(p, e) = outFlat[p * dE + e];
    return out;
}

ModeUnitary haar_unitary(int dim, Rng& rng) {
    Eigen::MatrixXcd a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = cxd(rng.normal(), rng.normal()) * kInvSqrt2;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::VectorXcd diag = qr.matrixQR().diagonal();
    for (int c = 0; c < dim; ++c) {
        const double m = std::abs(diag[c]);
        q.col(c) *= (m > 0) ? diag[c] / m : cxd(1.0);
    }
    return ModeUnitary{q};
}

}  // namespace qkdsim
