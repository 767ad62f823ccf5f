#include "qkdsim/protocol.hpp"

#include <bit>
#include <cmath>

#include "qkdsim/errors.hpp"

namespace qkdsim {

PhotonState alice_prepare(int i, int k) {
    if (k < 1) throw ConfigError("alice_prepare: k must be >= 1");
    const int d = 1 << k;
    if (i < 0 || i >= d) throw IndexError("alice_prepare: state index out of range");
    PhotonState s;
    s.k = k;
    s.amps = Eigen::VectorXcd(d);
    const double scale = std::pow(2.0, -0.5 * k);
    for (int p = 0; p < d; ++p) {
        const int sign = (std::popcount(static_cast<unsigned>(i & p)) & 1) ? -1 : 1;
        s.amps[p] = scale * sign;
    }
    return s;
}

int bob_decode(const PhotonState& state, Rng& rng) {
    return measure_path(butterfly_transform(state), rng).first;
}

std::pair<int, Eigen::VectorXcd> bob_decode_joint(const JointState& joint, Rng& rng) {
    joint.validate();
    const int d = joint.pathDim();
    // Butterfly acts on the path factor only: rows mix, ancilla untouched.
    Eigen::MatrixXcd m = joint.amps;
    const double invSqrt2 = 0.7071067811865475244;
    for (int stride = 1; stride < d; stride <<= 1) {
        for (int base = 0; base < d; base += 2 * stride) {
            for (int off = 0; off < stride; ++off) {
                Eigen::RowVectorXcd x = m.row(base + off);
                Eigen::RowVectorXcd y = m.row(base + off + stride);
                m.row(base + off) = (x + y) * invSqrt2;
                m.row(base + off + stride) = (x - y) * invSqrt2;
            }
        }
    }
    const double r = rng.next_double() * m.squaredNorm();
    double acc = 0.0;
    int picked = d - 1;
    for (int j = 0; j < d; ++j) {
        acc += m.row(j).squaredNorm();
        if (r < acc) {
            picked = j;
            break;
        }
    }
    Eigen::VectorXcd ancilla = m.row(picked).transpose();
    const double n = ancilla.norm();
    if (n > 0) ancilla /= n;
    return {picked, ancilla};
}

std::pair<int, int> outcome_to_branch_detector(int j, int k) {
    if (k != 2)
        throw UnsupportedError("outcome_to_branch_detector: branch/detector naming is k=2 only");
    if (j < 0 || j >= 4) throw IndexError("outcome_to_branch_detector: outcome out of range");
    const int branch = (j & 1) ? 1 : 2;
    const int detector = (j & 2) ? 1 : 2;
    return {branch, detector};
}

Disclosure bob_disclose(int j, Rng& rng, int k) {
    Disclosure d;
    d.axis = static_cast<int>(rng.next_below(static_cast<uint64_t>(k)));
    d.bit = (j >> d.axis) & 1;
    for (int axis = 0; axis < k; ++axis)
        if (axis != d.axis) d.keptBits.push_back((j >> axis) & 1);
    return d;
}

SessionStats alice_verify(const std::vector<SiftRecord>& records, int k,
                          long abortThreshold) {
    SessionStats stats;
    stats.totalPhotons = static_cast<long>(records.size());
    std::string key;
    for (const auto& rec : records) {
        if (rec.sent < 0 || rec.sent >= (1 << k))
            throw ProtocolError("alice_verify: sent index out of range for k");
        if (static_cast<int>(rec.keptBits.size()) != k - 1)
            throw ProtocolError("alice_verify: kept-bit count does not match k");
        const bool timingOk = rec.arrivalFlag == ArrivalFlag::OK;
        const bool bitOk = rec.disclosedBit == ((rec.sent >> rec.disclosedAxis) & 1);
        if (!timingOk) ++stats.timingViolations;
        if (!bitOk) ++stats.bitMismatches;
        if (timingOk && bitOk)
            for (int b : rec.keptBits) key.push_back(b ? '1' : '0');
    }
    stats.detected = stats.timingViolations + stats.bitMismatches > abortThreshold;
    if (!stats.detected) {
        stats.keyBits = std::move(key);
        if (stats.totalPhotons > 0)
            stats.keyRatePerPhoton =
                static_cast<double>(stats.keyBits.size()) / stats.totalPhotons;
    }
    return stats;
}

}  // namespace qkdsim
