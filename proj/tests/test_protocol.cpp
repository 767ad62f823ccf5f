#include <doctest.h>

#include <cmath>

#include "qkdsim/errors.hpp"
#include "qkdsim/protocol.hpp"

using namespace qkdsim;

TEST_CASE("signal states carry the Walsh sign pattern") {
    // k=2 table, path order (a, b, c, d)
    const double expected[4][4] = {
        {0.5, 0.5, 0.5, 0.5},
        {0.5, -0.5, 0.5, -0.5},
        {0.5, 0.5, -0.5, -0.5},
        {0.5, -0.5, -0.5, 0.5},
    };
    for (int i = 0; i < 4; ++i) {
        auto psi = alice_prepare(i, 2);
        for (int p = 0; p < 4; ++p)
            CHECK(std::abs(psi.amps[p] - cxd(expected[i][p])) < 1e-15);
    }
}

TEST_CASE("signal states are orthonormal for k up to 4") {
    for (int k = 1; k <= 4; ++k) {
        const int d = 1 << k;
        for (int i = 0; i < d; ++i) {
            auto a = alice_prepare(i, k);
            for (int j = i; j < d; ++j) {
                auto b = alice_prepare(j, k);
                const cxd dot = a.amps.dot(b.amps);
                CHECK(std::abs(dot - cxd(i == j ? 1.0 : 0.0)) < 1e-14);
            }
        }
    }
}

TEST_CASE("honest decode recovers the sent index deterministically") {
    Rng rng(11);
    for (int k = 1; k <= 4; ++k)
        for (int i = 0; i < (1 << k); ++i)
            for (int rep = 0; rep < 3; ++rep)
                CHECK(bob_decode(alice_prepare(i, k), rng) == i);
}

TEST_CASE("decode of a single-path state is uniform over outcomes") {
    Rng rng(12);
    PhotonState basis = PhotonState::basis(2, 0);
    int counts[4] = {0, 0, 0, 0};
    const int n = 10000;
    for (int t = 0; t < n; ++t) ++counts[bob_decode(basis, rng)];
    for (int j = 0; j < 4; ++j)
        CHECK(std::abs(counts[j] / static_cast<double>(n) - 0.25) < 0.02);
}

TEST_CASE("branch and detector mapping for k=2") {
    CHECK(outcome_to_branch_detector(0, 2) == std::pair<int, int>{2, 2});
    CHECK(outcome_to_branch_detector(1, 2) == std::pair<int, int>{1, 2});
    CHECK(outcome_to_branch_detector(2, 2) == std::pair<int, int>{2, 1});
    CHECK(outcome_to_branch_detector(3, 2) == std::pair<int, int>{1, 1});
    CHECK_THROWS_AS(outcome_to_branch_detector(0, 3), UnsupportedError);
}

TEST_CASE("disclosure reveals one bit and keeps the others in axis order") {
    Rng rng(13);
    int axisCounts[3] = {0, 0, 0};
    const int n = 3000;
    for (int t = 0; t < n; ++t) {
        const int j = static_cast<int>(rng.next_below(8));
        auto d = bob_disclose(j, rng, 3);
        CHECK(d.axis >= 0);
        CHECK(d.axis < 3);
        CHECK(d.bit == ((j >> d.axis) & 1));
        REQUIRE(d.keptBits.size() == 2);
        int pos = 0;
        for (int axis = 0; axis < 3; ++axis) {
            if (axis == d.axis) continue;
            CHECK(d.keptBits[pos++] == ((j >> axis) & 1));
        }
        ++axisCounts[d.axis];
    }
    // uniform axis choice, 3-sigma band
    for (int a = 0; a < 3; ++a)
        CHECK(std::abs(axisCounts[a] / static_cast<double>(n) - 1.0 / 3) < 0.03);
}

TEST_CASE("verification accepts clean records and builds the key") {
    std::vector<SiftRecord> records;
    for (int id = 0; id < 6; ++id) {
        SiftRecord r;
        r.photonId = id;
        r.sent = id % 4;
        r.received = r.sent;
        r.disclosedAxis = id % 2;
        r.disclosedBit = (r.sent >> r.disclosedAxis) & 1;
        r.keptBits = {(r.sent >> (1 - r.disclosedAxis)) & 1};
        records.push_back(r);
    }
    auto stats = alice_verify(records, 2);
    CHECK_FALSE(stats.detected);
    CHECK(stats.timingViolations == 0);
    CHECK(stats.bitMismatches == 0);
    CHECK(stats.keyBits.size() == 6);
    CHECK(stats.keyRatePerPhoton == doctest::Approx(1.0));
}

TEST_CASE("verification aborts on a timing violation or bit mismatch") {
    SiftRecord clean;
    clean.sent = 3;
    clean.received = 3;
    clean.disclosedAxis = 0;
    clean.disclosedBit = 1;
    clean.keptBits = {1};

    auto late = clean;
    late.arrivalFlag = ArrivalFlag::LATE;
    auto stats = alice_verify({clean, late}, 2);
    CHECK(stats.detected);
    CHECK(stats.timingViolations == 1);
    CHECK(stats.keyBits.empty());  // aborted sessions yield no key

    auto flipped = clean;
    flipped.received = 2;  // bit 0 differs from sent
    flipped.disclosedBit = 0;
    flipped.keptBits = {1};
    stats = alice_verify({clean, flipped}, 2);
    CHECK(stats.detected);
    CHECK(stats.bitMismatches == 1);

    // a nonzero threshold tolerates that single mismatch
    stats = alice_verify({clean, flipped}, 2, 1);
    CHECK_FALSE(stats.detected);
    CHECK(stats.keyBits.size() == 1);  // only the clean record contributes
}

TEST_CASE("joint decode conditions the ancilla on the outcome") {
    Rng rng(14);
    // Eve's ancilla flags whether the photon took path 0: outcome j then
    // leaves the ancilla in the corresponding superposition.
    auto psi = alice_prepare(0, 1);
    JointState joint;
    joint.k = 1;
    joint.ancillaDim = 2;
    joint.amps = Eigen::MatrixXcd::Zero(2, 2);
    joint.amps(0, 0) = psi.amps[0];  // path 0 tagged with ancilla 0
    joint.amps(1, 1) = psi.amps[1];  // path 1 tagged with ancilla 1
    int seen[2] = {0, 0};
    for (int t = 0; t < 200; ++t) {
        auto [j, anc] = bob_decode_joint(joint, rng);
        ++seen[j];
        CHECK(std::abs(anc.norm() - 1.0) < 1e-12);
        // outcome j=0 leaves (|0>+|1>)/sqrt2, j=1 leaves (|0>-|1>)/sqrt2
        const double sign = j == 0 ? 1.0 : -1.0;
        CHECK(std::abs(anc[0] - sign * anc[1]) < 1e-12);
    }
    CHECK(seen[0] > 0);
    CHECK(seen[1] > 0);
}
