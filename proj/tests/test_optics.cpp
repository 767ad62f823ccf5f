#include <doctest.h>

#include <cmath>

#include "qkdsim/errors.hpp"
#include "qkdsim/optics.hpp"

using namespace qkdsim;

namespace {

PhotonState make_state(int k, std::initializer_list<cxd> amps) {
    PhotonState s;
    s.k = k;
    s.amps = Eigen::VectorXcd(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (cxd a : amps) s.amps[i++] = a;
    return s;
}

PhotonState random_state(int k, Rng& rng) {
    PhotonState s;
    s.k = k;
    s.amps = Eigen::VectorXcd(1 << k);
    for (int p = 0; p < (1 << k); ++p) s.amps[p] = cxd(rng.normal(), rng.normal());
    s.amps /= s.amps.norm();
    return s;
}

constexpr double kInvSqrt2 = 0.7071067811865475244;

}  // namespace

TEST_CASE("beamsplitter splits, recombines, and routes antisymmetric input") {
    auto s = make_state(2, {1, 0, 0, 0});
    auto out = apply_beamsplitter(s, 0, 1);
    CHECK(std::abs(out.amps[0] - cxd(kInvSqrt2)) < 1e-15);
    CHECK(std::abs(out.amps[1] - cxd(kInvSqrt2)) < 1e-15);
    CHECK(std::abs(out.amps[2]) == 0.0);

    auto back = apply_beamsplitter(out, 0, 1);  // self-inverse
    CHECK(std::abs(back.amps[0] - cxd(1)) < 1e-15);
    CHECK(std::abs(back.amps[1]) < 1e-15);

    auto anti = make_state(2, {kInvSqrt2, -kInvSqrt2, 0, 0});
    auto port = apply_beamsplitter(anti, 0, 1);
    CHECK(std::abs(port.amps[0]) < 1e-15);
    CHECK(std::abs(port.amps[1] - cxd(1)) < 1e-15);
}

TEST_CASE("beamsplitter rejects bad mode indices") {
    auto s = make_state(2, {1, 0, 0, 0});
    CHECK_THROWS_AS(apply_beamsplitter(s, 0, 4), IndexError);
    CHECK_THROWS_AS(apply_beamsplitter(s, 2, 2), IndexError);
}

TEST_CASE("phase shift examples") {
    auto s = make_state(2, {0.5, 0.5, 0.5, 0.5});
    auto out = apply_phase(s, 1, M_PI);
    CHECK(std::abs(out.amps[1] - cxd(-0.5)) < 1e-15);
    CHECK(std::abs(out.amps[0] - cxd(0.5)) < 1e-15);

    auto same = apply_phase(s, 2, 0.0);
    CHECK((same.amps - s.amps).norm() == 0.0);

    auto basis = make_state(2, {1, 0, 0, 0});
    auto rotated = apply_phase(basis, 0, M_PI / 2);
    CHECK(std::abs(rotated.amps[0] - cxd(0, 1)) < 1e-15);

    CHECK_THROWS_AS(apply_phase(s, 4, 1.0), IndexError);
}

TEST_CASE("butterfly transform matches the Walsh-Hadamard matrix") {
    auto psi1 = make_state(2, {0.5, -0.5, 0.5, -0.5});
    auto out = butterfly_transform(psi1);
    CHECK(std::abs(out.amps[1] - cxd(1)) < 1e-12);
    CHECK(std::abs(out.amps[0]) < 1e-12);
    CHECK(std::abs(out.amps[2]) < 1e-12);
    CHECK(std::abs(out.amps[3]) < 1e-12);

    auto basis = make_state(2, {1, 0, 0, 0});
    auto spread = butterfly_transform(basis);
    for (int p = 0; p < 4; ++p) CHECK(std::abs(spread.amps[p] - cxd(0.5)) < 1e-12);
}

TEST_CASE("butterfly transform is an involution on random states") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + static_cast<int>(rng.next_below(3));
        auto s = random_state(k, rng);
        auto twice = butterfly_transform(butterfly_transform(s));
        CHECK((twice.amps - s.amps).norm() < 1e-12);
    }
}

TEST_CASE("measure_path follows the Born rule") {
    Rng rng(202);

    auto certain = make_state(2, {0, 0, 1, 0});
    for (int trial = 0; trial < 20; ++trial)
        CHECK(measure_path(certain, rng).first == 2);

    auto balanced = make_state(2, {0.5, 0.5, 0.5, 0.5});
    int counts[4] = {0, 0, 0, 0};
    const int n = 10000;
    for (int trial = 0; trial < n; ++trial) ++counts[measure_path(balanced, rng).first];
    for (int p = 0; p < 4; ++p)
        CHECK(std::abs(counts[p] / static_cast<double>(n) - 0.25) < 0.02);

    auto sparse = make_state(2, {kInvSqrt2, 0, 0, kInvSqrt2});
    for (int trial = 0; trial < 100; ++trial) {
        const int p = measure_path(sparse, rng).first;
        CHECK((p == 0 || p == 3));
    }

    auto bad = make_state(1, {0.5, 0.5});
    CHECK_THROWS_AS(measure_path(bad, rng), NormalizationError);
}

TEST_CASE("measure_path collapses to a basis state") {
    Rng rng(7);
    auto balanced = make_state(1, {kInvSqrt2, kInvSqrt2});
    auto [p, collapsed] = measure_path(balanced, rng);
    CHECK(std::abs(collapsed.amps[p] - cxd(1)) == 0.0);
    CHECK(collapsed.amps.squaredNorm() == 1.0);
}

TEST_CASE("tensor_with_ancilla") {
    auto s = make_state(2, {1, 0, 0, 0});

    Eigen::VectorXcd trivial(1);
    trivial << 1.0;
    auto j1 = tensor_with_ancilla(s, trivial);
    CHECK(j1.ancillaDim == 1);
    CHECK((j1.amps.col(0) - s.amps).norm() == 0.0);

    Eigen::VectorXcd qubit(2);
    qubit << 1.0, 0.0;
    auto j2 = tensor_with_ancilla(s, qubit);
    CHECK(std::abs(j2.amps(0, 0) - cxd(1)) == 0.0);
    CHECK(j2.amps.squaredNorm() == 1.0);

    Rng rng(303);
    for (int trial = 0; trial < 20; ++trial) {
        auto st = random_state(2, rng);
        Eigen::VectorXcd anc(3);
        for (int e = 0; e < 3; ++e) anc[e] = cxd(rng.normal(), rng.normal());
        anc /= anc.norm();
        auto joint = tensor_with_ancilla(st, anc);
        CHECK(std::abs(joint.amps.squaredNorm() - 1.0) < 1e-12);
    }

    Eigen::VectorXcd unnormalized(2);
    unnormalized << 1.0, 1.0;
    CHECK_THROWS_AS(tensor_with_ancilla(s, unnormalized), NormalizationError);
}

TEST_CASE("apply_joint_unitary respects the causal mask") {
    Rng rng(404);
    auto st = random_state(2, rng);
    Eigen::VectorXcd anc(2);
    anc << 1.0, 0.0;
    auto joint = tensor_with_ancilla(st, anc);

    ModeUnitary identity{Eigen::MatrixXcd::Identity(8, 8)};
    auto same = apply_joint_unitary(joint, identity, {0});
    CHECK((same.amps - joint.amps).norm() == 0.0);

    // controlled-phase on (path 3, ancilla 1): paths 0-2 untouched
    Eigen::MatrixXcd cp = Eigen::MatrixXcd::Identity(8, 8);
    cp(7, 7) = cxd(std::cos(0.7), std::sin(0.7));
    auto shifted = apply_joint_unitary(joint, ModeUnitary{cp}, {3});
    for (int p = 0; p < 3; ++p)
        CHECK((shifted.amps.row(p) - joint.amps.row(p)).norm() == 0.0);

    // the same unitary with the wrong support is a mask violation
    CHECK_THROWS_AS(apply_joint_unitary(joint, ModeUnitary{cp}, {2}), CausalityMaskError);

    Eigen::MatrixXcd notU = Eigen::MatrixXcd::Identity(8, 8) * 2.0;
    CHECK_THROWS_AS(apply_joint_unitary(joint, ModeUnitary{notU}, {0}), UnitarityError);
}

TEST_CASE("masked random unitaries preserve the joint norm") {
    Rng rng(505);
    for (int trial = 0; trial < 100; ++trial) {
        auto st = random_state(2, rng);
        Eigen::VectorXcd anc(2);
        anc << 1.0, 0.0;
        auto joint = tensor_with_ancilla(st, anc);
        const int path = static_cast<int>(rng.next_below(4));
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(8, 8);
        u.block(path * 2, path * 2, 2, 2) = haar_unitary(2, rng).entries;
        auto out = apply_joint_unitary(joint, ModeUnitary{u}, {path});
        CHECK(std::abs(out.amps.squaredNorm() - 1.0) < 1e-12);
    }
}

TEST_CASE("haar_unitary produces unitaries") {
    Rng rng(606);
    for (int dim : {2, 4, 8}) {
        auto u = haar_unitary(dim, rng);
        CHECK_NOTHROW(u.validate());
    }
}
