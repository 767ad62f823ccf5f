#include "qkdsim/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qkdsim/errors.hpp"

namespace qkdsim {

namespace {

int pack_kept_bits(int value, int disclosedAxis, int k) {
    int packed = 0;
    int pos = 0;
    for (int axis = 0; axis < k; ++axis) {
        if (axis == disclosedAxis) continue;
        packed |= ((value >> axis) & 1) << pos;
        ++pos;
    }
    return packed;
}

// A joint operation on several components requires co-locating them: all
// components travel at c, so a signal from a later component can never catch
// an earlier one. The earlier component must be buffered by the full
// separation, (maxP - p) * loop, before the window opens. Mere presence in
// an extended domain does not license coupling.
void check_window_feasible(const std::vector<int>& support,
                           const std::vector<Tick>& bufferDelays,
                           const TimingConfig& cfg) {
    if (support.empty()) return;
    const int maxP = *std::max_element(support.begin(), support.end());
    const Tick loop = cfg.loop_delay();
    for (int p : support) {
        const Tick needed = (maxP - p) * loop;
        const Tick have = p < static_cast<int>(bufferDelays.size()) ? bufferDelays[p] : 0;
        if (needed > have)
            throw CausalityMaskError(
                "causal attack: window {" + std::to_string(p) + ".." +
                std::to_string(maxP) + "} needs " + std::to_string(needed - have) +
                " more ticks of buffering");
    }
}

JointState run_probe_steps(const PhotonState& state, const CausalAncillaUnitary& atk,
                           const TimingConfig& cfg) {
    Eigen::VectorXcd ancilla = Eigen::VectorXcd::Zero(atk.ancillaDim);
    ancilla[0] = 1.0;
    JointState joint = tensor_with_ancilla(state, ancilla);
    for (const auto& step : atk.steps) {
        check_window_feasible(step.support, atk.bufferDelays, cfg);
        joint = apply_joint_unitary(joint, step.unitary, step.support);
    }
    return joint;
}

double entropy_bits(const Eigen::MatrixXcd& density) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(density);
    double h = 0.0;
    for (double lambda : solver.eigenvalues())
        if (lambda > 1e-15) h -= lambda * std::log2(lambda);
    return h;
}

}  // namespace

AttackResult apply_attack(const PhotonState& state, const Schedule& schedule,
                          const Attack& attack, const TimingConfig& cfg, Rng& rng) {
    AttackResult result{state, schedule, EveRecord{}};
    const int paths = 1 << cfg.k;

    if (std::holds_alternative<NoAttack>(attack)) return result;

    if (const auto* pmr = std::get_if<PathMeasureResend>(&attack)) {
        auto [p, collapsed] = measure_path(state, rng);
        result.record.guessedBits = p;
        if (pmr->policy == ResendPolicy::ForwardCollapsed) {
            result.state = collapsed;
        } else {
            const int guess = static_cast<int>(rng.next_below(paths));
            result.state = alice_prepare(guess, cfg.k);
            result.record.guessedBits = guess;
        }
        return result;
    }

    if (const auto* fsr = std::get_if<FullStateMeasureResend>(&attack)) {
        const int learned = bob_decode(state, rng);
        result.record.guessedBits = learned;
        result.state = alice_prepare(learned, cfg.k);
        const Tick holdup =
            std::max<Tick>(0, (paths - 1) * cfg.loop_delay() - fsr->shortcutGain);
        for (auto& t : result.schedule.componentArrival) t += holdup;
        return result;
    }

    const auto& probe = std::get<CausalAncillaUnitary>(attack);
    if (!probe.bufferDelays.empty() &&
        static_cast<int>(probe.bufferDelays.size()) != paths)
        throw ConfigError("causal attack: bufferDelays must list one delay per component");
    for (Tick d : probe.bufferDelays)
        if (d < 0) throw ConfigError("causal attack: bufferDelays must be >= 0");
    result.state = run_probe_steps(state, probe, cfg);
    for (int p = 0; p < paths && p < static_cast<int>(probe.bufferDelays.size()); ++p)
        result.schedule.componentArrival[p] += probe.bufferDelays[p];
    return result;
}

double eve_information(const std::vector<EveRecord>& records,
                       const std::vector<int>& sentIndices,
                       const std::vector<int>& disclosedAxes, int k) {
    if (records.empty()) return 0.0;
    if (records.size() != sentIndices.size() || records.size() != disclosedAxes.size())
        throw ProtocolError("eve_information: records and sent indices misaligned");

    const bool classical = records.front().guessedBits.has_value();
    const double n = static_cast<double>(records.size());

    if (classical) {
        // Empirical mutual information between Eve's guess (restricted to the
        // kept axes, tagged with the axis) and the actual kept key bits.
        std::map<std::pair<int, int>, double> joint;
        std::map<int, double> px, py;
        for (size_t r = 0; r < records.size(); ++r) {
            if (!records[r].guessedBits)
                throw ProtocolError("eve_information: mixed record kinds");
            const int axis = disclosedAxes[r];
            const int x = (axis << k) | pack_kept_bits(*records[r].guessedBits, axis, k);
            const int y = pack_kept_bits(sentIndices[r], axis, k);
            joint[{x, y}] += 1.0 / n;
            px[x] += 1.0 / n;
            py[y] += 1.0 / n;
        }
        double mi = 0.0;
        for (const auto& [xy, p] : joint)
            mi += p * std::log2(p / (px[xy.first] * py[xy.second]));
        return std::max(0.0, mi);
    }

    // Coherent records: Holevo bound of {p_i, rho_i} with rho_i averaged over
    // the realized ancilla branches for sent index i.
    const int dE = static_cast<int>(records.front().ancillaFinal
                                        ? records.front().ancillaFinal->size()
                                        : 0);
    if (dE == 0) return 0.0;
    std::map<int, Eigen::MatrixXcd> sums;
    std::map<int, double> counts;
    for (size_t r = 0; r < records.size(); ++r) {
        if (!records[r].ancillaFinal) continue;
        const auto& phi = *records[r].ancillaFinal;
        auto [it, inserted] = sums.try_emplace(sentIndices[r],
                                               Eigen::MatrixXcd::Zero(dE, dE));
        it->second += phi * phi.adjoint();
        counts[sentIndices[r]] += 1.0;
    }
    if (sums.empty()) return 0.0;
    std::vector<double> weights;
    std::vector<Eigen::MatrixXcd> densities;
    for (auto& [i, sum] : sums) {
        weights.push_back(counts[i] / n);
        densities.push_back(sum / counts[i]);
    }
    return holevo_information(weights, densities);
}

double holevo_information(const std::vector<double>& weights,
                          const std::vector<Eigen::MatrixXcd>& densities) {
    if (weights.empty() || weights.size() != densities.size())
        throw ProtocolError("holevo_information: empty or misaligned ensemble");
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(densities[0].rows(), densities[0].cols());
    double total = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        avg += weights[i] * densities[i];
        total += weights[i];
    }
    avg /= total;
    double chi = entropy_bits(avg);
    for (size_t i = 0; i < weights.size(); ++i)
        chi -= weights[i] / total * entropy_bits(densities[i]);
    return std::max(0.0, chi);
}

double detection_probability_oracle(const Attack& attack, const TimingConfig& cfg, int k) {
    cfg.validate();
    const int d = 1 << k;

    if (std::holds_alternative<NoAttack>(attack)) return 0.0;

    if (const auto* pmr = std::get_if<PathMeasureResend>(&attack)) {
        // Exact sum over Alice's i, Eve's outcome, Bob's outcome, both axes.
        double detect = 0.0;
        for (int i = 0; i < d; ++i) {
            for (int eve = 0; eve < d; ++eve) {
                const double pEve = std::norm(alice_prepare(i, k).amps[eve]);
                // Forward: Bob gets the collapsed basis state -> uniform j.
                // Guess: Bob gets a fresh signal state -> j equals the guess.
                for (int j = 0; j < d; ++j) {
                    double pBob;
                    if (pmr->policy == ResendPolicy::ForwardCollapsed) {
                        PhotonState b = butterfly_transform(PhotonState::basis(k, eve));
                        pBob = std::norm(b.amps[j]);
                    } else {
                        pBob = 1.0 / d;  // uniform guess, decoded deterministically
                    }
                    for (int axis = 0; axis < k; ++axis)
                        if (((j >> axis) & 1) != ((i >> axis) & 1))
                            detect += pEve * pBob / (d * k);
                }
            }
        }
        return detect;
    }

    if (const auto* fsr = std::get_if<FullStateMeasureResend>(&attack)) {
        const Tick holdup =
            std::max<Tick>(0, (d - 1) * cfg.loop_delay() - fsr->shortcutGain);
        return holdup >= cfg.deltaT ? 1.0 : 0.0;
    }

    const auto& probe = std::get<CausalAncillaUnitary>(attack);
    Tick maxBuffer = 0;
    for (Tick t : probe.bufferDelays) maxBuffer = std::max(maxBuffer, t);
    if (maxBuffer >= cfg.deltaT) return 1.0;

    double detect = 0.0;
    for (int i = 0; i < d; ++i) {
        JointState out = run_probe_steps(alice_prepare(i, k), probe, cfg);
        // Analytic outcome distribution: butterfly the path factor, read off
        // row norms. bob_decode_joint samples; here we enumerate instead.
        Eigen::MatrixXcd m = out.amps;
        const double invSqrt2 = 0.7071067811865475244;
        for (int stride = 1; stride < d; stride <<= 1)
            for (int base = 0; base < d; base += 2 * stride)
                for (int off = 0; off < stride; ++off) {
                    Eigen::RowVectorXcd x = m.row(base + off);
                    Eigen::RowVectorXcd y = m.row(base + off + stride);
                    m.row(base + off) = (x + y) * invSqrt2;
                    m.row(base + off + stride) = (x - y) * invSqrt2;
                }
        for (int j = 0; j < d; ++j) {
            const double pj = m.row(j).squaredNorm();
            for (int axis = 0; axis < k; ++axis)
                if (((j >> axis) & 1) != ((i >> axis) & 1)) detect += pj / (d * k);
        }
    }
    return detect;
}

}  // namespace qkdsim
