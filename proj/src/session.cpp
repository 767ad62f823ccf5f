#include "qkdsim/session.hpp"

#include <algorithm>

#include "qkdsim/adversary.hpp"
#include "qkdsim/errors.hpp"

namespace qkdsim {

SessionStats run_session(const SessionConfig& cfg) {
    cfg.validate();
    const int d = 1 << cfg.k;

    std::vector<SiftRecord> records;
    std::vector<EveRecord> eveRecords;
    std::vector<int> sentIndices;
    std::vector<int> disclosedAxes;
    records.reserve(cfg.photons);

    Tick emission = 0;
    for (long pid = 0; pid < cfg.photons; ++pid) {
        Rng rng = Rng::stream(cfg.seed, static_cast<uint64_t>(pid));
        emission += 1 + rng.geometric(static_cast<double>(cfg.timing.meanEmissionGap));

        const int sent = static_cast<int>(rng.next_below(d));
        PhotonState state = alice_prepare(sent, cfg.k);
        Schedule honest = build_schedule(emission, cfg.timing);

        AttackResult attacked = apply_attack(state, honest, cfg.attack, cfg.timing, rng);
        attacked.record.photonId = static_cast<int>(pid);

        Tick maxDelay = 0;
        for (int p = 0; p < d; ++p)
            maxDelay = std::max(maxDelay, attacked.schedule.componentArrival[p] -
                                              honest.componentArrival[p]);
        const Tick actualDetection = honest.expectedDetection + maxDelay;
        const ArrivalFlag flag =
            check_arrival(honest.expectedDetection, actualDetection, cfg.timing);

        int outcome;
        if (auto* joint = std::get_if<JointState>(&attacked.state)) {
            auto [j, ancilla] = bob_decode_joint(*joint, rng);
            outcome = j;
            attacked.record.ancillaFinal = ancilla;
        } else {
            outcome = bob_decode(std::get<PhotonState>(attacked.state), rng);
        }

        Disclosure disclosure = bob_disclose(outcome, rng, cfg.k);

        SiftRecord rec;
        rec.photonId = static_cast<int>(pid);
        rec.sent = sent;
        rec.received = outcome;
        rec.arrivalFlag = flag;
        rec.disclosedAxis = disclosure.axis;
        rec.disclosedBit = disclosure.bit;
        rec.keptBits = disclosure.keptBits;
        records.push_back(std::move(rec));

        eveRecords.push_back(std::move(attacked.record));
        sentIndices.push_back(sent);
        disclosedAxes.push_back(disclosure.axis);
    }

    SessionStats stats = alice_verify(records, cfg.k, cfg.abortThreshold);
    if (!std::holds_alternative<NoAttack>(cfg.attack))
        stats.eveInformationBits =
            eve_information(eveRecords, sentIndices, disclosedAxes, cfg.k);
    return stats;
}

nlohmann::ordered_json result_json(const SessionConfig& cfg, const SessionStats& stats) {
    nlohmann::ordered_json doc;
    doc["schemaVersion"] = 1;
    doc["config"] = config_echo(cfg);
    nlohmann::ordered_json res;
    res["totalPhotons"] = stats.totalPhotons;
    res["keyLength"] = stats.keyBits.size();
    res["keyRatePerPhoton"] = stats.keyRatePerPhoton;
    res["timingViolations"] = stats.timingViolations;
    res["bitMismatches"] = stats.bitMismatches;
    res["detected"] = stats.detected;
    res["eveInformationBits"] = stats.eveInformationBits;
    res["keyBits"] = stats.keyBits;
    doc["result"] = res;
    return doc;
}

}  // namespace qkdsim
