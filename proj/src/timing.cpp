#include "qkdsim/timing.hpp"

#include <algorithm>

#include "qkdsim/errors.hpp"

namespace qkdsim {

void TimingConfig::validate() const {
    if (k < 1) throw ConfigError("timing: k must be >= 1");
    if (deltaT <= 0) throw ConfigError("timing: deltaT must be positive");
    if (epsilon <= 0) throw ConfigError("timing: epsilon must be positive");
    if (distanceD < 0) throw ConfigError("timing: distanceD must be >= 0");
    if (mu < 0) throw ConfigError("timing: mu must be >= 0");
    if (meanEmissionGap < 1) throw ConfigError("timing: meanEmissionGap must be >= 1");
    if (eveDomainLength < 0) throw ConfigError("timing: eveDomainLength must be >= 0");
}

const char* to_string(ArrivalFlag flag) {
    switch (flag) {
        case ArrivalFlag::OK: return "OK";
        case ArrivalFlag::LATE: return "LATE";
        case ArrivalFlag::ANOMALY: return "ANOMALY";
    }
    return "?";
}

Schedule build_schedule(Tick emissionTime, const TimingConfig& cfg) {
    cfg.validate();
    const int paths = 1 << cfg.k;
    const Tick loop = cfg.loop_delay();
    Schedule s;
    s.emissionTime = emissionTime;
    s.componentDeparture.resize(paths);
    s.componentArrival.resize(paths);
    for (int p = 0; p < paths; ++p) {
        s.componentDeparture[p] = emissionTime + p * loop;
        s.componentArrival[p] = s.componentDeparture[p] + cfg.distanceD + cfg.mu;
    }
    // Bob delays earlier components so all coincide at the final beamsplitters.
    s.expectedDetection = s.componentArrival[paths - 1] + (paths - 1) * loop;
    return s;
}

ArrivalFlag check_arrival(Tick expected, Tick actual, const TimingConfig& cfg) {
    if (actual - expected >= cfg.deltaT) return ArrivalFlag::LATE;
    if (actual < expected - cfg.deltaT) return ArrivalFlag::ANOMALY;
    return ArrivalFlag::OK;
}

CausalWindow causal_window(Tick evePositionTime, Tick domainLength,
                           const Schedule& schedule, const TimingConfig& cfg, Tick t) {
    if (evePositionTime < 0 || evePositionTime > cfg.distanceD + cfg.mu)
        throw ConfigError("causal_window: Eve domain outside the channel");
    CausalWindow w;
    w.time = t;
    const int paths = static_cast<int>(schedule.componentDeparture.size());
    for (int p = 0; p < paths; ++p) {
        const Tick enter = schedule.componentDeparture[p] + evePositionTime;
        if (enter <= t && t < enter + domainLength) w.accessible.push_back(p);
    }
    return w;
}

namespace {

// Switch nodes on component p's route through the binary coupling tree:
// pair mergers numbered first, then each higher level, root last.
std::vector<int> route_nodes(int p, int k) {
    std::vector<int> nodes;
    int offset = 0;
    for (int level = 0; level < k; ++level) {
        nodes.push_back(offset + (p >> (level + 1)) + 1);
        offset += 1 << (k - 1 - level);
    }
    return nodes;
}

}  // namespace

SwitchTimetable interlace_schedule(const std::vector<Tick>& photonEmissions,
                                   const TimingConfig& cfg, Tick slotWidth) {
    cfg.validate();
    if (!std::is_sorted(photonEmissions.begin(), photonEmissions.end()))
        throw ConfigError("interlace_schedule: emission times must be sorted");
    const Tick loop = cfg.loop_delay();
    if (slotWidth <= 0) slotWidth = loop;
    const int paths = 1 << cfg.k;
    const int nodesPerSide = paths - 1;

    SwitchTimetable table;

    struct Slot {
        Tick start;
        int photon;
        int component;
    };
    std::vector<Slot> slots;
    table.slotStarts.resize(photonEmissions.size());
    for (size_t n = 0; n < photonEmissions.size(); ++n) {
        table.slotStarts[n].resize(paths);
        for (int p = 0; p < paths; ++p) {
            const Tick start = photonEmissions[n] + p * loop;
            table.slotStarts[n][p] = start;
            slots.push_back({start, static_cast<int>(n), p});
        }
    }
    std::stable_sort(slots.begin(), slots.end(),
                     [](const Slot& a, const Slot& b) { return a.start < b.start; });
    for (size_t s = 1; s < slots.size(); ++s) {
        if (slots[s].start < slots[s - 1].start + slotWidth)
            throw InterlaceError(
                "interlace_schedule: channel slot collision between photon " +
                std::to_string(slots[s - 1].photon) + " component " +
                std::to_string(slots[s - 1].component) + " and photon " +
                std::to_string(slots[s].photon) + " component " +
                std::to_string(slots[s].component));
    }

    for (size_t n = 0; n < photonEmissions.size(); ++n) {
        for (int p = 0; p < paths; ++p) {
            const Tick departure = table.slotStarts[n][p];
            const Tick arrival = departure + cfg.distanceD + cfg.mu;
            for (int node : route_nodes(p, cfg.k)) {
                table.toggles["S" + std::to_string(node)].push_back(departure);
                table.toggles["S" + std::to_string(nodesPerSide + node)].push_back(arrival);
            }
        }
    }
    for (auto& [name, times] : table.toggles) std::sort(times.begin(), times.end());
    return table;
}

}  // namespace qkdsim
