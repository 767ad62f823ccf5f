#ifndef QKDSIM_TIMING_HPP
#define QKDSIM_TIMING_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qkdsim {

/// All times are integer ticks; c is normalized to 1 so lengths are times.
using Tick = int64_t;

/// Relativistic bookkeeping parameters.
///   deltaT    measurement time accuracy Δt
///   epsilon   loop margin ε > 0 (defaults to Δt when unset)
///   distanceD Alice-Bob straight-line flight time
///   mu        suboptimal-path excess folded into both transit and loops
/// Eve's domain is one contiguous channel interval [evePositionTime,
/// evePositionTime + eveDomainLength) measured as offset from Alice's boundary.
struct TimingConfig {
    Tick deltaT = 1;
    Tick epsilon = 1;
    Tick distanceD = 0;
    Tick mu = 0;
    int k = 2;
    Tick meanEmissionGap = 16;
    Tick evePositionTime = 0;
    Tick eveDomainLength = 1;

    Tick loop_delay() const { return deltaT + epsilon + mu; }
    void validate() const;
};

/// Per-component emission/transit times for one photon. Component p is held
/// back by p loop delays, so departures are strictly increasing (one
/// component at a time in the channel).
struct Schedule {
    Tick emissionTime = 0;
    std::vector<Tick> componentDeparture;
    std::vector<Tick> componentArrival;
    Tick expectedDetection = 0;
};

enum class ArrivalFlag { OK, LATE, ANOMALY };

const char* to_string(ArrivalFlag flag);

Schedule build_schedule(Tick emissionTime, const TimingConfig& cfg);

/// LATE iff actual - expected >= deltaT (threshold inclusive); ANOMALY iff
/// the photon is early by more than deltaT, which no honest channel produces.
ArrivalFlag check_arrival(Tick expected, Tick actual, const TimingConfig& cfg);

/// Which path components sit inside Eve's domain at instant t.
struct CausalWindow {
    Tick time = 0;
    std::vector<int> accessible;  // ascending path indices, contiguous run
};

CausalWindow causal_window(Tick evePositionTime, Tick domainLength,
                           const Schedule& schedule, const TimingConfig& cfg, Tick t);

/// Toggle timetable for the mode-coupling switches. Alice-side switches are
/// S1..S(2^k-1) (pair mergers first, root last), Bob-side mirrors them as
/// S(2^k)..S(2^(k+1)-2). For k=2 this is S1-S3 and S4-S6.
struct SwitchTimetable {
    std::map<std::string, std::vector<Tick>> toggles;
    // slot start time per (photon, component), ascending photon then component
    std::vector<std::vector<Tick>> slotStarts;
};

/// Routes each component of each photon into its channel time slot. Slots are
/// [start, start + slotWidth); any overlap raises InterlaceError naming the
/// colliding (photon, component) pair. slotWidth 0 means one loop delay.
SwitchTimetable interlace_schedule(const std::vector<Tick>& photonEmissions,
                                   const TimingConfig& cfg, Tick slotWidth = 0);

}  // namespace qkdsim

#endif
