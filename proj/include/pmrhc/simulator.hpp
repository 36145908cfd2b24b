#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmrhc/rhcp.hpp"
#include "pmrhc/scenario.hpp"

namespace pmrhc {

// Declaration order is the processing priority for simultaneous events.
enum class EventKind {
    ZeroCrossing,
    Covering,
    Uncovering,
    ActiveEnd,
    IdleEnd,
    TransitEnd,
    NoiseShock,
    Arrival,  // logged only, for the placement at t = 0
};

const char* to_string(EventKind k);

struct EventRecord {
    double time = 0.0;
    EventKind kind = EventKind::TransitEnd;
    int agent = -1;
    int target = -1;
    double R = 0.0;  // true uncertainty of `target` at `time`
};

struct VisitRecord {
    int agent = -1;
    int target = -1;
    double arrival = 0.0;
    double departure = 0.0;
};

struct DecisionRecord {
    double time = 0.0;
    int agent = -1;
    int target = -1;
    double horizon = 0.0;  // H after truncation to T - t
    ControlDecision decision;
};

// R(t) = R0 + rate (t - t0) on [t0, next segment's t0).
struct Segment {
    double t0 = 0.0;
    double R0 = 0.0;
    double rate = 0.0;
};

struct SimulationResult {
    double J_T = 0.0;
    double T = 0.0;
    std::vector<EventRecord> events;
    std::vector<VisitRecord> visits;
    std::vector<DecisionRecord> decisions;
    std::vector<std::vector<Segment>> segments;  // per target
    std::vector<double> final_R;
    std::size_t processed_events = 0;
    double wall_seconds = 0.0;

    // Target ids visited by one agent, in order.
    std::vector<int> visit_sequence(int agent) const;
};

class SimulationAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationOptions {
    std::size_t max_events = 1000000;
    bool record_events = true;
};

SimulationResult simulate(const Scenario& scenario, std::uint64_t seed, const SimulationOptions& opt = {});

// Trapezoid sum of the breakpoint lists over [0, T], divided by T.
double accumulate_objective(const std::vector<std::vector<Segment>>& segments, double T);

// Uncertainty of one target at time t from its breakpoint list.
double segment_value(const std::vector<Segment>& segs, double t);

}  // namespace pmrhc
