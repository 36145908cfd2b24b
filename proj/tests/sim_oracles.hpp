#pragma once
// Oracles that rebuild quantities from the event log alone, never from the engine's breakpoints.

#include <cmath>
#include <string>
#include <vector>

#include "pmrhc/scenario.hpp"
#include "pmrhc/simulator.hpp"

namespace oracle {

using namespace pmrhc;

// Left Riemann sum of every R_i at step dt, with R_i driven by presence counts replayed from the
// log and reset only where the log reports a jump (zero crossings, shocks). Targets must keep
// their nominal growth rates, so growth noise is out of scope here.
inline double replay_objective(const Scenario& sc, const SimulationResult& r, double dt) {
    const int M = sc.graph.size();
    std::vector<double> R(M);
    std::vector<int> N(M, 0);
    for (int i = 0; i < M; ++i) R[i] = sc.graph.target(i).initial;
    double t = 0.0, integral = 0.0, carry = 0.0;
    auto step_to = [&](double t1) {
        // Advance on a global dt lattice; carry keeps the lattice aligned across events.
        while (t < t1) {
            const double h = std::min(dt - carry, t1 - t);
            for (int i = 0; i < M; ++i) {
                const Target& tg = sc.graph.target(i);
                const double rate = tg.growth - tg.removal * N[i];
                integral += R[i] * h;
                R[i] = std::max(0.0, R[i] + rate * h);
            }
            t += h;
            carry += h;
            if (carry >= dt - 1e-15) carry = 0.0;
        }
    };
    for (const EventRecord& e : r.events) {
        step_to(e.time);
        switch (e.kind) {
            case EventKind::Arrival:
            case EventKind::TransitEnd: ++N[e.target]; break;
            case EventKind::Uncovering: --N[e.target]; break;
            case EventKind::ZeroCrossing:
            case EventKind::NoiseShock: R[e.target] = e.R; break;
            default: break;
        }
    }
    step_to(r.T);
    return integral / r.T;
}

// Dense left Riemann sum of the recorded breakpoint trajectories.
inline double dense_objective(const SimulationResult& r, double dt) {
    double total = 0.0;
    const long n = std::lround(r.T / dt);
    for (const auto& segs : r.segments)
        for (long k = 0; k < n; ++k) total += segment_value(segs, k * dt) * dt;
    return total / r.T;
}

// Empty when no target ever hosts or is claimed by two agents; otherwise a description.
inline std::string sharing_violation(int M, const SimulationResult& r) {
    std::vector<int> present(M, 0), claim(M, -1);
    for (const EventRecord& e : r.events) {
        const int j = e.target;
        switch (e.kind) {
            case EventKind::Arrival:
                if (claim[j] != -1) return "two agents placed at " + std::to_string(j);
                claim[j] = e.agent;
                [[fallthrough]];
            case EventKind::TransitEnd:
                if (++present[j] > 1) return "N_" + std::to_string(j) + " = 2 at t = " + std::to_string(e.time);
                break;
            case EventKind::Covering:
                if (claim[j] != -1 && claim[j] != e.agent)
                    return "target " + std::to_string(j) + " claimed twice at t = " + std::to_string(e.time);
                claim[j] = e.agent;
                break;
            case EventKind::Uncovering:
                --present[j];
                if (claim[j] == e.agent) claim[j] = -1;
                break;
            default: break;
        }
    }
    return {};
}

}  // namespace oracle
