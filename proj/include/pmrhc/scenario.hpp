#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmrhc/model.hpp"

namespace pmrhc {

enum class ControllerType { Rhc, RhcAlpha, ExRhcAlphaBeta, DenominatorFree, PeriodicBaseline };

enum class NoiseModel { None, Growth, Speed, Location, StateShock, Channel };

const char* to_string(ControllerType t);
const char* to_string(NoiseModel m);
ControllerType parse_controller(const std::string& s);
NoiseModel parse_noise(const std::string& s);

struct ControllerSpec {
    ControllerType type = ControllerType::Rhc;
    std::optional<double> H;      // default T / 2
    std::optional<double> alpha;  // default 1 / |closed neighbourhood|^2 per target
    std::optional<double> beta;   // default 1 / |closed neighbourhood| per target
};

struct NoiseSpec {
    NoiseModel model = NoiseModel::None;
    double m = 0.0;
    double lambda = 10.0;  // mean time between state shocks
    double radius = 20.0;  // location-noise ball radius
};

struct AgentSpec {
    int start = -1;  // -1 places the agent by the spreading rule
};

struct Scenario {
    TargetGraph graph;
    std::vector<AgentSpec> agents;
    double T = 500.0;
    ControllerSpec controller;
    NoiseSpec noise;
    std::uint64_t seed = 0;

    double horizon() const { return controller.H.value_or(T / 2.0); }
};

class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Throws ScenarioError on inconsistent settings.
void validate(const Scenario& s);

// Start targets after applying the spreading rule and resolving collisions.
std::vector<int> initial_placement(const Scenario& s);

Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string dump_scenario(const Scenario& s);

enum class Topology { Line, Star, Grid, RandomGeometric };
Topology parse_topology(const std::string& s);

struct GenerateOptions {
    Topology topology = Topology::Line;
    int targets = 3;
    int agents = 1;
    std::uint64_t seed = 0;
    double side = 600.0;  // mission space edge length
    double speed = 50.0;
};

Scenario generate_scenario(const GenerateOptions& opt);

}  // namespace pmrhc
