#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmrhc/rfop.hpp"
#include "pmrhc/scenario.hpp"

namespace pmrhc {

struct RunSpec {
    Scenario scenario;
    std::uint64_t seed = 0;
};

struct RunRecord {
    double J_T = 0.0;
    std::size_t events = 0;
    double wall_seconds = 0.0;
    bool aborted = false;
    std::string error;
};

// Independent simulations; record k always belongs to runs[k]. threads <= 0 uses every core.
std::vector<RunRecord> run_batch(std::span<const RunSpec> runs, int threads = 0);
std::vector<RunRecord> run_batch_serial(std::span<const RunSpec> runs);

struct RfopProblem {
    RationalObjective objective;
    PolytopeBounds bounds;
};

std::vector<RfopSolution> solve_rfop_batch(std::span<const RfopProblem> problems, int threads = 0);
std::vector<RfopSolution> solve_rfop_batch_serial(std::span<const RfopProblem> problems);

enum class SweepAxis { H, Alpha, Beta, NoiseM };
SweepAxis parse_axis(const std::string& s);
const char* to_string(SweepAxis a);

// Copy of the scenario with the swept parameter set. Alpha and beta switch the controller to the
// weighted variant that reads them when the base controller ignores them.
Scenario apply_axis(const Scenario& base, SweepAxis axis, double value);

struct SweepPoint {
    double value = 0.0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased; 0 for a single run
    int runs = 0;
    int aborted = 0;
    bool nominal = false;  // equals a per-target nominal alpha or beta
};

struct SweepRecord {
    std::size_t point = 0;
    std::uint64_t seed = 0;
    RunRecord run;
};

struct SweepReport {
    SweepAxis axis = SweepAxis::H;
    std::vector<SweepPoint> points;  // ascending grid
    std::size_t argmin = 0;
    // H sweeps only: J_T at H = T/2 over the smallest J_T seen, T/2 included.
    double half_horizon_mean = 0.0;
    double ratio = 0.0;
    std::vector<SweepRecord> records;  // ordered by grid point, then seed
};

// Seeds are base.seed, base.seed + 1, ...
SweepReport sweep(const Scenario& base, SweepAxis axis, std::vector<double> grid, int seeds, int threads = 0);

// Statistics from the per-run records alone; used by sweep and for offline recomputation.
std::vector<SweepPoint> summarize(std::span<const double> grid, std::span<const SweepRecord> records);

nlohmann::json report_json(const SweepReport& r);
std::string records_csv(const SweepReport& r);

}  // namespace pmrhc
