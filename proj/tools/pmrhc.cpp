// Command-line front end: run, sweep, generate, validate.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "pmrhc/batch.hpp"
#include "pmrhc/output.hpp"
#include "pmrhc/scenario.hpp"
#include "pmrhc/simulator.hpp"

namespace fs = std::filesystem;
using namespace pmrhc;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kAbort = 2;

struct Overrides {
    std::string controller;
    std::optional<double> H, alpha, beta, m, lambda;
    std::string noise;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--controller", o.controller, "rhc | rhc_alpha | ex_rhc_alpha_beta | denominator_free | periodic_baseline");
    cmd->add_option("--H", o.H, "planning horizon upper bound");
    cmd->add_option("--alpha", o.alpha, "weight on the next target");
    cmd->add_option("--beta", o.beta, "weight on the target after next");
    cmd->add_option("--noise", o.noise, "none | growth | speed | location | state_shock | channel");
    cmd->add_option("--m", o.m, "noise magnitude");
    cmd->add_option("--lambda", o.lambda, "mean time between state shocks");
}

Scenario load_with(const std::string& path, const Overrides& o) {
    Scenario s = load_scenario(path);
    if (!o.controller.empty()) s.controller.type = parse_controller(o.controller);
    if (o.H) s.controller.H = *o.H;
    if (o.alpha) s.controller.alpha = *o.alpha;
    if (o.beta) s.controller.beta = *o.beta;
    if (!o.noise.empty()) s.noise.model = parse_noise(o.noise);
    if (o.m) s.noise.m = *o.m;
    if (o.lambda) s.noise.lambda = *o.lambda;
    validate(s);
    return s;
}

fs::path out_dir(const std::string& flag) {
    fs::path p = !flag.empty() ? fs::path(flag) : fs::path(std::getenv("PMRHC_OUT_DIR") ? std::getenv("PMRHC_OUT_DIR") : ".");
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> g;
    // lo:hi:n for n evenly spaced points, otherwise a comma list.
    if (std::count(spec.begin(), spec.end(), ':') == 2) {
        const auto a = spec.find(':'), b = spec.rfind(':');
        const double lo = std::stod(spec.substr(0, a)), hi = std::stod(spec.substr(a + 1, b - a - 1));
        const int n = std::stoi(spec.substr(b + 1));
        if (n < 1) throw ScenarioError("grid needs at least one point");
        for (int k = 0; k < n; ++k) g.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
        return g;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) g.push_back(std::stod(item));
    if (g.empty()) throw ScenarioError("grid is empty");
    return g;
}

int cmd_run(const std::string& path, const Overrides& o, int seeds, const std::string& out) {
    const Scenario s = load_with(path, o);
    const fs::path dir = out_dir(out);
    const int N = static_cast<int>(s.agents.size());
    for (int k = 0; k < seeds; ++k) {
        const std::uint64_t seed = s.seed + static_cast<std::uint64_t>(k);
        const SimulationResult r = simulate(s, seed);
        const std::string tag = seeds == 1 ? "" : "_seed" + std::to_string(seed);
        write_file(dir / ("trace" + tag + ".csv"), trace_csv(r));
        std::ostringstream traj;
        write_trajectories(traj, r);
        write_file(dir / ("trajectories" + tag + ".csv"), traj.str());
        nlohmann::json sum = result_summary(r, N);
        sum["seed"] = seed;
        sum["controller"] = to_string(s.controller.type);
        write_file(dir / ("summary" + tag + ".json"), sum.dump(2) + "\n");
        std::printf("seed %llu  J_T %.10g  events %zu  wall %.3fs\n", static_cast<unsigned long long>(seed), r.J_T,
                    r.processed_events, r.wall_seconds);
    }
    return kOk;
}

int cmd_sweep(const std::string& path, const Overrides& o, const std::string& axis, const std::string& grid, int seeds,
              int parallel, const std::string& out) {
    const Scenario s = load_with(path, o);
    const SweepReport rep = sweep(s, parse_axis(axis), parse_grid(grid), seeds, parallel);
    const fs::path dir = out_dir(out);
    write_file(dir / "sweep_report.json", report_json(rep).dump(2) + "\n");
    write_file(dir / "sweep_records.csv", records_csv(rep));
    std::printf("%-12s %-14s %-14s %s\n", to_string(rep.axis), "mean J_T", "variance", "runs");
    for (std::size_t p = 0; p < rep.points.size(); ++p) {
        const SweepPoint& q = rep.points[p];
        std::printf("%-12.6g %-14.8g %-14.6g %d%s%s\n", q.value, q.mean, q.variance, q.runs, q.nominal ? "  nominal" : "",
                    p == rep.argmin ? "  min" : "");
    }
    if (rep.axis == SweepAxis::H) std::printf("J_T(H=T/2) / min J_T = %.6f\n", rep.ratio);
    int aborted = 0;
    for (const SweepPoint& q : rep.points) aborted += q.aborted;
    if (aborted) {
        std::fprintf(stderr, "%d run(s) aborted\n", aborted);
        return kAbort;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persistent monitoring with event-driven receding horizon control"};
    app.require_subcommand(1);

    Overrides o;
    std::string scenario, out, axis = "H", grid, topology = "line";
    int seeds = 1, parallel = 0, targets = 3, agents = 1;
    std::uint64_t gen_seed = 0;

    auto* run = app.add_subcommand("run", "simulate a scenario and write trace, trajectories and summary");
    run->add_option("--scenario", scenario, "scenario JSON file")->required();
    add_overrides(run, o);
    run->add_option("--seeds", seeds, "number of seeds, starting at the scenario seed")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "output directory (default $PMRHC_OUT_DIR or .)");

    auto* sw = app.add_subcommand("sweep", "sweep one parameter over a grid and several seeds");
    sw->add_option("--scenario", scenario, "scenario JSON file")->required();
    add_overrides(sw, o);
    sw->add_option("--axis", axis, "H | alpha | beta | noise-m");
    sw->add_option("--grid", grid, "comma list or lo:hi:n")->required();
    sw->add_option("--seeds", seeds, "number of seeds per grid point")->check(CLI::PositiveNumber);
    sw->add_option("--parallel", parallel, "worker threads (0 = all cores)");
    sw->add_option("--out", out, "output directory (default $PMRHC_OUT_DIR or .)");

    auto* gen = app.add_subcommand("generate", "write a synthetic scenario");
    gen->add_option("--topology", topology, "line | star | grid | random-geometric");
    gen->add_option("--targets,-M", targets, "number of targets");
    gen->add_option("--agents,-N", agents, "number of agents");
    gen->add_option("--seed", gen_seed, "layout seed");
    gen->add_option("--out", out, "output file (default stdout)");

    auto* val = app.add_subcommand("validate", "check a scenario file");
    val->add_option("--scenario", scenario, "scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*run) return cmd_run(scenario, o, seeds, out);
        if (*sw) return cmd_sweep(scenario, o, axis, grid, seeds, parallel, out);
        if (*gen) {
            GenerateOptions g;
            g.topology = parse_topology(topology);
            g.targets = targets;
            g.agents = agents;
            g.seed = gen_seed;
            const std::string text = dump_scenario(generate_scenario(g));
            if (out.empty())
                std::cout << text;
            else
                write_file(out, text);
            return kOk;
        }
        if (*val) {
            const Scenario s = load_scenario(scenario);
            std::printf("ok: %d targets, %zu edges, %zu agents, T = %g, H = %g\n", s.graph.size(), s.graph.edges().size(),
                        s.agents.size(), s.T, s.horizon());
            return kOk;
        }
    } catch (const SimulationAbort& e) {
        std::fprintf(stderr, "simulation aborted: %s\n", e.what());
        return kAbort;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInvalid;
    }
    return kOk;
}
