#include "pmrhc/batch.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "pmrhc/rhcp.hpp"
#include "pmrhc/simulator.hpp"

namespace pmrhc {

namespace {

RunRecord run_one(const RunSpec& spec) {
    RunRecord rec;
    try {
        SimulationOptions opt;
        opt.record_events = false;
        const SimulationResult r = simulate(spec.scenario, spec.seed, opt);
        rec.J_T = r.J_T;
        rec.events = r.processed_events;
        rec.wall_seconds = r.wall_seconds;
    } catch (const SimulationAbort& e) {
        rec.aborted = true;
        rec.error = e.what();
    }
    return rec;
}

int thread_count(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

std::vector<RunRecord> run_batch(std::span<const RunSpec> runs, int threads) {
    std::vector<RunRecord> out(runs.size());
    const auto n = static_cast<std::ptrdiff_t>(runs.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(threads))
    for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = run_one(runs[k]);
    return out;
}

std::vector<RunRecord> run_batch_serial(std::span<const RunSpec> runs) {
    std::vector<RunRecord> out;
    out.reserve(runs.size());
    for (const RunSpec& r : runs) out.push_back(run_one(r));
    return out;
}

std::vector<RfopSolution> solve_rfop_batch(std::span<const RfopProblem> problems, int threads) {
    std::vector<RfopSolution> out(problems.size());
    const auto n = static_cast<std::ptrdiff_t>(problems.size());
#pragma omp parallel for schedule(static) num_threads(thread_count(threads))
    for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = solve_rfop(problems[k].objective, problems[k].bounds);
    return out;
}

std::vector<RfopSolution> solve_rfop_batch_serial(std::span<const RfopProblem> problems) {
    std::vector<RfopSolution> out;
    out.reserve(problems.size());
    for (const RfopProblem& p : problems) out.push_back(solve_rfop(p.objective, p.bounds));
    return out;
}

SweepAxis parse_axis(const std::string& s) {
    if (s == "H") return SweepAxis::H;
    if (s == "alpha") return SweepAxis::Alpha;
    if (s == "beta") return SweepAxis::Beta;
    if (s == "m" || s == "noise-m" || s == "noise_m") return SweepAxis::NoiseM;
    throw ScenarioError("unknown sweep axis '" + s + "' (expected H, alpha, beta or noise-m)");
}

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::H: return "H";
        case SweepAxis::Alpha: return "alpha";
        case SweepAxis::Beta: return "beta";
        case SweepAxis::NoiseM: return "noise-m";
    }
    return "?";
}

Scenario apply_axis(const Scenario& base, SweepAxis axis, double value) {
    Scenario s = base;
    ControllerSpec& c = s.controller;
    switch (axis) {
        case SweepAxis::H: c.H = value; break;
        case SweepAxis::Alpha:
            c.alpha = value;
            if (c.type != ControllerType::ExRhcAlphaBeta) c.type = ControllerType::RhcAlpha;
            break;
        case SweepAxis::Beta:
            c.beta = value;
            c.type = ControllerType::ExRhcAlphaBeta;
            break;
        case SweepAxis::NoiseM: s.noise.m = value; break;
    }
    validate(s);
    return s;
}

std::vector<SweepPoint> summarize(std::span<const double> grid, std::span<const SweepRecord> records) {
    std::vector<SweepPoint> pts(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) pts[p].value = grid[p];
    for (const SweepRecord& r : records) {
        SweepPoint& p = pts.at(r.point);
        if (r.run.aborted) {
            ++p.aborted;
            continue;
        }
        ++p.runs;
        p.mean += r.run.J_T;
    }
    for (SweepPoint& p : pts)
        if (p.runs > 0) p.mean /= p.runs;
    for (const SweepRecord& r : records) {
        if (r.run.aborted) continue;
        const double d = r.run.J_T - pts[r.point].mean;
        pts[r.point].variance += d * d;
    }
    for (SweepPoint& p : pts) p.variance = p.runs > 1 ? p.variance / (p.runs - 1) : 0.0;
    return pts;
}

SweepReport sweep(const Scenario& base, SweepAxis axis, std::vector<double> grid, int seeds, int threads) {
    if (grid.empty()) throw ScenarioError("sweep grid is empty");
    if (seeds < 1) throw ScenarioError("sweep needs at least one seed");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const double half = base.T / 2.0;
    std::ptrdiff_t half_index = -1;
    if (axis == SweepAxis::H)
        for (std::size_t p = 0; p < grid.size(); ++p)
            if (close(grid[p], half)) half_index = static_cast<std::ptrdiff_t>(p);
    const bool extra_half = axis == SweepAxis::H && half_index < 0;

    std::vector<RunSpec> runs;
    std::vector<SweepRecord> records;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const Scenario s = apply_axis(base, axis, grid[p]);
        for (int k = 0; k < seeds; ++k) {
            runs.push_back({s, base.seed + static_cast<std::uint64_t>(k)});
            records.push_back({p, base.seed + static_cast<std::uint64_t>(k), {}});
        }
    }
    if (extra_half) {
        const Scenario s = apply_axis(base, axis, half);
        for (int k = 0; k < seeds; ++k) runs.push_back({s, base.seed + static_cast<std::uint64_t>(k)});
    }
    const std::vector<RunRecord> out = run_batch(runs, threads);

    SweepReport rep;
    rep.axis = axis;
    for (std::size_t k = 0; k < records.size(); ++k) records[k].run = out[k];
    rep.points = summarize(grid, records);
    rep.records = std::move(records);

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < rep.points.size(); ++p)
        if (rep.points[p].runs > 0 && rep.points[p].mean < best) {
            best = rep.points[p].mean;
            rep.argmin = p;
        }

    if (axis == SweepAxis::H) {
        if (extra_half) {
            double sum = 0.0;
            int n = 0;
            for (std::size_t k = rep.records.size(); k < out.size(); ++k)
                if (!out[k].aborted) {
                    sum += out[k].J_T;
                    ++n;
                }
            rep.half_horizon_mean = n > 0 ? sum / n : std::nan("");
        } else {
            rep.half_horizon_mean = rep.points[half_index].mean;
        }
        rep.ratio = rep.half_horizon_mean / std::min(best, rep.half_horizon_mean);
    }

    if (axis == SweepAxis::Alpha || axis == SweepAxis::Beta) {
        const TargetGraph& g = base.graph;
        for (SweepPoint& p : rep.points)
            for (int i = 0; i < g.size(); ++i)
                if (close(p.value, axis == SweepAxis::Alpha ? nominal_alpha(g, i) : nominal_beta(g, i))) p.nominal = true;
    }
    return rep;
}

nlohmann::json report_json(const SweepReport& r) {
    nlohmann::json j;
    j["axis"] = to_string(r.axis);
    nlohmann::json pts = nlohmann::json::array();
    for (const SweepPoint& p : r.points) {
        nlohmann::json q{{"value", p.value}, {"mean", p.mean}, {"variance", p.variance}, {"runs", p.runs}};
        if (p.aborted) q["aborted"] = p.aborted;
        if (r.axis == SweepAxis::Alpha || r.axis == SweepAxis::Beta) q["nominal"] = p.nominal;
        pts.push_back(q);
    }
    j["points"] = pts;
    j["argmin"] = {{"index", r.argmin}, {"value", r.points.at(r.argmin).value}, {"mean", r.points.at(r.argmin).mean}};
    if (r.axis == SweepAxis::H) {
        j["half_horizon_mean"] = r.half_horizon_mean;
        j["ratio"] = r.ratio;
    }
    return j;
}

std::string records_csv(const SweepReport& r) {
    std::ostringstream os;
    os << to_string(r.axis) << ",seed,J_T,events,aborted\n";
    char buf[64];
    for (const SweepRecord& rec : r.records) {
        std::snprintf(buf, sizeof buf, "%.17g,", r.points[rec.point].value);
        os << buf << rec.seed << ',';
        std::snprintf(buf, sizeof buf, "%.17g", rec.run.J_T);
        os << buf << ',' << rec.run.events << ',' << (rec.run.aborted ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace pmrhc
