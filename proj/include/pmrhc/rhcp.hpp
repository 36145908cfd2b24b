#pragma once

#include <array>
#include <limits>
#include <span>
#include <vector>

#include "pmrhc/model.hpp"
#include "pmrhc/rfop.hpp"

namespace pmrhc {

enum class ProblemForm {
    Arrival,    // RHCP1: active at the current target
    Idle,       // RHCP2: R = 0 at the current target
    Departure,  // RHCP3: leaving the current target
};

const char* to_string(ProblemForm form);

struct RhcpContext {
    const TargetGraph* graph = nullptr;
    std::span<const double> R;             // uncertainty as seen by the deciding agent
    const TransitTable* transit = nullptr; // null means the graph's own table
    std::span<const char> blocked;         // targets covered by other agents; may be empty
    int current = 0;
    double time = 0.0;
    double horizon = 0.0;                  // already truncated to T - t
    std::vector<int> candidates;           // eligible next-visit targets, ascending

    double rho(int i, int j) const;
    bool is_blocked(int m) const;
    const Target& target(int m) const { return graph->target(m); }
};

// Context with candidates = all neighbours of `current`.
RhcpContext make_context(const TargetGraph& graph, std::span<const double> R, int current, double horizon);

struct ControlDecision {
    ProblemForm form = ProblemForm::Departure;
    double active_here = 0.0;
    double idle_here = 0.0;
    int next = -1;
    double active_next = 0.0;
    double idle_next = 0.0;
    int after = -1;  // second target of a two-hop plan
    double active_after = 0.0;
    double idle_after = 0.0;
    double window = 0.0;  // planning horizon w actually used
    double cost = std::numeric_limits<double>::infinity();

    bool feasible() const { return next >= 0; }
};

// Relative weights on the cost of the next target, the target after it, and everything else.
struct Weights {
    double next = 1.0;
    double after = 1.0;
    double rest = 1.0;
};

double active_time_bound(double R, double A, double B, double lead);

// u^B = intercept + slope * (upstream plan time).
struct AffineBound {
    double intercept = 0.0;
    double slope = 0.0;
};
AffineBound active_time_bound_affine(double R, double A, double B, double lead);

// Quadratic numerator over affine denominator in the plan slots
// (active_here, idle_here, active_next, idle_next); two-hop plans use
// (active_next, idle_next, active_after, idle_after) in the same slots.
struct PlanObjective {
    std::array<std::array<double, 4>, 4> quad{};  // quad[a][b], a <= b
    std::array<double, 4> lin{};
    double constant = 0.0;
    std::array<double, 4> den_lin{};
    double den_const = 0.0;

    double numerator(const std::array<double, 4>& s) const;
    double denominator(const std::array<double, 4>& s) const;
    double operator()(const std::array<double, 4>& s) const { return numerator(s) / denominator(s); }
};

struct Rhcp3Coefficients {
    std::array<double, 6> c{};
    double transit = 0.0;
    PlanObjective objective() const;
    double operator()(double u, double v) const;
};

struct Rhcp2Coefficients {
    std::array<double, 10> c{};
    double transit = 0.0;
    PlanObjective objective() const;
};

struct Rhcp1Coefficients {
    std::array<double, 15> c{};
    double transit = 0.0;
    PlanObjective objective() const;
};

struct ExtendedCoefficients {
    std::array<double, 15> c{};
    double transit_first = 0.0;
    double transit_second = 0.0;
    PlanObjective objective() const;
};

Rhcp3Coefficients rhcp3_objective_coeffs(const RhcpContext& ctx, int j, const Weights& w = {});
Rhcp2Coefficients rhcp2_objective_coeffs(const RhcpContext& ctx, int j);
Rhcp1Coefficients rhcp1_objective_coeffs(const RhcpContext& ctx, int j);
ExtendedCoefficients extended_objective_coeffs(const RhcpContext& ctx, int j, int k, const Weights& w = {});

// slot = c0 + cx x + cy y
struct SlotMap {
    double c0 = 0.0;
    double cx = 0.0;
    double cy = 0.0;
};

struct CaseMapping {
    RationalObjective objective;
    PolytopeBounds bounds;
    std::array<SlotMap, 4> slots{};
    bool feasible = true;
};

RationalObjective substitute(const PlanObjective& J, const std::array<SlotMap, 4>& slots);

std::vector<CaseMapping> rhcp3_case_mappings(const RhcpContext& ctx, int j, const Weights& w = {});
std::vector<CaseMapping> rhcp2_case_mappings(const RhcpContext& ctx, int j);
std::vector<CaseMapping> rhcp1_case_mappings(const RhcpContext& ctx, int j);
std::vector<CaseMapping> extended_case_mappings(const RhcpContext& ctx, int j, int k, const Weights& w = {});

// Per-neighbour solves; an infeasible neighbour comes back with next == -1.
ControlDecision solve_rhcp3(const RhcpContext& ctx, int j, const Weights& w = {});
ControlDecision solve_rhcp3_rfop(const RhcpContext& ctx, int j, const Weights& w = {});
ControlDecision solve_rhcp2(const RhcpContext& ctx, int j);
ControlDecision solve_rhcp1(const RhcpContext& ctx, int j);
ControlDecision solve_rhcp3_extended(const RhcpContext& ctx, int j, int k, const Weights& w = {});
ControlDecision denominator_free_rhcp3(const RhcpContext& ctx, int j);

// Cheapest feasible decision; equal costs go to the lower target id.
ControlDecision next_visit(std::span<const ControlDecision> per_neighbor);

// Best decision over all candidates for each problem form.
ControlDecision best_rhcp1(const RhcpContext& ctx);
ControlDecision best_rhcp2(const RhcpContext& ctx);
ControlDecision best_rhcp3(const RhcpContext& ctx, const Weights& w = {});
ControlDecision best_denominator_free(const RhcpContext& ctx);

// Two-hop pair selection with fallback to the one-hop problem.
ControlDecision best_extended(const RhcpContext& ctx, const Weights& w);

double nominal_alpha(const TargetGraph& graph, int i);
double nominal_beta(const TargetGraph& graph, int i);

// alpha = 0 uses the closed-form argmin; alpha > 0 re-solves with reweighted costs.
ControlDecision weighted_next_visit(const RhcpContext& ctx, double alpha);
ControlDecision weighted_extended_next_visit(const RhcpContext& ctx, double alpha, double beta);

// Zero-dwell shortcuts used by the two functions above.
ControlDecision alpha_zero_shortcut(const RhcpContext& ctx);
ControlDecision alpha_beta_zero_shortcut(const RhcpContext& ctx);

// Local objective of a one-hop or two-hop decision evaluated by direct projection.
double projected_cost(const RhcpContext& ctx, const ControlDecision& d, const Weights& w = {});

}  // namespace pmrhc
