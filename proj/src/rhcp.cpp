#include "pmrhc/rhcp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pmrhc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Weighted pair sums: p and q get their own weights, every other member gets wr.
NeighborhoodParams weigh(const NeighborhoodParams& s, double Ap, double Aq, double Rp, double Rq, double wp,
                         double wq, double wr) {
    NeighborhoodParams o;
    o.A_rest = wr * s.A_rest;
    o.R_rest = wr * s.R_rest;
    o.A_no_p = o.A_rest + wq * Aq;
    o.A_no_q = o.A_rest + wp * Ap;
    o.A_all = o.A_rest + wp * Ap + wq * Aq;
    o.R_no_p = o.R_rest + wq * Rq;
    o.R_no_q = o.R_rest + wp * Rp;
    o.R_all = o.R_rest + wp * Rp + wq * Rq;
    return o;
}

void require_neighbor(const RhcpContext& ctx, int i, int j) {
    if (i == j || !ctx.graph->has_edge(i, j))
        throw ModelError("target " + std::to_string(j) + " is not a neighbour of " + std::to_string(i));
}

std::array<double, 4> eval_slots(const std::array<SlotMap, 4>& slots, double x, double y) {
    std::array<double, 4> s{};
    for (int a = 0; a < 4; ++a) {
        double v = slots[a].c0;
        if (slots[a].cx != 0.0) v += slots[a].cx * x;
        if (slots[a].cy != 0.0) v += slots[a].cy * y;
        s[a] = std::max(0.0, v);
    }
    return s;
}

ControlDecision infeasible(ProblemForm form) {
    ControlDecision d;
    d.form = form;
    return d;
}

// Cases are tried in order; a later case replaces the incumbent only when clearly cheaper.
struct CaseResult {
    std::array<double, 4> slots{};
    double value = kInf;
};

CaseResult solve_cases(const std::vector<CaseMapping>& cases) {
    CaseResult best;
    for (const CaseMapping& m : cases) {
        if (!m.feasible) continue;
        const RfopSolution s = solve_rfop(m.objective, m.bounds);
        if (!std::isfinite(best.value) || s.value < best.value - 1e-12 * std::max(1.0, std::abs(best.value))) {
            best.value = s.value;
            best.slots = eval_slots(m.slots, s.x, s.y);
        }
    }
    return best;
}

// Four-case split shared by the arrival problem and the two-hop problem. Slots 0, 1 belong to
// the first target (bound u1 = first_bound), slots 2, 3 to the second, whose bound is
// second.intercept + second.slope * (slot0 + slot1). `room` is the plan time left for dwelling.
std::vector<CaseMapping> four_cases(const PlanObjective& J, double first_bound, AffineBound second, double room) {
    const double Lb = second.intercept;
    const double Pb = second.slope;
    std::vector<CaseMapping> out(4);

    // 1: (u1, u2), both below their bounds.
    out[0].slots = {SlotMap{0, 1, 0}, SlotMap{}, SlotMap{0, 0, 1}, SlotMap{}};
    out[0].bounds = PolytopeBounds{Pb, Lb, 1.0, room, first_bound};
    // 2: (u1, v2) with u2 at its bound.
    out[1].slots = {SlotMap{0, 1, 0}, SlotMap{}, SlotMap{Lb, Pb, 0}, SlotMap{0, 0, 1}};
    out[1].bounds = PolytopeBounds{0.0, kInf, 1.0 + Pb, room - Lb, first_bound};
    // 3: (v1, u2) with u1 at its bound.
    out[2].slots = {SlotMap{first_bound, 0, 0}, SlotMap{0, 1, 0}, SlotMap{0, 0, 1}, SlotMap{}};
    out[2].bounds = PolytopeBounds{Pb, Lb + Pb * first_bound, 1.0, room - first_bound, kInf};
    // 4: (v1, v2) with both active times at their bounds.
    out[3].slots = {SlotMap{first_bound, 0, 0}, SlotMap{0, 1, 0}, SlotMap{Lb + Pb * first_bound, Pb, 0},
                    SlotMap{0, 0, 1}};
    out[3].bounds = PolytopeBounds{0.0, kInf, 1.0 + Pb, room - Lb - (1.0 + Pb) * first_bound, kInf};

    for (CaseMapping& m : out) {
        m.objective = substitute(J, m.slots);
        m.feasible = m.bounds.M >= 0.0;
    }
    return out;
}

ControlDecision one_hop_decision(ProblemForm form, int j, const std::array<double, 4>& s, double rho, double cost) {
    ControlDecision d;
    d.form = form;
    d.active_here = s[0];
    d.idle_here = s[1];
    d.next = j;
    d.active_next = s[2];
    d.idle_next = s[3];
    d.window = rho + s[0] + s[1] + s[2] + s[3];
    d.cost = cost;
    return d;
}

ControlDecision pick_best(const RhcpContext& ctx, ControlDecision (*solve)(const RhcpContext&, int)) {
    std::vector<ControlDecision> all;
    for (int j : ctx.candidates) all.push_back(solve(ctx, j));
    return next_visit(all);
}

}  // namespace

const char* to_string(ProblemForm form) {
    switch (form) {
        case ProblemForm::Arrival: return "arrival";
        case ProblemForm::Idle: return "idle";
        case ProblemForm::Departure: return "departure";
    }
    return "?";
}

double RhcpContext::rho(int i, int j) const { return transit ? (*transit)(i, j) : graph->transit_table()(i, j); }

bool RhcpContext::is_blocked(int m) const {
    return !blocked.empty() && blocked[static_cast<std::size_t>(m)] != 0;
}

RhcpContext make_context(const TargetGraph& graph, std::span<const double> R, int current, double horizon) {
    RhcpContext ctx;
    ctx.graph = &graph;
    ctx.R = R;
    ctx.current = current;
    ctx.horizon = horizon;
    const auto nb = graph.neighbors(current);
    ctx.candidates.assign(nb.begin(), nb.end());
    return ctx;
}

double active_time_bound(double R, double A, double B, double lead) {
    if (B <= A) throw ModelError("active_time_bound: requires B > A");
    return (R + A * lead) / (B - A);
}

AffineBound active_time_bound_affine(double R, double A, double B, double lead) {
    if (B <= A) throw ModelError("active_time_bound: requires B > A");
    return {(R + A * lead) / (B - A), A / (B - A)};
}

double PlanObjective::numerator(const std::array<double, 4>& s) const {
    double v = constant;
    for (int a = 0; a < 4; ++a) {
        v += lin[a] * s[a];
        for (int b = a; b < 4; ++b) v += quad[a][b] * s[a] * s[b];
    }
    return v;
}

double PlanObjective::denominator(const std::array<double, 4>& s) const {
    double v = den_const;
    for (int a = 0; a < 4; ++a) v += den_lin[a] * s[a];
    return v;
}

PlanObjective Rhcp3Coefficients::objective() const {
    PlanObjective J;
    J.quad[2][2] = c[0];
    J.quad[3][3] = c[1];
    J.quad[2][3] = c[2];
    J.lin[2] = c[3];
    J.lin[3] = c[4];
    J.constant = c[5];
    J.den_lin = {0, 0, 1, 1};
    J.den_const = transit;
    return J;
}

double Rhcp3Coefficients::operator()(double u, double v) const {
    return (c[0] * u * u + c[1] * v * v + c[2] * u * v + c[3] * u + c[4] * v + c[5]) / (transit + u + v);
}

PlanObjective Rhcp2Coefficients::objective() const {
    PlanObjective J;
    J.quad[1][1] = c[0];
    J.quad[2][2] = c[1];
    J.quad[3][3] = c[2];
    J.quad[1][2] = c[3];
    J.quad[1][3] = c[4];
    J.quad[2][3] = c[5];
    J.lin[1] = c[6];
    J.lin[2] = c[7];
    J.lin[3] = c[8];
    J.constant = c[9];
    J.den_lin = {0, 1, 1, 1};
    J.den_const = transit;
    return J;
}

namespace {
PlanObjective fifteen_term(const std::array<double, 15>& c, double den_const) {
    PlanObjective J;
    J.quad[0][0] = c[0];
    J.quad[1][1] = c[1];
    J.quad[2][2] = c[2];
    J.quad[3][3] = c[3];
    J.quad[0][1] = c[4];
    J.quad[0][2] = c[5];
    J.quad[0][3] = c[6];
    J.quad[1][2] = c[7];
    J.quad[1][3] = c[8];
    J.quad[2][3] = c[9];
    J.lin = {c[10], c[11], c[12], c[13]};
    J.constant = c[14];
    J.den_lin = {1, 1, 1, 1};
    J.den_const = den_const;
    return J;
}
}  // namespace

PlanObjective Rhcp1Coefficients::objective() const { return fifteen_term(c, transit); }

PlanObjective ExtendedCoefficients::objective() const { return fifteen_term(c, transit_first + transit_second); }

Rhcp3Coefficients rhcp3_objective_coeffs(const RhcpContext& ctx, int j, const Weights& w) {
    const int i = ctx.current;
    require_neighbor(ctx, i, j);
    const Target& ti = ctx.target(i);
    const Target& tj = ctx.target(j);
    const NeighborhoodParams s = weigh(neighborhood_params(*ctx.graph, ctx.R, i, j), ti.growth, tj.growth, ctx.R[i],
                                       ctx.R[j], w.rest, w.next, w.rest);
    const double rho = ctx.rho(i, j);
    const double Bj = w.next * tj.removal;
    Rhcp3Coefficients k;
    k.transit = rho;
    k.c = {(s.A_all - Bj) / 2.0,
           s.A_no_q / 2.0,
           s.A_no_q,
           s.R_all + s.A_all * rho,
           s.R_no_q + s.A_no_q * rho,
           rho / 2.0 * (2.0 * s.R_all + s.A_all * rho)};
    return k;
}

Rhcp2Coefficients rhcp2_objective_coeffs(const RhcpContext& ctx, int j) {
    const int i = ctx.current;
    require_neighbor(ctx, i, j);
    const NeighborhoodParams s = neighborhood_params(*ctx.graph, ctx.R, i, j);
    const double rho = ctx.rho(i, j);
    const double Bj = ctx.target(j).removal;
    Rhcp2Coefficients k;
    k.transit = rho;
    k.c = {s.A_no_p / 2.0,
           (s.A_all - Bj) / 2.0,
           s.A_no_q / 2.0,
           s.A_no_p,
           s.A_rest,
           s.A_no_q,
           s.R_no_p + s.A_no_p * rho,
           s.R_no_p + s.A_all * rho,
           s.R_rest + s.A_no_q * rho,
           rho / 2.0 * (2.0 * s.R_no_p + s.A_all * rho)};
    return k;
}

Rhcp1Coefficients rhcp1_objective_coeffs(const RhcpContext& ctx, int j) {
    const int i = ctx.current;
    require_neighbor(ctx, i, j);
    const NeighborhoodParams s = neighborhood_params(*ctx.graph, ctx.R, i, j);
    const double rho = ctx.rho(i, j);
    const double Bi = ctx.target(i).removal;
    const double Bj = ctx.target(j).removal;
    Rhcp1Coefficients k;
    k.transit = rho;
    k.c = {(s.A_all - Bi) / 2.0,
           s.A_no_p / 2.0,
           (s.A_all - Bj) / 2.0,
           s.A_no_q / 2.0,
           s.A_no_p,
           s.A_all - Bi,
           s.A_no_q - Bi,
           s.A_no_p,
           s.A_rest,
           s.A_no_q,
           s.R_all + (s.A_all - Bi) * rho,
           s.R_no_p + s.A_no_p * rho,
           s.R_all + s.A_all * rho,
           s.R_no_q + s.A_no_q * rho,
           rho / 2.0 * (2.0 * s.R_all + s.A_all * rho)};
    return k;
}

ExtendedCoefficients extended_objective_coeffs(const RhcpContext& ctx, int j, int k, const Weights& w) {
    const int i = ctx.current;
    require_neighbor(ctx, i, j);
    require_neighbor(ctx, j, k);
    const Target& tj = ctx.target(j);
    const Target& tk = ctx.target(k);
    const NeighborhoodParams s = weigh(extended_neighborhood_params(*ctx.graph, ctx.R, i, j, k), tj.growth,
                                       tk.growth, ctx.R[j], ctx.R[k], w.next, w.after, w.rest);
    const double r1 = ctx.rho(i, j);
    const double r2 = ctx.rho(j, k);
    const double P = r1 + r2;
    const double Bj = w.next * tj.removal;
    const double Bk = w.after * tk.removal;
    ExtendedCoefficients e;
    e.transit_first = r1;
    e.transit_second = r2;
    e.c = {(s.A_all - Bj) / 2.0,
           s.A_no_p / 2.0,
           (s.A_all - Bk) / 2.0,
           s.A_no_q / 2.0,
           s.A_no_p,
           s.A_all - Bj,
           s.A_no_q - Bj,
           s.A_no_p,
           s.A_rest,
           s.A_no_q,
           s.R_all - Bj * r2 + s.A_all * P,
           s.R_no_p + s.A_no_p * P,
           s.R_all + s.A_all * P,
           s.R_no_q + s.A_no_q * P,
           P / 2.0 * (2.0 * s.R_all + s.A_all * P)};
    return e;
}

RationalObjective substitute(const PlanObjective& J, const std::array<SlotMap, 4>& m) {
    RationalObjective H;
    auto& c = H.c;
    for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
            const double q = J.quad[a][b];
            if (q == 0.0) continue;
            c[0] += q * m[a].cx * m[b].cx;
            c[1] += q * m[a].cy * m[b].cy;
            c[2] += q * (m[a].cx * m[b].cy + m[a].cy * m[b].cx);
            c[3] += q * (m[a].c0 * m[b].cx + m[a].cx * m[b].c0);
            c[4] += q * (m[a].c0 * m[b].cy + m[a].cy * m[b].c0);
            c[5] += q * m[a].c0 * m[b].c0;
        }
        c[3] += J.lin[a] * m[a].cx;
        c[4] += J.lin[a] * m[a].cy;
        c[5] += J.lin[a] * m[a].c0;
        c[6] += J.den_lin[a] * m[a].cx;
        c[7] += J.den_lin[a] * m[a].cy;
        c[8] += J.den_lin[a] * m[a].c0;
    }
    c[5] += J.constant;
    c[8] += J.den_const;
    return H;
}

std::vector<CaseMapping> rhcp3_case_mappings(const RhcpContext& ctx, int j, const Weights& w) {
    const Rhcp3Coefficients k = rhcp3_objective_coeffs(ctx, j, w);
    const Target& tj = ctx.target(j);
    const double rho = k.transit;
    const double uB = active_time_bound(ctx.R[j], tj.growth, tj.removal, rho);
    const double room = ctx.horizon - rho;
    const PlanObjective J = k.objective();
    std::vector<CaseMapping> out(2);
    // Active only: v = 0.
    out[0].slots = {SlotMap{}, SlotMap{}, SlotMap{0, 1, 0}, SlotMap{}};
    out[0].bounds = PolytopeBounds{0.0, 0.0, 0.0, kInf, std::min(uB, std::max(room, 0.0))};
    out[0].feasible = room >= 0.0;
    // Full removal then idle.
    out[1].slots = {SlotMap{}, SlotMap{}, SlotMap{uB, 0, 0}, SlotMap{0, 1, 0}};
    out[1].bounds = PolytopeBounds{0.0, 0.0, 0.0, kInf, room - uB};
    out[1].feasible = room - uB >= 0.0;
    for (CaseMapping& m : out) m.objective = substitute(J, m.slots);
    return out;
}

std::vector<CaseMapping> rhcp2_case_mappings(const RhcpContext& ctx, int j) {
    const Rhcp2Coefficients k = rhcp2_objective_coeffs(ctx, j);
    const Target& tj = ctx.target(j);
    const double rho = k.transit;
    const AffineBound bj = active_time_bound_affine(ctx.R[j], tj.growth, tj.removal, rho);
    const double room = ctx.horizon - rho;
    const PlanObjective J = k.objective();
    std::vector<CaseMapping> out(2);
    // (v_i, u_j)
    out[0].slots = {SlotMap{}, SlotMap{0, 1, 0}, SlotMap{0, 0, 1}, SlotMap{}};
    out[0].bounds = PolytopeBounds{bj.slope, bj.intercept, 1.0, room, kInf};
    // (v_i, v_j) with u_j at its bound
    out[1].slots = {SlotMap{}, SlotMap{0, 1, 0}, SlotMap{bj.intercept, bj.slope, 0}, SlotMap{0, 0, 1}};
    out[1].bounds = PolytopeBounds{0.0, kInf, 1.0 + bj.slope, room - bj.intercept, kInf};
    for (CaseMapping& m : out) {
        m.objective = substitute(J, m.slots);
        m.feasible = m.bounds.M >= 0.0;
    }
    return out;
}

std::vector<CaseMapping> rhcp1_case_mappings(const RhcpContext& ctx, int j) {
    const Rhcp1Coefficients k = rhcp1_objective_coeffs(ctx, j);
    const int i = ctx.current;
    const Target& ti = ctx.target(i);
    const Target& tj = ctx.target(j);
    const double rho = k.transit;
    const double uiB = active_time_bound(ctx.R[i], ti.growth, ti.removal, 0.0);
    const AffineBound bj = active_time_bound_affine(ctx.R[j], tj.growth, tj.removal, rho);
    return four_cases(k.objective(), uiB, bj, ctx.horizon - rho);
}

std::vector<CaseMapping> extended_case_mappings(const RhcpContext& ctx, int j, int k, const Weights& w) {
    const ExtendedCoefficients e = extended_objective_coeffs(ctx, j, k, w);
    const Target& tj = ctx.target(j);
    const Target& tk = ctx.target(k);
    const double P = e.transit_first + e.transit_second;
    const double ujB = active_time_bound(ctx.R[j], tj.growth, tj.removal, e.transit_first);
    const AffineBound bk = active_time_bound_affine(ctx.R[k], tk.growth, tk.removal, P);
    return four_cases(e.objective(), ujB, bk, ctx.horizon - P);
}

ControlDecision solve_rhcp3(const RhcpContext& ctx, int j, const Weights& w) {
    const Rhcp3Coefficients k = rhcp3_objective_coeffs(ctx, j, w);
    const double rho = k.transit;
    const double room = ctx.horizon - rho;
    if (!(room >= 0.0)) return infeasible(ProblemForm::Departure);

    const Target& tj = ctx.target(j);
    const double uB = active_time_bound(ctx.R[j], tj.growth, tj.removal, rho);
    // Weighted sums in coefficient form.
    const double Bj = w.next * tj.removal;
    const double Aj = w.next * tj.growth;
    const double Abar = 2.0 * k.c[0] + Bj;
    const double Abar_j = k.c[2];

    // Active-only candidate: the restriction is concave, so an endpoint wins.
    const double ubar = std::min(uB, room);
    double u1 = 0.0;
    if (Abar < Bj) {
        const double u_even = Abar * rho / (Bj - Abar);
        if (u_even <= ubar) u1 = ubar;
    }
    double best_u = u1;
    double best_v = 0.0;
    double best = k(u1, 0.0);

    // Full-removal candidate.
    const double vbar = room - uB;
    if (vbar >= 0.0) {
        const double D = rho + uB;
        double v2 = 0.0;
        if (Abar < Bj * (1.0 - rho * rho / (D * D))) {
            double v_star = kInf;
            if (Abar_j > 0.0) {
                const double rad = ((Bj - Aj) * D * D - Bj * rho * rho) / Abar_j;
                v_star = std::max(0.0, std::sqrt(std::max(0.0, rad)) - D);
            }
            v2 = std::min(v_star, vbar);
        }
        const double val = k(uB, v2);
        if (val < best) {
            best = val;
            best_u = uB;
            best_v = v2;
        }
    }
    return one_hop_decision(ProblemForm::Departure, j, {0.0, 0.0, best_u, best_v}, rho, best);
}

ControlDecision solve_rhcp3_rfop(const RhcpContext& ctx, int j, const Weights& w) {
    const double rho = ctx.rho(ctx.current, j);
    if (!(ctx.horizon - rho >= 0.0)) return infeasible(ProblemForm::Departure);
    const CaseResult r = solve_cases(rhcp3_case_mappings(ctx, j, w));
    if (!std::isfinite(r.value)) return infeasible(ProblemForm::Departure);
    return one_hop_decision(ProblemForm::Departure, j, r.slots, rho, r.value);
}

ControlDecision solve_rhcp2(const RhcpContext& ctx, int j) {
    if (ctx.R[ctx.current] != 0.0) throw ModelError("solve_rhcp2: current target must have R = 0");
    const double rho = ctx.rho(ctx.current, j);
    if (!(ctx.horizon - rho >= 0.0)) return infeasible(ProblemForm::Idle);
    const CaseResult r = solve_cases(rhcp2_case_mappings(ctx, j));
    if (!std::isfinite(r.value)) return infeasible(ProblemForm::Idle);
    return one_hop_decision(ProblemForm::Idle, j, r.slots, rho, r.value);
}

ControlDecision solve_rhcp1(const RhcpContext& ctx, int j) {
    const double rho = ctx.rho(ctx.current, j);
    if (!(ctx.horizon - rho >= 0.0)) return infeasible(ProblemForm::Arrival);
    const CaseResult r = solve_cases(rhcp1_case_mappings(ctx, j));
    if (!std::isfinite(r.value)) return infeasible(ProblemForm::Arrival);
    return one_hop_decision(ProblemForm::Arrival, j, r.slots, rho, r.value);
}

ControlDecision solve_rhcp3_extended(const RhcpContext& ctx, int j, int k, const Weights& w) {
    const double P = ctx.rho(ctx.current, j) + ctx.rho(j, k);
    if (!(ctx.horizon - P >= 0.0)) return infeasible(ProblemForm::Departure);
    const CaseResult r = solve_cases(extended_case_mappings(ctx, j, k, w));
    if (!std::isfinite(r.value)) return infeasible(ProblemForm::Departure);
    ControlDecision d;
    d.form = ProblemForm::Departure;
    d.next = j;
    d.active_next = r.slots[0];
    d.idle_next = r.slots[1];
    d.after = k;
    d.active_after = r.slots[2];
    d.idle_after = r.slots[3];
    d.window = P + r.slots[0] + r.slots[1] + r.slots[2] + r.slots[3];
    d.cost = r.value;
    return d;
}

ControlDecision denominator_free_rhcp3(const RhcpContext& ctx, int j) {
    const Rhcp3Coefficients k = rhcp3_objective_coeffs(ctx, j);
    if (!(ctx.horizon - k.transit >= 0.0)) return infeasible(ProblemForm::Departure);
    return one_hop_decision(ProblemForm::Departure, j, {0, 0, 0, 0}, k.transit, k.c[5]);
}

ControlDecision next_visit(std::span<const ControlDecision> per_neighbor) {
    const ControlDecision* best = nullptr;
    for (const ControlDecision& d : per_neighbor) {
        if (!d.feasible()) continue;
        if (!best || d.cost < best->cost || (d.cost == best->cost && d.next < best->next)) best = &d;
    }
    if (!best) return per_neighbor.empty() ? ControlDecision{} : infeasible(per_neighbor.front().form);
    return *best;
}

ControlDecision best_rhcp1(const RhcpContext& ctx) { return pick_best(ctx, &solve_rhcp1); }

ControlDecision best_rhcp2(const RhcpContext& ctx) { return pick_best(ctx, &solve_rhcp2); }

ControlDecision best_rhcp3(const RhcpContext& ctx, const Weights& w) {
    std::vector<ControlDecision> all;
    for (int j : ctx.candidates) all.push_back(solve_rhcp3(ctx, j, w));
    return next_visit(all);
}

ControlDecision best_denominator_free(const RhcpContext& ctx) { return pick_best(ctx, &denominator_free_rhcp3); }

ControlDecision best_extended(const RhcpContext& ctx, const Weights& w) {
    ControlDecision best = infeasible(ProblemForm::Departure);
    for (int j : ctx.candidates) {
        for (int k : ctx.graph->neighbors(j)) {
            if (ctx.is_blocked(k)) continue;
            const ControlDecision d = solve_rhcp3_extended(ctx, j, k, w);
            if (d.feasible() && d.cost < best.cost) best = d;
        }
    }
    if (best.feasible()) return best;
    return best_rhcp3(ctx, w);
}

double nominal_alpha(const TargetGraph& graph, int i) {
    const double n = static_cast<double>(graph.neighbors(i).size() + 1);
    return 1.0 / (n * n);
}

double nominal_beta(const TargetGraph& graph, int i) {
    return 1.0 / static_cast<double>(graph.neighbors(i).size() + 1);
}

ControlDecision alpha_zero_shortcut(const RhcpContext& ctx) {
    const int i = ctx.current;
    ControlDecision best = infeasible(ProblemForm::Departure);
    for (int j : ctx.candidates) {
        const double rho = ctx.rho(i, j);
        if (!(rho <= ctx.horizon)) continue;
        const NeighborhoodParams s = neighborhood_params(*ctx.graph, ctx.R, i, j);
        const double cost = s.R_no_q + 0.5 * s.A_no_q * rho;
        if (cost < best.cost) best = one_hop_decision(ProblemForm::Departure, j, {0, 0, 0, 0}, rho, cost);
    }
    return best;
}

ControlDecision alpha_beta_zero_shortcut(const RhcpContext& ctx) {
    const int i = ctx.current;
    ControlDecision best = infeasible(ProblemForm::Departure);
    for (int j : ctx.candidates) {
        for (int k : ctx.graph->neighbors(j)) {
            if (ctx.is_blocked(k)) continue;
            const double P = ctx.rho(i, j) + ctx.rho(j, k);
            if (!(P <= ctx.horizon)) continue;
            const NeighborhoodParams s = extended_neighborhood_params(*ctx.graph, ctx.R, i, j, k);
            const double cost = s.R_rest + 0.5 * s.A_rest * P;
            if (cost < best.cost) {
                best = ControlDecision{};
                best.form = ProblemForm::Departure;
                best.next = j;
                best.after = k;
                best.window = P;
                best.cost = cost;
            }
        }
    }
    if (best.feasible()) return best;
    return alpha_zero_shortcut(ctx);
}

ControlDecision weighted_next_visit(const RhcpContext& ctx, double alpha) {
    if (alpha == 0.0) return alpha_zero_shortcut(ctx);
    return best_rhcp3(ctx, Weights{alpha, 0.0, 1.0 - alpha});
}

ControlDecision weighted_extended_next_visit(const RhcpContext& ctx, double alpha, double beta) {
    if (alpha == 0.0 && beta == 0.0) return alpha_beta_zero_shortcut(ctx);
    return best_extended(ctx, Weights{alpha, beta, 1.0 - alpha - beta});
}

double projected_cost(const RhcpContext& ctx, const ControlDecision& d, const Weights& w) {
    if (!d.feasible()) throw ModelError("projected_cost: infeasible decision");
    const int i = ctx.current;
    std::vector<int> members;
    if (d.after >= 0) {
        members = two_hop_set(*ctx.graph, i);
    } else {
        members.push_back(i);
        for (int m : ctx.graph->neighbors(i)) members.push_back(m);
    }
    const double here = d.active_here + d.idle_here;
    const double t_next = here + ctx.rho(i, d.next);
    const double t_after = d.after >= 0 ? t_next + d.active_next + d.idle_next + ctx.rho(d.next, d.after) : 0.0;
    double total = 0.0;
    for (int m : members) {
        const Target& t = ctx.target(m);
        ProjectedTarget p{ctx.R[m], t.growth, t.removal, {}};
        if (m == i && here > 0.0) p.visits.push_back({0.0, d.active_here, d.idle_here});
        if (m == d.next) p.visits.push_back({t_next, d.active_next, d.idle_next});
        if (m == d.after) p.visits.push_back({t_after, d.active_after, d.idle_after});
        const double weight = m == d.next ? w.next : (m == d.after ? w.after : w.rest);
        if (weight == 0.0) continue;
        const ProjectedTarget one[] = {p};
        total += weight * local_objective(one, d.window);
    }
    return total / d.window;
}

}  // namespace pmrhc
