#include "pmrhc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pmrhc {

namespace {

constexpr double kSnap = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

NeighborhoodParams pair_sums(const TargetGraph& graph, std::span<const double> R, std::span<const int> members,
                             int p, int q) {
    NeighborhoodParams s;
    for (int m : members) {
        if (m == p || m == q) continue;
        s.A_rest += graph.target(m).growth;
        s.R_rest += R[m];
    }
    const double Ap = graph.target(p).growth;
    const double Aq = graph.target(q).growth;
    s.A_no_p = s.A_rest + Aq;
    s.A_no_q = s.A_rest + Ap;
    s.A_all = s.A_rest + Ap + Aq;
    s.R_no_p = s.R_rest + R[q];
    s.R_no_q = s.R_rest + R[p];
    s.R_all = s.R_rest + R[p] + R[q];
    return s;
}

}  // namespace

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

TransitTable::TransitTable(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, kInf) {}

TargetGraph::TargetGraph(std::vector<Target> targets, std::vector<Edge> edges)
    : targets_(std::move(targets)), edges_(std::move(edges)) {
    const int n = size();
    for (int i = 0; i < n; ++i) {
        const Target& t = targets_[i];
        if (!(t.growth >= 0.0 && t.growth < t.removal))
            throw ModelError("target " + std::to_string(i) + ": growth and removal rates must satisfy 0 <= A < B");
        if (!(t.initial >= 0.0)) throw ModelError("target " + std::to_string(i) + ": initial uncertainty must be >= 0");
    }
    neighbors_.assign(n, {});
    transit_ = TransitTable(n);
    for (const Edge& e : edges_) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw ModelError("edge references an unknown target");
        if (e.from == e.to) throw ModelError("self-loop at target " + std::to_string(e.from));
        if (!(e.transit > 0.0) || !std::isfinite(e.transit))
            throw ModelError("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                             ": transit time must be positive");
        if (std::isfinite(transit_(e.from, e.to)))
            throw ModelError("duplicate edge " + std::to_string(e.from) + "->" + std::to_string(e.to));
        transit_.set(e.from, e.to, e.transit);
        neighbors_[e.from].push_back(e.to);
    }
    for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

bool TargetGraph::has_edge(int i, int j) const { return std::isfinite(transit_(i, j)); }

double TargetGraph::transit(int i, int j) const {
    if (!has_edge(i, j)) throw ModelError("no edge " + std::to_string(i) + "->" + std::to_string(j));
    return transit_(i, j);
}

const Edge* TargetGraph::edge(int i, int j) const {
    for (const Edge& e : edges_)
        if (e.from == i && e.to == j) return &e;
    return nullptr;
}

double target_rate(double R, double A, double B, int agents) {
    const double net = A - B * agents;
    return (R > 0.0 || net > 0.0) ? net : 0.0;
}

Evolution evolve_target(const TargetState& state, double A, double B, int agents, double dt) {
    if (!(dt >= 0.0)) throw std::invalid_argument("evolve_target: negative duration");
    if (agents < 0) throw std::invalid_argument("evolve_target: negative agent count");
    Evolution out;
    out.state.time = state.time + dt;
    const double rate = target_rate(state.R, A, B, agents);
    if (rate >= 0.0) {
        out.state.R = state.R + rate * dt;
        out.state.rate = rate;
        return out;
    }
    const double to_zero = state.R / -rate;
    if (to_zero <= kSnap) {
        out.zero_crossing = state.time;
    } else if (to_zero < dt - kSnap) {
        out.zero_crossing = state.time + to_zero;
    } else if (to_zero <= dt + kSnap) {
        out.zero_crossing = state.time + dt;
    }
    if (out.zero_crossing) {
        out.state.R = 0.0;
        out.state.rate = target_rate(0.0, A, B, agents);
    } else {
        out.state.R = state.R + rate * dt;
        out.state.rate = rate;
    }
    return out;
}

double segment_cost(double R0, double rate, double dt) {
    if (!(dt >= 0.0)) throw std::invalid_argument("segment_cost: negative duration");
    if (!(R0 >= 0.0)) throw std::invalid_argument("segment_cost: negative start value");
    const double end = R0 + rate * dt;
    if (end < -1e-9 * std::max(1.0, R0)) throw std::invalid_argument("segment_cost: profile crosses zero");
    return 0.5 * dt * (2.0 * R0 + rate * dt);
}

double visit_cost(double R0, double u0, double u1, double A, double B) {
    return 0.5 * u0 * (2.0 * R0 - (B - A) * u0) + 0.5 * u1 * (A * u1);
}

double local_objective(std::span<const ProjectedTarget> targets, double w) {
    if (!(w >= 0.0)) throw std::invalid_argument("local_objective: negative window");
    double total = 0.0;
    for (const ProjectedTarget& pt : targets) {
        // Breakpoints where the agent count changes.
        std::vector<std::pair<double, int>> marks;
        for (const PlannedVisit& v : pt.visits) {
            marks.emplace_back(v.arrival, +1);
            marks.emplace_back(v.arrival + v.active + v.idle, -1);
        }
        std::sort(marks.begin(), marks.end());
        TargetState st{pt.R, 0.0, 0.0};
        int present = 0;
        std::size_t next = 0;
        while (st.time < w) {
            while (next < marks.size() && marks[next].first <= st.time) present += marks[next++].second;
            const double stop = next < marks.size() ? std::min(w, marks[next].first) : w;
            const double dt = stop - st.time;
            const double rate = target_rate(st.R, pt.A, pt.B, present);
            const Evolution ev = evolve_target(st, pt.A, pt.B, present, dt);
            if (ev.zero_crossing) {
                const double head = *ev.zero_crossing - st.time;
                total += segment_cost(st.R, rate, head);
                total += segment_cost(0.0, ev.state.rate, dt - head);
                st.R = std::max(0.0, ev.state.rate * (dt - head));
            } else {
                total += segment_cost(st.R, rate, dt);
                st.R = std::max(0.0, ev.state.R);
            }
            st.time = stop;
        }
    }
    return total;
}

NeighborhoodParams neighborhood_params(const TargetGraph& graph, std::span<const double> R, int i, int j) {
    if (i == j || !graph.has_edge(i, j))
        throw ModelError("target " + std::to_string(j) + " is not a neighbour of " + std::to_string(i));
    std::vector<int> members(graph.neighbors(i).begin(), graph.neighbors(i).end());
    members.push_back(i);
    return pair_sums(graph, R, members, i, j);
}

std::vector<int> two_hop_set(const TargetGraph& graph, int i) {
    std::vector<int> out{i};
    for (int j : graph.neighbors(i)) {
        out.push_back(j);
        for (int k : graph.neighbors(j)) out.push_back(k);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

NeighborhoodParams extended_neighborhood_params(const TargetGraph& graph, std::span<const double> R, int i, int j,
                                                int k) {
    if (i == j || !graph.has_edge(i, j))
        throw ModelError("target " + std::to_string(j) + " is not a neighbour of " + std::to_string(i));
    if (j == k || !graph.has_edge(j, k))
        throw ModelError("target " + std::to_string(k) + " is not a neighbour of " + std::to_string(j));
    const std::vector<int> members = two_hop_set(graph, i);
    return pair_sums(graph, R, members, j, k);
}

}  // namespace pmrhc
