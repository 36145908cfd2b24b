#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmrhc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(Vec2 a, Vec2 b);

struct Target {
    Vec2 position;
    double growth = 1.0;    // A
    double removal = 10.0;  // B
    double initial = 0.5;   // R(0)
};

struct Edge {
    int from = 0;
    int to = 0;
    double transit = 0.0;  // rho
    double length = 0.0;   // 0 when the transit time was given directly
    double speed = 0.0;    // 0 when the transit time was given directly
};

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Dense transit-time matrix; +inf marks a missing edge.
class TransitTable {
public:
    TransitTable() = default;
    explicit TransitTable(int n);

    int size() const { return n_; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }
    void set(int i, int j, double rho) { data_[index(i, j)] = rho; }

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }
    int n_ = 0;
    std::vector<double> data_;
};

class TargetGraph {
public:
    TargetGraph() = default;
    TargetGraph(std::vector<Target> targets, std::vector<Edge> edges);

    int size() const { return static_cast<int>(targets_.size()); }
    const Target& target(int i) const { return targets_.at(i); }
    const std::vector<Target>& targets() const { return targets_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // Sorted, excludes i itself.
    std::span<const int> neighbors(int i) const { return neighbors_.at(i); }
    bool has_edge(int i, int j) const;
    double transit(int i, int j) const;
    const Edge* edge(int i, int j) const;
    const TransitTable& transit_table() const { return transit_; }

private:
    std::vector<Target> targets_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> neighbors_;
    TransitTable transit_;
};

struct TargetState {
    double R = 0.0;
    double rate = 0.0;
    double time = 0.0;
};

// Rdot = A - B N while R > 0 or the net rate is positive, 0 otherwise.
double target_rate(double R, double A, double B, int agents);

struct Evolution {
    TargetState state;
    std::optional<double> zero_crossing;
};

Evolution evolve_target(const TargetState& state, double A, double B, int agents, double dt);

// Integral of R over a segment with constant rate.
double segment_cost(double R0, double rate, double dt);

// Active segment driving R0 down for u0, then growth for u1 after departure.
double visit_cost(double R0, double u0, double u1, double A, double B);

// One dwell at a target inside a planning window, times relative to the window start.
struct PlannedVisit {
    double arrival = 0.0;
    double active = 0.0;
    double idle = 0.0;
};

struct ProjectedTarget {
    double R = 0.0;
    double A = 0.0;
    double B = 0.0;
    std::vector<PlannedVisit> visits;
};

// Integral of the projected profiles over [0, w).
double local_objective(std::span<const ProjectedTarget> targets, double w);

// Sums of A and R over a pair (p, q) inside a neighbourhood. "rest" excludes both members,
// "no_p" excludes only p, "no_q" excludes only q, "all" excludes neither.
struct NeighborhoodParams {
    double A_rest = 0.0;
    double A_no_p = 0.0;
    double A_no_q = 0.0;
    double A_all = 0.0;
    double R_rest = 0.0;
    double R_no_p = 0.0;
    double R_no_q = 0.0;
    double R_all = 0.0;
};

// One-hop sums with (p, q) = (i, j) over the closed neighbourhood of i.
NeighborhoodParams neighborhood_params(const TargetGraph& graph, std::span<const double> R, int i, int j);

// Closed neighbourhood of i together with every neighbour of a neighbour.
std::vector<int> two_hop_set(const TargetGraph& graph, int i);

// Two-hop sums with (p, q) = (j, k) over two_hop_set(i).
NeighborhoodParams extended_neighborhood_params(const TargetGraph& graph, std::span<const double> R, int i, int j,
                                                int k);

}  // namespace pmrhc
