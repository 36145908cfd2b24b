#include "pmrhc/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "pmrhc/rng.hpp"

namespace pmrhc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWalkStep = 0.1;
constexpr double kPursuitStep = 1e-3;
constexpr double kMinSpeedFactor = 1e-3;

struct Queued {
    double time = 0.0;
    EventKind kind = EventKind::TransitEnd;
    int agent = -1;
    int target = -1;
    std::uint64_t gen = 0;
};

struct Later {
    bool operator()(const Queued& a, const Queued& b) const {
        return std::tie(a.time, a.kind, a.agent, a.target) > std::tie(b.time, b.kind, b.agent, b.target);
    }
};

enum class Mode { Dwelling, Transit };

struct AgentState {
    Mode mode = Mode::Dwelling;
    int at = -1;  // current target, or destination while in transit
    double arrived = 0.0;
    std::uint64_t gen = 0;  // bumps invalidate scheduled dwell-end events
};

// Second-order random walk of a target position: acceleration is piecewise constant on a
// fixed step grid and the position is kept inside a ball around the origin.
class TargetWalk {
public:
    TargetWalk(Vec2 origin, double accel, double radius, Stream rng)
        : origin_(origin), accel_(accel), radius_(radius), rng_(rng) {
        knots_.push_back({origin, {}, draw()});
    }

    Vec2 at(double t) {
        const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / kWalkStep)));
        while (knots_.size() <= k) extend();
        const Knot& n = knots_[k];
        const double h = t - static_cast<double>(k) * kWalkStep;
        return clamp({n.p.x + n.v.x * h + 0.5 * n.a.x * h * h, n.p.y + n.v.y * h + 0.5 * n.a.y * h * h});
    }

private:
    struct Knot {
        Vec2 p, v, a;
    };

    Vec2 draw() { return {rng_.uniform(-accel_, accel_), rng_.uniform(-accel_, accel_)}; }

    Vec2 clamp(Vec2 p) const {
        const double d = distance(p, origin_);
        if (d <= radius_ || d == 0.0) return p;
        return {origin_.x + (p.x - origin_.x) * radius_ / d, origin_.y + (p.y - origin_.y) * radius_ / d};
    }

    void extend() {
        const Knot& n = knots_.back();
        const double h = kWalkStep;
        Vec2 p{n.p.x + n.v.x * h + 0.5 * n.a.x * h * h, n.p.y + n.v.y * h + 0.5 * n.a.y * h * h};
        Vec2 v{n.v.x + n.a.x * h, n.v.y + n.a.y * h};
        if (distance(p, origin_) > radius_) {
            p = clamp(p);
            v = {};
        }
        knots_.push_back({p, v, draw()});
    }

    Vec2 origin_;
    double accel_;
    double radius_;
    Stream rng_;
    std::vector<Knot> knots_;
};

class Engine {
public:
    Engine(const Scenario& sc, std::uint64_t seed, const SimulationOptions& opt)
        : sc_(sc), g_(sc.graph), opt_(opt), M_(g_.size()), N_(static_cast<int>(sc.agents.size())), T_(sc.T),
          H_(sc.horizon()) {
        validate(sc);
        const NoiseSpec& nz = sc.noise;
        for (int i = 0; i < M_; ++i) {
            growth_rng_.emplace_back(seed, Channel::Growth, i);
            shock_rng_.emplace_back(seed, Channel::Shock, i);
            if (nz.model == NoiseModel::Location)
                walks_.emplace_back(g_.target(i).position, nz.m, nz.radius, Stream(seed, Channel::Location, i));
        }
        for (int a = 0; a < N_; ++a) {
            speed_rng_.emplace_back(seed, Channel::Speed, a);
            obs_rng_.emplace_back(seed, Channel::Observation, a);
        }
    }

    SimulationResult run() {
        const auto wall0 = std::chrono::steady_clock::now();
        state_.resize(M_);
        present_.assign(M_, 0);
        growth_.resize(M_);
        zc_time_.assign(M_, kInf);
        tgen_.assign(M_, 0);
        cover_.assign(M_, -1);
        last_visit_.assign(M_, -kInf);
        res_.segments.assign(M_, {});
        res_.T = T_;
        for (int i = 0; i < M_; ++i) {
            state_[i] = {g_.target(i).initial, 0.0, 0.0};
            growth_[i] = g_.target(i).growth;
        }

        const std::vector<int> start = initial_placement(sc_);
        agents_.resize(N_);
        for (int a = 0; a < N_; ++a) {
            agents_[a] = {Mode::Dwelling, start[a], 0.0, 0};
            ++present_[start[a]];
            cover_[start[a]] = a;
            last_visit_[start[a]] = 0.0;
        }
        for (int i = 0; i < M_; ++i) refresh_target(i);
        for (int a = 0; a < N_; ++a) push({0.0, EventKind::TransitEnd, a, start[a], agents_[a].gen});
        if (sc_.noise.model == NoiseModel::StateShock && sc_.noise.m > 0.0)
            for (int i = 0; i < M_; ++i)
                push({shock_rng_[i].exponential(sc_.noise.lambda), EventKind::NoiseShock, -1, i, 0});

        while (!queue_.empty()) {
            const Queued ev = queue_.top();
            if (!(ev.time < T_)) break;
            queue_.pop();
            if (stale(ev)) continue;
            if (++res_.processed_events > opt_.max_events)
                throw SimulationAbort("event limit exceeded at t = " + std::to_string(ev.time));
            advance_all(ev.time);
            handle(ev);
        }

        advance_all(T_);
        for (int a = 0; a < N_; ++a)
            if (agents_[a].mode == Mode::Dwelling) res_.visits.push_back({a, agents_[a].at, agents_[a].arrived, T_});
        std::stable_sort(res_.visits.begin(), res_.visits.end(),
                         [](const VisitRecord& x, const VisitRecord& y) { return x.arrival < y.arrival; });
        for (int i = 0; i < M_; ++i) res_.final_R.push_back(state_[i].R);
        res_.J_T = accumulate_objective(res_.segments, T_);
        res_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        return std::move(res_);
    }

private:
    void push(const Queued& q) { queue_.push(q); }

    bool stale(const Queued& ev) const {
        switch (ev.kind) {
            case EventKind::ZeroCrossing: return ev.gen != tgen_[ev.target];
            case EventKind::ActiveEnd:
            case EventKind::IdleEnd:
            case EventKind::TransitEnd: return ev.gen != agents_[ev.agent].gen;
            default: return false;
        }
    }

    void log(EventKind kind, int agent, int target) {
        if (opt_.record_events) res_.events.push_back({now_, kind, agent, target, state_[target].R});
    }

    void push_segment(int i, Segment s) {
        auto& segs = res_.segments[i];
        if (!segs.empty() && segs.back().t0 == s.t0)
            segs.back() = s;
        else
            segs.push_back(s);
    }

    void advance_all(double t) {
        for (int i = 0; i < M_; ++i) {
            TargetState& s = state_[i];
            if (t <= s.time) continue;
            const Target& tg = g_.target(i);
            const Evolution e = evolve_target(s, growth_[i], tg.removal, present_[i], t - s.time);
            if (e.zero_crossing && *e.zero_crossing < t) push_segment(i, {*e.zero_crossing, 0.0, e.state.rate});
            s = e.state;
        }
        now_ = t;
    }

    // New rate after a change in presence, state or growth factor.
    void refresh_target(int i) {
        TargetState& s = state_[i];
        const Target& tg = g_.target(i);
        if (sc_.noise.model == NoiseModel::Growth)
            growth_[i] = tg.growth * growth_rng_[i].uniform(1.0 - sc_.noise.m, 1.0 + sc_.noise.m);
        s.rate = target_rate(s.R, growth_[i], tg.removal, present_[i]);
        s.time = now_;
        push_segment(i, {now_, s.R, s.rate});
        ++tgen_[i];
        zc_time_[i] = kInf;
        if (s.rate < 0.0 && s.R > 0.0) {
            zc_time_[i] = now_ + s.R / -s.rate;
            push({zc_time_[i], EventKind::ZeroCrossing, -1, i, tgen_[i]});
        }
    }

    std::vector<int> dwellers(int i) const {
        std::vector<int> out;
        for (int a = 0; a < N_; ++a)
            if (agents_[a].mode == Mode::Dwelling && agents_[a].at == i) out.push_back(a);
        return out;
    }

    void handle(const Queued& ev) {
        switch (ev.kind) {
            case EventKind::ZeroCrossing: {
                state_[ev.target].R = 0.0;
                refresh_target(ev.target);
                log(EventKind::ZeroCrossing, -1, ev.target);
                for (int a : dwellers(ev.target)) decide_idle(a);
                break;
            }
            case EventKind::TransitEnd: {
                AgentState& ag = agents_[ev.agent];
                const bool moved = ag.mode == Mode::Transit;
                if (moved) {
                    ag.mode = Mode::Dwelling;
                    ag.arrived = now_;
                    ++present_[ag.at];
                    last_visit_[ag.at] = now_;
                    refresh_target(ag.at);
                }
                log(moved ? EventKind::TransitEnd : EventKind::Arrival, ev.agent, ag.at);
                resolve(ev.agent);
                break;
            }
            case EventKind::ActiveEnd: {
                const int i = agents_[ev.agent].at;
                if (zc_time_[i] - now_ <= 1e-12 * std::max(1.0, now_)) {
                    // The planned end coincides with the crossing: treat it as the crossing.
                    state_[i].R = 0.0;
                    refresh_target(i);
                    log(EventKind::ZeroCrossing, -1, i);
                    for (int a : dwellers(i)) decide_idle(a);
                    break;
                }
                log(EventKind::ActiveEnd, ev.agent, i);
                decide_departure(ev.agent);
                break;
            }
            case EventKind::IdleEnd:
                log(EventKind::IdleEnd, ev.agent, agents_[ev.agent].at);
                decide_departure(ev.agent);
                break;
            case EventKind::Covering:
            case EventKind::Uncovering: {
                log(ev.kind, ev.agent, ev.target);
                for (int b = 0; b < N_; ++b) {
                    const AgentState& ag = agents_[b];
                    if (b == ev.agent || ag.mode != Mode::Dwelling || ag.at == ev.target) continue;
                    if (g_.has_edge(ag.at, ev.target)) resolve(b);
                }
                break;
            }
            case EventKind::NoiseShock: {
                const int i = ev.target;
                const double jump = shock_rng_[i].uniform(-sc_.noise.m, sc_.noise.m);
                state_[i].R = std::max(0.0, state_[i].R + jump);
                refresh_target(i);
                log(EventKind::NoiseShock, -1, i);
                push({now_ + shock_rng_[i].exponential(sc_.noise.lambda), EventKind::NoiseShock, -1, i, 0});
                for (int b = 0; b < N_; ++b) {
                    const AgentState& ag = agents_[b];
                    if (ag.mode == Mode::Dwelling && (ag.at == i || g_.has_edge(ag.at, i))) resolve(b);
                }
                break;
            }
            case EventKind::Arrival: break;
        }
    }

    void resolve(int a) {
        if (state_[agents_[a].at].R > 0.0)
            decide_active(a);
        else
            decide_idle(a);
    }

    RhcpContext context(int a) {
        const int i = agents_[a].at;
        perceived_.resize(M_);
        for (int m = 0; m < M_; ++m) perceived_[m] = state_[m].R;
        if (sc_.noise.model == NoiseModel::Channel) {
            for (int m = 0; m < M_; ++m)
                if (m != i) perceived_[m] = std::max(0.0, perceived_[m] + obs_rng_[a].uniform(-sc_.noise.m, sc_.noise.m));
        }
        blocked_.assign(M_, 0);
        for (int m = 0; m < M_; ++m) blocked_[m] = cover_[m] != -1 && cover_[m] != a;

        RhcpContext ctx = make_context(g_, perceived_, i, std::min(H_, T_ - now_));
        ctx.time = now_;
        ctx.blocked = blocked_;
        std::vector<int> cands;
        const std::vector<int> here = dwellers(i);
        const int K = static_cast<int>(here.size());
        const int rank = static_cast<int>(std::find(here.begin(), here.end(), a) - here.begin());
        const auto nb = g_.neighbors(i);
        for (std::size_t n = 0; n < nb.size(); ++n) {
            if (blocked_[nb[n]]) continue;
            if (K > 1 && static_cast<int>(n % K) != rank) continue;
            cands.push_back(nb[n]);
        }
        ctx.candidates = std::move(cands);
        if (sc_.noise.model == NoiseModel::Location) {
            live_transit_ = TransitTable(M_);
            for (const Edge& e : g_.edges()) live_transit_.set(e.from, e.to, live_transit(e));
            ctx.transit = &live_transit_;
        }
        return ctx;
    }

    double edge_speed(const Edge& e) const {
        if (e.speed > 0.0) return e.speed;
        const double d = distance(g_.target(e.from).position, g_.target(e.to).position);
        return d > 0.0 ? d / e.transit : 0.0;
    }

    double live_transit(const Edge& e) {
        const double V = edge_speed(e);
        if (!(V > 0.0)) return e.transit;
        return std::max(distance(walks_[e.from].at(now_), walks_[e.to].at(now_)) / V, 1e-9);
    }

    void record(int a, const RhcpContext& ctx, const ControlDecision& d) {
        res_.decisions.push_back({now_, a, agents_[a].at, ctx.horizon, d});
    }

    void decide_active(int a) {
        AgentState& ag = agents_[a];
        ++ag.gen;
        if (sc_.controller.type == ControllerType::PeriodicBaseline) {
            // Stay until the target is cleared.
            const TargetState& s = state_[ag.at];
            push({now_ + (s.rate < 0.0 ? s.R / -s.rate : 0.0), EventKind::ActiveEnd, a, -1, ag.gen});
            return;
        }
        const RhcpContext ctx = context(a);
        const ControlDecision d = best_rhcp1(ctx);
        record(a, ctx, d);
        if (d.feasible()) push({now_ + d.active_here, EventKind::ActiveEnd, a, -1, ag.gen});
    }

    void decide_idle(int a) {
        AgentState& ag = agents_[a];
        ++ag.gen;
        if (sc_.controller.type == ControllerType::PeriodicBaseline) {
            push({now_, EventKind::IdleEnd, a, -1, ag.gen});
            return;
        }
        const RhcpContext ctx = context(a);
        const ControlDecision d = best_rhcp2(ctx);
        record(a, ctx, d);
        if (d.feasible()) push({now_ + d.idle_here, EventKind::IdleEnd, a, -1, ag.gen});
    }

    ControlDecision least_recent(const RhcpContext& ctx) const {
        ControlDecision best;
        double oldest = kInf;
        for (int j : ctx.candidates) {
            const double rho = ctx.rho(ctx.current, j);
            if (!(rho <= ctx.horizon)) continue;
            if (last_visit_[j] < oldest) {
                oldest = last_visit_[j];
                best.next = j;
                best.window = rho;
                best.cost = 0.0;
            }
        }
        return best;
    }

    void decide_departure(int a) {
        AgentState& ag = agents_[a];
        ++ag.gen;
        const RhcpContext ctx = context(a);
        const int i = ag.at;
        const ControllerSpec& c = sc_.controller;
        ControlDecision d;
        switch (c.type) {
            case ControllerType::Rhc: d = best_rhcp3(ctx); break;
            case ControllerType::RhcAlpha: d = weighted_next_visit(ctx, c.alpha.value_or(nominal_alpha(g_, i))); break;
            case ControllerType::ExRhcAlphaBeta:
                d = weighted_extended_next_visit(ctx, c.alpha.value_or(nominal_alpha(g_, i)),
                                                 c.beta.value_or(nominal_beta(g_, i)));
                break;
            case ControllerType::DenominatorFree: d = best_denominator_free(ctx); break;
            case ControllerType::PeriodicBaseline: d = least_recent(ctx); break;
        }
        record(a, ctx, d);
        if (d.feasible()) depart(a, d.next);
    }

    double transit_time(int a, int i, int j) {
        const Edge* e = g_.edge(i, j);
        const NoiseSpec& nz = sc_.noise;
        if (nz.model == NoiseModel::Speed) {
            const double zeta = std::max(kMinSpeedFactor, speed_rng_[a].uniform(1.0 - nz.m, 1.0 + nz.m));
            return e->speed > 0.0 ? e->length / (e->speed * zeta) : e->transit / zeta;
        }
        if (nz.model == NoiseModel::Location) {
            const double V = edge_speed(*e);
            if (!(V > 0.0)) return e->transit;
            // Pursue the moving target; the last sub-step is solved exactly.
            Vec2 p = walks_[i].at(now_);
            double t = now_;
            const double step = V * kPursuitStep;
            for (;;) {
                const Vec2 y = walks_[j].at(t);
                const double d = distance(p, y);
                if (d <= step) return std::max(t + d / V - now_, 1e-9);
                p = {p.x + (y.x - p.x) * step / d, p.y + (y.y - p.y) * step / d};
                t += kPursuitStep;
                if (t - now_ > 1e6) throw SimulationAbort("pursuit did not terminate");
            }
        }
        return e->transit;
    }

    void depart(int a, int j) {
        AgentState& ag = agents_[a];
        const int i = ag.at;
        res_.visits.push_back({a, i, ag.arrived, now_});
        --present_[i];
        refresh_target(i);
        if (cover_[i] == a) cover_[i] = -1;
        cover_[j] = a;
        const double rho = transit_time(a, i, j);
        ag.mode = Mode::Transit;
        ag.at = j;
        ++ag.gen;
        push({now_, EventKind::Uncovering, a, i, 0});
        push({now_, EventKind::Covering, a, j, 0});
        push({now_ + rho, EventKind::TransitEnd, a, j, ag.gen});
    }

    const Scenario& sc_;
    const TargetGraph& g_;
    SimulationOptions opt_;
    int M_;
    int N_;
    double T_;
    double H_;
    double now_ = 0.0;

    std::vector<TargetState> state_;
    std::vector<int> present_;
    std::vector<double> growth_;
    std::vector<double> zc_time_;
    std::vector<std::uint64_t> tgen_;
    std::vector<int> cover_;
    std::vector<double> last_visit_;
    std::vector<AgentState> agents_;
    std::priority_queue<Queued, std::vector<Queued>, Later> queue_;

    std::vector<Stream> growth_rng_, shock_rng_, speed_rng_, obs_rng_;
    std::vector<TargetWalk> walks_;
    std::vector<double> perceived_;
    std::vector<char> blocked_;
    TransitTable live_transit_;

    SimulationResult res_;
};

}  // namespace

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::ZeroCrossing: return "zeroCrossing";
        case EventKind::Covering: return "covering";
        case EventKind::Uncovering: return "uncovering";
        case EventKind::ActiveEnd: return "activeEnd";
        case EventKind::IdleEnd: return "idleEnd";
        case EventKind::TransitEnd: return "transitEnd";
        case EventKind::NoiseShock: return "noiseShock";
        case EventKind::Arrival: return "arrival";
    }
    return "?";
}

std::vector<int> SimulationResult::visit_sequence(int agent) const {
    std::vector<int> out;
    for (const VisitRecord& v : visits)
        if (v.agent == agent) out.push_back(v.target);
    return out;
}

SimulationResult simulate(const Scenario& scenario, std::uint64_t seed, const SimulationOptions& opt) {
    Engine engine(scenario, seed, opt);
    return engine.run();
}

double segment_value(const std::vector<Segment>& segs, double t) {
    auto it = std::upper_bound(segs.begin(), segs.end(), t, [](double x, const Segment& s) { return x < s.t0; });
    if (it == segs.begin()) throw std::invalid_argument("segment_value: time before the first breakpoint");
    --it;
    return std::max(0.0, it->R0 + it->rate * (t - it->t0));
}

double accumulate_objective(const std::vector<std::vector<Segment>>& segments, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("accumulate_objective: T must be positive");
    double total = 0.0;
    for (const auto& segs : segments) {
        if (segs.empty() || segs.front().t0 > 0.0) throw std::invalid_argument("accumulate_objective: gap at t = 0");
        for (std::size_t k = 0; k < segs.size(); ++k) {
            const double t0 = segs[k].t0;
            if (t0 >= T) break;
            const double t1 = k + 1 < segs.size() ? std::min(segs[k + 1].t0, T) : T;
            const double dt = t1 - t0;
            // Rounding can leave a falling segment a hair below zero at its end.
            total += 0.5 * dt * (2.0 * segs[k].R0 + segs[k].rate * dt);
        }
    }
    return total / T;
}

}  // namespace pmrhc
