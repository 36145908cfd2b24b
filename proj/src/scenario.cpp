#include "pmrhc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "pmrhc/rng.hpp"

namespace pmrhc {

using nlohmann::json;

namespace {

constexpr double kDefaultSpeed = 50.0;

const std::pair<ControllerType, const char*> kControllers[] = {
    {ControllerType::Rhc, "rhc"},
    {ControllerType::RhcAlpha, "rhc_alpha"},
    {ControllerType::ExRhcAlphaBeta, "ex_rhc_alpha_beta"},
    {ControllerType::DenominatorFree, "denominator_free"},
    {ControllerType::PeriodicBaseline, "periodic_baseline"},
};

const std::pair<NoiseModel, const char*> kNoise[] = {
    {NoiseModel::None, "none"},           {NoiseModel::Growth, "growth"},
    {NoiseModel::Speed, "speed"},         {NoiseModel::Location, "location"},
    {NoiseModel::StateShock, "state_shock"}, {NoiseModel::Channel, "channel"},
};

double number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ScenarioError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

double required_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ScenarioError(where + ": missing field '" + key + "'");
    return number(obj, key, 0.0);
}

int required_index(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_number_integer())
        throw ScenarioError(where + ": field '" + key + "' must be an integer");
    return obj.at(key).get<int>();
}

Edge make_edge(int i, int j, double length, double speed) {
    Edge e;
    e.from = i;
    e.to = j;
    e.length = length;
    e.speed = speed;
    e.transit = length / speed;
    return e;
}

}  // namespace

const char* to_string(ControllerType t) {
    for (const auto& [k, name] : kControllers)
        if (k == t) return name;
    return "?";
}

const char* to_string(NoiseModel m) {
    for (const auto& [k, name] : kNoise)
        if (k == m) return name;
    return "?";
}

ControllerType parse_controller(const std::string& s) {
    for (const auto& [k, name] : kControllers)
        if (s == name) return k;
    throw ScenarioError("unknown controller '" + s + "'");
}

NoiseModel parse_noise(const std::string& s) {
    for (const auto& [k, name] : kNoise)
        if (s == name) return k;
    throw ScenarioError("unknown noise model '" + s + "'");
}

Topology parse_topology(const std::string& s) {
    if (s == "line") return Topology::Line;
    if (s == "star") return Topology::Star;
    if (s == "grid") return Topology::Grid;
    if (s == "random-geometric" || s == "random_geometric") return Topology::RandomGeometric;
    throw ScenarioError("unknown topology '" + s + "'");
}

void validate(const Scenario& s) {
    const int M = s.graph.size();
    if (!(s.T > 0.0)) throw ScenarioError("time horizon T must be positive");
    if (!(s.horizon() > 0.0)) throw ScenarioError("planning horizon H must be positive");
    for (std::size_t a = 0; a < s.agents.size(); ++a) {
        const int st = s.agents[a].start;
        if (st < -1 || st >= M) throw ScenarioError("agent " + std::to_string(a) + ": start target out of range");
    }
    if (static_cast<int>(s.agents.size()) > M) throw ScenarioError("more agents than targets");
    for (const std::optional<double>& w : {s.controller.alpha, s.controller.beta})
        if (w && !(*w >= 0.0 && *w <= 1.0)) throw ScenarioError("weights must lie in [0, 1]");
    if (s.controller.alpha && s.controller.beta && *s.controller.alpha + *s.controller.beta > 1.0)
        throw ScenarioError("alpha + beta must not exceed 1");
    const NoiseSpec& n = s.noise;
    if (!(n.m >= 0.0)) throw ScenarioError("noise magnitude m must be >= 0");
    if ((n.model == NoiseModel::Growth || n.model == NoiseModel::Speed) && n.m > 1.0)
        throw ScenarioError("multiplicative noise requires m <= 1");
    if (n.model == NoiseModel::StateShock && !(n.lambda > 0.0))
        throw ScenarioError("state shocks need a positive mean inter-arrival time");
    if (n.model == NoiseModel::Location && !(n.radius >= 0.0)) throw ScenarioError("location radius must be >= 0");
}

std::vector<int> initial_placement(const Scenario& s) {
    const int M = s.graph.size();
    const int N = static_cast<int>(s.agents.size());
    std::vector<int> out(N, -1);
    std::vector<char> taken(M, 0);
    for (int a = 0; a < N; ++a)
        if (s.agents[a].start >= 0) {
            out[a] = s.agents[a].start;
            taken[out[a]] = 1;
        }
    if (N == 0) return out;
    const int stride = static_cast<int>(std::lround(static_cast<double>(M) / N));
    for (int a = 0; a < N; ++a) {
        if (out[a] >= 0) continue;
        int idx = (a * stride) % M;
        for (int probe = 0; probe < M && taken[idx]; ++probe) idx = (idx + 1) % M;
        out[a] = idx;
        taken[idx] = 1;
    }
    return out;
}

Scenario parse_scenario_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("malformed scenario: ") + e.what());
    }
    if (!root.is_object()) throw ScenarioError("scenario must be an object");
    if (!root.contains("targets") || !root.at("targets").is_array())
        throw ScenarioError("scenario needs a 'targets' array");

    std::vector<Target> targets;
    for (const json& t : root.at("targets")) {
        const std::string where = "target " + std::to_string(targets.size());
        if (t.contains("id") && t.at("id") != static_cast<int>(targets.size()))
            throw ScenarioError(where + ": ids must equal array positions");
        Target tg;
        if (t.contains("position")) {
            const json& p = t.at("position");
            if (!p.is_array() || p.size() != 2) throw ScenarioError(where + ": position must be [x, y]");
            tg.position = {p[0].get<double>(), p[1].get<double>()};
        }
        tg.growth = number(t, "A", 1.0);
        tg.removal = number(t, "B", 10.0);
        tg.initial = number(t, "R0", 0.5);
        if (!(tg.growth >= 0.0 && tg.growth < tg.removal))
            throw ScenarioError(where + ": growth rate A must satisfy 0 <= A < B (got A=" + std::to_string(tg.growth) +
                                ", B=" + std::to_string(tg.removal) + ")");
        targets.push_back(tg);
    }
    const int M = static_cast<int>(targets.size());

    std::vector<Edge> edges;
    if (root.contains("edges")) {
        for (const json& e : root.at("edges")) {
            const std::string where = "edge " + std::to_string(edges.size());
            const int i = required_index(e, "i", where);
            const int j = required_index(e, "j", where);
            if (i < 0 || i >= M || j < 0 || j >= M) throw ScenarioError(where + ": endpoint out of range");
            if (e.contains("rho")) {
                Edge ed;
                ed.from = i;
                ed.to = j;
                ed.transit = required_number(e, "rho", where);
                edges.push_back(ed);
            } else {
                const double len = number(e, "length", distance(targets[i].position, targets[j].position));
                const double V = number(e, "V", kDefaultSpeed);
                if (!(V > 0.0)) throw ScenarioError(where + ": speed V must be positive");
                edges.push_back(make_edge(i, j, len, V));
            }
        }
    }

    Scenario s;
    try {
        s.graph = TargetGraph(std::move(targets), std::move(edges));
    } catch (const ModelError& e) {
        throw ScenarioError(e.what());
    }
    s.T = number(root, "T", 500.0);
    if (root.contains("agents")) {
        const json& a = root.at("agents");
        if (a.is_number_integer()) {
            if (a.get<int>() < 0) throw ScenarioError("agent count must be >= 0");
            s.agents.assign(a.get<int>(), AgentSpec{});
        } else if (a.is_array()) {
            for (const json& ag : a) {
                AgentSpec spec;
                if (ag.contains("start") && !(ag.at("start").is_string() && ag.at("start") == "auto")) {
                    if (!ag.at("start").is_number_integer()) throw ScenarioError("agent start must be an index or \"auto\"");
                    spec.start = ag.at("start").get<int>();
                }
                s.agents.push_back(spec);
            }
        } else {
            throw ScenarioError("'agents' must be a count or an array");
        }
    }
    if (root.contains("controller")) {
        const json& c = root.at("controller");
        if (c.contains("type")) s.controller.type = parse_controller(c.at("type").get<std::string>());
        if (c.contains("H")) s.controller.H = number(c, "H", 0.0);
        if (c.contains("alpha")) s.controller.alpha = number(c, "alpha", 0.0);
        if (c.contains("beta")) s.controller.beta = number(c, "beta", 0.0);
    }
    if (root.contains("noise")) {
        const json& n = root.at("noise");
        if (n.contains("model")) s.noise.model = parse_noise(n.at("model").get<std::string>());
        s.noise.m = number(n, "m", 0.0);
        s.noise.lambda = number(n, "lambda", s.noise.lambda);
        s.noise.radius = number(n, "radius", s.noise.radius);
    }
    if (root.contains("seed")) {
        if (!root.at("seed").is_number_unsigned() && !root.at("seed").is_number_integer())
            throw ScenarioError("seed must be a nonnegative integer");
        s.seed = root.at("seed").get<std::uint64_t>();
    }
    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

std::string dump_scenario(const Scenario& s) {
    json root;
    json targets = json::array();
    for (int i = 0; i < s.graph.size(); ++i) {
        const Target& t = s.graph.target(i);
        targets.push_back({{"id", i},
                           {"position", {t.position.x, t.position.y}},
                           {"A", t.growth},
                           {"B", t.removal},
                           {"R0", t.initial}});
    }
    root["targets"] = targets;
    json edges = json::array();
    for (const Edge& e : s.graph.edges()) {
        if (e.speed > 0.0)
            edges.push_back({{"i", e.from}, {"j", e.to}, {"length", e.length}, {"V", e.speed}});
        else
            edges.push_back({{"i", e.from}, {"j", e.to}, {"rho", e.transit}});
    }
    root["edges"] = edges;
    json agents = json::array();
    for (std::size_t a = 0; a < s.agents.size(); ++a) {
        json ag{{"id", a}};
        if (s.agents[a].start >= 0)
            ag["start"] = s.agents[a].start;
        else
            ag["start"] = "auto";
        agents.push_back(ag);
    }
    root["agents"] = agents;
    root["T"] = s.T;
    json c{{"type", to_string(s.controller.type)}};
    if (s.controller.H) c["H"] = *s.controller.H;
    if (s.controller.alpha) c["alpha"] = *s.controller.alpha;
    if (s.controller.beta) c["beta"] = *s.controller.beta;
    root["controller"] = c;
    root["noise"] = {{"model", to_string(s.noise.model)},
                     {"m", s.noise.m},
                     {"lambda", s.noise.lambda},
                     {"radius", s.noise.radius}};
    root["seed"] = s.seed;
    return root.dump(2) + "\n";
}

namespace {

bool connected(int M, const std::vector<std::pair<int, int>>& links) {
    if (M == 0) return true;
    std::vector<int> parent(M);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    int comps = M;
    for (auto [a, b] : links) {
        const int ra = find(a), rb = find(b);
        if (ra != rb) {
            parent[ra] = rb;
            --comps;
        }
    }
    return comps == 1;
}

}  // namespace

Scenario generate_scenario(const GenerateOptions& opt) {
    const int M = opt.targets;
    if (M < 1) throw ScenarioError("need at least one target");
    if (opt.agents < 0 || opt.agents > M) throw ScenarioError("agent count must lie in [0, M]");
    const double side = opt.side;
    std::vector<Target> ts(M);
    std::vector<std::pair<int, int>> links;

    switch (opt.topology) {
        case Topology::Line:
            for (int i = 0; i < M; ++i) ts[i].position = {M == 1 ? side / 2 : side * i / (M - 1), side / 2};
            for (int i = 0; i + 1 < M; ++i) links.emplace_back(i, i + 1);
            break;
        case Topology::Star:
            ts[0].position = {side / 2, side / 2};
            for (int i = 1; i < M; ++i) {
                const double th = 2.0 * M_PI * (i - 1) / (M - 1);
                ts[i].position = {side / 2 + 0.4 * side * std::cos(th), side / 2 + 0.4 * side * std::sin(th)};
                links.emplace_back(0, i);
            }
            break;
        case Topology::Grid: {
            const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(M))));
            const int rows = (M + cols - 1) / cols;
            const double dx = cols > 1 ? side / (cols - 1) : 0.0;
            const double dy = rows > 1 ? side / (rows - 1) : 0.0;
            for (int i = 0; i < M; ++i) {
                const int r = i / cols, c = i % cols;
                ts[i].position = {cols > 1 ? c * dx : side / 2, rows > 1 ? r * dy : side / 2};
                if (c + 1 < cols && i + 1 < M) links.emplace_back(i, i + 1);
                if (i + cols < M) links.emplace_back(i, i + cols);
            }
            break;
        }
        case Topology::RandomGeometric: {
            Stream rng(opt.seed, Channel::Location, 0xfeed);
            for (Target& t : ts) {
                const double x = rng.uniform(0.0, side);
                const double y = rng.uniform(0.0, side);
                t.position = {x, y};
            }
            // Radius: a density-based guess, raised to the smallest value that connects the graph.
            std::vector<std::tuple<double, int, int>> pairs;
            for (int a = 0; a < M; ++a)
                for (int b = a + 1; b < M; ++b) pairs.emplace_back(distance(ts[a].position, ts[b].position), a, b);
            std::sort(pairs.begin(), pairs.end());
            double radius = side * 1.2 / std::sqrt(static_cast<double>(M));
            std::vector<std::pair<int, int>> trial;
            for (const auto& [d, a, b] : pairs) {
                trial.emplace_back(a, b);
                if (connected(M, trial)) {
                    radius = std::max(radius, d);
                    break;
                }
            }
            for (const auto& [d, a, b] : pairs)
                if (d <= radius) links.emplace_back(a, b);
            break;
        }
    }

    std::vector<Edge> edges;
    for (auto [a, b] : links) {
        const double len = distance(ts[a].position, ts[b].position);
        if (!(len > 0.0)) throw ScenarioError("coincident targets; try another seed");
        edges.push_back(make_edge(a, b, len, opt.speed));
        edges.push_back(make_edge(b, a, len, opt.speed));
    }
    if (!connected(M, links)) throw ScenarioError("generated graph is not connected");

    Scenario s;
    s.graph = TargetGraph(std::move(ts), std::move(edges));
    s.agents.assign(opt.agents, AgentSpec{});
    s.seed = opt.seed;
    return s;
}

}  // namespace pmrhc
