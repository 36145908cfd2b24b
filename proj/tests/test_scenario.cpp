#include <doctest.h>

#include "pmrhc/scenario.hpp"

using namespace pmrhc;

TEST_CASE("minimal file picks up the defaults") {
    const Scenario s = parse_scenario_text(R"({
        "targets": [{"position": [0, 0]}, {"position": [100, 0]}],
        "edges": [{"i": 0, "j": 1}, {"i": 1, "j": 0}]
    })");
    CHECK(s.T == 500.0);
    CHECK(s.horizon() == 250.0);
    CHECK(s.graph.target(1).growth == 1.0);
    CHECK(s.graph.target(1).removal == 10.0);
    CHECK(s.graph.target(1).initial == 0.5);
    CHECK(s.graph.transit(0, 1) == doctest::Approx(2.0));
    CHECK(s.agents.empty());
    CHECK(s.controller.type == ControllerType::Rhc);
    CHECK(s.noise.model == NoiseModel::None);
}

TEST_CASE("growth at or above removal is rejected") {
    CHECK_THROWS_AS(parse_scenario_text(R"({"targets": [{"A": 12, "B": 10}]})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(R"({"targets": [{"A": 10, "B": 10}]})"), ScenarioError);
}

TEST_CASE("edge transit time is length over speed") {
    const Scenario s = parse_scenario_text(R"({
        "targets": [{}, {}],
        "edges": [{"i": 0, "j": 1, "length": 100, "V": 50}, {"i": 1, "j": 0, "rho": 3.5}]
    })");
    CHECK(s.graph.transit(0, 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.graph.transit(1, 0) == 3.5);
}

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(parse_scenario_text("{"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(R"({"edges": []})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(R"({"targets": [{"id": 1}]})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(R"({"targets": [{}], "edges": [{"i": 0, "j": 4, "rho": 1}]})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(R"({"targets": [{}], "controller": {"type": "pid"}})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(R"({"targets": [{}], "noise": {"model": "speed", "m": 1.5}})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(R"({"targets": [{}, {}], "agents": 3})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(R"({"targets": [{}], "controller": {"alpha": 0.7, "beta": 0.5}})"),
                    ScenarioError);
}

TEST_CASE("placement spreads agents and skips occupied targets") {
    Scenario s = generate_scenario({Topology::Line, 6, 3, 0});
    CHECK(initial_placement(s) == std::vector<int>{0, 2, 4});
    s.agents = {{-1}, {-1}, {-1}, {-1}};
    CHECK(initial_placement(s) == std::vector<int>{0, 2, 4, 1});  // stride 2, 6 -> 0 taken -> 1
    s.agents = {{2}, {-1}};
    CHECK(initial_placement(s) == std::vector<int>{2, 3});  // second agent wants 3
    s.agents = {{-1}, {0}};
    CHECK(initial_placement(s) == std::vector<int>{1, 0});  // explicit starts are reserved first
}

TEST_CASE("line generator connects consecutive targets both ways") {
    const Scenario s = generate_scenario({Topology::Line, 3, 1, 0});
    REQUIRE(s.graph.edges().size() == 4);
    CHECK(s.graph.has_edge(0, 1));
    CHECK(s.graph.has_edge(1, 0));
    CHECK(s.graph.has_edge(1, 2));
    CHECK(s.graph.has_edge(2, 1));
    CHECK_FALSE(s.graph.has_edge(0, 2));
}

TEST_CASE("generated scenarios round-trip and are seed-deterministic") {
    for (Topology t : {Topology::Line, Topology::Star, Topology::Grid, Topology::RandomGeometric})
        for (int M : {1, 2, 5, 8, 13}) {
            CAPTURE(M);
            const Scenario s = generate_scenario({t, M, std::min(M, 3), 42});
            const std::string text = dump_scenario(s);
            const Scenario back = parse_scenario_text(text);
            CHECK(dump_scenario(back) == text);
            REQUIRE(back.graph.size() == M);
            for (const Edge& e : s.graph.edges()) CHECK(back.graph.transit(e.from, e.to) == s.graph.transit(e.from, e.to));
            for (int i = 0; i < M; ++i) {
                CHECK(back.graph.target(i).position.x == s.graph.target(i).position.x);
                CHECK(back.graph.target(i).position.y == s.graph.target(i).position.y);
            }
        }
    CHECK(dump_scenario(generate_scenario({Topology::RandomGeometric, 8, 2, 7})) ==
          dump_scenario(generate_scenario({Topology::RandomGeometric, 8, 2, 7})));
    CHECK(dump_scenario(generate_scenario({Topology::RandomGeometric, 8, 2, 7})) !=
          dump_scenario(generate_scenario({Topology::RandomGeometric, 8, 2, 8})));
}

TEST_CASE("generated graphs are connected and inside the mission square") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Scenario s = generate_scenario({Topology::RandomGeometric, 10, 4, seed});
        const int M = s.graph.size();
        std::vector<int> seen{0}, stack{0};
        std::vector<char> mark(M, 0);
        mark[0] = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j : s.graph.neighbors(i))
                if (!mark[j]) {
                    mark[j] = 1;
                    stack.push_back(j);
                }
        }
        for (int i = 0; i < M; ++i) {
            CHECK(mark[i]);
            CHECK(s.graph.target(i).position.x >= 0.0);
            CHECK(s.graph.target(i).position.x <= 600.0);
            CHECK(s.graph.target(i).position.y >= 0.0);
            CHECK(s.graph.target(i).position.y <= 600.0);
        }
    }
}

TEST_CASE("agent array with explicit and automatic starts") {
    const Scenario s = parse_scenario_text(R"({
        "targets": [{}, {}, {}],
        "agents": [{"id": 0, "start": 2}, {"id": 1, "start": "auto"}],
        "controller": {"type": "rhc_alpha", "H": 40, "alpha": 0.1},
        "noise": {"model": "state_shock", "m": 0.5, "lambda": 3},
        "seed": 9
    })");
    REQUIRE(s.agents.size() == 2);
    CHECK(s.agents[0].start == 2);
    CHECK(s.agents[1].start == -1);
    CHECK(s.horizon() == 40.0);
    CHECK(*s.controller.alpha == 0.1);
    CHECK(s.noise.lambda == 3.0);
    CHECK(s.seed == 9);
    CHECK(dump_scenario(parse_scenario_text(dump_scenario(s))) == dump_scenario(s));
}
