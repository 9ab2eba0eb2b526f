#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "cascadia/engine.hpp"
#include "cascadia/scenario.hpp"

using namespace cascadia;

TEST_CASE("an empty scenario takes every default") {
    Scenario s = load_scenario("{}");
    CHECK(s.params.substation.P_lim == 500.0);
    CHECK(s.params.substation.T_s == 5.0);
    CHECK(s.params.substation.sigma_eps == 0.5);
    CHECK(s.params.scada.T_d == 1.0);
    CHECK(s.params.scada.T_s == 5.0);
    CHECK(s.params.scada.theta_off == 1.0); // max(1, 2*sigma)
    CHECK(s.params.network.P_n == 10.0);
    CHECK(s.params.network.T_ups == 30.0);
    CHECK(s.params.network.T_1 == 0.2);
    CHECK(s.params.tank.V_0 == 50.0);
    CHECK(s.params.tank.V_max == 100.0);
    CHECK(s.params.pump.V_th == 30.0);
    CHECK(s.params.pump.T_off == 15.0);
    CHECK(s.params.pump.T_on == 120.0);
    CHECK(s.params.pump.W_avg == 2.0);
    CHECK(s.params.pump.P_p == 50.0);
    CHECK(s.params.pump.V_max == 100.0); // mirrors the tank
    CHECK(s.solver.dt == 0.1);
    CHECK(s.solver.t_end == 120.0);
    CHECK(s.solver.seed == 0);
    CHECK(s.solver.max_consecutive_jumps == 1000);
    CHECK(s.d_city.sample(0.0) == 200.0);
    CHECK(s.w_d.sample(33.0) == 1.0);
    CHECK(s.phi_n.sample(1000.0) == 0);
}

TEST_CASE("the detection threshold follows the noise level unless pinned") {
    Scenario s = load_scenario(R"({"substation": {"sigma_eps": 3}})");
    CHECK(s.params.scada.theta_off == 6.0);
    Scenario s2 = load_scenario(R"({"substation": {"sigma_eps": 3}, "scada": {"theta_off": 2.5}})");
    CHECK(s2.params.scada.theta_off == 2.5);
    Scenario s3 = load_scenario(R"({"substation": {"sigma_eps": 0.1}})");
    CHECK(s3.params.scada.theta_off == 1.0); // floor
}

TEST_CASE("pump V_max mirrors the tank unless pinned") {
    Scenario s = load_scenario(R"({"tank": {"V_max": 80}})");
    CHECK(s.params.pump.V_max == 80.0);
    Scenario s2 = load_scenario(R"({"tank": {"V_max": 80}, "pump": {"V_max": 70}})");
    CHECK(s2.params.pump.V_max == 70.0);
}

TEST_CASE("invalid scenarios are rejected with field paths") {
    CHECK_THROWS_WITH(load_scenario(R"({"tank": {"V_0": 150}})"),
                      Catch::Matchers::ContainsSubstring("tank.V_0"));
    CHECK_THROWS_WITH(load_scenario(R"({"solver": {"dt": 0}})"),
                      Catch::Matchers::ContainsSubstring("solver.dt"));
    CHECK_THROWS_WITH(load_scenario(R"({"solver": {"dt": 1, "t_end": 0.5}})"),
                      Catch::Matchers::ContainsSubstring("solver.t_end"));
    CHECK_THROWS_AS(load_scenario("not json at all"), ConfigError);
    CHECK_THROWS_AS(load_scenario("[1,2,3]"), ConfigError);
}

TEST_CASE("unknown keys are rejected, including nested ones") {
    CHECK_THROWS_WITH(load_scenario(R"({"tanks": {}})"), Catch::Matchers::ContainsSubstring("tanks"));
    CHECK_THROWS_WITH(load_scenario(R"({"tank": {"V_zero": 1}})"),
                      Catch::Matchers::ContainsSubstring("V_zero"));
    CHECK_THROWS_WITH(load_scenario(R"({"solver": {"step": 0.1}})"),
                      Catch::Matchers::ContainsSubstring("step"));
}

TEST_CASE("schedules hold their value between toggles") {
    Scenario s = load_scenario(R"({"schedules": {"phi_n": [[60, 1], [90, 0]]}})");
    CHECK(s.phi_n.sample(0.0) == 0);
    CHECK(s.phi_n.sample(59.9) == 0);
    CHECK(s.phi_n.sample(60.0) == 1);
    CHECK(s.phi_n.sample(89.9) == 1);
    CHECK(s.phi_n.sample(90.0) == 0);
    CHECK(s.phi_n.sample(1e6) == 0);

    CHECK_THROWS_AS(load_scenario(R"({"schedules": {"phi_n": [[60, 2]]}})"), ConfigError);
    CHECK_THROWS_AS(load_scenario(R"({"schedules": {"phi_n": [[60, 1], [60, 0]]}})"), ConfigError);
}

TEST_CASE("profiles sample by hold or linear interpolation with end clamping") {
    Profile hold;
    hold.interp = Profile::Interp::hold;
    hold.points = {{0.0, 1.0}, {10.0, 3.0}};
    CHECK(sample_profile(hold, 9.9) == 1.0);
    CHECK(sample_profile(hold, 10.0) == 3.0);
    CHECK(sample_profile(hold, 25.0) == 3.0);

    Profile lin;
    lin.interp = Profile::Interp::linear;
    lin.points = {{0.0, 0.0}, {10.0, 10.0}};
    CHECK(sample_profile(lin, 4.0) == Catch::Approx(4.0));
    CHECK(sample_profile(lin, 10.0) == 10.0);
    CHECK(sample_profile(lin, 99.0) == 10.0);

    SECTION("breakpoints must start at or before zero and increase strictly") {
        CHECK_THROWS_AS(load_scenario(R"({"profiles": {"w_d": {"points": [[5, 1]]}}})"), ConfigError);
        CHECK_THROWS_AS(load_scenario(R"({"profiles": {"w_d": {"points": [[0, 1], [0, 2]]}}})"),
                        ConfigError);
        CHECK_THROWS_AS(load_scenario(R"({"profiles": {"w_d": {"interp": "spline", "points": [[0, 1]]}}})"),
                        ConfigError);
    }
}

TEST_CASE("initial overrides reposition components before the first step") {
    Scenario s = load_scenario(
        R"({"substation": {"sigma_eps": 0}, "solver": {"t_end": 1},
            "initial": {"tank": {"mode": "Drained", "x_v": 0}, "pump": {"x_t": 3}}})");
    Trace tr = run(s);
    CHECK(tr.mode("tank", 0) == "Drained");
    CHECK(tr.value("tank.x_v", 0) == 0.0);
    CHECK(tr.value("pump.x_t", 0) == 3.0);

    CHECK_THROWS_WITH(run(load_scenario(R"({"initial": {"tank": {"mode": "Empty"}}})")),
                      Catch::Matchers::ContainsSubstring("initial.tank.mode"));
    CHECK_THROWS_WITH(run(load_scenario(R"({"initial": {"ghost": {"mode": "On"}}})")),
                      Catch::Matchers::ContainsSubstring("initial.ghost"));
    CHECK_THROWS_WITH(run(load_scenario(R"({"initial": {"tank": {"volume": 1}}})")),
                      Catch::Matchers::ContainsSubstring("initial.tank.volume"));
}

TEST_CASE("a quiescent run produces no events and the documented row count") {
    Scenario s = load_scenario(R"({"substation": {"sigma_eps": 0}, "solver": {"t_end": 10}})");
    Trace tr = run(s);
    CHECK(tr.events.empty());
    CHECK(tr.rows() == 101); // floor(t_end/dt) + 1
    CHECK(tr.value("tank.x_v", tr.rows() - 1) == Catch::Approx(40.0).margin(1e-9));

    SECTION("clock integrity: row k sits at k*dt") {
        for (std::size_t r = 0; r < tr.rows(); ++r)
            CHECK(tr.t[r] == static_cast<double>(r) * tr.dt);
    }
    SECTION("exogenous fidelity: recorded free inputs equal the sampled sources") {
        for (std::size_t r = 0; r < tr.rows(); ++r) {
            CHECK(tr.value("demand_sum.d_city", r) == s.d_city.sample(tr.t[r]));
            CHECK(tr.value("tank.w_d", r) == s.w_d.sample(tr.t[r]));
            CHECK(tr.value("network.phi_n", r) == s.phi_n.sample(tr.t[r]));
        }
    }
}

TEST_CASE("event log and row-to-row mode changes tell the same story") {
    Scenario s = load_scenario(
        R"({"substation": {"sigma_eps": 0}, "tank": {"V_0": 100}, "solver": {"t_end": 150},
            "schedules": {"phi_n": [[60, 1]]}})");
    Trace tr = run(s);
    REQUIRE_FALSE(tr.events.empty());

    std::vector<ModeChangeEvent> derived;
    for (std::size_t r = 1; r < tr.rows(); ++r) {
        for (const auto& node : tr.mode_nodes()) {
            const auto& prev = tr.mode(node, r - 1);
            const auto& cur = tr.mode(node, r);
            if (prev != cur) derived.push_back({tr.t[r], node, prev, cur, ""});
        }
    }
    REQUIRE(derived.size() == tr.events.size());
    for (std::size_t i = 0; i < derived.size(); ++i) {
        CHECK(derived[i].t == tr.events[i].t);
        CHECK(derived[i].node == tr.events[i].node);
        CHECK(derived[i].from == tr.events[i].from);
        CHECK(derived[i].to == tr.events[i].to);
        CHECK_FALSE(tr.events[i].guard.empty());
    }
    SECTION("events are ordered by time, then node name") {
        for (std::size_t i = 1; i < tr.events.size(); ++i) {
            const bool ordered = tr.events[i - 1].t < tr.events[i].t ||
                                 (tr.events[i - 1].t == tr.events[i].t &&
                                  tr.events[i - 1].node <= tr.events[i].node);
            CHECK(ordered);
        }
    }
}

TEST_CASE("equal scenarios and seeds reproduce byte-identical artifacts") {
    const std::string text = R"({"solver": {"t_end": 20, "seed": 31}})";
    Trace a = run(load_scenario(text));
    Trace b = run(load_scenario(text));
    CHECK(trace_to_csv(a) == trace_to_csv(b));
    CHECK(events_to_json(a.events).dump() == events_to_json(b.events).dump());
}

TEST_CASE("scenario hashing is stable and sensitive") {
    auto a = load_scenario(R"({"solver": {"t_end": 20}})");
    auto b = load_scenario(R"({"solver": {"t_end": 20}})");
    auto c = load_scenario(R"({"solver": {"t_end": 21}})");
    CHECK(scenario_hash(a) == scenario_hash(b));
    CHECK(scenario_hash(a) != scenario_hash(c));
}

TEST_CASE("zeno aborts surface as errors naming the node") {
    // a power cut faults the running pump, which clears itself on the very
    // next step: two back-to-back jumps, enough to trip a limit of one
    Scenario s = load_scenario(
        R"({"substation": {"sigma_eps": 0},
            "solver": {"t_end": 120, "max_consecutive_jumps": 1},
            "schedules": {"s_op": [[50, 1]]}})");
    bool threw = false;
    try {
        run(s);
    } catch (const ZenoError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("pump") != std::string::npos);
    }
    CHECK(threw);
}
