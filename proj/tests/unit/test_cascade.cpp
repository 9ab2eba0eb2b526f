#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "cascadia/cascade.hpp"
#include "cascadia/engine.hpp"

using namespace cascadia;

namespace {

/// Minimal synthetic trace: one mode column per named node, constant dt,
/// modes assigned per row by a callback.
template <typename ModeFn>
Trace synthetic_trace(const std::vector<std::string>& nodes, std::size_t rows, double dt, ModeFn mode_of) {
    Trace tr;
    tr.dt = dt;
    for (const auto& n : nodes) tr.columns.push_back({n + ".mode", true, {}, {}});
    for (std::size_t r = 0; r < rows; ++r) {
        tr.t.push_back(static_cast<double>(r) * dt);
        for (std::size_t c = 0; c < nodes.size(); ++c)
            tr.columns[c].labels.push_back(mode_of(nodes[c], r));
    }
    return tr;
}

void add_value_column(Trace& tr, const std::string& name, double value) {
    Trace::Column col{name, false, {}, {}};
    col.values.assign(tr.rows(), value);
    tr.columns.push_back(std::move(col));
}

const DegradedModeSet kDegraded = DegradedModeSet::micropolis_default();
const DependencyGraph kGraph = DependencyGraph::micropolis_default();

} // namespace

TEST_CASE("a trace without mode changes yields no events") {
    auto tr = synthetic_trace({"network", "tank"}, 50, 0.1,
                              [](const std::string& n, std::size_t) {
                                  return n == "network" ? "Healthy" : "Healthy";
                              });
    CHECK(extract_events(tr, kDegraded).empty());
    auto report = build_cascade({}, kGraph);
    CHECK(report.chains.empty());
}

TEST_CASE("entering and leaving a degraded mode produce one event each") {
    auto tr = synthetic_trace({"network"}, 100, 0.1, [](const std::string&, std::size_t r) {
        if (r >= 60 && r < 80) return "NetDown";
        return "Healthy";
    });
    auto events = extract_events(tr, kDegraded);
    REQUIRE(events.size() == 2);
    CHECK(events[0].degradation);
    CHECK(events[0].node == "network");
    CHECK(events[0].mode == "NetDown");
    CHECK(events[0].t == Catch::Approx(6.0));
    CHECK_FALSE(events[1].degradation);
    CHECK(events[1].t == Catch::Approx(8.0));
}

TEST_CASE("worsening within degraded modes is a fresh degradation, not a recovery") {
    auto tr = synthetic_trace({"network"}, 100, 0.1, [](const std::string&, std::size_t r) {
        if (r < 20) return "Healthy";
        if (r < 60) return "UPSUsage";
        return "NetDown";
    });
    auto events = extract_events(tr, kDegraded);
    REQUIRE(events.size() == 2);
    CHECK(events[0].mode == "UPSUsage");
    CHECK(events[1].mode == "NetDown");
    CHECK(events[1].degradation);
}

TEST_CASE("a single event forms a root-only chain") {
    auto tr = synthetic_trace({"pump"}, 10, 0.1, [](const std::string&, std::size_t r) {
        return r >= 5 ? "Fault" : "PumpOff";
    });
    auto events = extract_events(tr, kDegraded);
    auto report = build_cascade(events, kGraph);
    REQUIRE(report.chains.size() == 1);
    REQUIRE(report.chains[0].size() == 1);
    CHECK(report.degradations[0].parent == -1);
    CHECK(report.degradations[0].root == 0);
}

TEST_CASE("the earliest eligible parent wins and alternatives are annotated") {
    // network down at t=6, pump faults at 6.1, tank drains much later: both
    // the network (cyber) and the pump (internal) could explain the tank,
    // the earlier network event is chosen
    auto tr = synthetic_trace({"network", "pump", "tank"}, 200, 0.1,
                              [](const std::string& n, std::size_t r) -> std::string {
                                  if (n == "network") return r >= 60 ? "NetDown" : "Healthy";
                                  if (n == "pump") return r >= 61 ? "Fault" : "PumpOff";
                                  return r >= 150 ? "Drained" : "Healthy";
                              });
    auto events = extract_events(tr, kDegraded);
    auto report = build_cascade(events, kGraph);
    REQUIRE(report.degradations.size() == 3);

    const auto& net_ev = report.degradations[0];
    const auto& pump_ev = report.degradations[1];
    const auto& tank_ev = report.degradations[2];
    CHECK(net_ev.parent == -1);
    CHECK(pump_ev.parent == 0);
    CHECK(tank_ev.parent == 0); // network degraded first
    REQUIRE(tank_ev.other_eligible.size() == 1);
    CHECK(report.degradations[tank_ev.other_eligible[0]].event.node == "pump");
    REQUIRE(report.chains.size() == 1);
    CHECK(report.chains[0].size() == 3);
}

TEST_CASE("recovered components stop being eligible parents") {
    // pump fault ends at t=3; tank drains at t=8 with no active parent
    auto tr = synthetic_trace({"pump", "tank"}, 120, 0.1,
                              [](const std::string& n, std::size_t r) -> std::string {
                                  if (n == "pump") return (r >= 10 && r < 30) ? "Fault" : "PumpOff";
                                  return r >= 80 ? "Drained" : "Healthy";
                              });
    auto events = extract_events(tr, kDegraded);
    auto report = build_cascade(events, kGraph);
    REQUIRE(report.degradations.size() == 2);
    CHECK(report.degradations[1].event.node == "tank");
    CHECK(report.degradations[1].parent == -1); // pump already recovered
    CHECK(report.chains.size() == 2);
}

TEST_CASE("oracle scenario: network fault chains into pump and tank") {
    Scenario s = load_scenario(
        R"({"substation": {"sigma_eps": 0}, "tank": {"V_0": 100}, "solver": {"t_end": 150},
            "schedules": {"phi_n": [[60, 1]]}})");
    Trace tr = run(s);
    auto res = analyze_trace(tr);

    REQUIRE(res.report.chains.size() == 1);
    const auto& root = res.report.degradations[res.report.chains[0].front()];
    CHECK(root.event.node == "network");
    CHECK(root.root_cause == "injected");

    bool pump_from_network = false, tank_from_network = false;
    for (const auto& at : res.report.degradations) {
        if (at.event.node == "pump" && at.parent >= 0)
            pump_from_network = res.report.degradations[at.parent].event.node == "network";
        if (at.event.node == "tank" && at.parent >= 0)
            tank_from_network = res.report.degradations[at.parent].event.node == "network";
    }
    CHECK(pump_from_network);
    CHECK(tank_from_network);

    SECTION("chain soundness: every link has an edge, order and an active parent") {
        for (const auto& at : res.report.degradations) {
            if (at.parent < 0) continue;
            const auto& parent = res.report.degradations[at.parent];
            CHECK(parent.event.t <= at.event.t);
            CHECK(kGraph.has_edge(parent.event.node, at.event.node));
            bool recovered_before = false;
            for (const auto& e : res.report.events)
                if (!e.degradation && e.node == parent.event.node && e.t > parent.event.t &&
                    e.t <= at.event.t)
                    recovered_before = true;
            CHECK_FALSE(recovered_before);
        }
    }
    SECTION("roots are the chronologically earliest of their chains") {
        for (const auto& chain : res.report.chains) {
            const auto& root_ev = res.report.degradations[chain.front()];
            for (int idx : chain) CHECK(root_ev.event.t <= res.report.degradations[idx].event.t);
        }
    }
    SECTION("analysis is deterministic") {
        auto res2 = analyze_trace(tr);
        CHECK(cascade_to_json(res.report).dump() == cascade_to_json(res2.report).dump());
        CHECK(metrics_to_json(res.metrics).dump() == metrics_to_json(res2.metrics).dump());
    }
}

TEST_CASE("oracle scenario: operator shutdown chains power into comms into scada") {
    Scenario s = load_scenario(
        R"({"substation": {"sigma_eps": 0}, "solver": {"t_end": 120}, "schedules": {"s_op": [[50, 1]]}})");
    Trace tr = run(s);
    auto res = analyze_trace(tr);

    // substation root, classified as operator-injected
    const AttributedEvent* sub = nullptr;
    const AttributedEvent* ups = nullptr;
    const AttributedEvent* conn = nullptr;
    for (const auto& at : res.report.degradations) {
        if (at.event.node == "substation" && sub == nullptr) sub = &at;
        if (at.event.node == "network" && at.event.mode == "UPSUsage" && ups == nullptr) ups = &at;
        if (at.event.node == "scada" && conn == nullptr) conn = &at;
    }
    REQUIRE(sub != nullptr);
    REQUIRE(ups != nullptr);
    REQUIRE(conn != nullptr);
    CHECK(sub->parent == -1);
    CHECK(sub->root_cause == "injected");
    REQUIRE(ups->parent >= 0);
    CHECK(res.report.degradations[ups->parent].event.node == "substation");
    REQUIRE(conn->parent >= 0);
    CHECK(res.report.degradations[conn->parent].event.node == "network");
    CHECK(res.report.degradations[conn->root].event.node == "substation");
}

TEST_CASE("metrics: quiescent run scores zero everywhere") {
    Scenario s = load_scenario(R"({"substation": {"sigma_eps": 0}, "solver": {"t_end": 10}})");
    Trace tr = run(s);
    auto res = analyze_trace(tr);
    CHECK(res.metrics.components_affected == 0);
    CHECK(res.metrics.unserved_water == 0.0);
    CHECK(res.metrics.spill_volume == 0.0);
    CHECK(res.metrics.blackout_duration == 0.0);
    CHECK(res.metrics.time_to_first_cascade == 0.0);
    for (const auto& [node, dwell] : res.metrics.degraded_dwell) CHECK(dwell == 0.0);
}

TEST_CASE("metrics: dwell and integrals are rectangle sums over rows") {
    SECTION("ten drained minutes of unit demand lose ten cubic meters") {
        auto tr = synthetic_trace({"tank"}, 301, 0.1, [](const std::string&, std::size_t r) {
            return (r >= 100 && r < 200) ? "Drained" : "Healthy";
        });
        add_value_column(tr, "tank.w_d", 1.0);
        add_value_column(tr, "tank.w_s", 0.0);
        auto events = extract_events(tr, kDegraded);
        auto report = build_cascade(events, kGraph);
        auto m = compute_metrics(tr, report, kDegraded);
        CHECK(m.unserved_water == Catch::Approx(10.0).margin(0.1 + 1e-9));
        CHECK(m.degraded_dwell.at("tank") == Catch::Approx(10.0).margin(0.1 + 1e-9));
    }
    SECTION("five dark minutes of blackout") {
        auto tr = synthetic_trace({"substation"}, 701, 0.1, [](const std::string&, std::size_t r) {
            return (r >= 500 && r < 550) ? "SwitchOff" : "SupplyPower";
        });
        auto events = extract_events(tr, kDegraded);
        auto report = build_cascade(events, kGraph);
        auto m = compute_metrics(tr, report, kDegraded);
        CHECK(m.blackout_duration == Catch::Approx(5.0).margin(0.1 + 1e-9));
    }
    SECTION("overflow integrates the excess supply") {
        auto tr = synthetic_trace({"tank"}, 101, 0.1, [](const std::string&, std::size_t r) {
            return (r >= 50 && r < 70) ? "Overflow" : "Healthy";
        });
        add_value_column(tr, "tank.w_d", 1.0);
        add_value_column(tr, "tank.w_s", 2.0);
        auto events = extract_events(tr, kDegraded);
        auto report = build_cascade(events, kGraph);
        auto m = compute_metrics(tr, report, kDegraded);
        CHECK(m.spill_volume == Catch::Approx(2.0).margin(0.1 + 1e-9));
    }
}

TEST_CASE("metrics conservation: dwell equals degraded row count times dt") {
    Scenario s = load_scenario(
        R"({"substation": {"sigma_eps": 0}, "solver": {"t_end": 120},
            "schedules": {"phi_n": [[10, 1], [90, 0]]}})");
    Trace tr = run(s);
    auto res = analyze_trace(tr);
    for (const auto& node : tr.mode_nodes()) {
        std::size_t count = 0;
        for (std::size_t r = 0; r + 1 < tr.rows(); ++r)
            if (kDegraded.is_degraded(node, tr.mode(node, r))) ++count;
        CHECK(res.metrics.degraded_dwell.at(node) ==
              Catch::Approx(static_cast<double>(count) * tr.dt).margin(1e-9));
    }
    CHECK(res.metrics.components_affected == 4); // substation untouched
}

TEST_CASE("root causes: overload and exogenous demand are distinguished") {
    SECTION("overload trip") {
        Scenario s = load_scenario(
            R"({"substation": {"sigma_eps": 0}, "solver": {"t_end": 80},
                "profiles": {"d_city": {"interp": "hold", "points": [[0, 200], [40, 600], [45, 200]]}}})");
        auto res = analyze_trace(run(s));
        REQUIRE_FALSE(res.report.chains.empty());
        const auto& root = res.report.degradations[res.report.chains[0].front()];
        CHECK(root.event.node == "substation");
        CHECK(root.root_cause == "overload");
    }
    SECTION("demand alone drains the tank") {
        // the pump starts late and cannot keep up with the demand rate
        Scenario s = load_scenario(
            R"({"substation": {"sigma_eps": 0}, "pump": {"V_th": 5, "W_avg": 0.5},
                "solver": {"t_end": 60}})");
        auto res = analyze_trace(run(s));
        REQUIRE_FALSE(res.report.degradations.empty());
        const auto& root = res.report.degradations[0];
        CHECK(root.event.node == "tank");
        CHECK(root.root_cause == "exogenous");
    }
}

TEST_CASE("cascade and metrics serialize with documented fields") {
    Scenario s = load_scenario(
        R"({"substation": {"sigma_eps": 0}, "tank": {"V_0": 100}, "solver": {"t_end": 150},
            "schedules": {"phi_n": [[60, 1]]}})");
    auto res = analyze_trace(run(s));
    auto cj = cascade_to_json(res.report);
    REQUIRE(cj.contains("chains"));
    REQUIRE(cj["chains"].is_array());
    REQUIRE_FALSE(cj["chains"].empty());
    CHECK(cj["chains"][0].contains("root"));
    CHECK(cj["chains"][0]["root"].contains("cause"));
    CHECK(cj["chains"][0].contains("events"));
    CHECK(cj.contains("recoveries"));

    auto mj = metrics_to_json(res.metrics);
    for (const char* key : {"degraded_dwell_min", "time_to_first_cascade_min", "unserved_water_m3",
                            "spill_volume_m3", "blackout_duration_min", "components_affected"})
        CHECK(mj.contains(key));
}
