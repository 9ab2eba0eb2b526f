#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascadia/composition.hpp"
#include "cascadia/errors.hpp"
#include "cascadia/trace.hpp"

namespace cascadia {

/// Component-level dependency graph used for causal attribution. Distinct
/// from the port-level wiring: one edge per component pair that can pass a
/// failure on.
struct DependencyGraph {
    struct Edge {
        std::string from;
        std::string to;
        DependencyType type;
    };

    std::vector<Edge> edges;

    bool has_edge(const std::string& from, const std::string& to) const {
        for (const auto& e : edges)
            if (e.from == from && e.to == to) return true;
        return false;
    }

    /// The town's default graph: power feeds the pump and the comms network;
    /// the comms network carries every component's telemetry; the pump feeds
    /// the tank.
    static DependencyGraph micropolis_default() {
        DependencyGraph g;
        g.edges = {{"substation", "network", DependencyType::physical},
                   {"substation", "pump", DependencyType::physical},
                   {"network", "substation", DependencyType::cyber},
                   {"network", "scada", DependencyType::cyber},
                   {"network", "pump", DependencyType::cyber},
                   {"network", "tank", DependencyType::cyber},
                   {"pump", "tank", DependencyType::internal}};
        return g;
    }
};

/// Which modes count as degraded service per component. UPSUsage is included
/// for the network: service continues but resilience is being consumed.
/// SCADA Open is a correct protective response and does not count.
struct DegradedModeSet {
    std::map<std::string, std::vector<std::string>> modes;

    bool is_degraded(const std::string& node, const std::string& mode) const {
        auto it = modes.find(node);
        if (it == modes.end()) return false;
        for (const auto& m : it->second)
            if (m == mode) return true;
        return false;
    }

    static DegradedModeSet micropolis_default() {
        DegradedModeSet s;
        s.modes = {{"substation", {"SwitchOff"}},
                   {"scada", {"ConnDown"}},
                   {"network", {"UPSUsage", "NetDown"}},
                   {"tank", {"Drained", "Overflow"}},
                   {"pump", {"Fault"}}};
        return s;
    }
};

struct CascadeEvent {
    double t = 0.0;
    std::string node;
    std::string mode;        ///< mode entered (degradation) or left behind (recovery: mode now active)
    bool degradation = true; ///< false = recovery (left all degraded modes)
    std::size_t row = 0;     ///< trace row where the new mode first appears
};

/// One degradation event with its causal attribution.
struct AttributedEvent {
    CascadeEvent event;
    int parent = -1;                 ///< index into the degradation list, -1 = root
    std::vector<int> other_eligible; ///< eligible parents not chosen
    int root = -1;                   ///< index of this event's chain root
    std::string root_cause;          ///< "injected" | "overload" | "exogenous" (roots only)
};

struct CascadeReport {
    std::vector<CascadeEvent> events;          ///< degradations and recoveries, chronological
    std::vector<AttributedEvent> degradations; ///< chronological, with parent links
    std::vector<std::vector<int>> chains;      ///< degradation indices grouped by root, root first
};

struct ImpactMetrics {
    std::map<std::string, double> degraded_dwell; ///< minutes per component
    double time_to_first_cascade = 0.0;           ///< root to earliest child, 0 when nothing cascades
    double unserved_water = 0.0;                  ///< integral of demand over Drained intervals
    double spill_volume = 0.0;                    ///< integral of excess supply over Overflow intervals
    double blackout_duration = 0.0;               ///< substation SwitchOff dwell
    int components_affected = 0;
};

/// Scan the trace's mode columns for entries into and exits from degraded
/// modes. A switch between two degraded modes is a fresh degradation event
/// (the situation worsened), not a recovery.
inline std::vector<CascadeEvent> extract_events(const Trace& trace, const DegradedModeSet& degraded) {
    std::vector<CascadeEvent> out;
    const auto nodes = trace.mode_nodes();
    for (std::size_t r = 1; r < trace.rows(); ++r) {
        for (const auto& node : nodes) {
            const std::string& prev = trace.mode(node, r - 1);
            const std::string& cur = trace.mode(node, r);
            if (prev == cur) continue;
            const bool was = degraded.is_degraded(node, prev);
            const bool now = degraded.is_degraded(node, cur);
            if (now) out.push_back(CascadeEvent{trace.t[r], node, cur, true, r});
            else if (was) out.push_back(CascadeEvent{trace.t[r], node, cur, false, r});
        }
    }
    return out;
}

/// Attribute each degradation to its earliest eligible parent: a prior
/// degradation of a component with a dependency edge onto this one that has
/// not recovered yet. Ties break on (time, component name). Events with no
/// eligible parent become chain roots.
inline CascadeReport build_cascade(const std::vector<CascadeEvent>& events, const DependencyGraph& graph) {
    CascadeReport report;
    report.events = events;

    std::vector<const CascadeEvent*> degs;
    for (const auto& e : events)
        if (e.degradation) degs.push_back(&e);

    // end of each degradation's active interval: the node's next recovery
    auto active_until = [&events](const CascadeEvent& deg) {
        for (const auto& e : events)
            if (!e.degradation && e.node == deg.node && e.t > deg.t) return e.t;
        return std::numeric_limits<double>::infinity();
    };

    for (std::size_t i = 0; i < degs.size(); ++i) {
        AttributedEvent at;
        at.event = *degs[i];
        std::vector<int> eligible;
        for (std::size_t j = 0; j < degs.size(); ++j) {
            if (j == i) continue;
            const CascadeEvent& p = *degs[j];
            if (p.t > degs[i]->t) continue;
            if (!graph.has_edge(p.node, degs[i]->node)) continue;
            if (active_until(p) <= degs[i]->t) continue; // already recovered
            eligible.push_back(static_cast<int>(j));
        }
        std::sort(eligible.begin(), eligible.end(), [&degs](int a, int b) {
            if (degs[a]->t != degs[b]->t) return degs[a]->t < degs[b]->t;
            return degs[a]->node < degs[b]->node;
        });
        if (!eligible.empty()) {
            at.parent = eligible.front();
            at.other_eligible.assign(eligible.begin() + 1, eligible.end());
        }
        report.degradations.push_back(std::move(at));
    }

    // resolve roots and group chains
    for (std::size_t i = 0; i < report.degradations.size(); ++i) {
        int r = static_cast<int>(i);
        while (report.degradations[r].parent >= 0) r = report.degradations[r].parent;
        report.degradations[i].root = r;
    }
    std::vector<int> roots;
    for (std::size_t i = 0; i < report.degradations.size(); ++i)
        if (report.degradations[i].parent < 0) roots.push_back(static_cast<int>(i));
    for (int r : roots) {
        std::vector<int> chain;
        for (std::size_t i = 0; i < report.degradations.size(); ++i)
            if (report.degradations[i].root == r) chain.push_back(static_cast<int>(i));
        report.chains.push_back(std::move(chain));
    }
    return report;
}

/// Label each chain root from the trace row whose inputs fired the jump
/// (the row before the event): a component whose own fault trigger or
/// operator command was active is an injected failure; a substation trip
/// without a breaker command is the overload guard; everything else is
/// exogenous (e.g. demand draining the tank).
inline void classify_roots(CascadeReport& report, const Trace& trace) {
    auto value_at = [&trace](const std::string& column, std::size_t row) -> std::optional<double> {
        const Trace::Column* c = trace.find_column(column);
        if (c == nullptr || c->is_mode || row >= c->values.size()) return std::nullopt;
        return c->values[row];
    };
    for (auto& at : report.degradations) {
        if (at.parent >= 0) continue;
        const std::size_t trigger = at.event.row > 0 ? at.event.row - 1 : 0;
        std::string cause = "exogenous";
        if (at.event.node == "network") {
            if (value_at("network.phi_n", trigger).value_or(0.0) == 1.0) cause = "injected";
        } else if (at.event.node == "pump") {
            if (value_at("pump.phi_p", trigger).value_or(0.0) == 1.0) cause = "injected";
        } else if (at.event.node == "substation") {
            if (value_at("substation.s_CB", trigger).value_or(0.0) == 1.0)
                cause = value_at("scada.s_OP", trigger).value_or(0.0) == 1.0 ? "injected" : "exogenous";
            else
                cause = "overload";
        }
        at.root_cause = cause;
    }
}

/// Left-endpoint rectangle sums at dt resolution over rows 0..N-1; row k
/// covers [t_k, t_k + dt).
inline ImpactMetrics compute_metrics(const Trace& trace, const CascadeReport& report,
                                     const DegradedModeSet& degraded) {
    ImpactMetrics m;
    const double dt = trace.dt;
    const auto nodes = trace.mode_nodes();
    for (const auto& node : nodes) m.degraded_dwell[node] = 0.0;
    if (trace.rows() == 0) return m;

    const Trace::Column* w_d = trace.find_column("tank.w_d");
    const Trace::Column* w_s = trace.find_column("tank.w_s");
    for (std::size_t r = 0; r + 1 < trace.rows(); ++r) {
        for (const auto& node : nodes) {
            const std::string& mode = trace.mode(node, r);
            if (degraded.is_degraded(node, mode)) m.degraded_dwell[node] += dt;
            if (node == "substation" && mode == "SwitchOff") m.blackout_duration += dt;
            if (node == "tank" && mode == "Drained" && w_d != nullptr)
                m.unserved_water += dt * w_d->values[r];
            if (node == "tank" && mode == "Overflow" && w_d != nullptr && w_s != nullptr)
                m.spill_volume += dt * std::max(0.0, w_s->values[r] - w_d->values[r]);
        }
    }

    std::vector<std::string> affected;
    for (const auto& at : report.degradations)
        if (std::find(affected.begin(), affected.end(), at.event.node) == affected.end())
            affected.push_back(at.event.node);
    m.components_affected = static_cast<int>(affected.size());

    double first = std::numeric_limits<double>::infinity();
    for (const auto& at : report.degradations) {
        if (at.parent < 0) continue;
        const double lag = at.event.t - report.degradations[at.root].event.t;
        first = std::min(first, lag);
    }
    m.time_to_first_cascade = std::isfinite(first) ? first : 0.0;
    return m;
}

inline nlohmann::json cascade_to_json(const CascadeReport& report) {
    auto event_ref = [](const CascadeEvent& e) {
        return nlohmann::json{{"t", e.t}, {"node", e.node}, {"mode", e.mode}};
    };
    nlohmann::json j;
    j["chains"] = nlohmann::json::array();
    for (const auto& chain : report.chains) {
        nlohmann::json c;
        const auto& root = report.degradations[chain.front()];
        c["root"] = event_ref(root.event);
        c["root"]["cause"] = root.root_cause;
        c["events"] = nlohmann::json::array();
        for (int idx : chain) {
            const auto& at = report.degradations[idx];
            nlohmann::json e = event_ref(at.event);
            e["parent"] = at.parent >= 0 ? event_ref(report.degradations[at.parent].event)
                                         : nlohmann::json(nullptr);
            e["other_eligible_parents"] = nlohmann::json::array();
            for (int o : at.other_eligible)
                e["other_eligible_parents"].push_back(event_ref(report.degradations[o].event));
            c["events"].push_back(std::move(e));
        }
        j["chains"].push_back(std::move(c));
    }
    j["recoveries"] = nlohmann::json::array();
    for (const auto& e : report.events)
        if (!e.degradation)
            j["recoveries"].push_back({{"t", e.t}, {"node", e.node}, {"mode", e.mode}});
    return j;
}

inline nlohmann::json metrics_to_json(const ImpactMetrics& m) {
    nlohmann::json j;
    j["degraded_dwell_min"] = nlohmann::json::object();
    for (const auto& [node, dwell] : m.degraded_dwell) j["degraded_dwell_min"][node] = dwell;
    j["time_to_first_cascade_min"] = m.time_to_first_cascade;
    j["unserved_water_m3"] = m.unserved_water;
    j["spill_volume_m3"] = m.spill_volume;
    j["blackout_duration_min"] = m.blackout_duration;
    j["components_affected"] = m.components_affected;
    return j;
}

/// Full analysis pipeline with the default graph and degraded-mode set.
struct AnalysisResult {
    CascadeReport report;
    ImpactMetrics metrics;
};

inline AnalysisResult analyze_trace(const Trace& trace) {
    const auto degraded = DegradedModeSet::micropolis_default();
    const auto graph = DependencyGraph::micropolis_default();
    AnalysisResult res;
    auto events = extract_events(trace, degraded);
    res.report = build_cascade(events, graph);
    classify_roots(res.report, trace);
    res.metrics = compute_metrics(trace, res.report, degraded);
    return res;
}

} // namespace cascadia
