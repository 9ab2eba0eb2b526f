#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cascadia/composition.hpp"
#include "cascadia/errors.hpp"
#include "cascadia/models.hpp"
#include "cascadia/scenario.hpp"
#include "cascadia/trace.hpp"

namespace cascadia {

namespace detail {

/// Exogenous values for the micropolis free inputs at time t, keyed
/// "node.port". Binding is by port name, so it survives any registration
/// order.
inline ValueMap exogenous_at(const CompositionNetwork& net, const Scenario& s, double t) {
    ValueMap exo;
    for (const auto& fp : net.free_inputs()) {
        double v = 0.0;
        if (fp.port == "d_city") v = s.d_city.sample(t);
        else if (fp.port == "w_d") v = s.w_d.sample(t);
        else if (fp.port == "s_OP") v = s.s_op.sample(t);
        else if (fp.port == "phi_n") v = s.phi_n.sample(t);
        else if (fp.port == "phi_p") v = s.phi_p.sample(t);
        else throw ConfigError("no profile or schedule covers free input " + fp.node + "." + fp.port);
        exo.set(fp.node + "." + fp.port, v);
    }
    return exo;
}

inline void apply_initial_overrides(const CompositionNetwork& net, NetworkState& state,
                                    const Scenario& s) {
    for (const auto& [node, ov] : s.initial) {
        if (!net.has_node(node)) throw ConfigError("initial." + node + ": unknown component");
        const auto& n = net.node(node);
        if (n.kind != CompositionNetwork::Node::Kind::automaton)
            throw ConfigError("initial." + node + ": not an automaton");
        auto& ast = state.state_of(net, node);
        if (ov.mode) {
            if (n.automaton->find_mode(*ov.mode) == nullptr)
                throw ConfigError("initial." + node + ".mode: unknown mode '" + *ov.mode + "'");
            ast.mode = *ov.mode;
        }
        for (const auto& [var, value] : ov.state) {
            bool found = false;
            for (std::size_t i = 0; i < n.automaton->continuous_vars.size(); ++i) {
                if (n.automaton->continuous_vars[i].name == var) {
                    ast.x[i] = value;
                    found = true;
                }
            }
            if (!found)
                throw ConfigError("initial." + node + "." + var + ": unknown continuous variable");
        }
    }
}

inline void append_snapshot(Trace& trace, const CompositionNetwork& net, const StepSnapshot& snap) {
    if (trace.columns.empty()) {
        for (const auto& ns : snap.nodes) {
            if (ns.mode) {
                trace.columns.push_back({ns.node + ".mode", true, {}, {}});
                const auto& n = net.node(ns.node);
                for (const auto& var : n.automaton->continuous_vars)
                    trace.columns.push_back({ns.node + "." + var.name, false, {}, {}});
            }
            for (const auto& [port, _] : ns.inputs)
                trace.columns.push_back({ns.node + "." + port, false, {}, {}});
            for (const auto& [port, _] : ns.outputs)
                trace.columns.push_back({ns.node + "." + port, false, {}, {}});
        }
    }
    trace.t.push_back(snap.t);
    std::size_t col = 0;
    for (const auto& ns : snap.nodes) {
        if (ns.mode) {
            trace.columns[col++].labels.push_back(*ns.mode);
            for (double xi : ns.x) trace.columns[col++].values.push_back(xi);
        }
        for (const auto& [_, v] : ns.inputs) trace.columns[col++].values.push_back(v);
        for (const auto& [_, v] : ns.outputs) trace.columns[col++].values.push_back(v);
    }
}

} // namespace detail

/// Number of steps a run takes: floor(t_end/dt), with slack for binary
/// representation of the quotient. The trace gets one row per step plus the
/// initial row.
inline long step_count(double t_end, double dt) {
    return static_cast<long>(std::floor(t_end / dt + 1e-9));
}

/// Run one scenario to completion.
///
/// Builds the closed-loop composition, applies initial overrides, then steps
/// from t = 0 to t_end recording every snapshot and every mode change. The
/// result is fully determined by (scenario, seed).
inline Trace run(const Scenario& scenario) {
    scenario.validate();
    const double dt = scenario.solver.dt;
    CompositionNetwork net = make_micropolis(scenario.params, dt);
    NetworkState state = make_network_state(net, dt);
    detail::apply_initial_overrides(net, state, scenario);

    NoiseSource noise(scenario.solver.seed);
    StepLimits limits{scenario.solver.max_consecutive_jumps};

    Trace trace;
    trace.scenario_hash = scenario_hash(scenario);
    trace.seed = scenario.solver.seed;
    trace.dt = dt;

    const long steps = step_count(scenario.solver.t_end, dt);
    for (long k = 0; k < steps; ++k) {
        const ValueMap exo = detail::exogenous_at(net, scenario, state.t);
        StepSnapshot snap = step_network(net, state, exo, dt, noise, limits);
        detail::append_snapshot(trace, net, snap);
        for (const auto& f : snap.fired)
            trace.events.push_back(ModeChangeEvent{state.t, f.node, f.from, f.to, f.label});
    }
    const ValueMap exo = detail::exogenous_at(net, scenario, state.t);
    StepSnapshot last = observe_network(net, state, exo, noise);
    detail::append_snapshot(trace, net, last);
    return trace;
}

} // namespace cascadia
