#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cascadia/delay_line.hpp"
#include "cascadia/errors.hpp"
#include "cascadia/log.hpp"
#include "cascadia/noise.hpp"
#include "cascadia/value_map.hpp"

namespace cascadia {

enum class PortDirection { input, output };

/// What a port carries. Sentinel-capable ports transport nonnegative values
/// in normal operation and the reserved value -1 when the carrying link is
/// down; discrete ports carry small integer commands/flags.
enum class PortKind { continuous, discrete, sentinel_capable };

struct Port {
    std::string name;
    PortDirection direction = PortDirection::input;
    PortKind kind = PortKind::continuous;
    double idle = 0.0; ///< value assumed on an unwired latch before traffic arrives
};

using StateVec = std::vector<double>;

/// Right-hand side of the mode's ODE: one derivative per continuous variable.
using FlowFn = std::function<StateVec(const StateVec&, const ValueMap&)>;

/// Output assignment for the mode. May draw noise and advance the
/// automaton's delay-line registers; called exactly once per step.
using OutputFn = std::function<ValueMap(const StateVec&, const ValueMap&, NoiseSource&, Buffers&)>;

using GuardFn = std::function<bool(const StateVec&, const ValueMap&)>;
using ResetFn = std::function<StateVec(const StateVec&, const ValueMap&)>;
using InvariantFn = std::function<bool(const StateVec&, const ValueMap&)>;

struct ModeDefinition {
    std::string name;
    FlowFn flow;
    OutputFn output;
    InvariantFn invariant; ///< optional; violations are logged, never enforced
};

struct Transition {
    std::string source;
    std::string target;
    GuardFn guard;
    ResetFn reset; ///< optional; identity when absent
    int priority = 0; ///< lower value wins when several guards hold
    std::string label; ///< stable human-readable id, recorded in event logs
};

struct ContinuousVar {
    std::string name;
    std::string unit;
};

/// Delay-line register declared by a model; the concrete capacity is fixed
/// when an AutomatonState is created for a given step size.
struct BufferSpec {
    std::string name;
    double duration = 0.0;
    double idle = 0.0;
};

/// A hybrid automaton with input/output ports so it can be wired to others.
///
/// Definitions are immutable after validate() and safe to share between
/// concurrently running simulations; all mutable data lives in
/// AutomatonState.
struct OpenHybridAutomaton {
    std::string name;
    std::vector<ContinuousVar> continuous_vars;
    std::vector<Port> input_ports;
    std::vector<Port> output_ports;
    std::vector<ModeDefinition> modes;
    std::vector<Transition> transitions;
    std::string initial_mode;
    StateVec initial_state;
    ValueMap parameters;
    std::vector<BufferSpec> buffers;

    const ModeDefinition* find_mode(const std::string& mode_name) const {
        for (const auto& m : modes)
            if (m.name == mode_name) return &m;
        return nullptr;
    }

    const Port* find_port(const std::string& port_name, PortDirection dir) const {
        const auto& ports = dir == PortDirection::input ? input_ports : output_ports;
        for (const auto& p : ports)
            if (p.name == port_name) return &p;
        return nullptr;
    }

    /// Structural checks; throws DefinitionError on an ill-formed model.
    void validate() const {
        if (name.empty()) throw DefinitionError("automaton has no name");
        if (modes.empty()) throw DefinitionError(name + ": automaton has no modes");
        for (std::size_t i = 0; i < modes.size(); ++i)
            for (std::size_t j = i + 1; j < modes.size(); ++j)
                if (modes[i].name == modes[j].name)
                    throw DefinitionError(name + ": duplicate mode '" + modes[i].name + "'");
        if (find_mode(initial_mode) == nullptr)
            throw DefinitionError(name + ": initial mode '" + initial_mode + "' does not exist");
        if (initial_state.size() != continuous_vars.size())
            throw DefinitionError(name + ": initial state has " + std::to_string(initial_state.size()) +
                                  " entries for " + std::to_string(continuous_vars.size()) +
                                  " continuous variables");
        check_unique_names(input_ports, "input");
        check_unique_names(output_ports, "output");
        for (const auto& m : modes) {
            if (!m.flow) throw DefinitionError(name + "/" + m.name + ": mode has no flow map");
            if (!m.output) throw DefinitionError(name + "/" + m.name + ": mode has no output map");
        }
        for (const auto& t : transitions) {
            if (find_mode(t.source) == nullptr)
                throw DefinitionError(name + ": transition source '" + t.source + "' does not exist");
            if (find_mode(t.target) == nullptr)
                throw DefinitionError(name + ": transition target '" + t.target + "' does not exist");
            if (!t.guard) throw DefinitionError(name + ": transition '" + t.label + "' has no guard");
        }
        // deterministic selection requires unique priorities per source mode
        for (std::size_t i = 0; i < transitions.size(); ++i)
            for (std::size_t j = i + 1; j < transitions.size(); ++j)
                if (transitions[i].source == transitions[j].source &&
                    transitions[i].priority == transitions[j].priority)
                    throw DefinitionError(name + ": transitions from '" + transitions[i].source +
                                          "' share priority " + std::to_string(transitions[i].priority));
    }

private:
    static void check_unique_names(const std::vector<Port>& ports, const char* what) {
        for (std::size_t i = 0; i < ports.size(); ++i)
            for (std::size_t j = i + 1; j < ports.size(); ++j)
                if (ports[i].name == ports[j].name)
                    throw DefinitionError(std::string("duplicate ") + what + " port '" + ports[i].name + "'");
    }
};

/// Mutable execution state of one automaton instance.
struct AutomatonState {
    std::string mode;
    StateVec x;
    Buffers buffers;
};

/// Fresh state at the automaton's initial condition; `dt` fixes the concrete
/// capacity of any declared delay-line registers.
inline AutomatonState make_initial_state(const OpenHybridAutomaton& a, double dt) {
    AutomatonState st;
    st.mode = a.initial_mode;
    st.x = a.initial_state;
    for (const auto& spec : a.buffers)
        st.buffers.add(spec.name, DelayLine(DelayLine::capacity_for(spec.duration, dt), spec.idle));
    return st;
}

namespace detail {

inline void require_inputs(const OpenHybridAutomaton& a, const ValueMap& inputs) {
    for (const auto& p : a.input_ports)
        if (!inputs.contains(p.name))
            throw ConfigError(a.name + ": missing value for input port '" + p.name + "'");
}

inline const ModeDefinition& require_mode(const OpenHybridAutomaton& a, const std::string& mode) {
    const ModeDefinition* m = a.find_mode(mode);
    if (m == nullptr) throw DefinitionError(a.name + ": unknown mode '" + mode + "'");
    return *m;
}

} // namespace detail

/// Evaluate the current mode's output map. Every output port must be
/// assigned exactly once; the result is reordered into declared port order.
/// Advances delay-line registers, so call once per step.
inline ValueMap evaluate_outputs(const OpenHybridAutomaton& a, AutomatonState& state,
                                 const ValueMap& inputs, NoiseSource& noise) {
    detail::require_inputs(a, inputs);
    const ModeDefinition& mode = detail::require_mode(a, state.mode);
    ValueMap raw = mode.output(state.x, inputs, noise, state.buffers);
    ValueMap out;
    for (const auto& p : a.output_ports) {
        if (!raw.contains(p.name))
            throw DefinitionError(a.name + "/" + mode.name + ": output map does not assign port '" +
                                  p.name + "'");
        const double v = raw.get(p.name);
        if (!std::isfinite(v))
            throw NumericError(a.name + "/" + mode.name + ": non-finite value on output port '" +
                               p.name + "'");
        out.set(p.name, v);
    }
    if (raw.size() != a.output_ports.size()) {
        for (const auto& [k, v] : raw)
            if (a.find_port(k, PortDirection::output) == nullptr)
                throw DefinitionError(a.name + "/" + mode.name + ": output map assigns undeclared port '" +
                                      k + "'");
    }
    return out;
}

/// One explicit forward-Euler step of the current mode's flow. Does not
/// change the mode.
inline StateVec integrate_flow(const OpenHybridAutomaton& a, const AutomatonState& state,
                               const ValueMap& inputs, double dt) {
    if (dt <= 0.0) throw ConfigError(a.name + ": time step must be > 0");
    detail::require_inputs(a, inputs);
    const ModeDefinition& mode = detail::require_mode(a, state.mode);
    StateVec dx = mode.flow(state.x, inputs);
    if (dx.size() != state.x.size())
        throw DefinitionError(a.name + "/" + mode.name + ": flow returned " + std::to_string(dx.size()) +
                              " derivatives for " + std::to_string(state.x.size()) + " variables");
    StateVec next = state.x;
    for (std::size_t i = 0; i < next.size(); ++i) {
        if (!std::isfinite(dx[i]))
            throw NumericError(a.name + "/" + mode.name + ": non-finite derivative for variable '" +
                               a.continuous_vars[i].name + "'");
        next[i] += dt * dx[i];
    }
    return next;
}

/// Transitions leaving `mode` whose guard holds on (x, inputs), sorted by
/// ascending priority value.
inline std::vector<const Transition*> enabled_transitions(const OpenHybridAutomaton& a,
                                                          const std::string& mode, const StateVec& x,
                                                          const ValueMap& inputs) {
    std::vector<const Transition*> hits;
    for (const auto& t : a.transitions)
        if (t.source == mode && t.guard(x, inputs)) hits.push_back(&t);
    std::sort(hits.begin(), hits.end(),
              [](const Transition* lhs, const Transition* rhs) { return lhs->priority < rhs->priority; });
    return hits;
}

inline std::vector<const Transition*> enabled_transitions(const OpenHybridAutomaton& a,
                                                          const AutomatonState& state,
                                                          const ValueMap& inputs) {
    detail::require_inputs(a, inputs);
    detail::require_mode(a, state.mode);
    return enabled_transitions(a, state.mode, state.x, inputs);
}

struct StepResult {
    AutomatonState state;
    ValueMap outputs;
    const Transition* fired = nullptr; ///< nullptr when no jump was taken
};

/// Advance one automaton by one step of size dt:
///   1. outputs from the current (mode, x, inputs),
///   2. forward-Euler integration of the mode's flow,
///   3. guards evaluated on the post-integration state with current inputs,
///   4. at most one jump: the enabled transition with the lowest priority
///      value, applying its reset.
inline StepResult step_automaton(const OpenHybridAutomaton& a, const AutomatonState& state,
                                 const ValueMap& inputs, double dt, NoiseSource& noise) {
    StepResult result;
    result.state = state;
    result.outputs = evaluate_outputs(a, result.state, inputs, noise);
    result.state.x = integrate_flow(a, result.state, inputs, dt);
    auto enabled = enabled_transitions(a, result.state.mode, result.state.x, inputs);
    if (!enabled.empty()) {
        const Transition* t = enabled.front();
        if (t->reset) result.state.x = t->reset(result.state.x, inputs);
        if (result.state.x.size() != a.continuous_vars.size())
            throw DefinitionError(a.name + ": reset of '" + t->label + "' changed the state dimension");
        result.state.mode = t->target;
        result.fired = t;
    }
    const ModeDefinition& mode = detail::require_mode(a, result.state.mode);
    if (mode.invariant && !mode.invariant(result.state.x, inputs))
        log_warn(a.name + ": invariant of mode '" + mode.name + "' violated");
    return result;
}

} // namespace cascadia
