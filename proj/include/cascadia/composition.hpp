#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cascadia/automaton.hpp"
#include "cascadia/delay_line.hpp"
#include "cascadia/errors.hpp"
#include "cascadia/junction.hpp"
#include "cascadia/log.hpp"
#include "cascadia/noise.hpp"
#include "cascadia/value_map.hpp"

namespace cascadia {

/// Dependency taxonomy for a connection: material output (power, water),
/// transmitted information, any other linking mechanism (demand), or a link
/// between components of the same infrastructure.
enum class DependencyType { physical, cyber, logical, internal };

inline const char* to_string(DependencyType t) {
    switch (t) {
        case DependencyType::physical: return "physical";
        case DependencyType::cyber: return "cyber";
        case DependencyType::logical: return "logical";
        case DependencyType::internal: return "internal";
    }
    return "?";
}

struct Endpoint {
    std::string node;
    std::string port;

    bool operator==(const Endpoint& other) const { return node == other.node && port == other.port; }
};

struct Connection {
    Endpoint source;
    Endpoint destination;
    DependencyType dependency_type = DependencyType::internal;
    double initial_value = 0.0; ///< latch content before the first emission arrives
};

struct FreePort {
    std::string node;
    std::string port;
    PortDirection direction;
    PortKind kind;
};

/// A set of automata and junction blocks wired output-to-input.
///
/// Every connection carries a one-step latch: the destination reads at step
/// t what the source emitted at step t-1. That makes stepping independent of
/// node order and breaks every feedback loop by construction, at the cost of
/// one dt of latency per hop.
class CompositionNetwork {
public:
    struct Node {
        enum class Kind { automaton, junction };
        Kind kind;
        std::shared_ptr<const OpenHybridAutomaton> automaton; // when kind == automaton
        JunctionBlock junction;                               // when kind == junction

        const std::string& name() const {
            return kind == Kind::automaton ? automaton->name : junction.name;
        }
    };

    void add_automaton(std::shared_ptr<const OpenHybridAutomaton> a) {
        a->validate();
        Node n;
        n.kind = Node::Kind::automaton;
        n.automaton = std::move(a);
        add_node(std::move(n));
    }

    void add_automaton(OpenHybridAutomaton a) {
        add_automaton(std::make_shared<const OpenHybridAutomaton>(std::move(a)));
    }

    void add_junction(JunctionBlock b) {
        b.validate();
        Node n;
        n.kind = Node::Kind::junction;
        n.junction = std::move(b);
        add_node(std::move(n));
    }

    /// Wire source (node, output port) to destination (node, input port).
    /// The destination must be currently free; the latch starts at
    /// `initial_value` when given, otherwise at the destination port's idle
    /// value.
    void connect(const Endpoint& source, const Endpoint& destination, DependencyType type,
                 std::optional<double> initial_value = std::nullopt) {
        require_port(source, PortDirection::output);
        const Port dst = require_port(destination, PortDirection::input);
        if (is_bound(destination))
            throw ConfigError("input " + destination.node + "." + destination.port +
                              " is bound to a constant and cannot be connected");
        for (const auto& c : connections_)
            if (c.destination == destination)
                throw ConfigError("input " + destination.node + "." + destination.port +
                                  " is already connected");
        Connection c;
        c.source = source;
        c.destination = destination;
        c.dependency_type = type;
        c.initial_value = initial_value.value_or(dst.idle);
        connections_.push_back(c);
    }

    /// Unconnected, unbound ports in node-registration order, inputs first
    /// per node, each in declaration order.
    std::vector<FreePort> free_ports() const {
        std::vector<FreePort> out;
        for (const auto& n : nodes_) {
            for (const auto& p : input_ports(n)) {
                const Endpoint ep{n.name(), p.name};
                if (!is_connected_destination(ep) && !is_bound(ep))
                    out.push_back(FreePort{ep.node, ep.port, PortDirection::input, p.kind});
            }
            for (const auto& p : output_ports(n)) {
                bool used = false;
                for (const auto& c : connections_)
                    used = used || (c.source.node == n.name() && c.source.port == p.name);
                if (!used) out.push_back(FreePort{n.name(), p.name, PortDirection::output, p.kind});
            }
        }
        return out;
    }

    std::vector<FreePort> free_inputs() const {
        std::vector<FreePort> out;
        for (const auto& fp : free_ports())
            if (fp.direction == PortDirection::input) out.push_back(fp);
        return out;
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Connection>& connections() const { return connections_; }

    const Node& node(const std::string& name) const {
        for (const auto& n : nodes_)
            if (n.name() == name) return n;
        throw ConfigError("unknown node '" + name + "'");
    }

    bool has_node(const std::string& name) const {
        for (const auto& n : nodes_)
            if (n.name() == name) return true;
        return false;
    }

    /// Node names sorted lexicographically. Evaluation, noise draws and
    /// serialized column order all follow this order so that the registration
    /// order of nodes cannot leak into results.
    std::vector<std::string> canonical_node_order() const {
        std::vector<std::string> names;
        for (const auto& n : nodes_) names.push_back(n.name());
        std::sort(names.begin(), names.end());
        return names;
    }

    static std::vector<Port> input_ports(const Node& n) {
        if (n.kind == Node::Kind::automaton) return n.automaton->input_ports;
        return n.junction.input_ports;
    }

    static std::vector<Port> output_ports(const Node& n) {
        if (n.kind == Node::Kind::automaton) return n.automaton->output_ports;
        return {n.junction.output_port};
    }

private:
    void add_node(Node n) {
        if (has_node(n.name())) throw ConfigError("duplicate node name '" + n.name() + "'");
        nodes_.push_back(std::move(n));
    }

    bool is_connected_destination(const Endpoint& ep) const {
        for (const auto& c : connections_)
            if (c.destination == ep) return true;
        return false;
    }

    bool is_bound(const Endpoint& ep) const {
        const Node* n = find_node(ep.node);
        return n != nullptr && n->kind == Node::Kind::junction && n->junction.bindings.contains(ep.port);
    }

    const Node* find_node(const std::string& name) const {
        for (const auto& n : nodes_)
            if (n.name() == name) return &n;
        return nullptr;
    }

    Port require_port(const Endpoint& ep, PortDirection dir) const {
        const Node* n = find_node(ep.node);
        if (n == nullptr) throw ConfigError("unknown node '" + ep.node + "'");
        const auto ports = dir == PortDirection::input ? input_ports(*n) : output_ports(*n);
        for (const auto& p : ports)
            if (p.name == ep.port) return p;
        const auto other = dir == PortDirection::input ? output_ports(*n) : input_ports(*n);
        for (const auto& p : other)
            if (p.name == ep.port)
                throw ConfigError(ep.node + "." + ep.port + " has the wrong direction for this end of a connection");
        throw ConfigError("unknown port " + ep.node + "." + ep.port);
    }

    std::vector<Node> nodes_;
    std::vector<Connection> connections_;
};

/// Mutable state of a running composition.
struct NetworkState {
    double t = 0.0;
    long step = 0;
    std::vector<AutomatonState> automaton_states; ///< parallel to the network's automaton nodes
    std::vector<double> latches;                  ///< parallel to connections()
    std::vector<int> consecutive_jumps;           ///< per automaton node, Zeno detection

    AutomatonState& state_of(const CompositionNetwork& net, const std::string& node_name) {
        return automaton_states[automaton_index(net, node_name)];
    }

    const AutomatonState& state_of(const CompositionNetwork& net, const std::string& node_name) const {
        return automaton_states[automaton_index(net, node_name)];
    }

    static std::size_t automaton_index(const CompositionNetwork& net, const std::string& node_name) {
        std::size_t idx = 0;
        for (const auto& n : net.nodes()) {
            if (n.kind != CompositionNetwork::Node::Kind::automaton) continue;
            if (n.name() == node_name) return idx;
            ++idx;
        }
        throw ConfigError("unknown automaton node '" + node_name + "'");
    }
};

inline NetworkState make_network_state(const CompositionNetwork& net, double dt) {
    if (dt <= 0.0) throw ConfigError("time step must be > 0");
    NetworkState st;
    for (const auto& n : net.nodes()) {
        if (n.kind != CompositionNetwork::Node::Kind::automaton) continue;
        st.automaton_states.push_back(make_initial_state(*n.automaton, dt));
        st.consecutive_jumps.push_back(0);
    }
    for (const auto& c : net.connections()) st.latches.push_back(c.initial_value);
    return st;
}

/// One node's slice of a step snapshot, taken at the step's start time:
/// the mode and continuous state the step's outputs were computed from,
/// the inputs it read (latches + exogenous) and the outputs it emitted.
struct NodeSnapshot {
    std::string node;
    std::optional<std::string> mode; // automata only
    StateVec x;                      // automata only
    ValueMap inputs;
    ValueMap outputs;
};

struct FiredTransition {
    std::string node;
    std::string from;
    std::string to;
    std::string label;
};

struct StepSnapshot {
    double t = 0.0;
    std::vector<NodeSnapshot> nodes;       ///< canonical node order
    std::vector<FiredTransition> fired;    ///< jumps taken during this step, canonical order
};

struct StepLimits {
    int max_consecutive_jumps = 1000;
};

namespace detail {

inline ValueMap gather_inputs(const CompositionNetwork& net, const CompositionNetwork::Node& n,
                              const NetworkState& st, const ValueMap& exogenous) {
    ValueMap in;
    const auto& conns = net.connections();
    for (const auto& p : CompositionNetwork::input_ports(n)) {
        if (n.kind == CompositionNetwork::Node::Kind::junction && n.junction.bindings.contains(p.name)) {
            in.set(p.name, n.junction.bindings.get(p.name));
            continue;
        }
        bool wired = false;
        for (std::size_t ci = 0; ci < conns.size(); ++ci) {
            if (conns[ci].destination.node == n.name() && conns[ci].destination.port == p.name) {
                in.set(p.name, st.latches[ci]);
                wired = true;
                break;
            }
        }
        if (wired) continue;
        const std::string key = n.name() + "." + p.name;
        if (!exogenous.contains(key))
            throw ConfigError("missing exogenous value for free input " + key);
        in.set(p.name, exogenous.get(key));
    }
    for (const auto& p : CompositionNetwork::input_ports(n)) {
        if (p.kind != PortKind::sentinel_capable) continue;
        const double v = in.get(p.name);
        if (v < 0.0 && v != -1.0)
            log_warn(n.name() + "." + p.name + ": sentinel-capable port carries illegal value " +
                     std::to_string(v));
    }
    return in;
}

struct EvalResult {
    StepSnapshot snapshot;
    std::vector<std::size_t> node_index; // canonical position -> nodes() index
};

[[noreturn]] inline void throw_with_node(const std::string& node, const Error& e) {
    const std::string msg = "node '" + node + "': " + e.what();
    if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(msg);
    if (dynamic_cast<const DefinitionError*>(&e)) throw DefinitionError(msg);
    if (dynamic_cast<const NumericError*>(&e)) throw NumericError(msg);
    if (dynamic_cast<const ZenoError*>(&e)) throw ZenoError(msg);
    throw Error(msg);
}

/// Evaluate all node outputs for the current time from latched inputs and
/// exogenous values, without advancing anything but delay-line registers and
/// the noise stream. Nodes are processed in canonical order.
inline EvalResult evaluate_network(const CompositionNetwork& net, NetworkState& st,
                                   const ValueMap& exogenous, NoiseSource& noise) {
    EvalResult res;
    res.snapshot.t = st.t;
    for (const auto& name : net.canonical_node_order()) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < net.nodes().size(); ++i)
            if (net.nodes()[i].name() == name) idx = i;
        const auto& n = net.nodes()[idx];
        res.node_index.push_back(idx);

        NodeSnapshot snap;
        snap.node = name;
        snap.inputs = gather_inputs(net, n, st, exogenous);
        try {
            if (n.kind == CompositionNetwork::Node::Kind::automaton) {
                auto& ast = st.state_of(net, name);
                snap.mode = ast.mode;
                snap.x = ast.x;
                snap.outputs = evaluate_outputs(*n.automaton, ast, snap.inputs, noise);
            } else {
                snap.outputs.set(n.junction.output_port.name, n.junction.evaluate(snap.inputs));
            }
        } catch (const Error& e) {
            throw_with_node(name, e);
        }
        res.snapshot.nodes.push_back(std::move(snap));
    }
    return res;
}

} // namespace detail

/// Take an output-only snapshot of the network at the current time. Used to
/// close a run with a final consistent row; consumes noise draws and
/// advances delay-line registers exactly like the output phase of a step.
inline StepSnapshot observe_network(const CompositionNetwork& net, NetworkState& st,
                                    const ValueMap& exogenous, NoiseSource& noise) {
    return detail::evaluate_network(net, st, exogenous, noise).snapshot;
}

/// Advance the composition by one step of size dt.
///
/// All nodes read latched values emitted at the previous step (or exogenous
/// values for free inputs), so the result does not depend on node order.
/// Each automaton takes at most one transition. Returns the snapshot of the
/// step's start time: pre-jump modes with the outputs they produced.
inline StepSnapshot step_network(const CompositionNetwork& net, NetworkState& st,
                                 const ValueMap& exogenous, double dt, NoiseSource& noise,
                                 const StepLimits& limits = {}) {
    if (dt <= 0.0) throw ConfigError("time step must be > 0");
    auto eval = detail::evaluate_network(net, st, exogenous, noise);
    StepSnapshot& snapshot = eval.snapshot;

    // integrate + jump, per automaton, using this step's inputs
    for (std::size_t pos = 0; pos < snapshot.nodes.size(); ++pos) {
        const auto& n = net.nodes()[eval.node_index[pos]];
        if (n.kind != CompositionNetwork::Node::Kind::automaton) continue;
        NodeSnapshot& snap = snapshot.nodes[pos];
        auto& ast = st.state_of(net, snap.node);
        const std::size_t zi = NetworkState::automaton_index(net, snap.node);
        try {
            ast.x = integrate_flow(*n.automaton, ast, snap.inputs, dt);
            auto enabled = enabled_transitions(*n.automaton, ast.mode, ast.x, snap.inputs);
            if (!enabled.empty()) {
                const Transition* tr = enabled.front();
                if (tr->reset) ast.x = tr->reset(ast.x, snap.inputs);
                snapshot.fired.push_back(FiredTransition{snap.node, ast.mode, tr->target, tr->label});
                ast.mode = tr->target;
                st.consecutive_jumps[zi] += 1;
                if (st.consecutive_jumps[zi] > limits.max_consecutive_jumps)
                    throw ZenoError("node '" + snap.node + "' jumped on " +
                                    std::to_string(st.consecutive_jumps[zi]) +
                                    " consecutive steps (last at step " + std::to_string(st.step + 1) +
                                    ", t=" + std::to_string(st.t + dt) + ")");
            } else {
                st.consecutive_jumps[zi] = 0;
            }
            const ModeDefinition* m = n.automaton->find_mode(ast.mode);
            if (m != nullptr && m->invariant && !m->invariant(ast.x, snap.inputs))
                log_warn(snap.node + ": invariant of mode '" + ast.mode + "' violated");
        } catch (const ZenoError&) {
            throw;
        } catch (const Error& e) {
            detail::throw_with_node(snap.node, e);
        }
    }

    // latch this step's emissions for consumption at the next step
    const auto& conns = net.connections();
    for (std::size_t ci = 0; ci < conns.size(); ++ci) {
        for (const auto& snap : snapshot.nodes) {
            if (snap.node != conns[ci].source.node) continue;
            st.latches[ci] = snap.outputs.get(conns[ci].source.port);
            break;
        }
    }

    st.step += 1;
    st.t = static_cast<double>(st.step) * dt;
    return snapshot;
}

} // namespace cascadia
