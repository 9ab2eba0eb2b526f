#pragma once

#include <string>
#include <vector>

#include "cascadia/automaton.hpp"
#include "cascadia/errors.hpp"
#include "cascadia/value_map.hpp"

namespace cascadia {

/// Stateless arithmetic block used to realize signal aggregation and
/// distribution in a composition.
///
/// Kinds:
///   sum      — output = sum of all inputs
///   gate     — output = level * indicator, indicator expected in {0,1}
///   constant — output = fixed value, no inputs
///
/// An input port may be bound to a constant at construction time; bound
/// ports are neither free nor connectable.
struct JunctionBlock {
    enum class Kind { sum, gate, constant };

    std::string name;
    Kind kind = Kind::sum;
    std::vector<Port> input_ports;
    Port output_port;
    double constant_value = 0.0;
    ValueMap bindings;

    void validate() const {
        if (name.empty()) throw DefinitionError("junction block has no name");
        switch (kind) {
            case Kind::sum:
                if (input_ports.empty())
                    throw DefinitionError(name + ": sum block needs at least one input");
                break;
            case Kind::gate:
                if (input_ports.size() != 2)
                    throw DefinitionError(name + ": gate block needs exactly two inputs (level, indicator)");
                break;
            case Kind::constant:
                if (!input_ports.empty())
                    throw DefinitionError(name + ": constant block takes no inputs");
                break;
        }
        for (const auto& [bound, _] : bindings) {
            bool known = false;
            for (const auto& p : input_ports) known = known || p.name == bound;
            if (!known) throw DefinitionError(name + ": binding for unknown input '" + bound + "'");
        }
    }

    double evaluate(const ValueMap& inputs) const {
        switch (kind) {
            case Kind::sum: {
                double acc = 0.0;
                for (const auto& p : input_ports) acc += inputs.get(p.name);
                return acc;
            }
            case Kind::gate: {
                const double level = inputs.get(input_ports[0].name);
                const double indicator = inputs.get(input_ports[1].name);
                return level * indicator;
            }
            case Kind::constant:
                return constant_value;
        }
        throw DefinitionError(name + ": unknown junction kind");
    }
};

inline JunctionBlock make_sum_block(const std::string& name, const std::vector<std::string>& inputs,
                                    const std::string& output) {
    JunctionBlock b;
    b.name = name;
    b.kind = JunctionBlock::Kind::sum;
    for (const auto& in : inputs) b.input_ports.push_back(Port{in, PortDirection::input, PortKind::continuous, 0.0});
    b.output_port = Port{output, PortDirection::output, PortKind::continuous, 0.0};
    b.validate();
    return b;
}

/// Gate with the level input pre-bound to a constant; only the indicator
/// remains wireable.
inline JunctionBlock make_gate_block(const std::string& name, double level,
                                     const std::string& indicator_input, const std::string& output) {
    JunctionBlock b;
    b.name = name;
    b.kind = JunctionBlock::Kind::gate;
    b.input_ports.push_back(Port{"level", PortDirection::input, PortKind::continuous, 0.0});
    b.input_ports.push_back(Port{indicator_input, PortDirection::input, PortKind::discrete, 0.0});
    b.output_port = Port{output, PortDirection::output, PortKind::continuous, 0.0};
    b.bindings.set("level", level);
    b.validate();
    return b;
}

inline JunctionBlock make_constant_block(const std::string& name, double value, const std::string& output) {
    JunctionBlock b;
    b.name = name;
    b.kind = JunctionBlock::Kind::constant;
    b.constant_value = value;
    b.output_port = Port{output, PortDirection::output, PortKind::continuous, 0.0};
    b.validate();
    return b;
}

} // namespace cascadia
