#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cascadia/automaton.hpp"
#include "cascadia/composition.hpp"
#include "cascadia/junction.hpp"

namespace cascadia {

// ---------------------------------------------------------------------------
// Parameter sets. Units: power in kW, volume in m^3, rates in m^3/min, time
// in minutes.
// ---------------------------------------------------------------------------

struct SubstationParams {
    double P_lim = 500.0;   ///< trip threshold on total power demand
    double T_s = 5.0;       ///< safety period before re-energizing
    double sigma_eps = 0.5; ///< std-dev of the measurement white noise

    void validate(const std::string& path = "substation") const {
        if (!(P_lim > 0.0)) throw ConfigError(path + ".P_lim must be > 0");
        if (T_s < 0.0) throw ConfigError(path + ".T_s must be >= 0");
        if (sigma_eps < 0.0) throw ConfigError(path + ".sigma_eps must be >= 0");
    }
};

struct ScadaParams {
    double T_d = 1.0;       ///< debounce before acting on measurements/commands
    double T_s = 5.0;       ///< minimum time the breaker stays open
    double theta_off = 1.0; ///< measured power below this reads as "substation off"

    void validate(const std::string& path = "scada") const {
        if (T_d < 0.0) throw ConfigError(path + ".T_d must be >= 0");
        if (T_s < 0.0) throw ConfigError(path + ".T_s must be >= 0");
        if (!(theta_off > 0.0)) throw ConfigError(path + ".theta_off must be > 0");
    }
};

struct NetworkParams {
    double P_n = 10.0;   ///< power needed to run the cell antennas
    double T_ups = 30.0; ///< battery reserve when grid power is lost
    double T_1 = 0.2;    ///< transmission delay, substation measurement channel
    double T_2 = 0.2;    ///< transmission delay, breaker command channel
    double T_3 = 0.2;    ///< transmission delay, tank level channel

    void validate(const std::string& path = "network") const {
        if (!(P_n > 0.0)) throw ConfigError(path + ".P_n must be > 0");
        if (T_ups < 0.0) throw ConfigError(path + ".T_ups must be >= 0");
        if (T_1 < 0.0) throw ConfigError(path + ".T_1 must be >= 0");
        if (T_2 < 0.0) throw ConfigError(path + ".T_2 must be >= 0");
        if (T_3 < 0.0) throw ConfigError(path + ".T_3 must be >= 0");
    }
};

struct TankParams {
    double V_0 = 50.0;    ///< volume at t = 0
    double V_max = 100.0; ///< physical capacity

    void validate(const std::string& path = "tank") const {
        if (!(V_max > 0.0)) throw ConfigError(path + ".V_max must be > 0");
        if (V_0 < 0.0) throw ConfigError(path + ".V_0 must be >= 0");
        if (V_0 > V_max) throw ConfigError(path + ".V_0 must be <= V_max");
    }
};

struct PumpParams {
    double V_th = 30.0;   ///< start pumping when the reported level drops below this
    double T_off = 15.0;  ///< minimum resting period between runs
    double T_on = 120.0;  ///< maximum continuous working period
    double W_avg = 2.0;   ///< supply rate while running
    double P_p = 50.0;    ///< power drawn while running
    double V_max = 100.0; ///< stop level, mirrors the tank capacity

    void validate(const std::string& path = "pump") const {
        if (!(V_max > 0.0)) throw ConfigError(path + ".V_max must be > 0");
        if (!(V_th > 0.0) || V_th >= V_max) throw ConfigError(path + ".V_th must satisfy 0 < V_th < V_max");
        if (T_off < 0.0) throw ConfigError(path + ".T_off must be >= 0");
        if (T_on < 0.0) throw ConfigError(path + ".T_on must be >= 0");
        if (!(W_avg > 0.0)) throw ConfigError(path + ".W_avg must be > 0");
        if (!(P_p > 0.0)) throw ConfigError(path + ".P_p must be > 0");
    }
};

struct MicropolisParams {
    SubstationParams substation;
    ScadaParams scada;
    NetworkParams network;
    TankParams tank;
    PumpParams pump;

    void validate() const {
        substation.validate();
        scada.validate();
        network.validate();
        tank.validate();
        pump.validate();
    }
};

// ---------------------------------------------------------------------------
// Guard labels. Several transitions share one guard expression (e.g. the
// connection-lost jump exists from more than one mode); those share a label,
// giving 19 distinct guards across the five models.
// ---------------------------------------------------------------------------
namespace guard {
inline constexpr const char* substation_trip = "remote_or_overload_trip";
inline constexpr const char* substation_restore = "safety_restore";
inline constexpr const char* scada_conn_lost = "conn_lost";
inline constexpr const char* scada_open = "operator_or_outage_open";
inline constexpr const char* scada_close = "operator_close";
inline constexpr const char* scada_conn_restored = "conn_restored";
inline constexpr const char* net_fault = "net_fault";
inline constexpr const char* net_power_lost = "net_power_lost";
inline constexpr const char* net_ups_exhausted = "ups_exhausted";
inline constexpr const char* net_power_restored = "net_power_restored";
inline constexpr const char* net_recovered = "net_recovered";
inline constexpr const char* tank_drained = "tank_drained";
inline constexpr const char* tank_overflow = "tank_overflow";
inline constexpr const char* tank_refilling = "tank_refilling";
inline constexpr const char* tank_receding = "tank_receding";
inline constexpr const char* pump_issue = "pump_issue";
inline constexpr const char* pump_start = "pump_start";
inline constexpr const char* pump_stop = "pump_stop";
inline constexpr const char* pump_repaired = "pump_repaired";

inline std::vector<std::string> all() {
    return {substation_trip, substation_restore, scada_conn_lost,   scada_open,
            scada_close,     scada_conn_restored, net_fault,         net_power_lost,
            net_ups_exhausted, net_power_restored, net_recovered,    tank_drained,
            tank_overflow,   tank_refilling,      tank_receding,     pump_issue,
            pump_start,      pump_stop,           pump_repaired};
}
} // namespace guard

namespace detail {

inline ResetFn reset_timer_to(double value) {
    return [value](const StateVec& x, const ValueMap&) {
        StateVec next = x;
        next[0] = value;
        return next;
    };
}

inline FlowFn constant_flow(double rate) {
    return [rate](const StateVec&, const ValueMap&) { return StateVec{rate}; };
}

} // namespace detail

// ---------------------------------------------------------------------------
// Power substation.
//
// Modes: SupplyPower (p_s tracks demand) and SwitchOff (p_s = 0). It trips
// when the SCADA commands it (s_CB = 1) or the demand exceeds P_lim, and
// re-energizes once the command is cleared, demand is back under the limit
// and the safety period x_tp has elapsed. s_CB = -1 (command link down)
// enables neither jump: the breaker holds its position. The measurement
// p_m = max(0, p_s + eps) adds Gaussian noise and is clamped at the
// physical floor of zero. `avail` is a 0/1 energized indicator used by the
// power-distribution gates of the composition.
// ---------------------------------------------------------------------------
inline OpenHybridAutomaton make_substation(const SubstationParams& params) {
    params.validate();
    OpenHybridAutomaton a;
    a.name = "substation";
    a.continuous_vars = {{"x_tp", "min"}};
    a.input_ports = {Port{"s_CB", PortDirection::input, PortKind::sentinel_capable, 0.0},
                     Port{"p_d", PortDirection::input, PortKind::continuous, 0.0}};
    a.output_ports = {Port{"p_s", PortDirection::output, PortKind::continuous, 0.0},
                      Port{"p_m", PortDirection::output, PortKind::continuous, 0.0},
                      Port{"avail", PortDirection::output, PortKind::discrete, 0.0}};
    const double sigma = params.sigma_eps;

    auto output_for = [sigma](bool energized) {
        return [sigma, energized](const StateVec&, const ValueMap& u, NoiseSource& noise, Buffers&) {
            ValueMap out;
            const double p_s = energized ? u.get("p_d") : 0.0;
            out.set("p_s", p_s);
            out.set("p_m", std::max(0.0, p_s + noise.gaussian(sigma)));
            out.set("avail", energized ? 1.0 : 0.0);
            return out;
        };
    };
    a.modes.push_back(ModeDefinition{"SupplyPower", detail::constant_flow(1.0), output_for(true), {}});
    a.modes.push_back(ModeDefinition{"SwitchOff", detail::constant_flow(1.0), output_for(false), {}});

    const double P_lim = params.P_lim;
    const double T_s = params.T_s;
    a.transitions.push_back(Transition{
        "SupplyPower", "SwitchOff",
        [P_lim](const StateVec&, const ValueMap& u) { return u.get("s_CB") == 1.0 || u.get("p_d") >= P_lim; },
        detail::reset_timer_to(0.0), 0, guard::substation_trip});
    a.transitions.push_back(Transition{
        "SwitchOff", "SupplyPower",
        [P_lim, T_s](const StateVec& x, const ValueMap& u) {
            return u.get("s_CB") == 0.0 && u.get("p_d") < P_lim && x[0] >= T_s;
        },
        detail::reset_timer_to(0.0), 0, guard::substation_restore});

    a.initial_mode = "SupplyPower";
    a.initial_state = {0.0};
    a.parameters.set("P_lim", P_lim);
    a.parameters.set("T_s", T_s);
    a.parameters.set("sigma_eps", sigma);
    a.validate();
    return a;
}

// ---------------------------------------------------------------------------
// Power SCADA.
//
// Watches the substation power measurement p_m and the operator command
// s_OP, and drives the breaker command s_CB: 0 in Closed, 1 in Open, -1 in
// ConnDown (its own uplink is dead, reported downstream as a sentinel). It
// opens when the operator asks or the measurement reads "off", after the
// debounce T_d; it closes again on operator release after the safety time
// T_s. p_m = -1 (telemetry lost) forces ConnDown from either working mode;
// when telemetry returns it resumes in Open or Closed depending on whether
// the substation currently reads as off.
// ---------------------------------------------------------------------------
inline OpenHybridAutomaton make_scada(const ScadaParams& params) {
    params.validate();
    OpenHybridAutomaton a;
    a.name = "scada";
    a.continuous_vars = {{"x_ts", "min"}};
    a.input_ports = {Port{"p_m", PortDirection::input, PortKind::sentinel_capable, 0.0},
                     Port{"s_OP", PortDirection::input, PortKind::discrete, 0.0}};
    a.output_ports = {Port{"s_CB", PortDirection::output, PortKind::sentinel_capable, 0.0}};

    auto command = [](double value) {
        return [value](const StateVec&, const ValueMap&, NoiseSource&, Buffers&) {
            ValueMap out;
            out.set("s_CB", value);
            return out;
        };
    };
    a.modes.push_back(ModeDefinition{"Closed", detail::constant_flow(1.0), command(0.0), {}});
    a.modes.push_back(ModeDefinition{"Open", detail::constant_flow(1.0), command(1.0), {}});
    a.modes.push_back(ModeDefinition{"ConnDown", detail::constant_flow(1.0), command(-1.0), {}});

    const double T_d = params.T_d;
    const double T_s = params.T_s;
    const double theta = params.theta_off;
    auto conn_lost = [](const StateVec&, const ValueMap& u) { return u.get("p_m") == -1.0; };
    a.transitions.push_back(
        Transition{"Closed", "ConnDown", conn_lost, detail::reset_timer_to(0.0), 0, guard::scada_conn_lost});
    a.transitions.push_back(
        Transition{"Open", "ConnDown", conn_lost, detail::reset_timer_to(0.0), 0, guard::scada_conn_lost});
    a.transitions.push_back(Transition{
        "Closed", "Open",
        [T_d, theta](const StateVec& x, const ValueMap& u) {
            return (u.get("s_OP") == 1.0 || u.get("p_m") < theta) && x[0] >= T_d;
        },
        detail::reset_timer_to(0.0), 1, guard::scada_open});
    a.transitions.push_back(Transition{
        "Open", "Closed",
        [T_s](const StateVec& x, const ValueMap& u) { return u.get("s_OP") == 0.0 && x[0] >= T_s; },
        detail::reset_timer_to(0.0), 1, guard::scada_close});
    a.transitions.push_back(Transition{
        "ConnDown", "Open",
        [theta](const StateVec&, const ValueMap& u) {
            return u.get("p_m") != -1.0 && u.get("p_m") < theta;
        },
        detail::reset_timer_to(0.0), 1, guard::scada_conn_restored});
    a.transitions.push_back(Transition{
        "ConnDown", "Closed",
        [theta](const StateVec&, const ValueMap& u) {
            return u.get("p_m") != -1.0 && u.get("p_m") >= theta;
        },
        detail::reset_timer_to(0.0), 2, guard::scada_conn_restored});

    a.initial_mode = "Closed";
    a.initial_state = {0.0};
    a.parameters.set("T_d", T_d);
    a.parameters.set("T_s", T_s);
    a.parameters.set("theta_off", theta);
    a.validate();
    return a;
}

// ---------------------------------------------------------------------------
// Communication network.
//
// Relays three signals with per-channel transmission delays realized as
// internal delay lines: s_1 (substation measurement), s_2 (breaker command),
// s_3 (tank level). Healthy runs on grid power; when supply drops below P_n
// it runs on UPS, with x_t_ups counting the reserve; when the reserve is
// exhausted or a technical fault (phi_n) hits, it goes to NetDown, emitting
// the -1 sentinel on every channel and flushing the lines so recovered
// channels refill from live traffic. p_nd reports the power demand (P_n
// while operating or on UPS, 0 when down).
//
// `line_idles` sets what each channel reads before first traffic arrives;
// the composition passes the initial tank level for s_3.
// ---------------------------------------------------------------------------
inline OpenHybridAutomaton make_network(const NetworkParams& params,
                                        const std::vector<double>& line_idles = {0.0, 0.0, 0.0}) {
    params.validate();
    if (line_idles.size() != 3) throw ConfigError("network line_idles must have 3 entries");
    OpenHybridAutomaton a;
    a.name = "network";
    a.continuous_vars = {{"x_t_ups", "min"}};
    a.input_ports = {Port{"p_ns", PortDirection::input, PortKind::continuous, params.P_n},
                     Port{"phi_n", PortDirection::input, PortKind::discrete, 0.0},
                     Port{"s_1", PortDirection::input, PortKind::continuous, 0.0},
                     Port{"s_2", PortDirection::input, PortKind::sentinel_capable, 0.0},
                     Port{"s_3", PortDirection::input, PortKind::continuous, 0.0}};
    a.output_ports = {Port{"s_1_out", PortDirection::output, PortKind::sentinel_capable, 0.0},
                      Port{"s_2_out", PortDirection::output, PortKind::sentinel_capable, 0.0},
                      Port{"s_3_out", PortDirection::output, PortKind::sentinel_capable, 0.0},
                      Port{"p_nd", PortDirection::output, PortKind::continuous, 0.0}};
    a.buffers = {BufferSpec{"s_1_line", params.T_1, line_idles[0]},
                 BufferSpec{"s_2_line", params.T_2, line_idles[1]},
                 BufferSpec{"s_3_line", params.T_3, line_idles[2]}};

    const double P_n = params.P_n;
    auto relay = [P_n](const StateVec&, const ValueMap& u, NoiseSource&, Buffers& buf) {
        ValueMap out;
        out.set("s_1_out", buf.at("s_1_line").push_pop(u.get("s_1")));
        out.set("s_2_out", buf.at("s_2_line").push_pop(u.get("s_2")));
        out.set("s_3_out", buf.at("s_3_line").push_pop(u.get("s_3")));
        out.set("p_nd", P_n);
        return out;
    };
    auto down = [](const StateVec&, const ValueMap&, NoiseSource&, Buffers& buf) {
        for (auto& [_, line] : buf) line.flush(-1.0);
        ValueMap out;
        out.set("s_1_out", -1.0);
        out.set("s_2_out", -1.0);
        out.set("s_3_out", -1.0);
        out.set("p_nd", 0.0);
        return out;
    };
    a.modes.push_back(ModeDefinition{"Healthy", detail::constant_flow(0.0), relay, {}});
    a.modes.push_back(ModeDefinition{"UPSUsage", detail::constant_flow(1.0), relay, {}});
    a.modes.push_back(ModeDefinition{"NetDown", detail::constant_flow(0.0), down, {}});

    const double T_ups = params.T_ups;
    auto fault = [](const StateVec&, const ValueMap& u) { return u.get("phi_n") == 1.0; };
    a.transitions.push_back(Transition{"Healthy", "NetDown", fault, {}, 0, guard::net_fault});
    a.transitions.push_back(Transition{"UPSUsage", "NetDown", fault, {}, 0, guard::net_fault});
    a.transitions.push_back(Transition{
        "Healthy", "UPSUsage",
        [P_n](const StateVec&, const ValueMap& u) { return u.get("p_ns") < P_n; }, {}, 1,
        guard::net_power_lost});
    a.transitions.push_back(Transition{
        "UPSUsage", "NetDown",
        [T_ups](const StateVec& x, const ValueMap&) { return x[0] >= T_ups; }, {}, 1,
        guard::net_ups_exhausted});
    a.transitions.push_back(Transition{
        "UPSUsage", "Healthy",
        [P_n](const StateVec&, const ValueMap& u) { return u.get("p_ns") >= P_n; },
        detail::reset_timer_to(0.0), 2, guard::net_power_restored});
    a.transitions.push_back(Transition{
        "NetDown", "Healthy",
        [P_n](const StateVec&, const ValueMap& u) {
            return u.get("phi_n") == 0.0 && u.get("p_ns") >= P_n;
        },
        detail::reset_timer_to(0.0), 1, guard::net_recovered});

    a.initial_mode = "Healthy";
    a.initial_state = {0.0};
    a.parameters.set("P_n", P_n);
    a.parameters.set("T_ups", T_ups);
    a.parameters.set("T_1", params.T_1);
    a.parameters.set("T_2", params.T_2);
    a.parameters.set("T_3", params.T_3);
    a.validate();
    return a;
}

// ---------------------------------------------------------------------------
// Water tank.
//
// The volume x_v follows supply minus demand. Healthy reports the volume as
// is; when the Euler step crosses zero the tank is Drained (volume clamped
// to 0, reported 0, inflow-only dynamics) and when it exceeds V_max it is in
// Overflow (clamped to V_max, reported V_max, outflow-only dynamics). It
// returns to Healthy as soon as the rate balance reverses.
// ---------------------------------------------------------------------------
inline OpenHybridAutomaton make_tank(const TankParams& params) {
    params.validate();
    OpenHybridAutomaton a;
    a.name = "tank";
    a.continuous_vars = {{"x_v", "m^3"}};
    a.input_ports = {Port{"w_s", PortDirection::input, PortKind::continuous, 0.0},
                     Port{"w_d", PortDirection::input, PortKind::continuous, 0.0}};
    a.output_ports = {Port{"v_tank", PortDirection::output, PortKind::continuous, params.V_0}};

    const double V_max = params.V_max;
    auto net_rate = [](const ValueMap& u) { return u.get("w_s") - u.get("w_d"); };
    auto report = [](double fixed) {
        return [fixed](const StateVec& x, const ValueMap&, NoiseSource&, Buffers&) {
            ValueMap out;
            out.set("v_tank", fixed < 0.0 ? x[0] : fixed);
            return out;
        };
    };
    a.modes.push_back(ModeDefinition{
        "Healthy", [net_rate](const StateVec&, const ValueMap& u) { return StateVec{net_rate(u)}; },
        report(-1.0),
        [V_max](const StateVec& x, const ValueMap&) { return x[0] >= 0.0 && x[0] <= V_max; }});
    a.modes.push_back(ModeDefinition{
        "Drained",
        [net_rate](const StateVec&, const ValueMap& u) { return StateVec{std::max(0.0, net_rate(u))}; },
        report(0.0), [](const StateVec& x, const ValueMap&) { return x[0] >= 0.0; }});
    a.modes.push_back(ModeDefinition{
        "Overflow",
        [net_rate](const StateVec&, const ValueMap& u) { return StateVec{std::min(0.0, net_rate(u))}; },
        report(V_max), [V_max](const StateVec& x, const ValueMap&) { return x[0] <= V_max; }});

    a.transitions.push_back(Transition{
        "Healthy", "Drained", [](const StateVec& x, const ValueMap&) { return x[0] <= 0.0; },
        [](const StateVec& x, const ValueMap&) {
            StateVec next = x;
            next[0] = 0.0;
            return next;
        },
        0, guard::tank_drained});
    a.transitions.push_back(Transition{
        "Healthy", "Overflow", [V_max](const StateVec& x, const ValueMap&) { return x[0] > V_max; },
        [V_max](const StateVec& x, const ValueMap&) {
            StateVec next = x;
            next[0] = V_max;
            return next;
        },
        1, guard::tank_overflow});
    a.transitions.push_back(Transition{
        "Drained", "Healthy",
        [](const StateVec&, const ValueMap& u) { return u.get("w_s") > u.get("w_d"); }, {}, 0,
        guard::tank_refilling});
    a.transitions.push_back(Transition{
        "Overflow", "Healthy",
        [](const StateVec&, const ValueMap& u) { return u.get("w_d") > u.get("w_s"); }, {}, 0,
        guard::tank_receding});

    a.initial_mode = params.V_0 > 0.0 ? "Healthy" : "Drained";
    a.initial_state = {params.V_0};
    a.parameters.set("V_0", params.V_0);
    a.parameters.set("V_max", V_max);
    a.validate();
    return a;
}

// ---------------------------------------------------------------------------
// Water pump.
//
// Starts when the reported tank level drops below V_th after resting at
// least T_off, and stops when the level reads full or the maximum working
// period T_on is exceeded; x_t times both phases. Any of: insufficient power
// while running (p_ps < P_p), lost level telemetry (v_tank = -1) or a
// technical fault (phi_p = 1) sends it to Fault. An idle pump draws no
// power, so p_ps only matters in PumpOn. Leaving Fault lands in PumpOff with
// the rest timer preloaded to T_off: the pump is immediately ready again.
// ---------------------------------------------------------------------------
inline OpenHybridAutomaton make_pump(const PumpParams& params) {
    params.validate();
    OpenHybridAutomaton a;
    a.name = "pump";
    a.continuous_vars = {{"x_t", "min"}};
    a.input_ports = {Port{"v_tank", PortDirection::input, PortKind::sentinel_capable, 0.0},
                     Port{"p_ps", PortDirection::input, PortKind::continuous, 0.0},
                     Port{"phi_p", PortDirection::input, PortKind::discrete, 0.0}};
    a.output_ports = {Port{"w_s", PortDirection::output, PortKind::continuous, 0.0},
                      Port{"p_pd", PortDirection::output, PortKind::continuous, 0.0}};

    auto emit = [](double w, double p) {
        return [w, p](const StateVec&, const ValueMap&, NoiseSource&, Buffers&) {
            ValueMap out;
            out.set("w_s", w);
            out.set("p_pd", p);
            return out;
        };
    };
    a.modes.push_back(ModeDefinition{"PumpOff", detail::constant_flow(1.0), emit(0.0, 0.0), {}});
    a.modes.push_back(ModeDefinition{"PumpOn", detail::constant_flow(1.0), emit(params.W_avg, params.P_p), {}});
    a.modes.push_back(ModeDefinition{"Fault", detail::constant_flow(0.0), emit(0.0, 0.0), {}});

    const double V_th = params.V_th;
    const double V_max = params.V_max;
    const double T_off = params.T_off;
    const double T_on = params.T_on;
    const double P_p = params.P_p;
    a.transitions.push_back(Transition{
        "PumpOff", "Fault",
        [](const StateVec&, const ValueMap& u) {
            return u.get("v_tank") == -1.0 || u.get("phi_p") == 1.0;
        },
        detail::reset_timer_to(0.0), 0, guard::pump_issue});
    a.transitions.push_back(Transition{
        "PumpOn", "Fault",
        [P_p](const StateVec&, const ValueMap& u) {
            return u.get("p_ps") < P_p || u.get("v_tank") == -1.0 || u.get("phi_p") == 1.0;
        },
        detail::reset_timer_to(0.0), 0, guard::pump_issue});
    a.transitions.push_back(Transition{
        "PumpOff", "PumpOn",
        [V_th, T_off](const StateVec& x, const ValueMap& u) {
            const double v = u.get("v_tank");
            return v >= 0.0 && v < V_th && x[0] >= T_off;
        },
        detail::reset_timer_to(0.0), 1, guard::pump_start});
    a.transitions.push_back(Transition{
        "PumpOn", "PumpOff",
        [V_max, T_on](const StateVec& x, const ValueMap& u) {
            return u.get("v_tank") >= V_max || x[0] > T_on;
        },
        detail::reset_timer_to(0.0), 1, guard::pump_stop});
    a.transitions.push_back(Transition{
        "Fault", "PumpOff",
        [](const StateVec&, const ValueMap& u) {
            return u.get("v_tank") != -1.0 && u.get("phi_p") == 0.0;
        },
        detail::reset_timer_to(T_off), 0, guard::pump_repaired});

    a.initial_mode = "PumpOff";
    a.initial_state = {T_off}; // rested: allowed to start immediately
    a.parameters.set("V_th", V_th);
    a.parameters.set("T_off", T_off);
    a.parameters.set("T_on", T_on);
    a.parameters.set("W_avg", params.W_avg);
    a.parameters.set("P_p", P_p);
    a.parameters.set("V_max", V_max);
    a.validate();
    return a;
}

// ---------------------------------------------------------------------------
// The closed-loop town model.
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& micropolis_node_names() {
    static const std::vector<std::string> names = {"substation",     "scada",      "network",
                                                   "tank",           "pump",       "demand_sum",
                                                   "net_power_gate", "pump_power_gate"};
    return names;
}

/// Wire the five component models into the closed loop:
///
///   cyber     substation.p_m -> network.s_1 -> scada.p_m
///   cyber     scada.s_CB     -> network.s_2 -> substation.s_CB
///   cyber     tank.v_tank    -> network.s_3 -> pump.v_tank
///   internal  pump.w_s -> tank.w_s
///   physical  substation.avail -> gates -> pump.p_ps / network.p_ns
///   logical   d_city + network.p_nd + pump.p_pd -> demand_sum -> substation.p_d
///
/// Free inputs are exactly {d_city, w_d, s_OP, phi_n, phi_p}. Latches on the
/// power path start at working values and the tank-level path starts at V_0,
/// so a run begins in steady operation instead of a spurious first-step
/// fault. `registration_order` permutes node registration (results must not
/// depend on it); `dt` is validated here and fixes delay-line capacities
/// when a state is created.
inline CompositionNetwork make_micropolis(const MicropolisParams& params, double dt,
                                          const std::vector<std::string>& registration_order = {}) {
    params.validate();
    if (dt <= 0.0) throw ConfigError("solver.dt must be > 0");

    PumpParams pump_params = params.pump;
    pump_params.V_max = params.tank.V_max;

    CompositionNetwork net;
    std::vector<std::string> order = registration_order.empty() ? micropolis_node_names() : registration_order;
    for (const auto& name : order) {
        if (name == "substation") net.add_automaton(make_substation(params.substation));
        else if (name == "scada") net.add_automaton(make_scada(params.scada));
        else if (name == "network")
            net.add_automaton(make_network(params.network, {0.0, 0.0, params.tank.V_0}));
        else if (name == "tank") net.add_automaton(make_tank(params.tank));
        else if (name == "pump") net.add_automaton(make_pump(pump_params));
        else if (name == "demand_sum")
            net.add_junction(make_sum_block("demand_sum", {"d_city", "p_nd", "p_pd"}, "p_d"));
        else if (name == "net_power_gate")
            net.add_junction(make_gate_block("net_power_gate", params.network.P_n, "avail", "p_ns"));
        else if (name == "pump_power_gate")
            net.add_junction(make_gate_block("pump_power_gate", pump_params.P_p, "avail", "p_ps"));
        else
            throw ConfigError("unknown node '" + name + "' in registration order");
    }
    if (net.nodes().size() != micropolis_node_names().size())
        throw ConfigError("registration order must name all 8 nodes exactly once");

    const double V_0 = params.tank.V_0;
    // telemetry ring: measurements and commands between substation and SCADA
    net.connect({"substation", "p_m"}, {"network", "s_1"}, DependencyType::cyber);
    net.connect({"network", "s_1_out"}, {"scada", "p_m"}, DependencyType::cyber);
    net.connect({"scada", "s_CB"}, {"network", "s_2"}, DependencyType::cyber);
    net.connect({"network", "s_2_out"}, {"substation", "s_CB"}, DependencyType::cyber);
    // tank level to pump controller
    net.connect({"tank", "v_tank"}, {"network", "s_3"}, DependencyType::cyber, V_0);
    net.connect({"network", "s_3_out"}, {"pump", "v_tank"}, DependencyType::cyber, V_0);
    // water loop
    net.connect({"pump", "w_s"}, {"tank", "w_s"}, DependencyType::internal);
    // power distribution: consumers get their working power while energized
    net.connect({"substation", "avail"}, {"net_power_gate", "avail"}, DependencyType::physical, 1.0);
    net.connect({"net_power_gate", "p_ns"}, {"network", "p_ns"}, DependencyType::physical,
                params.network.P_n);
    net.connect({"substation", "avail"}, {"pump_power_gate", "avail"}, DependencyType::physical, 1.0);
    net.connect({"pump_power_gate", "p_ps"}, {"pump", "p_ps"}, DependencyType::physical, pump_params.P_p);
    // demand aggregation
    net.connect({"network", "p_nd"}, {"demand_sum", "p_nd"}, DependencyType::logical);
    net.connect({"pump", "p_pd"}, {"demand_sum", "p_pd"}, DependencyType::logical);
    net.connect({"demand_sum", "p_d"}, {"substation", "p_d"}, DependencyType::logical);

    return net;
}

} // namespace cascadia
