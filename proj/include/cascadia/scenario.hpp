#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascadia/errors.hpp"
#include "cascadia/models.hpp"
#include "cascadia/profile.hpp"

namespace cascadia {

struct SolverSettings {
    double dt = 0.1;
    double t_end = 120.0;
    std::uint64_t seed = 0;
    int max_consecutive_jumps = 1000;

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("solver.dt must be > 0");
        if (t_end < dt) throw ConfigError("solver.t_end must be >= dt");
        if (max_consecutive_jumps < 1) throw ConfigError("solver.max_consecutive_jumps must be >= 1");
    }
};

/// Optional starting-point override for one component.
struct InitialOverride {
    std::optional<std::string> mode;
    std::vector<std::pair<std::string, double>> state; // (variable name, value)
};

/// Everything one simulation run needs: model parameters, solver settings,
/// demand profiles, fault/operator schedules and initial-state overrides.
struct Scenario {
    MicropolisParams params;
    SolverSettings solver;
    Profile d_city = hold_profile(200.0);
    Profile w_d = hold_profile(1.0);
    Schedule phi_n;
    Schedule phi_p;
    Schedule s_op;
    std::map<std::string, InitialOverride> initial;

    void validate() const {
        params.validate();
        solver.validate();
        d_city.validate("profiles.d_city");
        w_d.validate("profiles.w_d");
        phi_n.validate("schedules.phi_n");
        phi_p.validate("schedules.phi_p");
        s_op.validate("schedules.s_op");
    }

    /// Canonical JSON with every default filled in; two scenarios that load
    /// to the same run serialize identically.
    nlohmann::json to_json() const;
};

namespace detail {

inline constexpr double kThetaOffFloor = 1.0;

inline double default_theta_off(double sigma_eps) { return std::max(kThetaOffFloor, 2.0 * sigma_eps); }

class JsonReader {
public:
    JsonReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    double number(const char* key, double fallback) {
        mark(key);
        if (!j_.contains(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(path_ + "." + key + ": expected a number");
        return v.get<double>();
    }

    std::uint64_t unsigned_number(const char* key, std::uint64_t fallback) {
        mark(key);
        if (!j_.contains(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_unsigned() && !v.is_number_integer())
            throw ConfigError(path_ + "." + key + ": expected a nonnegative integer");
        if (v.is_number_integer() && v.get<long long>() < 0)
            throw ConfigError(path_ + "." + key + ": expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    int integer(const char* key, int fallback) {
        mark(key);
        if (!j_.contains(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(path_ + "." + key + ": expected an integer");
        return v.get<int>();
    }

    bool has(const char* key) {
        mark(key);
        return j_.contains(key);
    }

    const nlohmann::json& sub(const char* key) { return j_.at(key); }

    /// Call once every known key has been marked.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
                throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
    }

    const std::string& path() const { return path_; }

private:
    void mark(const char* key) {
        if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) seen_.emplace_back(key);
    }

    const nlohmann::json& j_;
    std::string path_;
    std::vector<std::string> seen_;
};

inline Profile parse_profile(const nlohmann::json& j, const std::string& path, const Profile& fallback) {
    if (j.is_null()) return fallback;
    JsonReader r(j, path);
    Profile p;
    std::string interp = "hold";
    if (r.has("interp")) {
        if (!r.sub("interp").is_string()) throw ConfigError(path + ".interp: expected a string");
        interp = r.sub("interp").get<std::string>();
    }
    if (interp == "hold") p.interp = Profile::Interp::hold;
    else if (interp == "linear") p.interp = Profile::Interp::linear;
    else throw ConfigError(path + ".interp: expected \"hold\" or \"linear\"");
    if (!r.has("points")) throw ConfigError(path + ".points: required");
    const auto& pts = r.sub("points");
    if (!pts.is_array()) throw ConfigError(path + ".points: expected an array of [t, value] pairs");
    for (const auto& e : pts) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ConfigError(path + ".points: expected [t, value] pairs");
        p.points.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    r.finish();
    p.validate(path);
    return p;
}

inline Schedule parse_schedule(const nlohmann::json& j, const std::string& path) {
    Schedule s;
    if (!j.is_array()) throw ConfigError(path + ": expected an array of [t, 0|1] pairs");
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number_integer())
            throw ConfigError(path + ": expected [t, 0|1] pairs");
        s.toggles.emplace_back(e[0].get<double>(), e[1].get<int>());
    }
    s.validate(path);
    return s;
}

inline InitialOverride parse_initial_override(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    InitialOverride ov;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "mode") {
            if (!it.value().is_string()) throw ConfigError(path + ".mode: expected a string");
            ov.mode = it.value().get<std::string>();
        } else {
            if (!it.value().is_number()) throw ConfigError(path + "." + it.key() + ": expected a number");
            ov.state.emplace_back(it.key(), it.value().get<double>());
        }
    }
    return ov;
}

inline nlohmann::json profile_json(const Profile& p) {
    nlohmann::json j;
    j["interp"] = p.interp == Profile::Interp::hold ? "hold" : "linear";
    j["points"] = nlohmann::json::array();
    for (const auto& [t, v] : p.points) j["points"].push_back({t, v});
    return j;
}

inline nlohmann::json schedule_json(const Schedule& s) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [t, v] : s.toggles) j.push_back({t, v});
    return j;
}

} // namespace detail

inline nlohmann::json Scenario::to_json() const {
    nlohmann::json j;
    j["substation"] = {{"P_lim", params.substation.P_lim},
                       {"T_s", params.substation.T_s},
                       {"sigma_eps", params.substation.sigma_eps}};
    j["scada"] = {{"T_d", params.scada.T_d}, {"T_s", params.scada.T_s}, {"theta_off", params.scada.theta_off}};
    j["network"] = {{"P_n", params.network.P_n},
                    {"T_ups", params.network.T_ups},
                    {"T_1", params.network.T_1},
                    {"T_2", params.network.T_2},
                    {"T_3", params.network.T_3}};
    j["tank"] = {{"V_0", params.tank.V_0}, {"V_max", params.tank.V_max}};
    j["pump"] = {{"V_th", params.pump.V_th}, {"T_off", params.pump.T_off}, {"T_on", params.pump.T_on},
                 {"W_avg", params.pump.W_avg}, {"P_p", params.pump.P_p}, {"V_max", params.pump.V_max}};
    j["solver"] = {{"dt", solver.dt},
                   {"t_end", solver.t_end},
                   {"seed", solver.seed},
                   {"max_consecutive_jumps", solver.max_consecutive_jumps}};
    j["profiles"] = {{"d_city", detail::profile_json(d_city)}, {"w_d", detail::profile_json(w_d)}};
    j["schedules"] = {{"phi_n", detail::schedule_json(phi_n)},
                      {"phi_p", detail::schedule_json(phi_p)},
                      {"s_op", detail::schedule_json(s_op)}};
    if (!initial.empty()) {
        nlohmann::json ov = nlohmann::json::object();
        for (const auto& [node, o] : initial) {
            nlohmann::json e = nlohmann::json::object();
            if (o.mode) e["mode"] = *o.mode;
            for (const auto& [var, value] : o.state) e[var] = value;
            ov[node] = e;
        }
        j["initial"] = ov;
    }
    return j;
}

/// Parse and validate the documented scenario JSON. Unspecified fields take
/// their defaults; unknown keys are rejected with the offending path.
inline Scenario load_scenario(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("scenario parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");

    Scenario s;
    detail::JsonReader top(j, "scenario");

    if (top.has("substation")) {
        detail::JsonReader r(top.sub("substation"), "substation");
        s.params.substation.P_lim = r.number("P_lim", s.params.substation.P_lim);
        s.params.substation.T_s = r.number("T_s", s.params.substation.T_s);
        s.params.substation.sigma_eps = r.number("sigma_eps", s.params.substation.sigma_eps);
        r.finish();
    }
    bool theta_given = false;
    if (top.has("scada")) {
        detail::JsonReader r(top.sub("scada"), "scada");
        s.params.scada.T_d = r.number("T_d", s.params.scada.T_d);
        s.params.scada.T_s = r.number("T_s", s.params.scada.T_s);
        theta_given = r.has("theta_off");
        s.params.scada.theta_off = r.number("theta_off", s.params.scada.theta_off);
        r.finish();
    }
    if (!theta_given)
        s.params.scada.theta_off = detail::default_theta_off(s.params.substation.sigma_eps);
    if (top.has("network")) {
        detail::JsonReader r(top.sub("network"), "network");
        s.params.network.P_n = r.number("P_n", s.params.network.P_n);
        s.params.network.T_ups = r.number("T_ups", s.params.network.T_ups);
        s.params.network.T_1 = r.number("T_1", s.params.network.T_1);
        s.params.network.T_2 = r.number("T_2", s.params.network.T_2);
        s.params.network.T_3 = r.number("T_3", s.params.network.T_3);
        r.finish();
    }
    if (top.has("tank")) {
        detail::JsonReader r(top.sub("tank"), "tank");
        s.params.tank.V_0 = r.number("V_0", s.params.tank.V_0);
        s.params.tank.V_max = r.number("V_max", s.params.tank.V_max);
        r.finish();
    }
    bool pump_vmax_given = false;
    if (top.has("pump")) {
        detail::JsonReader r(top.sub("pump"), "pump");
        s.params.pump.V_th = r.number("V_th", s.params.pump.V_th);
        s.params.pump.T_off = r.number("T_off", s.params.pump.T_off);
        s.params.pump.T_on = r.number("T_on", s.params.pump.T_on);
        s.params.pump.W_avg = r.number("W_avg", s.params.pump.W_avg);
        s.params.pump.P_p = r.number("P_p", s.params.pump.P_p);
        pump_vmax_given = r.has("V_max");
        s.params.pump.V_max = r.number("V_max", s.params.pump.V_max);
        r.finish();
    }
    if (!pump_vmax_given) s.params.pump.V_max = s.params.tank.V_max; // stop level mirrors the tank
    if (top.has("solver")) {
        detail::JsonReader r(top.sub("solver"), "solver");
        s.solver.dt = r.number("dt", s.solver.dt);
        s.solver.t_end = r.number("t_end", s.solver.t_end);
        s.solver.seed = r.unsigned_number("seed", s.solver.seed);
        s.solver.max_consecutive_jumps = r.integer("max_consecutive_jumps", s.solver.max_consecutive_jumps);
        r.finish();
    }
    if (top.has("profiles")) {
        detail::JsonReader r(top.sub("profiles"), "profiles");
        if (r.has("d_city")) s.d_city = detail::parse_profile(r.sub("d_city"), "profiles.d_city", s.d_city);
        if (r.has("w_d")) s.w_d = detail::parse_profile(r.sub("w_d"), "profiles.w_d", s.w_d);
        r.finish();
    }
    if (top.has("schedules")) {
        detail::JsonReader r(top.sub("schedules"), "schedules");
        if (r.has("phi_n")) s.phi_n = detail::parse_schedule(r.sub("phi_n"), "schedules.phi_n");
        if (r.has("phi_p")) s.phi_p = detail::parse_schedule(r.sub("phi_p"), "schedules.phi_p");
        if (r.has("s_op")) s.s_op = detail::parse_schedule(r.sub("s_op"), "schedules.s_op");
        r.finish();
    }
    if (top.has("initial")) {
        const auto& ov = top.sub("initial");
        if (!ov.is_object()) throw ConfigError("initial: expected an object");
        for (auto it = ov.begin(); it != ov.end(); ++it)
            s.initial[it.key()] = detail::parse_initial_override(it.value(), "initial." + it.key());
    }
    top.finish();

    s.validate();
    return s;
}

/// FNV-1a over the canonical serialization; identifies a scenario in trace
/// headers.
inline std::uint64_t scenario_hash(const Scenario& s) {
    const std::string text = s.to_json().dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace cascadia
