#pragma once

// Hand-coded reference computations the engine tests check against. These
// deliberately avoid the library's stepping code: plain arithmetic and
// explicit state machines only.

#include <cstddef>
#include <string>
#include <vector>

namespace oracle {

/// Closed-form constant-rate Euler: the integral of a rate that does not
/// depend on the state is just x0 + n*dt*rate.
inline double constant_rate_euler(double x0, double rate, std::size_t steps, double dt) {
    return x0 + static_cast<double>(steps) * dt * rate;
}

/// Explicit per-step accumulation, for cases where the engine's repeated
/// addition (not the closed form) is the thing being mirrored.
inline double accumulated_euler(double x0, double rate, std::size_t steps, double dt) {
    double x = x0;
    for (std::size_t i = 0; i < steps; ++i) x += dt * rate;
    return x;
}

/// Hand-rolled simulation of a substation + SCADA pair wired back to back
/// with one-step latches on both directions (no comms network in between).
/// Mirrors the semantics "outputs from the pre-jump mode, guards on the
/// post-integration timer, jump at the end of the step" with explicit ifs.
struct SubstationScadaPair {
    // parameters
    double P_lim, T_s_sub, T_d, T_s_scada, theta_off;
    // state
    bool substation_on = true;
    double x_tp = 0.0;
    int scada_mode = 0; // 0 Closed, 1 Open, 2 ConnDown
    double x_ts = 0.0;
    // latches: what each side will read next step
    double latched_p_m = 0.0;
    double latched_s_cb = 0.0;

    struct Row {
        std::string substation;
        std::string scada;
    };

    Row step(double p_d, double s_op, double dt) {
        Row row{substation_on ? "SupplyPower" : "SwitchOff",
                scada_mode == 0 ? "Closed" : (scada_mode == 1 ? "Open" : "ConnDown")};

        // outputs from current modes
        const double p_m_out = substation_on ? p_d : 0.0;
        const double s_cb_out = scada_mode == 0 ? 0.0 : (scada_mode == 1 ? 1.0 : -1.0);

        // inputs are last step's emissions
        const double p_m_in = latched_p_m;
        const double s_cb_in = latched_s_cb;

        // integrate timers, then decide jumps
        x_tp += dt;
        x_ts += dt;
        if (substation_on) {
            if (s_cb_in == 1.0 || p_d >= P_lim) {
                substation_on = false;
                x_tp = 0.0;
            }
        } else {
            if (s_cb_in == 0.0 && p_d < P_lim && x_tp >= T_s_sub) {
                substation_on = true;
                x_tp = 0.0;
            }
        }
        if (scada_mode == 0) {
            if (p_m_in == -1.0) {
                scada_mode = 2;
                x_ts = 0.0;
            } else if ((s_op == 1.0 || p_m_in < theta_off) && x_ts >= T_d) {
                scada_mode = 1;
                x_ts = 0.0;
            }
        } else if (scada_mode == 1) {
            if (p_m_in == -1.0) {
                scada_mode = 2;
                x_ts = 0.0;
            } else if (s_op == 0.0 && x_ts >= T_s_scada) {
                scada_mode = 0;
                x_ts = 0.0;
            }
        } else {
            if (p_m_in != -1.0) {
                scada_mode = p_m_in < theta_off ? 1 : 0;
                x_ts = 0.0;
            }
        }

        latched_p_m = p_m_out;
        latched_s_cb = s_cb_out;
        return row;
    }
};

} // namespace oracle
