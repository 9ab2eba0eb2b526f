#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cascadia/errors.hpp"

namespace cascadia {

/// Exogenous signal defined by breakpoints, sampled piecewise-constant
/// ("hold") or with linear interpolation. Clamped to the last value beyond
/// the final breakpoint.
struct Profile {
    enum class Interp { hold, linear };

    Interp interp = Interp::hold;
    std::vector<std::pair<double, double>> points; // (time, value), strictly increasing times

    void validate(const std::string& path) const {
        if (points.empty()) throw ConfigError(path + ": profile needs at least one breakpoint");
        if (points.front().first > 0.0)
            throw ConfigError(path + ": first breakpoint must be at time <= 0");
        for (std::size_t i = 1; i < points.size(); ++i)
            if (points[i].first <= points[i - 1].first)
                throw ConfigError(path + ": breakpoint times must be strictly increasing");
    }

    double sample(double t) const {
        std::size_t last = 0;
        while (last + 1 < points.size() && points[last + 1].first <= t) ++last;
        if (interp == Interp::hold || last + 1 == points.size()) return points[last].second;
        const auto& [t0, v0] = points[last];
        const auto& [t1, v1] = points[last + 1];
        if (t <= t0) return v0;
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
};

inline Profile hold_profile(double value) {
    Profile p;
    p.interp = Profile::Interp::hold;
    p.points = {{0.0, value}};
    return p;
}

inline double sample_profile(const Profile& p, double t) { return p.sample(t); }

/// Boolean toggle sequence for fault triggers and operator commands. The
/// value before the first toggle is 0 and each toggle's value holds until
/// the next one.
struct Schedule {
    std::vector<std::pair<double, int>> toggles; // (time, 0|1), strictly increasing times

    void validate(const std::string& path) const {
        for (std::size_t i = 0; i < toggles.size(); ++i) {
            if (toggles[i].second != 0 && toggles[i].second != 1)
                throw ConfigError(path + ": schedule values must be 0 or 1");
            if (i > 0 && toggles[i].first <= toggles[i - 1].first)
                throw ConfigError(path + ": toggle times must be strictly increasing");
        }
    }

    int sample(double t) const {
        int value = 0;
        for (const auto& [time, v] : toggles) {
            if (time > t) break;
            value = v;
        }
        return value;
    }
};

} // namespace cascadia
