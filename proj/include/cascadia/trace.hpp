#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascadia/errors.hpp"

namespace cascadia {

/// %.9g rendering used for every float we serialize.
inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct ModeChangeEvent {
    double t = 0.0;
    std::string node;
    std::string from;
    std::string to;
    std::string guard;
};

/// Column-oriented recording of one run. Row k is a consistent snapshot of
/// time k*dt: the modes and continuous states the step's outputs were
/// computed from, the inputs each node read and the outputs it emitted.
/// Mode changes decided during step k appear in row k+1 and are logged as
/// events at that row's time.
class Trace {
public:
    struct Column {
        std::string name;  ///< "node.mode", "node.var" or "node.port"
        bool is_mode = false;
        std::vector<std::string> labels; ///< when is_mode
        std::vector<double> values;      ///< otherwise
    };

    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    double dt = 0.0;

    std::vector<double> t;
    std::vector<Column> columns;
    std::vector<ModeChangeEvent> events;

    std::size_t rows() const { return t.size(); }

    const Column* find_column(const std::string& name) const {
        for (const auto& c : columns)
            if (c.name == name) return &c;
        return nullptr;
    }

    const Column& column(const std::string& name) const {
        const Column* c = find_column(name);
        if (c == nullptr) throw ConfigError("trace has no column '" + name + "'");
        return *c;
    }

    double value(const std::string& name, std::size_t row) const {
        const Column& c = column(name);
        if (c.is_mode) throw ConfigError("column '" + name + "' holds modes, not values");
        return c.values.at(row);
    }

    const std::string& mode(const std::string& node, std::size_t row) const {
        const Column& c = column(node + ".mode");
        return c.labels.at(row);
    }

    /// Row index of time `when` (grid-aligned lookup).
    std::size_t row_at(double when) const {
        if (dt <= 0.0) throw ConfigError("trace has no time step");
        const auto idx = static_cast<std::size_t>(when / dt + 0.5);
        if (idx >= rows()) throw ConfigError("time " + format_value(when) + " is beyond the trace");
        return idx;
    }

    /// Node names that have a mode column, in column order.
    std::vector<std::string> mode_nodes() const {
        std::vector<std::string> out;
        for (const auto& c : columns)
            if (c.is_mode) out.push_back(c.name.substr(0, c.name.size() - 5));
        return out;
    }
};

inline std::string trace_to_csv(const Trace& trace) {
    std::ostringstream os;
    char meta[128];
    std::snprintf(meta, sizeof(meta), "# cascadia-trace v1 hash=%016" PRIx64 " seed=%" PRIu64 " dt=%s\n",
                  trace.scenario_hash, trace.seed, format_value(trace.dt).c_str());
    os << meta;
    os << "t";
    for (const auto& c : trace.columns) os << "," << c.name;
    os << "\n";
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        os << format_value(trace.t[r]);
        for (const auto& c : trace.columns) {
            os << ",";
            if (c.is_mode) os << c.labels[r];
            else os << format_value(c.values[r]);
        }
        os << "\n";
    }
    return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline bool looks_numeric(const std::string& s) {
    if (s.empty()) return false;
    const char c = s[0];
    return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.';
}

} // namespace detail

/// Parse a trace back from its CSV form. Mode columns are recognized by the
/// ".mode" suffix. Events are not stored in the CSV; use read_events_json or
/// derive them from mode changes.
inline Trace trace_from_csv(const std::string& text) {
    Trace trace;
    std::istringstream is(text);
    std::string line;
    bool header_done = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::uint64_t hash = 0, seed = 0;
            double dt = 0.0;
            if (std::sscanf(line.c_str(), "# cascadia-trace v1 hash=%" SCNx64 " seed=%" SCNu64 " dt=%lf",
                            &hash, &seed, &dt) == 3) {
                trace.scenario_hash = hash;
                trace.seed = seed;
                trace.dt = dt;
            }
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        if (!header_done) {
            if (fields.empty() || fields[0] != "t") throw ConfigError("trace CSV: first column must be t");
            for (std::size_t i = 1; i < fields.size(); ++i) {
                Trace::Column c;
                c.name = fields[i];
                c.is_mode = fields[i].size() > 5 && fields[i].rfind(".mode") == fields[i].size() - 5;
                trace.columns.push_back(std::move(c));
            }
            header_done = true;
            continue;
        }
        if (fields.size() != trace.columns.size() + 1)
            throw ConfigError("trace CSV: row has " + std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(trace.columns.size() + 1));
        trace.t.push_back(std::strtod(fields[0].c_str(), nullptr));
        for (std::size_t i = 0; i < trace.columns.size(); ++i) {
            auto& c = trace.columns[i];
            const std::string& f = fields[i + 1];
            if (c.is_mode) {
                c.labels.push_back(f);
            } else {
                if (!detail::looks_numeric(f))
                    throw ConfigError("trace CSV: non-numeric value '" + f + "' in column " + c.name);
                c.values.push_back(std::strtod(f.c_str(), nullptr));
            }
        }
    }
    if (!header_done) throw ConfigError("trace CSV: missing header row");
    if (trace.dt == 0.0 && trace.t.size() >= 2) trace.dt = trace.t[1] - trace.t[0];
    return trace;
}

inline nlohmann::json events_to_json(const std::vector<ModeChangeEvent>& events) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : events)
        j.push_back({{"t", e.t}, {"node", e.node}, {"from", e.from}, {"to", e.to}, {"guard", e.guard}});
    return j;
}

inline std::vector<ModeChangeEvent> events_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ConfigError("events: expected a JSON array");
    std::vector<ModeChangeEvent> out;
    for (const auto& e : j) {
        ModeChangeEvent ev;
        ev.t = e.at("t").get<double>();
        ev.node = e.at("node").get<std::string>();
        ev.from = e.at("from").get<std::string>();
        ev.to = e.at("to").get<std::string>();
        ev.guard = e.value("guard", "");
        out.push_back(std::move(ev));
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw IoError("failed while writing '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

} // namespace cascadia
