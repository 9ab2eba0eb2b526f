// cascadia command-line frontend: validate scenarios, run simulations,
// analyze traces and describe the composed model.
//
// Exit codes: 0 success, 1 validation failure, 2 simulation runtime error,
// 3 I/O error. CASCADIA_LOG={error,warn,info,debug} controls diagnostics on
// stderr.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cascadia/cascadia.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitIo = 3;

cascadia::Scenario load_scenario_file(const std::string& path) {
    const std::string text = cascadia::read_text_file(path);
    return cascadia::load_scenario(text);
}

int cmd_validate(const std::string& scenario_path) {
    try {
        load_scenario_file(scenario_path);
    } catch (const cascadia::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const cascadia::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
    cascadia::Scenario scenario;
    try {
        scenario = load_scenario_file(scenario_path);
    } catch (const cascadia::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const cascadia::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    if (seed_override) scenario.solver.seed = *seed_override;

    cascadia::Trace trace;
    try {
        trace = cascadia::run(scenario);
    } catch (const cascadia::Error& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitRuntime;
    }

    try {
        fs::create_directories(out_dir);
        cascadia::write_text_file((fs::path(out_dir) / "trace.csv").string(),
                                  cascadia::trace_to_csv(trace));
        cascadia::write_text_file((fs::path(out_dir) / "events.json").string(),
                                  cascadia::events_to_json(trace.events).dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    cascadia::log_info("wrote " + out_dir + "/trace.csv (" + std::to_string(trace.rows()) + " rows), " +
                       out_dir + "/events.json (" + std::to_string(trace.events.size()) + " events)");
    return kExitOk;
}

int cmd_analyze(const std::string& trace_dir, bool plot_data) {
    cascadia::Trace trace;
    try {
        trace = cascadia::trace_from_csv(
            cascadia::read_text_file((fs::path(trace_dir) / "trace.csv").string()));
    } catch (const cascadia::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const cascadia::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    cascadia::AnalysisResult analysis;
    try {
        analysis = cascadia::analyze_trace(trace);
    } catch (const cascadia::Error& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return kExitRuntime;
    }

    try {
        cascadia::write_text_file((fs::path(trace_dir) / "cascade.json").string(),
                                  cascadia::cascade_to_json(analysis.report).dump(2) + "\n");
        cascadia::write_text_file((fs::path(trace_dir) / "metrics.json").string(),
                                  cascadia::metrics_to_json(analysis.metrics).dump(2) + "\n");
        if (plot_data) {
            const fs::path dir = fs::path(trace_dir) / "plotdata";
            fs::create_directories(dir);
            for (const auto& c : trace.columns) {
                if (c.is_mode) continue;
                std::string body;
                for (std::size_t r = 0; r < trace.rows(); ++r)
                    body += cascadia::format_value(trace.t[r]) + " " + cascadia::format_value(c.values[r]) +
                            "\n";
                cascadia::write_text_file((dir / (c.name + ".dat")).string(), body);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    cascadia::log_info("wrote " + trace_dir + "/cascade.json and " + trace_dir + "/metrics.json");
    return kExitOk;
}

int cmd_describe(const std::optional<std::string>& scenario_path, bool as_json) {
    cascadia::Scenario scenario;
    try {
        if (scenario_path) scenario = load_scenario_file(*scenario_path);
    } catch (const cascadia::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const cascadia::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    cascadia::CompositionNetwork net;
    try {
        net = cascadia::make_micropolis(scenario.params, scenario.solver.dt);
    } catch (const cascadia::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }

    if (as_json) {
        nlohmann::json j;
        j["nodes"] = nlohmann::json::array();
        for (const auto& n : net.nodes()) {
            nlohmann::json node;
            node["name"] = n.name();
            node["kind"] =
                n.kind == cascadia::CompositionNetwork::Node::Kind::automaton ? "automaton" : "junction";
            if (n.kind == cascadia::CompositionNetwork::Node::Kind::automaton) {
                node["modes"] = nlohmann::json::array();
                for (const auto& m : n.automaton->modes) node["modes"].push_back(m.name);
            }
            node["inputs"] = nlohmann::json::array();
            for (const auto& p : cascadia::CompositionNetwork::input_ports(n))
                node["inputs"].push_back(p.name);
            node["outputs"] = nlohmann::json::array();
            for (const auto& p : cascadia::CompositionNetwork::output_ports(n))
                node["outputs"].push_back(p.name);
            j["nodes"].push_back(std::move(node));
        }
        j["connections"] = nlohmann::json::array();
        for (const auto& c : net.connections())
            j["connections"].push_back({{"from", c.source.node + "." + c.source.port},
                                        {"to", c.destination.node + "." + c.destination.port},
                                        {"type", cascadia::to_string(c.dependency_type)}});
        j["free_inputs"] = nlohmann::json::array();
        for (const auto& fp : net.free_inputs()) j["free_inputs"].push_back(fp.node + "." + fp.port);
        std::cout << j.dump(2) << "\n";
        return kExitOk;
    }

    std::cout << "nodes:\n";
    for (const auto& n : net.nodes()) {
        std::cout << "  " << n.name()
                  << (n.kind == cascadia::CompositionNetwork::Node::Kind::automaton ? " (automaton"
                                                                                    : " (junction");
        if (n.kind == cascadia::CompositionNetwork::Node::Kind::automaton) {
            std::cout << "; modes:";
            for (const auto& m : n.automaton->modes) std::cout << " " << m.name;
        }
        std::cout << ")\n";
        for (const auto& p : cascadia::CompositionNetwork::input_ports(n))
            std::cout << "    in  " << p.name << "\n";
        for (const auto& p : cascadia::CompositionNetwork::output_ports(n))
            std::cout << "    out " << p.name << "\n";
    }
    std::cout << "connections:\n";
    for (const auto& c : net.connections())
        std::cout << "  " << c.source.node << "." << c.source.port << " -> " << c.destination.node << "."
                  << c.destination.port << " [" << cascadia::to_string(c.dependency_type) << "]\n";
    std::cout << "free inputs:\n";
    for (const auto& fp : net.free_inputs()) std::cout << "  " << fp.node << "." << fp.port << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"open hybrid automata composition and cascading-failure simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::string trace_dir;
    std::optional<std::string> describe_scenario;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool plot_data = false;
    bool as_json = false;

    auto* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("--scenario", scenario_path, "scenario JSON file")->required();

    auto* simulate = app.add_subcommand("simulate", "run a scenario, write trace.csv and events.json");
    simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();
    auto* seed_opt = simulate->add_option("--seed", seed, "override the scenario seed");

    auto* analyze = app.add_subcommand("analyze", "write cascade.json and metrics.json for a trace");
    analyze->add_option("--trace", trace_dir, "directory containing trace.csv")->required();
    analyze->add_flag("--plot-data", plot_data, "also write plotdata/<column>.dat files");

    auto* describe = app.add_subcommand("describe", "print the composed model");
    std::string describe_path;
    auto* desc_opt = describe->add_option("--scenario", describe_path, "use this scenario's parameters");
    describe->add_flag("--json", as_json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }
    seed_given = seed_opt->count() > 0;
    if (desc_opt->count() > 0) describe_scenario = describe_path;

    if (validate->parsed()) return cmd_validate(scenario_path);
    if (simulate->parsed())
        return cmd_simulate(scenario_path, out_dir,
                            seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
    if (analyze->parsed()) return cmd_analyze(trace_dir, plot_data);
    if (describe->parsed()) return cmd_describe(describe_scenario, as_json);
    return kExitValidation;
}
