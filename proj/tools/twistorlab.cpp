// twistorlab: run verification suites and write JSON/CSV reports.
//
//   twistorlab <command> [--config file.json] [--<key> value ...]
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 usage or config error.

#include "twistorlab/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string command_list() {
    std::string s;
    for (const auto& c : twistorlab::known_commands()) s += "  " + c + "\n";
    return s;
}

std::vector<double> parse_numbers(const std::string& text, const char* key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw twistorlab::ConfigError(std::string(key) + ": bad number '" + item + "'");
        }
    }
    return out;
}

int execute(int argc, char** argv) {
    using namespace twistorlab;
    CLI::App app{"twistorlab verification suites\n\ncommands:\n" + command_list()};
    app.get_formatter()->column_width(32);

    std::string command, config_path, twistor_a, twistor_b;
    std::vector<std::string> tolerance_flags;
    ExperimentConfig flags;
    int nodes = 0, max_degree = 0;

    app.add_option("command", command, "suite to run")->required();
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    auto* o_nodes = app.add_option("--nodes", nodes, "quadrature nodes (>= 4)");
    auto* o_fd_h = app.add_option("--fd_h", flags.fd_h, "finite-difference step");
    auto* o_rich = app.add_option("--richardson", flags.richardson, "Richardson extrapolation (true/false)");
    auto* o_seed = app.add_option("--seed", flags.seed, "RNG seed");
    auto* o_deg = app.add_option("--max_degree", max_degree, "largest harmonic degree of the basis (even)");
    auto* o_frames = app.add_option("--n_frames", flags.n_frames, "frames for reconstruct/injectivity");
    auto* o_points = app.add_option("--n_points", flags.n_points, "sample points per check");
    auto* o_conn = app.add_option("--connection", flags.connection, "connection preset");
    auto* o_state = app.add_option("--state", flags.state, "twistor state name");
    auto* o_ta = app.add_option("--twistor_a", twistor_a, "covector A as 8 comma-separated numbers (re,im pairs)");
    auto* o_tb = app.add_option("--twistor_b", twistor_b, "covector B as 8 comma-separated numbers (re,im pairs)");
    auto* o_noise = app.add_option("--noise", flags.noise, "relative sample noise for reconstruct");
    auto* o_din = app.add_option("--design_in", flags.design_in, "load design matrix <stem>.csv/.json");
    auto* o_dout = app.add_option("--design_out", flags.design_out, "save design matrix to <stem>.csv/.json");
    auto* o_out = app.add_option("--output", flags.output, "report path (default stdout)");
    auto* o_fmt = app.add_option("--format", flags.format, "json or csv");
    app.add_option("--tolerances", tolerance_flags, "override a tolerance: name=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const auto& cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end()) {
        std::cerr << "error: unknown command '" << command << "'\n\n" << app.help();
        return 2;
    }

    ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open config '" + config_path + "'");
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
            merge_config(cfg, j);
        }
        cfg.command = command;
        if (o_nodes->count()) cfg.nodes = nodes;
        if (o_fd_h->count()) cfg.fd_h = flags.fd_h;
        if (o_rich->count()) cfg.richardson = flags.richardson;
        if (o_seed->count()) cfg.seed = flags.seed;
        if (o_deg->count()) cfg.max_degree = max_degree;
        if (o_frames->count()) cfg.n_frames = flags.n_frames;
        if (o_points->count()) cfg.n_points = flags.n_points;
        if (o_conn->count()) cfg.connection = flags.connection;
        if (o_state->count()) cfg.state = flags.state;
        if (o_ta->count()) cfg.twistor_a = parse_numbers(twistor_a, "twistor_a");
        if (o_tb->count()) cfg.twistor_b = parse_numbers(twistor_b, "twistor_b");
        if (o_noise->count()) cfg.noise = flags.noise;
        if (o_din->count()) cfg.design_in = flags.design_in;
        if (o_dout->count()) cfg.design_out = flags.design_out;
        if (o_out->count()) cfg.output = flags.output;
        if (o_fmt->count()) cfg.format = flags.format;
        for (const auto& t : tolerance_flags) {
            const auto eq = t.find('=');
            if (eq == std::string::npos) throw ConfigError("--tolerances expects name=value, got '" + t + "'");
            cfg.tolerances[t.substr(0, eq)] = parse_numbers(t.substr(eq + 1), "tolerances").at(0);
        }

        const Report report = run(cfg);
        // export-basis writes into the output directory; its report goes to stdout.
        const bool to_stdout = cfg.output.empty() || cfg.command == "export-basis";
        const std::string text = cfg.format == "csv" ? report.to_csv() : report.to_json().dump(2) + "\n";
        if (to_stdout) {
            std::cout << text;
        } else {
            std::ofstream out(cfg.output);
            if (!out) throw ConfigError("cannot write report to '" + cfg.output + "'");
            out << text;
        }
        if (!report.pass()) {
            std::cerr << "FAILED checks:";
            for (const auto& r : report.records())
                if (!r.pass) std::cerr << "\n  " << r.name << " = " << r.value << " (tolerance " << r.tolerance << ")";
            std::cerr << '\n';
            return 1;
        }
        return 0;
    } catch (const InsufficientSamples& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return execute(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
