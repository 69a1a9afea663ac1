#pragma once

// Experiment configuration and check reports.
//
// Config schema (JSON object; every key optional, unknown keys rejected):
//
//   key          type            default
//   command      string          (required, from the CLI subcommand)
//   nodes        int >= 4        128 for verify-john, verify-weight-law,
//                                verify-equivariance, verify-moments; else 64
//   fd_h         number > 0      1e-3
//   richardson   bool            true
//   seed         uint            20240601
//   max_degree   even int >= 0   4 (2 for verify-equivariance)
//   n_frames     int >= 1        120
//   n_points     int >= 1        10 chart/space points per check
//   connection   string          "flagship-u1"
//   state        string          "elementary"
//   twistor_a    8 numbers       [1,0, 0,0, 0,1, 0,0]  (re, im interleaved)
//   twistor_b    8 numbers       [0,1, 0,0, 1,0, 0,0]
//   noise        number >= 0     0 (relative sample noise for reconstruct)
//   design_in    string          "" (load a DesignMatrix stem for reconstruct)
//   design_out   string          "" (save the DesignMatrix stem)
//   output       string          "" (stdout)
//   format       "json" | "csv"  "json"
//   tolerances   object          see default_tolerances()

#include "twistorlab/core.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace twistorlab {

/// Invalid configuration or precondition; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> names = {
        "verify-john",    "verify-weight-law",  "verify-equivariance", "verify-moments",
        "verify-selfdual", "verify-gauge",      "verify-coupled-box",  "penrose-elementary",
        "geometry-roundtrip", "reconstruct",    "injectivity",         "export-basis"};
    return names;
}

inline std::map<std::string, double> default_tolerances() {
    return {
        {"closed_form", 1e-10},     {"john", 1e-6},          {"weight_law", 1e-9},
        {"equivariance", 1e-9},     {"moments", 1e-6},       {"selfdual", 1e-10},
        {"hodge", 1e-14},           {"bianchi", 1e-5},       {"gauge", 1e-8},
        {"coupled_box", 1e-6},      {"gauge_covariance", 1e-6}, {"penrose_value", 1e-12},
        {"penrose_spread", 1e-8},   {"penrose_john", 1e-6},  {"geometry", 1e-12},
        {"reconstruct", 1e-6},
    };
}

struct ExperimentConfig {
    std::string command;
    std::optional<int> nodes;
    double fd_h = 1e-3;
    bool richardson = true;
    std::uint64_t seed = 20240601;
    std::optional<int> max_degree;
    int n_frames = 120;
    int n_points = 10;
    std::string connection = "flagship-u1";
    std::string state = "elementary";
    std::vector<double> twistor_a{1, 0, 0, 0, 0, 1, 0, 0};
    std::vector<double> twistor_b{0, 1, 0, 0, 1, 0, 0, 0};
    double noise = 0.0;
    std::string design_in;
    std::string design_out;
    std::string output;
    std::string format = "json";
    std::map<std::string, double> tolerances = default_tolerances();

    double tol(const std::string& name) const { return tolerances.at(name); }

    int nodes_or(int fallback) const { return nodes.value_or(fallback); }
    int max_degree_or(int fallback) const { return max_degree.value_or(fallback); }

    void validate() const {
        const auto& cmds = known_commands();
        if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
            throw ConfigError("unknown command '" + command + "'");
        if (nodes && *nodes < 4) throw ConfigError("nodes must be >= 4");
        if (!(fd_h > 0.0)) throw ConfigError("fd_h must be > 0");
        if (max_degree && (*max_degree < 0 || *max_degree % 2 != 0))
            throw ConfigError("max_degree must be an even integer >= 0");
        if (n_frames < 1) throw ConfigError("n_frames must be >= 1");
        if (n_points < 1) throw ConfigError("n_points must be >= 1");
        if (noise < 0.0) throw ConfigError("noise must be >= 0");
        if (format != "json" && format != "csv") throw ConfigError("format must be 'json' or 'csv'");
        if (twistor_a.size() != 8 || twistor_b.size() != 8)
            throw ConfigError("twistor_a / twistor_b need 8 numbers (re, im interleaved)");
        if (state != "elementary") throw ConfigError("unknown twistor state '" + state + "'");
        const auto defaults = default_tolerances();
        for (const auto& [k, v] : tolerances) {
            if (!defaults.count(k)) throw ConfigError("unknown tolerance '" + k + "'");
            if (!(v > 0.0)) throw ConfigError("tolerance '" + k + "' must be > 0");
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["nodes"] = nodes ? nlohmann::json(*nodes) : nlohmann::json(nullptr);
        j["fd_h"] = fd_h;
        j["richardson"] = richardson;
        j["seed"] = seed;
        j["max_degree"] = max_degree ? nlohmann::json(*max_degree) : nlohmann::json(nullptr);
        j["n_frames"] = n_frames;
        j["n_points"] = n_points;
        j["connection"] = connection;
        j["state"] = state;
        j["twistor_a"] = twistor_a;
        j["twistor_b"] = twistor_b;
        j["noise"] = noise;
        j["design_in"] = design_in;
        j["design_out"] = design_out;
        j["output"] = output;
        j["format"] = format;
        j["tolerances"] = tolerances;
        return j;
    }
};

/// Applies the keys present in j on top of cfg; unknown keys and wrong
/// types raise ConfigError.
inline void merge_config(ExperimentConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    static const std::set<std::string> keys = {
        "command", "nodes", "fd_h", "richardson", "seed", "max_degree", "n_frames", "n_points", "connection",
        "state", "twistor_a", "twistor_b", "noise", "design_in", "design_out", "output", "format", "tolerances"};
    try {
        for (const auto& [k, v] : j.items()) {
            if (!keys.count(k)) throw ConfigError("config: unknown key '" + k + "'");
            if (k == "command") cfg.command = v.get<std::string>();
            else if (k == "nodes") cfg.nodes = v.get<int>();
            else if (k == "fd_h") cfg.fd_h = v.get<double>();
            else if (k == "richardson") cfg.richardson = v.get<bool>();
            else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
            else if (k == "max_degree") cfg.max_degree = v.get<int>();
            else if (k == "n_frames") cfg.n_frames = v.get<int>();
            else if (k == "n_points") cfg.n_points = v.get<int>();
            else if (k == "connection") cfg.connection = v.get<std::string>();
            else if (k == "state") cfg.state = v.get<std::string>();
            else if (k == "twistor_a") cfg.twistor_a = v.get<std::vector<double>>();
            else if (k == "twistor_b") cfg.twistor_b = v.get<std::vector<double>>();
            else if (k == "noise") cfg.noise = v.get<double>();
            else if (k == "design_in") cfg.design_in = v.get<std::string>();
            else if (k == "design_out") cfg.design_out = v.get<std::string>();
            else if (k == "output") cfg.output = v.get<std::string>();
            else if (k == "format") cfg.format = v.get<std::string>();
            else if (k == "tolerances")
                for (const auto& [name, t] : v.items()) cfg.tolerances[name] = t.get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

struct CheckRecord {
    std::string name;
    double value;
    double tolerance;
    bool pass;
};

class Report {
public:
    /// Residual-style check: passes iff value <= tolerance (NaN fails).
    void check_le(const std::string& name, double value, double tolerance) {
        records_.push_back({name, value, tolerance, value <= tolerance});
    }
    /// Exact expectation: passes iff value == expected.
    void check_eq(const std::string& name, double value, double expected) {
        records_.push_back({name, value, expected, value == expected});
    }
    /// Lower bound: passes iff value > bound.
    void check_gt(const std::string& name, double value, double bound) {
        records_.push_back({name, value, bound, value > bound});
    }
    void add_info(const std::string& key, nlohmann::json value) { info_[key] = std::move(value); }
    void set_environment(nlohmann::json env) { environment_ = std::move(env); }

    const std::vector<CheckRecord>& records() const noexcept { return records_; }

    bool pass() const {
        for (const auto& r : records_)
            if (!r.pass) return false;
        return !records_.empty();
    }

    std::vector<std::string> failures() const {
        std::vector<std::string> out;
        for (const auto& r : records_)
            if (!r.pass) out.push_back(r.name);
        return out;
    }

    /// Canonical JSON (keys sorted). The timestamp is the only field that
    /// varies between runs with identical config.
    nlohmann::json to_json(bool with_timestamp = true) const {
        nlohmann::json j;
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& r : records_)
            checks.push_back({{"name", r.name}, {"value", finite_or_string(r.value)},
                              {"tolerance", finite_or_string(r.tolerance)}, {"pass", r.pass}});
        j["checks"] = checks;
        j["environment"] = environment_;
        j["info"] = info_;
        j["pass"] = pass();
        if (with_timestamp) j["timestamp"] = now_iso8601();
        return j;
    }

    std::string to_csv() const {
        std::ostringstream os;
        os.precision(17);
        os << "name,value,tolerance,pass\n";
        for (const auto& r : records_) os << r.name << ',' << r.value << ',' << r.tolerance << ',' << (r.pass ? 1 : 0) << '\n';
        return os.str();
    }

private:
    static nlohmann::json finite_or_string(double x) {
        if (std::isfinite(x)) return x;
        std::ostringstream os;
        os << x;
        return os.str();
    }

    static std::string now_iso8601() {
        const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    std::vector<CheckRecord> records_;
    nlohmann::json environment_ = nlohmann::json::object();
    nlohmann::json info_ = nlohmann::json::object();
};

}  // namespace twistorlab
