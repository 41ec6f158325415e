#include "config_io.hpp"

#include "fracdeblur/errors.hpp"

#include <fstream>

namespace fracdeblur::cli {

namespace {

// One table drives serialization, parsing and overrides.
struct Field {
    const char* name;
    double SolverConfig::*real = nullptr;
    int SolverConfig::*integer = nullptr;
};

constexpr Field kFields[] = {
    {"alpha", &SolverConfig::alpha},
    {"taps", nullptr, &SolverConfig::taps},
    {"lambda1", &SolverConfig::lambda1},
    {"lambda2", &SolverConfig::lambda2},
    {"beta", &SolverConfig::beta},
    {"mu1", &SolverConfig::mu1},
    {"mu2", &SolverConfig::mu2},
    {"mu3", &SolverConfig::mu3},
    {"tau", &SolverConfig::tau},
    {"gamma", &SolverConfig::gamma},
    {"tol", &SolverConfig::tol},
    {"max_iter", nullptr, &SolverConfig::max_iter},
    {"eps_norm", &SolverConfig::eps_norm},
    {"eps_coef", &SolverConfig::eps_coef},
    {"primal_dual_steps", nullptr, &SolverConfig::primal_dual_steps},
};

const Field& find_field(const std::string& key) {
    for (const auto& f : kFields)
        if (key == f.name) return f;
    throw UsageError("unknown config key '" + key + "'");
}

void assign(SolverConfig& cfg, const Field& f, const nlohmann::json& v) {
    if (f.real) {
        if (!v.is_number()) throw UsageError(std::string("config key '") + f.name + "' must be a number");
        cfg.*f.real = v.get<double>();
    } else {
        if (!v.is_number_integer())
            throw UsageError(std::string("config key '") + f.name + "' must be an integer");
        cfg.*f.integer = v.get<int>();
    }
}

} // namespace

nlohmann::json config_to_json(const SolverConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : kFields) {
        if (f.real)
            j[f.name] = cfg.*f.real;
        else
            j[f.name] = cfg.*f.integer;
    }
    return j;
}

SolverConfig config_from_json(const nlohmann::json& j, SolverConfig base) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) assign(base, find_field(key), value);
    return base;
}

void apply_override(SolverConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw UsageError("override '" + assignment + "' must look like key=value");
    const Field& f = find_field(assignment.substr(0, eq));
    nlohmann::json v;
    try {
        v = nlohmann::json::parse(assignment.substr(eq + 1));
    } catch (const nlohmann::json::exception&) {
        throw UsageError("override '" + assignment + "' has a malformed value");
    }
    assign(cfg, f, v);
}

SolverConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    SolverConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config " + path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("config " + path + " is not valid JSON: " + e.what());
        }
        cfg = config_from_json(j, cfg);
    }
    for (const auto& o : overrides) apply_override(cfg, o);
    cfg.validate();
    return cfg;
}

} // namespace fracdeblur::cli
