/*
 Copyright 2026 The clmatch Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "config.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "clmatch/csv.hpp"

namespace clmatch::cli {

using json = nlohmann::json;

namespace {

std::string qualified(const std::string &where, const std::string &key) {
    return where.empty() ? key : where + "." + key;
}

void reject_unknown(const json &obj, const std::string &where,
                    std::initializer_list<const char *> allowed) {
    if (!obj.is_object()) {
        throw ConfigError("config: '" + where + "' must be an object");
    }
    for (const auto &item : obj.items()) {
        bool ok = false;
        for (const char *k : allowed) {
            ok = ok || item.key() == k;
        }
        if (!ok) {
            throw ConfigError("config: unknown key '" + qualified(where, item.key()) + "'");
        }
    }
}

template <typename T>
void read(const json &obj, const char *key, T &out, const std::string &where) {
    if (!obj.contains(key)) {
        return;
    }
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception &) {
        throw ConfigError("config: '" + qualified(where, key) + "' has the wrong type");
    }
}

std::string fmt(double v) { return csv::format_double(v); }

} // namespace

ExperimentConfig default_config(const std::string &system) {
    if (system != "cartpend") {
        throw ConfigError("config: unknown system '" + system + "'");
    }
    ExperimentConfig cfg;
    cfg.fit = cartpend::default_fit_config(cfg.params);
    return cfg;
}

void ExperimentConfig::validate() const {
    if (system != "cartpend") {
        throw ConfigError("config: unknown system '" + system + "'");
    }
    params.validate();
    if (centers < 1) {
        throw ConfigError("config: fit.centers must be >= 1");
    }
    if (grid_count < 2) {
        throw ConfigError("config: fit.grid_count must be >= 2");
    }
    fit.validate(2);
    if (!(simulation.dt > 0.0) || !(simulation.t_end >= simulation.dt)) {
        throw ConfigError("config: simulation needs dt > 0 and t_end >= dt");
    }
    if (simulation.stride < 1) {
        throw ConfigError("config: simulation.stride must be >= 1");
    }
    if (simulation.initial_conditions.empty()) {
        throw ConfigError("config: simulation.initial_conditions must not be empty");
    }
    if (surface.q1_count < 2 || surface.q2_count < 2 || !(surface.q2_hi > surface.q2_lo)) {
        throw ConfigError("config: surface needs counts >= 2 and q2_hi > q2_lo");
    }
    if (verify.random_states < 1 || !(verify.max_speed > 0.0) || !(verify.rho >= 0.0) ||
        !(verify.tolerance > 0.0)) {
        throw ConfigError("config: invalid verify settings");
    }
    if (output_dir.empty()) {
        throw ConfigError("config: output_dir must not be empty");
    }
}

std::string ExperimentConfig::resolved_model_path() const {
    if (!model_path.empty()) {
        return model_path;
    }
    return (std::filesystem::path(output_dir) / "model.json").string();
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> e{
        {"system", system},
        {"params.a", fmt(params.a)},
        {"params.b", fmt(params.b)},
        {"params.c", fmt(params.c)},
        {"params.q2_star", fmt(params.q2_star)},
        {"params.gamma", fmt(params.gamma)},
        {"params.alpha2", fmt(params.alpha2)},
        {"params.beta", fmt(params.beta)},
        {"params.kp", fmt(params.kp)},
        {"params.kv", fmt(params.kv)},
        {"params.phi", fmt(params.phi)},
        {"fit.centers", std::to_string(centers)},
        {"fit.grid_count", std::to_string(grid_count)},
        {"fit.max_iterations", std::to_string(fit.max_iterations)},
        {"fit.initial_damping", fmt(fit.initial_damping)},
        {"fit.pd_penalty_weight", fmt(fit.pd_penalty_weight)},
        {"fit.pd_floor", fmt(fit.pd_floor)},
        {"fit.residual_tolerance", fmt(fit.residual_tolerance)},
        {"fit.center_weight", fmt(fit.center_weight)},
        {"fit.ridge", fmt(fit.ridge)},
        {"simulation.t_end", fmt(simulation.t_end)},
        {"simulation.dt", fmt(simulation.dt)},
        {"simulation.stride", std::to_string(simulation.stride)},
    };
    for (std::size_t i = 0; i < simulation.initial_conditions.size(); ++i) {
        const auto &ic = simulation.initial_conditions[i];
        std::ostringstream os;
        os << fmt(ic[0]) << ' ' << fmt(ic[1]) << ' ' << fmt(ic[2]) << ' ' << fmt(ic[3]);
        e.emplace_back("simulation.initial_conditions." + std::to_string(i + 1), os.str());
    }
    e.insert(e.end(), {
                          {"surface.q1_count", std::to_string(surface.q1_count)},
                          {"surface.q2_lo", fmt(surface.q2_lo)},
                          {"surface.q2_hi", fmt(surface.q2_hi)},
                          {"surface.q2_count", std::to_string(surface.q2_count)},
                          {"verify.random_states", std::to_string(verify.random_states)},
                          {"verify.max_speed", fmt(verify.max_speed)},
                          {"verify.rho", fmt(verify.rho)},
                          {"verify.tolerance", fmt(verify.tolerance)},
                          {"verify.conv_tolerance", fmt(verify.conv_tolerance)},
                          {"verify.q2_tolerance", fmt(verify.q2_tolerance)},
                          {"model_path", resolved_model_path()},
                          {"seed", std::to_string(seed)},
                      });
    return e;
}

ExperimentConfig parse_config(const std::string &json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    reject_unknown(doc, "",
                   {"system", "params", "fit", "simulation", "surface", "verify", "output_dir",
                    "model_path", "seed"});
    std::string system = "cartpend";
    read(doc, "system", system, "");
    ExperimentConfig cfg = default_config(system);

    if (doc.contains("params")) {
        const json &p = doc["params"];
        reject_unknown(p, "params",
                       {"a", "b", "c", "q2_star", "gamma", "alpha2", "beta", "kp", "kv", "phi"});
        read(p, "a", cfg.params.a, "params");
        read(p, "b", cfg.params.b, "params");
        read(p, "c", cfg.params.c, "params");
        read(p, "q2_star", cfg.params.q2_star, "params");
        read(p, "gamma", cfg.params.gamma, "params");
        read(p, "alpha2", cfg.params.alpha2, "params");
        read(p, "beta", cfg.params.beta, "params");
        read(p, "kp", cfg.params.kp, "params");
        read(p, "kv", cfg.params.kv, "params");
        read(p, "phi", cfg.params.phi, "params");
    }
    if (doc.contains("fit")) {
        const json &f = doc["fit"];
        reject_unknown(f, "fit",
                       {"centers", "grid_count", "max_iterations", "initial_damping",
                        "pd_penalty_weight", "pd_floor", "residual_tolerance", "center_weight",
                        "ridge"});
        read(f, "centers", cfg.centers, "fit");
        read(f, "grid_count", cfg.grid_count, "fit");
        read(f, "max_iterations", cfg.fit.max_iterations, "fit");
        read(f, "initial_damping", cfg.fit.initial_damping, "fit");
        read(f, "pd_penalty_weight", cfg.fit.pd_penalty_weight, "fit");
        read(f, "pd_floor", cfg.fit.pd_floor, "fit");
        read(f, "residual_tolerance", cfg.fit.residual_tolerance, "fit");
        read(f, "center_weight", cfg.fit.center_weight, "fit");
        read(f, "ridge", cfg.fit.ridge, "fit");
    }
    if (doc.contains("simulation")) {
        const json &s = doc["simulation"];
        reject_unknown(s, "simulation", {"t_end", "dt", "stride", "initial_conditions"});
        read(s, "t_end", cfg.simulation.t_end, "simulation");
        read(s, "dt", cfg.simulation.dt, "simulation");
        read(s, "stride", cfg.simulation.stride, "simulation");
        read(s, "initial_conditions", cfg.simulation.initial_conditions, "simulation");
    }
    if (doc.contains("surface")) {
        const json &s = doc["surface"];
        reject_unknown(s, "surface", {"q1_count", "q2_lo", "q2_hi", "q2_count"});
        read(s, "q1_count", cfg.surface.q1_count, "surface");
        read(s, "q2_lo", cfg.surface.q2_lo, "surface");
        read(s, "q2_hi", cfg.surface.q2_hi, "surface");
        read(s, "q2_count", cfg.surface.q2_count, "surface");
    }
    if (doc.contains("verify")) {
        const json &v = doc["verify"];
        reject_unknown(v, "verify",
                       {"random_states", "max_speed", "rho", "tolerance", "conv_tolerance",
                        "q2_tolerance"});
        read(v, "random_states", cfg.verify.random_states, "verify");
        read(v, "max_speed", cfg.verify.max_speed, "verify");
        read(v, "rho", cfg.verify.rho, "verify");
        read(v, "tolerance", cfg.verify.tolerance, "verify");
        read(v, "conv_tolerance", cfg.verify.conv_tolerance, "verify");
        read(v, "q2_tolerance", cfg.verify.q2_tolerance, "verify");
    }
    read(doc, "output_dir", cfg.output_dir, "");
    read(doc, "model_path", cfg.model_path, "");
    read(doc, "seed", cfg.seed, "");

    cfg.fit.grid = cartpend::default_grid(cfg.params, cfg.grid_count);
    cfg.fit.active_coords = {0};
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace clmatch::cli
