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

#ifndef CLMATCH_TOOLS_CONFIG_HPP
#define CLMATCH_TOOLS_CONFIG_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "clmatch/cartpend.hpp"
#include "clmatch/fit.hpp"

namespace clmatch::cli {

struct SimulationSettings {
    double t_end = 40.0;
    double dt = 1e-3;
    int stride = 1;
    /// (q1, q2, qd1, qd2) per run.
    std::vector<std::array<double, 4>> initial_conditions{
        {0.5, 0.0, 0.0, 0.0}, {-0.5, 0.0, 0.0, 0.0}, {0.3, 1.0, 0.0, 0.0}};
};

struct SurfaceSettings {
    int q1_count = 61;
    double q2_lo = -3.0;
    double q2_hi = 3.0;
    int q2_count = 61;
};

struct VerifySettings {
    int random_states = 1000;
    double max_speed = 2.0; ///< |qd_i| bound for random states
    double rho = 0.05;
    double tolerance = 1e-10;
    double conv_tolerance = 1e-2;
    double q2_tolerance = 1e-1;
};

struct ExperimentConfig {
    std::string system = "cartpend";
    cartpend::CartPendParams params;
    int centers = 11;
    int grid_count = 121;
    FitConfig fit;
    SimulationSettings simulation;
    SurfaceSettings surface;
    VerifySettings verify;
    std::string output_dir = "out";
    std::string model_path; ///< empty: <output_dir>/model.json
    std::uint64_t seed = 1;

    /// Throws ConfigError on any invariant violation.
    void validate() const;
    std::string resolved_model_path() const;
    /// Flattened key = value pairs of the fully resolved configuration.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Defaults for the named system. Throws ConfigError for unknown names.
ExperimentConfig default_config(const std::string &system = "cartpend");

/// Parses a JSON document; missing keys keep their defaults, unknown keys are errors.
ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig load_config(const std::string &path);

} // namespace clmatch::cli

#endif // CLMATCH_TOOLS_CONFIG_HPP
