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

#ifndef CLMATCH_SIM_HPP
#define CLMATCH_SIM_HPP

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clmatch/controller.hpp"
#include "clmatch/el_system.hpp"

namespace clmatch {

struct SimConfig {
    double t_end = 10.0;
    double dt = 1e-3;
    State initial;
    /// Record every stride-th step (step 0 always recorded).
    int stride = 1;

    void validate(int n) const;
};

/// One recorded sample. Controller diagnostics are zero for open-loop runs.
struct TrajectoryRow {
    double t = 0.0;
    Vector q;
    Vector qd;
    Vector u;
    double energy = 0.0;       ///< open-loop total energy
    double hc = 0.0;           ///< 1/2 qd^T Mc_hat qd + Vc
    double hc_dot = 0.0;       ///< d/dt Hc along the closed loop
    double p_dot = 0.0;        ///< dissipative part of hc_dot
    double eps = 0.0;          ///< matching-error part of hc_dot
    double eps_bar_norm = 0.0; ///< ||potential matching residual||
};

struct StateTrajectory {
    std::vector<TrajectoryRow> rows;
    bool closed_loop = false;
    double dt = 0.0;
    int stride = 1;
    /// Number of integration steps that ended outside the declared workspace.
    std::size_t workspace_exits = 0;
    /// Set when integration stopped early; rows hold the partial result.
    std::optional<std::string> error;
    std::vector<std::string> coordinate_labels;

    bool ok() const noexcept { return !error.has_value(); }
};

/// Non-finite state produced during integration.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string &what, State last_finite, double t)
        : std::runtime_error(what), last_(std::move(last_finite)), t_(t) {}
    const State &last_finite() const noexcept { return last_; }
    double time() const noexcept { return t_; }

private:
    State last_;
    double t_;
};

/// One classical RK4 step of qdd = open_loop_accel(sys, s, u(s)); u = 0 when spec is null.
State step(const ELSystem &sys, const ControllerSpec *spec, const State &s, double dt);

/// Fixed-step integration from cfg.initial to cfg.t_end. Never throws on
/// integration failure: the partial trajectory is returned with error set.
StateTrajectory run(const ELSystem &sys, const ControllerSpec *spec, const SimConfig &cfg);

/// Header row with units, then one row per sample; an "# error = ..." line ends
/// a partial trajectory.
void write_trajectory_csv(std::ostream &os, const StateTrajectory &traj,
                          const std::vector<std::pair<std::string, std::string>> &header);

} // namespace clmatch

#endif // CLMATCH_SIM_HPP
