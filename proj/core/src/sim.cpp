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

#include "clmatch/sim.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "clmatch/csv.hpp"
#include "clmatch/stability.hpp"

namespace clmatch {

void SimConfig::validate(int n) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("SimConfig: dt must be > 0");
    }
    if (!(t_end >= dt) || !std::isfinite(t_end)) {
        throw ConfigError("SimConfig: t_end must be >= dt");
    }
    if (stride < 1) {
        throw ConfigError("SimConfig: stride must be >= 1");
    }
    if (initial.q.size() != n || initial.qd.size() != n) {
        throw ConfigError("SimConfig: initial state has wrong size");
    }
    if (!initial.q.allFinite() || !initial.qd.allFinite()) {
        throw ConfigError("SimConfig: initial state must be finite");
    }
}

namespace {

Vector input_at(const ELSystem &sys, const ControllerSpec *spec, const State &s) {
    if (spec == nullptr) {
        return Vector::Zero(sys.inputs());
    }
    return control(*spec, s);
}

Vector accel(const ELSystem &sys, const ControllerSpec *spec, const State &s) {
    return open_loop_accel(sys, s, input_at(sys, spec, s));
}

bool finite(const State &s) { return s.q.allFinite() && s.qd.allFinite(); }

} // namespace

State step(const ELSystem &sys, const ControllerSpec *spec, const State &s, double dt) {
    if (!(dt > 0.0)) {
        throw ConfigError("step: dt must be > 0");
    }
    auto stage = [&](const State &x) {
        Vector a;
        try {
            a = accel(sys, spec, x);
        } catch (const NumericError &e) {
            throw IntegrationError(std::string("step: dynamics not evaluable: ") + e.what(), s,
                                   0.0);
        }
        if (!a.allFinite()) {
            throw IntegrationError("step: non-finite acceleration", s, 0.0);
        }
        return a;
    };
    const Vector k1v = s.qd;
    const Vector k1a = stage(s);
    const State s2{s.q + 0.5 * dt * k1v, s.qd + 0.5 * dt * k1a};
    const Vector k2a = stage(s2);
    const State s3{s.q + 0.5 * dt * s2.qd, s.qd + 0.5 * dt * k2a};
    const Vector k3a = stage(s3);
    const State s4{s.q + dt * s3.qd, s.qd + dt * k3a};
    const Vector k4a = stage(s4);

    State out;
    out.q = s.q + (dt / 6.0) * (k1v + 2.0 * s2.qd + 2.0 * s3.qd + s4.qd);
    out.qd = s.qd + (dt / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    if (!finite(out)) {
        throw IntegrationError("step: non-finite state", s, 0.0);
    }
    return out;
}

namespace {

TrajectoryRow record(const ELSystem &sys, const ControllerSpec *spec, const State &s, double t) {
    TrajectoryRow row;
    row.t = t;
    row.q = s.q;
    row.qd = s.qd;
    row.energy = total_energy(sys, s);
    if (spec == nullptr) {
        row.u = Vector::Zero(sys.inputs());
        return row;
    }
    const ControlBreakdown b = control_breakdown(*spec, s);
    row.u = b.u;
    row.hc = hc(*spec, s);
    const HcDot d = hc_dot(*spec, s, b);
    row.hc_dot = d.total;
    row.p_dot = d.p_dot;
    row.eps = d.eps;
    row.eps_bar_norm = eps_bar(*spec, s.q).norm();
    return row;
}

} // namespace

StateTrajectory run(const ELSystem &sys, const ControllerSpec *spec, const SimConfig &cfg) {
    cfg.validate(sys.dof());
    if (spec != nullptr) {
        spec->validate();
    }
    StateTrajectory traj;
    traj.closed_loop = spec != nullptr;
    traj.dt = cfg.dt;
    traj.stride = cfg.stride;
    traj.coordinate_labels = sys.coordinate_labels();

    const auto steps = static_cast<long long>(std::llround(cfg.t_end / cfg.dt));
    traj.rows.reserve(static_cast<std::size_t>(steps / cfg.stride + 2));

    State s = cfg.initial;
    long long k = 0;
    try {
        traj.rows.push_back(record(sys, spec, s, 0.0));
        for (k = 1; k <= steps; ++k) {
            s = step(sys, spec, s, cfg.dt);
            if (!sys.in_workspace(s.q)) {
                ++traj.workspace_exits;
            }
            if (k % cfg.stride == 0) {
                traj.rows.push_back(record(sys, spec, s, static_cast<double>(k) * cfg.dt));
            }
        }
    } catch (const IntegrationError &e) {
        std::ostringstream os;
        os << e.what() << " at t = " << csv::format_double(static_cast<double>(k) * cfg.dt);
        traj.error = os.str();
    } catch (const NumericError &e) {
        std::ostringstream os;
        os << e.what() << " at t = " << csv::format_double(static_cast<double>(k) * cfg.dt);
        traj.error = os.str();
    }
    return traj;
}

namespace {

// "q1[rad]" -> ("q1", "rad"); no brackets -> unit "1".
std::pair<std::string, std::string> split_label(const std::string &label) {
    const auto open = label.find('[');
    if (open == std::string::npos || label.back() != ']') {
        return {label, "1"};
    }
    return {label.substr(0, open), label.substr(open + 1, label.size() - open - 2)};
}

} // namespace

void write_trajectory_csv(std::ostream &os, const StateTrajectory &traj,
                          const std::vector<std::pair<std::string, std::string>> &header) {
    auto block = header;
    block.emplace_back("closed_loop", traj.closed_loop ? "true" : "false");
    block.emplace_back("dt", csv::format_double(traj.dt));
    block.emplace_back("stride", std::to_string(traj.stride));
    block.emplace_back("workspace_exits", std::to_string(traj.workspace_exits));
    csv::write_header_block(os, block);

    const std::size_t n = traj.coordinate_labels.size();
    const std::size_t m = traj.rows.empty() ? 0 : static_cast<std::size_t>(traj.rows.front().u.size());
    std::vector<std::string> cols{"t[s]"};
    for (const auto &l : traj.coordinate_labels) {
        const auto [name, unit] = split_label(l);
        cols.push_back(name + "[" + unit + "]");
    }
    for (const auto &l : traj.coordinate_labels) {
        const auto [name, unit] = split_label(l);
        cols.push_back(name + "_dot[" + unit + "/s]");
    }
    for (std::size_t j = 0; j < m; ++j) {
        cols.push_back("u" + std::to_string(j + 1) + "[1]");
    }
    for (const char *c : {"energy[1]", "hc[1]", "hc_dot[1/s]", "p_dot[1/s]", "eps[1/s]",
                          "eps_bar_norm[1]"}) {
        cols.emplace_back(c);
    }
    csv::write_row(os, cols);

    std::vector<double> v;
    v.reserve(cols.size());
    for (const auto &r : traj.rows) {
        v.clear();
        v.push_back(r.t);
        for (std::size_t i = 0; i < n; ++i) v.push_back(r.q(static_cast<Eigen::Index>(i)));
        for (std::size_t i = 0; i < n; ++i) v.push_back(r.qd(static_cast<Eigen::Index>(i)));
        for (std::size_t j = 0; j < m; ++j) v.push_back(r.u(static_cast<Eigen::Index>(j)));
        v.insert(v.end(), {r.energy, r.hc, r.hc_dot, r.p_dot, r.eps, r.eps_bar_norm});
        csv::write_row(os, v);
    }
    if (traj.error) {
        os << "# error = " << *traj.error << '\n';
    }
}

} // namespace clmatch
