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

#ifndef CLMATCH_STABILITY_HPP
#define CLMATCH_STABILITY_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "clmatch/controller.hpp"
#include "clmatch/sim.hpp"

namespace clmatch {

/// Hc = 1/2 qd^T Mc_hat(q) qd + Vc(q).
double hc(const ControllerSpec &spec, const State &s);

/// Potential matching residual of the approximate design at q.
Vector eps_bar(const ControllerSpec &spec, const Vector &q);
/// Mc_hat M^{-1} G_perp^T (G_perp G_perp^T)^{-1} eps_bar.
Vector eps_hat(const ControllerSpec &spec, const Vector &q);

/// Derivative of Hc along the closed loop, split as total = p_dot + eps.
struct HcDot {
    double total = 0.0;
    double p_dot = 0.0;
    double eps = 0.0;
};

/**
 * p_dot = -qd^T R qd - qd^T Mc M^{-1} G Kv G^T M^{-1} Mc qd and eps = -qd^T eps_hat.
 * total is assembled from the same three terms grouped as in the unsplit
 * expression.
 */
HcDot hc_dot(const ControllerSpec &spec, const State &s);
HcDot hc_dot(const ControllerSpec &spec, const State &s, const ControlBreakdown &b);

struct ScanConfig {
    std::vector<std::pair<double, double>> pairs; ///< (alpha1, alpha2), both >= 0
    double rho = 0.05;                            ///< exclusion radius in ||(q - q*, qd)||
    Vector q_star;
    int window = 7; ///< local quadratic smoothing window (odd)

    /// 16 x 16 log-spaced pairs over [1e-3, 1e2] plus (0, 0).
    static std::vector<std::pair<double, double>> default_pairs();
};

struct LagrangePair {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    bool pass = false;
    /// Largest value of alpha2 V''' + alpha1 V'' + V' outside the ball (< 0 to pass).
    double worst_margin = 0.0;
    double worst_time = 0.0;
};

struct LyapunovScan {
    std::vector<LagrangePair> pairs;
    bool verdict = false;
    double rho = 0.0;
    std::vector<double> t;
    std::vector<double> v_dot;
    std::vector<double> v_ddot;
    std::vector<double> v_dddot;
    /// Samples taking part in the test: interior and outside the ball.
    std::vector<bool> tested;
};

/// Non-monotonic Lyapunov test on V = Hc using the recorded hc_dot channel.
/// Throws std::invalid_argument for fewer than 5 samples or non-uniform sampling.
LyapunovScan lagrange_scan(const StateTrajectory &traj, const ScanConfig &cfg);

void write_scan_csv(std::ostream &os, const LyapunovScan &scan,
                    const std::vector<std::pair<std::string, std::string>> &header);

struct PathIntegral {
    double value = 0.0;   ///< final accumulated integral of qd^T eps_hat
    double max_abs = 0.0; ///< empirical ||E|| bound: running max of |value|
    std::vector<double> running;
};

/// Trapezoid accumulation of qd^T eps_hat (= -eps) over the trajectory.
PathIntegral error_path_integral(const StateTrajectory &traj);

} // namespace clmatch

#endif // CLMATCH_STABILITY_HPP
