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

#ifndef CLMATCH_FIT_HPP
#define CLMATCH_FIT_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "clmatch/el_system.hpp"
#include "clmatch/matching.hpp"
#include "clmatch/rbf_inertia.hpp"

namespace clmatch {

/// Settings for fitting an RBFInertiaModel to the potential matching condition.
struct FitConfig {
    SampleGrid grid;
    int max_iterations = 2000;
    /// Initial Levenberg-Marquardt damping, relative to max diag(J^T J).
    double initial_damping = 1e-3;
    /// Weight of the quadratic penalty on lambda_min(Mc_hat(q_k)) below pd_floor.
    double pd_penalty_weight = 1e4;
    double pd_floor = 1e-4;
    /// Converged once the maximum grid residual norm is at or below this value.
    double residual_tolerance = 1e-9;
    /// Weight of the anchoring term sum_i ||Mc_hat(q_i) - M_ci||_F^2 (0 disables it).
    double center_weight = 1.0;
    /// Tie-breaking ridge on sum_i ||W_i||_F^2.
    double ridge = 1e-8;
    /// Coordinates entering the RBF distance (empty: all).
    std::vector<int> active_coords;

    void validate(int n) const;
};

enum class FitStatus {
    Converged,     ///< max grid residual <= residual_tolerance
    Stalled,       ///< local minimum reached above the tolerance
    MaxIterations, ///< iteration budget exhausted; best-so-far returned
};

const char *to_string(FitStatus s);

struct FitResult {
    RBFInertiaModel model;
    MatchingReport before;
    MatchingReport after;
    FitStatus status = FitStatus::MaxIterations;
    int iterations = 0;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    /// Smallest eigenvalue of Mc_hat over the grid after fitting.
    double min_grid_eigenvalue = 0.0;

    bool converged() const noexcept { return status == FitStatus::Converged; }
    /// Set when the iteration budget ran out.
    bool warning() const noexcept { return status == FitStatus::MaxIterations; }
};

/// Mc_hat lost positive-definiteness on grid points after fitting.
class FitError : public std::runtime_error {
public:
    FitError(const std::string &what, std::vector<Vector> violating)
        : std::runtime_error(what), violating_(std::move(violating)) {}
    const std::vector<Vector> &violating_points() const noexcept { return violating_; }

private:
    std::vector<Vector> violating_;
};

/// eps_i = 1 / (2 d_i), d_i the distance to the nearest other center; for a
/// single center, d is the diameter of the grid box over the active coordinates.
std::vector<double> initial_widths(const CenterSet &cs, const SampleGrid &grid,
                                   const std::vector<int> &active_coords);

/**
 * @brief Fits widths and weights of Mc_hat to the potential matching condition.
 *
 * Damped least squares over {log eps_i, vech(W_i)} with B_i = M_ci - W_i
 * eliminated, minimizing the summed squared residual
 * G_perp (dV/dq - M Mc_hat^{-1} dVc/dq) over the grid, plus an anchoring term
 * pulling Mc_hat(q_i) towards M_ci, a penalty keeping lambda_min(Mc_hat) above
 * pd_floor, and the ridge term.
 *
 * Throws ConfigError when cs fails lemma1_check and FitError when the result is
 * not positive-definite on the grid.
 */
FitResult fit(const CenterSet &cs, const ELSystem &sys, const VectorField &vc_grad,
              const FitConfig &cfg);

} // namespace clmatch

#endif // CLMATCH_FIT_HPP
