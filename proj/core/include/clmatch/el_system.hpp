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

#ifndef CLMATCH_EL_SYSTEM_HPP
#define CLMATCH_EL_SYSTEM_HPP

#include <optional>
#include <string>
#include <vector>

#include "clmatch/types.hpp"

namespace clmatch {

/// Axis-aligned box of admissible configurations. Infinite bounds are allowed.
struct Workspace {
    Vector lower;
    Vector upper;

    bool contains(const Vector &q) const;
};

/**
 * @brief Inputs for constructing an ELSystem.
 *
 * M, V and grad V are required. mass_flow (d(M(q) qd)/dq, column j being the
 * partial derivative with respect to q_j) may be left empty, in which case it
 * is obtained by central differences of mass_matrix with step 1e-6.
 */
struct ELSystemDefinition {
    int n = 0;
    int m = 0;
    MatrixField mass_matrix;
    FlowField mass_flow;
    ScalarField potential;
    VectorField potential_grad;
    Matrix input_matrix;
    Matrix left_annihilator;
    std::optional<Workspace> workspace;
    /// Channel labels with units, e.g. "q1[rad]". Defaults to "q1".."qn".
    std::vector<std::string> coordinate_labels;
};

/**
 * @brief Underactuated Euler-Lagrange system M(q) qdd + C(q, qd) qd + dV/dq = G u.
 *
 * Immutable after construction; every accessor is a pure function of its
 * arguments, so a single instance may be shared across threads.
 */
class ELSystem {
public:
    /// Validates dimensions, G_perp G = 0 and the ranks of G and G_perp.
    /// Throws StructuralError on violation.
    explicit ELSystem(ELSystemDefinition def);

    int dof() const noexcept { return def_.n; }
    int inputs() const noexcept { return def_.m; }

    Matrix mass_matrix(const Vector &q) const;
    Matrix mass_flow(const Vector &q, const Vector &qd) const;
    double potential(const Vector &q) const;
    Vector potential_grad(const Vector &q) const;

    const Matrix &input_matrix() const noexcept { return def_.input_matrix; }
    const Matrix &left_annihilator() const noexcept { return def_.left_annihilator; }

    bool has_analytic_mass_flow() const noexcept { return static_cast<bool>(def_.mass_flow); }
    const std::optional<Workspace> &workspace() const noexcept { return def_.workspace; }
    /// True when no workspace is declared or q lies inside it.
    bool in_workspace(const Vector &q) const;

    const std::vector<std::string> &coordinate_labels() const noexcept {
        return def_.coordinate_labels;
    }

    void check_state(const State &s) const;
    void check_configuration(const Vector &q) const;

private:
    ELSystemDefinition def_;
};

/// Central-difference d(M(q) qd)/dq.
Matrix finite_difference_mass_flow(const MatrixField &mass_matrix, const Vector &q,
                                   const Vector &qd, double step = 1e-6);

/// C(q, qd) = d(M qd)/dq - 1/2 (d(M qd)/dq)^T.
Matrix coriolis(const ELSystem &sys, const State &s);

/// qdd = M^{-1} (G u - C qd - dV/dq). Throws NumericError when M(q) is singular.
Vector open_loop_accel(const ELSystem &sys, const State &s, const Vector &u);

/// 1/2 qd^T M(q) qd + V(q).
double total_energy(const ELSystem &sys, const State &s);

} // namespace clmatch

#endif // CLMATCH_EL_SYSTEM_HPP
