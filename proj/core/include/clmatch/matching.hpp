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

#ifndef CLMATCH_MATCHING_HPP
#define CLMATCH_MATCHING_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "clmatch/el_system.hpp"

namespace clmatch {

/**
 * @brief Sub-region centers with their frozen open-loop and controlled inertia.
 *
 * At each center q_i the potential matching condition is imposed with the
 * constant pair (M_i, M_ci), M_i = M(q_i).
 */
struct CenterSet {
    std::vector<Vector> centers;
    std::vector<Matrix> mass;            // M_i
    std::vector<Matrix> controlled_mass; // M_ci

    std::size_t size() const noexcept { return centers.size(); }

    /// Throws StructuralError on size mismatches and ConfigError when an M_ci is
    /// not symmetric positive-definite (the message names the offending index).
    void validate(int n) const;
};

/// One axis of a uniform sample grid. count == 1 pins the axis at lo.
struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;
};

/// Tensor-product uniform grid over configuration space, endpoints included.
struct SampleGrid {
    std::vector<GridAxis> axes;

    void validate(int n) const;
    std::size_t size() const;
    /// Points in lexicographic order with the first axis varying fastest.
    std::vector<Vector> points() const;
};

/// G_perp (dV/dq - M(q) Mc(q)^{-1} dVc/dq).
Vector pe_residual(const ELSystem &sys, const MatrixField &mc_eval, const VectorField &vc_grad,
                   const Vector &q);

/// Residual at each center using the frozen pair (M_i, M_ci).
std::vector<Vector> pe_residual_at_centers(const CenterSet &cs, const ELSystem &sys,
                                           const VectorField &vc_grad);

struct Lemma1Result {
    bool passed = true;
    double max_deviation = 0.0;
    /// Pair attaining the maximum (equal indices when r == 1).
    std::size_t worst_i = 0;
    std::size_t worst_j = 0;
};

/// max over pairs of ||G_perp (M_i M_ci^{-1} - M_j M_cj^{-1})||_F against tolerance.
Lemma1Result lemma1_check(const CenterSet &cs, const ELSystem &sys, double tolerance = 1e-9);

/// Reduced kinetic matching residual
/// G_perp M Mc^{-1} [Mc M^{-1} C - Cc - (J + R)] qd with all matrices evaluated at s.
Vector ke_residual(const ELSystem &sys, const State &s, const Matrix &mc, const Matrix &cc,
                   const Matrix &J, const Matrix &R);

/// Same residual in the unreduced form
/// G_perp [(C - M Mc^{-1} Cc - M Mc^{-1} (J + R)) qd]; agrees with ke_residual up to roundoff.
Vector ke_residual_unreduced(const ELSystem &sys, const State &s, const Matrix &mc,
                             const Matrix &cc, const Matrix &J, const Matrix &R);

struct MatchingSample {
    Vector q;
    Vector residual;
    double norm = 0.0;
};

/// Potential matching residual over a sample grid.
struct MatchingReport {
    std::vector<MatchingSample> samples;
    double max_norm = 0.0;
    double mean_norm = 0.0;
    double rms_norm = 0.0;
    /// Consistency of the center set, when one was involved.
    bool lemma1_passed = true;
    double lemma1_deviation = 0.0;
};

MatchingReport matching_report(const ELSystem &sys, const MatrixField &mc_eval,
                               const VectorField &vc_grad, const std::vector<Vector> &points);

/// CSV with columns q1..qn, eps1..eps_{n-m}, norm.
void write_matching_csv(std::ostream &os, const MatchingReport &report,
                        const std::vector<std::pair<std::string, std::string>> &header);

} // namespace clmatch

#endif // CLMATCH_MATCHING_HPP
