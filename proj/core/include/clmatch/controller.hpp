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

#ifndef CLMATCH_CONTROLLER_HPP
#define CLMATCH_CONTROLLER_HPP

#include <functional>
#include <memory>

#include "clmatch/el_system.hpp"
#include "clmatch/rbf_inertia.hpp"

namespace clmatch {

/// Controlled inertia Mc(q) together with d(Mc(q) qd)/dq.
struct ControlledInertia {
    MatrixField evaluate;
    FlowField mass_flow;

    static ControlledInertia from_model(std::shared_ptr<const RBFInertiaModel> model);
    /// Exact evaluator; flow defaults to central differences of mc.
    static ControlledInertia exact(MatrixField mc, FlowField flow = {});
};

/// Matrices shared by the kinetic matching, control law and energy diagnostics at one state.
struct KineticTerms {
    Matrix M;     ///< M(q)
    Matrix Mc;    ///< Mc_hat(q)
    Matrix C;     ///< open-loop Coriolis matrix
    Matrix Cc;    ///< controlled Coriolis matrix
    Matrix A;     ///< Mc M^{-1} C - Cc
    Matrix Sigma; ///< G_perp M Mc^{-1}
    Matrix Pi;    ///< sym(A)
};

struct ControllerSpec;

/// System-specific closed form for the dissipative force R(q, qd).
using DissipationLaw =
    std::function<Matrix(const ControllerSpec &, const State &, const KineticTerms &)>;

/**
 * @brief Everything needed to evaluate the energy-shaping control law.
 *
 * kv is m x m (a scalar gain is kv * I). When no dissipation law is
 * registered, R is obtained by the generic minimal-trace completion.
 */
struct ControllerSpec {
    std::shared_ptr<const ELSystem> system;
    ControlledInertia inertia;
    ScalarField vc;
    VectorField vc_grad;
    double kp = 1.0;
    Matrix kv;
    double phi = 0.0;
    DissipationLaw dissipation;

    /// Throws ConfigError unless kp > 0, kv positive-definite, phi >= 0.
    void validate() const;
};

/// R could not be made positive semidefinite; carries the most negative eigenvalue.
class DissipationError : public NumericError {
public:
    DissipationError(const std::string &what, double min_eigenvalue)
        : NumericError(what), min_eigenvalue_(min_eigenvalue) {}
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

KineticTerms kinetic_terms(const ControllerSpec &spec, const State &s);

/// J = skew(Mc M^{-1} C - Cc).
Matrix gyroscopic_J(const ControllerSpec &spec, const State &s);
Matrix gyroscopic_J(const KineticTerms &terms);

Matrix dissipative_R(const ControllerSpec &spec, const State &s);
Matrix dissipative_R(const ControllerSpec &spec, const State &s, const KineticTerms &terms);

/**
 * @brief Generic R: Sigma R = Sigma Pi with the free block filled at minimal trace.
 *
 * In an orthonormal basis [Y N] with Y spanning the rows of Sigma, the block
 * Y^T R [Y N] is fixed by the constraint. N^T R N is set to the Schur-complement
 * minimum plus phi * I. Throws DissipationError when Y^T Pi Y is indefinite.
 */
Matrix generic_dissipation(const ControllerSpec &spec, const KineticTerms &terms);

/// Sigma (Pi - R): the rows of the kinetic matching condition left after J absorbs skew(A).
Matrix dissipation_residual(const KineticTerms &terms, const Matrix &R);

/// u_c = (G^T G)^{-1} G^T { [C - M Mc^{-1} (Cc + J + R)] qd + [dV/dq - M Mc^{-1} dVc/dq] }.
Vector shaping_control(const ControllerSpec &spec, const State &s);

/// u_d = -Kv G^T M^{-1} Mc qd.
Vector damping_control(const ControllerSpec &spec, const State &s);

/// u = u_c + u_d.
Vector control(const ControllerSpec &spec, const State &s);

/// All control-law pieces at one state, evaluated once.
struct ControlBreakdown {
    KineticTerms terms;
    Matrix J;
    Matrix R;
    Vector uc;
    Vector ud;
    Vector u;
};

ControlBreakdown control_breakdown(const ControllerSpec &spec, const State &s);

} // namespace clmatch

#endif // CLMATCH_CONTROLLER_HPP
