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

#include "clmatch/controller.hpp"

#include <sstream>

#include "clmatch/linalg.hpp"

namespace clmatch {

ControlledInertia ControlledInertia::from_model(std::shared_ptr<const RBFInertiaModel> model) {
    if (!model) {
        throw StructuralError("ControlledInertia: null model");
    }
    ControlledInertia ci;
    ci.evaluate = [model](const Vector &q) { return model->evaluate(q); };
    ci.mass_flow = [model](const Vector &q, const Vector &qd) { return model->mass_flow(q, qd); };
    return ci;
}

ControlledInertia ControlledInertia::exact(MatrixField mc, FlowField flow) {
    ControlledInertia ci;
    ci.evaluate = mc;
    if (flow) {
        ci.mass_flow = std::move(flow);
    } else {
        ci.mass_flow = [mc](const Vector &q, const Vector &qd) {
            return finite_difference_mass_flow(mc, q, qd);
        };
    }
    return ci;
}

void ControllerSpec::validate() const {
    if (!system) {
        throw ConfigError("ControllerSpec: system is required");
    }
    if (!inertia.evaluate || !inertia.mass_flow || !vc || !vc_grad) {
        throw ConfigError("ControllerSpec: inertia, vc and vc_grad are required");
    }
    if (!(kp > 0.0)) {
        throw ConfigError("ControllerSpec: Kp must be > 0");
    }
    const int m = system->inputs();
    if (kv.rows() != m || kv.cols() != m) {
        throw ConfigError("ControllerSpec: Kv must be m x m");
    }
    if ((kv - kv.transpose()).norm() > 1e-12 * std::max(1.0, kv.norm()) ||
        !(linalg::min_eigenvalue(kv) > 0.0)) {
        throw ConfigError("ControllerSpec: Kv must be symmetric positive-definite");
    }
    if (!(phi >= 0.0)) {
        throw ConfigError("ControllerSpec: phi must be >= 0");
    }
}

KineticTerms kinetic_terms(const ControllerSpec &spec, const State &s) {
    const ELSystem &sys = *spec.system;
    sys.check_state(s);
    KineticTerms t;
    t.M = sys.mass_matrix(s.q);
    t.Mc = spec.inertia.evaluate(s.q);
    if (t.Mc.rows() != sys.dof() || t.Mc.cols() != sys.dof()) {
        throw StructuralError("kinetic_terms: controlled inertia has wrong size");
    }
    t.C = coriolis(sys, s);
    t.Cc = linalg::coriolis_from_flow(spec.inertia.mass_flow(s.q, s.qd));
    t.A = t.Mc * linalg::solve(t.M, t.C, "kinetic_terms: M(q)") - t.Cc;
    // Sigma = G_perp M Mc^{-1} = (Mc^{-1} M G_perp^T)^T, both factors symmetric.
    t.Sigma = linalg::solve(t.Mc, Matrix(t.M * sys.left_annihilator().transpose()),
                            "kinetic_terms: Mc(q)")
                  .transpose();
    t.Pi = linalg::sym(t.A);
    return t;
}

Matrix gyroscopic_J(const KineticTerms &terms) { return linalg::skew(terms.A); }

Matrix gyroscopic_J(const ControllerSpec &spec, const State &s) {
    return gyroscopic_J(kinetic_terms(spec, s));
}

Matrix generic_dissipation(const ControllerSpec &spec, const KineticTerms &terms) {
    const Eigen::Index n = terms.Pi.rows();
    const Eigen::Index p = terms.Sigma.rows();
    // Orthonormal split of R^n into row space of Sigma (Y) and its complement (N).
    Eigen::JacobiSVD<Matrix> svd(terms.Sigma.transpose(), Eigen::ComputeFullU);
    const Matrix Q = svd.matrixU();
    const Matrix Y = Q.leftCols(p);
    const Matrix N = Q.rightCols(n - p);
    const Matrix P11 = Y.transpose() * terms.Pi * Y;
    const Matrix P12 = Y.transpose() * terms.Pi * N;

    Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::sym(P11));
    const double lam_min = es.eigenvalues()(0);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (lam_min < -1e-12 * scale) {
        std::ostringstream os;
        os << "generic_dissipation: constrained block has eigenvalue " << lam_min
           << "; no positive-semidefinite R satisfies the kinetic matching condition here";
        throw DissipationError(os.str(), lam_min);
    }
    // Pseudo-inverse of the constrained block for the Schur-complement minimum.
    Matrix P11_pinv = Matrix::Zero(p, p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const double l = es.eigenvalues()(k);
        if (l > 1e-12 * scale) {
            P11_pinv += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose() / l;
        }
    }
    Matrix K = P12.transpose() * P11_pinv * P12;
    K.diagonal().array() += spec.phi;

    Matrix Rb(n, n);
    Rb.topLeftCorner(p, p) = P11;
    Rb.topRightCorner(p, n - p) = P12;
    Rb.bottomLeftCorner(n - p, p) = P12.transpose();
    Rb.bottomRightCorner(n - p, n - p) = K;
    Matrix R = linalg::sym(Q * Rb * Q.transpose());

    const double r_min = linalg::min_eigenvalue(R);
    if (r_min < -1e-10) {
        std::ostringstream os;
        os << "generic_dissipation: completion is not positive semidefinite (min eigenvalue "
           << r_min << ")";
        throw DissipationError(os.str(), r_min);
    }
    return R;
}

Matrix dissipative_R(const ControllerSpec &spec, const State &s, const KineticTerms &terms) {
    if (spec.dissipation) {
        return spec.dissipation(spec, s, terms);
    }
    return generic_dissipation(spec, terms);
}

Matrix dissipative_R(const ControllerSpec &spec, const State &s) {
    return dissipative_R(spec, s, kinetic_terms(spec, s));
}

Matrix dissipation_residual(const KineticTerms &terms, const Matrix &R) {
    return terms.Sigma * (terms.Pi - R);
}

namespace {

Vector shaping_from(const ControllerSpec &spec, const State &s, const KineticTerms &t,
                    const Matrix &J, const Matrix &R) {
    const ELSystem &sys = *spec.system;
    const Vector gVc = spec.vc_grad(s.q);
    // M Mc^{-1} applied to a stacked right-hand side [ (Cc + J + R) qd, dVc/dq ].
    Matrix rhs(sys.dof(), 2);
    rhs.col(0) = (t.Cc + J + R) * s.qd;
    rhs.col(1) = gVc;
    const Matrix shaped = t.M * linalg::solve(t.Mc, rhs, "shaping_control: Mc(q)");
    const Vector bracket =
        t.C * s.qd - shaped.col(0) + (sys.potential_grad(s.q) - shaped.col(1));
    return linalg::left_pseudo_solve(sys.input_matrix(), bracket);
}

Vector damping_from(const ControllerSpec &spec, const State &s, const KineticTerms &t) {
    const Matrix &G = spec.system->input_matrix();
    const Vector w = linalg::solve(t.M, Vector(t.Mc * s.qd), "damping_control: M(q)");
    return -spec.kv * (G.transpose() * w);
}

} // namespace

Vector shaping_control(const ControllerSpec &spec, const State &s) {
    const KineticTerms t = kinetic_terms(spec, s);
    return shaping_from(spec, s, t, gyroscopic_J(t), dissipative_R(spec, s, t));
}

Vector damping_control(const ControllerSpec &spec, const State &s) {
    spec.system->check_state(s);
    KineticTerms t;
    t.M = spec.system->mass_matrix(s.q);
    t.Mc = spec.inertia.evaluate(s.q);
    return damping_from(spec, s, t);
}

ControlBreakdown control_breakdown(const ControllerSpec &spec, const State &s) {
    ControlBreakdown b;
    b.terms = kinetic_terms(spec, s);
    b.J = gyroscopic_J(b.terms);
    b.R = dissipative_R(spec, s, b.terms);
    b.uc = shaping_from(spec, s, b.terms, b.J, b.R);
    b.ud = damping_from(spec, s, b.terms);
    b.u = b.uc + b.ud;
    return b;
}

Vector control(const ControllerSpec &spec, const State &s) { return control_breakdown(spec, s).u; }

} // namespace clmatch
