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

#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "clmatch/cartpend.hpp"
#include "clmatch/controller.hpp"
#include "clmatch/linalg.hpp"
#include "clmatch/matching.hpp"

#include "../support.hpp"

namespace clmatch {
namespace {

using cartpend::CartPendParams;
constexpr double kPi = std::numbers::pi;

TEST(CartPend, MassMatrixSpecialValues) {
    const auto sys = cartpend::build_system({});
    Vector q = Vector::Zero(2);
    Matrix M0(2, 2);
    M0 << 1, 1, 1, 6;
    EXPECT_TRUE(sys->mass_matrix(q).isApprox(M0));
    q(0) = kPi / 2.0;
    EXPECT_NEAR(sys->mass_matrix(q)(0, 1), 0.0, 1e-16);
    for (double q1 = -1.5; q1 <= 1.5; q1 += 0.1) {
        q(0) = q1;
        EXPECT_NEAR(sys->mass_matrix(q).determinant(), 6.0 - std::cos(q1) * std::cos(q1), 1e-13);
    }
}

TEST(CartPend, ParameterValidation) {
    CartPendParams p;
    p.gamma = 1.5;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.beta = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.c = 0.5;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(CartPend, CenterPositions) {
    const auto c = cartpend::center_positions(11);
    ASSERT_EQ(c.size(), 11u);
    EXPECT_DOUBLE_EQ(c.front(), kPi / 2.0 - kPi / 12.0);
    EXPECT_NEAR(c.back(), -5.0 * kPi / 12.0, 1e-15);
    EXPECT_EQ(cartpend::center_positions(1), std::vector<double>{0.0});
    EXPECT_NEAR(cartpend::center_positions(5)[2], 0.0, 1e-15);
}

TEST(CartPend, Alpha1FromGamma) {
    EXPECT_NEAR(cartpend::alpha1({}), 0.5 * std::cos(5.0 * kPi / 12.0), 1e-15);
    EXPECT_NEAR(cartpend::alpha1({}), 0.1294, 1e-4);
}

TEST(CartPend, CenterFamilyMatchesClosedForm) {
    const CartPendParams p;
    const CenterSet cs = cartpend::center_family(p);
    ASSERT_EQ(cs.size(), 11u);
    const double a1 = cartpend::alpha1(p);
    for (std::size_t i = 0; i < 11; ++i) {
        const double m = std::cos(kPi / 2.0 - static_cast<double>(i + 1) * kPi / 12.0);
        const Matrix oracle = testing::closed_form_mci(m, a1, p.alpha2, p.beta, p.c);
        EXPECT_LE((cs.controlled_mass[i] - oracle).cwiseAbs().maxCoeff(),
                  1e-12 * oracle.cwiseAbs().maxCoeff())
            << "center " << i + 1;
        EXPECT_GT(linalg::min_eigenvalue(cs.controlled_mass[i]), 0.0) << "center " << i + 1;
    }
}

TEST(CartPend, Lemma1HoldsAcrossShapeParameters) {
    for (double g : {0.1, 0.5, 0.9}) {
        for (double a2 : {1.0, 20.0}) {
            for (double be : {5.0, 30.0}) {
                CartPendParams p;
                p.gamma = g;
                p.alpha2 = a2;
                p.beta = be;
                CenterSet cs;
                try {
                    cs = cartpend::center_family(p);
                } catch (const ConfigError &) {
                    continue; // some M_ci not positive-definite for this shape
                }
                const auto sys = cartpend::build_system(p);
                // edge centers with m close to alpha1 make S ill-conditioned
                const double cond = linalg::condition_number(cartpend::shape_matrix(
                    p, p.b * std::cos(cs.centers.front()(0))));
                EXPECT_LE(lemma1_check(cs, *sys).max_deviation, 1e-14 * cond);
                for (std::size_t i = 0; i < cs.size(); ++i) {
                    const Matrix row = sys->left_annihilator() * cs.mass[i] *
                                       linalg::inverse(cs.controlled_mass[i], "Mc");
                    EXPECT_NEAR(row(0, 0), cartpend::s11(p), 1e-10);
                    EXPECT_NEAR(row(0, 1), cartpend::s12(p), 1e-10);
                }
            }
        }
    }
}

TEST(CartPend, VcMatchesExpandedForm) {
    const CartPendParams p;
    std::mt19937_64 rng(2);
    for (int k = 0; k < 50; ++k) {
        const State s = testing::random_state(rng, 2, 1.3, 0.0);
        EXPECT_NEAR(cartpend::vc(p, s.q),
                    testing::closed_form_vc(p, cartpend::s11(p), cartpend::s12(p), s.q), 1e-12);
    }
}

TEST(CartPend, VcGradientAndHessianAgainstDifferences) {
    CartPendParams p;
    p.q2_star = 0.7;
    std::mt19937_64 rng(3);
    const auto f = [&](const Vector &q) { return cartpend::vc(p, q); };
    for (int k = 0; k < 100; ++k) {
        const State s = testing::random_state(rng, 2, 1.5, 0.0);
        const Vector g = cartpend::vc_grad(p, s.q);
        EXPECT_LE((g - testing::fd_gradient(f, s.q)).cwiseAbs().maxCoeff(), 1e-8);
        Matrix H(2, 2);
        for (int j = 0; j < 2; ++j) {
            Vector qp = s.q, qm = s.q;
            qp(j) += 1e-6;
            qm(j) -= 1e-6;
            H.col(j) = (cartpend::vc_grad(p, qp) - cartpend::vc_grad(p, qm)) / 2e-6;
        }
        EXPECT_LE((cartpend::vc_hessian(p, s.q) - H).cwiseAbs().maxCoeff(), 1e-7);
    }
    Vector qs(2);
    qs << 0.0, p.q2_star;
    EXPECT_EQ(cartpend::vc_grad(p, qs).norm(), 0.0);
}

TEST(CartPend, VcHessianPositiveDefiniteOnRegion) {
    const CartPendParams p;
    for (const auto &q : cartpend::default_grid(p).points()) {
        const Matrix H = cartpend::vc_hessian(p, q);
        EXPECT_GT(H(0, 0), 0.0);
        EXPECT_GT(H.determinant(), 0.0);
    }
}

// -a sin q1 = s11 dVc/dq1 + s12 dVc/dq2 at every q.
TEST(CartPend, PotentialMatchingIdentity) {
    CartPendParams p;
    p.q2_star = -0.4;
    std::mt19937_64 rng(4);
    for (int k = 0; k < 100; ++k) {
        State s = testing::random_state(rng, 2, 1.5, 0.0);
        s.q(1) *= 5.0;
        const Vector g = cartpend::vc_grad(p, s.q);
        EXPECT_NEAR(-p.a * std::sin(s.q(0)), cartpend::s11(p) * g(0) + cartpend::s12(p) * g(1),
                    1e-12);
    }
}

TEST(Matching, ResidualVanishesAtCenters) {
    const CartPendParams p;
    const auto sys = cartpend::build_system(p);
    const CenterSet cs = cartpend::center_family(p);
    const auto res = pe_residual_at_centers(cs, *sys, [&](const Vector &q) {
        return cartpend::vc_grad(p, q);
    });
    for (const auto &r : res) {
        EXPECT_LE(r.norm(), 1e-12);
    }
}

TEST(Matching, Lemma1DetectsInconsistentCenter) {
    const CartPendParams p;
    const auto sys = cartpend::build_system(p);
    CenterSet cs = cartpend::center_family(p);
    cs.controlled_mass[4](1, 1) *= 1.5;
    const auto r = lemma1_check(cs, *sys, 1e-9);
    EXPECT_FALSE(r.passed);
    EXPECT_TRUE(r.worst_i == 4 || r.worst_j == 4);
}

TEST(Matching, CenterSetValidationNamesIndex) {
    CenterSet cs = cartpend::center_family({});
    cs.controlled_mass[2] = -cs.controlled_mass[2];
    try {
        cs.validate(2);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
    }
}

TEST(Matching, ExactMatchingHasZeroResidual) {
    const auto sys = testing::random_system(9);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 10; ++k) {
        const State s = testing::random_state(rng, 3, 2.0, 0.0);
        const Vector r = pe_residual(
            *sys, [&](const Vector &q) { return sys->mass_matrix(q); },
            [&](const Vector &q) { return sys->potential_grad(q); }, s.q);
        EXPECT_LE(r.norm(), 1e-12);
    }
}

TEST(Matching, KineticResidualForms) {
    const CartPendParams p;
    const auto sys = cartpend::build_system(p);
    const CenterSet cs = cartpend::center_family(p);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 20; ++k) {
        const State s = testing::random_state(rng, 2, 1.2, 2.0);
        const Matrix Mc = cs.controlled_mass[5];
        const Matrix Cc = Matrix::Zero(2, 2);
        Matrix J(2, 2);
        J << 0, 0.3, -0.3, 0;
        const Matrix R = Matrix::Identity(2, 2) * 0.1;
        const Vector a = ke_residual(*sys, s, Mc, Cc, J, R);
        const Vector b = ke_residual_unreduced(*sys, s, Mc, Cc, J, R);
        EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Matching, GridOrdering) {
    SampleGrid g;
    g.axes = {GridAxis{0.0, 1.0, 3}, GridAxis{5.0, 6.0, 2}};
    const auto pts = g.points();
    ASSERT_EQ(pts.size(), 6u);
    EXPECT_DOUBLE_EQ(pts[1](0), 0.5);
    EXPECT_DOUBLE_EQ(pts[1](1), 5.0);
    EXPECT_DOUBLE_EQ(pts[3](1), 6.0);
    g.axes[0].count = 0;
    EXPECT_THROW(g.validate(2), ConfigError);
}

TEST(Matching, ReportCsvColumns) {
    const CartPendParams p;
    const auto sys = cartpend::build_system(p);
    const auto cs = cartpend::center_family(p);
    const auto rep = matching_report(
        *sys, [&](const Vector &) { return cs.controlled_mass[5]; },
        [&](const Vector &q) { return cartpend::vc_grad(p, q); },
        cartpend::default_grid(p, 5).points());
    ASSERT_EQ(rep.samples.size(), 5u);
    EXPECT_NEAR(rep.samples[2].norm, 0.0, 1e-12); // q1 = 0 is the frozen center
    std::ostringstream os;
    write_matching_csv(os, rep, {{"note", "x"}});
    const std::string text = os.str();
    EXPECT_EQ(text.rfind("# note = x\nq1,q2,eps1,norm\n", 0), 0u) << text;
    EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(CartPend, DissipationClosedFormSolvesConstraint) {
    const CartPendParams p;
    const auto sys = cartpend::build_system(p);
    const CenterSet cs = cartpend::center_family(p);
    const auto mc = [&](const Vector &q) {
        const Matrix S = cartpend::shape_matrix(p, p.b * std::cos(q(0)));
        return Matrix(linalg::sym(linalg::solve(S, sys->mass_matrix(q), "S")));
    };
    const ControllerSpec spec = cartpend::make_controller(p, sys, ControlledInertia::exact(mc));
    std::mt19937_64 rng(8);
    for (int k = 0; k < 100; ++k) {
        const State s = testing::random_state(rng, 2, 1.3, 2.0);
        const KineticTerms t = kinetic_terms(spec, s);
        const Matrix R = cartpend::dissipative_R_cartpend(p, t);
        EXPECT_LE((R - R.transpose()).norm(), 0.0);
        EXPECT_LE(dissipation_residual(t, R).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(CartPend, DissipationAtRest) {
    CartPendParams p;
    const auto sys = cartpend::build_system(p);
    const auto cs = cartpend::center_family(p);
    const auto spec = cartpend::make_controller(
        p, sys, ControlledInertia::exact([&](const Vector &) { return cs.controlled_mass[3]; }));
    State s{Vector(2), Vector::Zero(2)};
    s.q << 0.2, 0.0;
    const KineticTerms t = kinetic_terms(spec, s);
    const Matrix R = cartpend::dissipative_R_cartpend(p, t);
    // phi v v^T with v = (s12 / s11, -1)
    Vector v(2);
    v << t.Sigma(0, 1) / t.Sigma(0, 0), -1.0;
    EXPECT_LE((R - p.phi * v * v.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_GE(linalg::min_eigenvalue(R), -1e-15);
    EXPECT_NEAR(R.determinant(), 0.0, 1e-15);

    p.phi = 0.0;
    EXPECT_EQ(cartpend::dissipative_R_cartpend(p, t).norm(), 0.0);
}

TEST(CartPend, DissipationRejectsVanishingSigma) {
    KineticTerms t;
    t.Sigma = Matrix(1, 2);
    t.Sigma << 1.0, 0.0;
    t.Pi = Matrix::Zero(2, 2);
    EXPECT_THROW(cartpend::dissipative_R_cartpend({}, t), NumericError);
}

} // namespace
} // namespace clmatch
