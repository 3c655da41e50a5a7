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
#include "clmatch/csv.hpp"
#include "clmatch/el_system.hpp"
#include "clmatch/linalg.hpp"

#include "../support.hpp"

namespace clmatch {
namespace {

TEST(Linalg, SolveRejectsSingular) {
    Matrix A(2, 2);
    A << 1, 2, 2, 4;
    Vector b(2);
    b << 1, 1;
    EXPECT_THROW(linalg::solve(A, b, "A"), NumericError);
    try {
        linalg::solve(A, b, "A");
    } catch (const NumericError &e) {
        EXPECT_GT(e.condition(), 1e14);
    }
}

TEST(Linalg, SolveShapeMismatch) {
    EXPECT_THROW(linalg::solve(Matrix::Identity(2, 2), Vector(Vector::Ones(3)), "A"), StructuralError);
}

TEST(Linalg, SymSkewSplit) {
    Matrix A(2, 2);
    A << 1, 2, 3, 4;
    EXPECT_TRUE((linalg::sym(A) + linalg::skew(A)).isApprox(A));
    EXPECT_DOUBLE_EQ((linalg::skew(A) + linalg::skew(A).transpose()).norm(), 0.0);
}

TEST(Linalg, LeftPseudoSolveRecoversRange) {
    Matrix G(3, 1);
    G << 0, 0, 2;
    Vector b(3);
    b << 0, 0, 4;
    EXPECT_NEAR(linalg::left_pseudo_solve(G, b)(0), 2.0, 1e-15);
}

TEST(ELSystem, RejectsBadAnnihilator) {
    ELSystemDefinition d;
    d.n = 2;
    d.m = 1;
    d.mass_matrix = [](const Vector &) { return Matrix(Matrix::Identity(2, 2)); };
    d.potential = [](const Vector &) { return 0.0; };
    d.potential_grad = [](const Vector &) { return Vector(Vector::Zero(2)); };
    d.input_matrix = Matrix(2, 1);
    d.input_matrix << 0, 1;
    d.left_annihilator = Matrix(1, 2);
    d.left_annihilator << 1, 1;
    EXPECT_THROW(ELSystem{d}, StructuralError);
    d.left_annihilator << 1, 0;
    EXPECT_NO_THROW(ELSystem{d});
    d.m = 3;
    EXPECT_THROW(ELSystem{d}, StructuralError);
}

TEST(ELSystem, RejectsRankDeficientInput) {
    ELSystemDefinition d;
    d.n = 2;
    d.m = 1;
    d.mass_matrix = [](const Vector &) { return Matrix(Matrix::Identity(2, 2)); };
    d.potential = [](const Vector &) { return 0.0; };
    d.potential_grad = [](const Vector &) { return Vector(Vector::Zero(2)); };
    d.input_matrix = Matrix::Zero(2, 1);
    d.left_annihilator = Matrix(1, 2);
    d.left_annihilator << 1, 0;
    EXPECT_THROW(ELSystem{d}, StructuralError);
}

TEST(ELSystem, CartPendulumCoriolisAtHorizontal) {
    const auto sys = cartpend::build_system({});
    State s{Vector(2), Vector(2)};
    s.q << std::numbers::pi / 2.0, 0.0;
    s.qd << 1.0, 1.0;
    Matrix expected(2, 2);
    expected << -0.5, 0.5, -1.0, 0.0;
    EXPECT_LE((coriolis(*sys, s) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ELSystem, CoriolisVanishesAtRest) {
    const auto sys = testing::random_system(3);
    State s{Vector::Ones(3), Vector::Zero(3)};
    EXPECT_EQ(coriolis(*sys, s).norm(), 0.0);
}

TEST(ELSystem, MassFlowFallsBackToDifferences) {
    const auto sys = cartpend::build_system({});
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        const State s = testing::random_state(rng, 2, 1.3, 2.0);
        const Matrix fd = finite_difference_mass_flow(
            [&](const Vector &q) { return sys->mass_matrix(q); }, s.q, s.qd);
        EXPECT_LE((sys->mass_flow(s.q, s.qd) - fd).cwiseAbs().maxCoeff(), 1e-8);
    }
}

// qd^T (Mdot - 2C) qd = 0.
TEST(ELSystem, PassivityProperty) {
    const auto sys = testing::random_system(5);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const State s = testing::random_state(rng, 3, 2.0, 2.0);
        Matrix Mdot = Matrix::Zero(3, 3);
        for (int j = 0; j < 3; ++j) {
            Vector qp = s.q, qm = s.q;
            qp(j) += 1e-6;
            qm(j) -= 1e-6;
            Mdot += (sys->mass_matrix(qp) - sys->mass_matrix(qm)) / 2e-6 * s.qd(j);
        }
        const Matrix N = Mdot - 2.0 * coriolis(*sys, s);
        EXPECT_LE(std::abs(s.qd.dot(N * s.qd)), 1e-7 * (1.0 + Mdot.norm()));
    }
}

// d/dt dL/dqd - dL/dq = G u, with every derivative of L taken by differences.
TEST(ELSystem, AccelerationSatisfiesEulerLagrange) {
    const auto sys = testing::random_system(7);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uu(-3.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const State s = testing::random_state(rng, 3, 2.0, 2.0);
        Vector u(1);
        u << uu(rng);
        const Vector qdd = open_loop_accel(*sys, s, u);

        const double h = 1e-6;
        Matrix Mdot = Matrix::Zero(3, 3);
        for (int j = 0; j < 3; ++j) {
            Vector qp = s.q, qm = s.q;
            qp(j) += h;
            qm(j) -= h;
            Mdot += (sys->mass_matrix(qp) - sys->mass_matrix(qm)) / (2.0 * h) * s.qd(j);
        }
        const auto lagrangian = [&](const Vector &q) {
            return 0.5 * s.qd.dot(sys->mass_matrix(q) * s.qd) - sys->potential(q);
        };
        const Vector dLdq = testing::fd_gradient(lagrangian, s.q, h);
        const Vector lhs = sys->mass_matrix(s.q) * qdd + Mdot * s.qd - dLdq;
        EXPECT_LE((lhs - sys->input_matrix() * u).cwiseAbs().maxCoeff(), 1e-6) << "sample " << k;
    }
}

TEST(ELSystem, TotalEnergy) {
    const auto sys = cartpend::build_system({});
    State s{Vector(2), Vector(2)};
    s.q << 0.0, 0.0;
    s.qd << 0.0, 0.0;
    EXPECT_DOUBLE_EQ(total_energy(*sys, s), 9.8);
    s.qd << 1.0, 0.0;
    EXPECT_DOUBLE_EQ(total_energy(*sys, s), 9.8 + 0.5);
}

TEST(ELSystem, StateChecks) {
    const auto sys = cartpend::build_system({});
    EXPECT_THROW(sys->check_state(State{Vector::Zero(3), Vector::Zero(2)}), StructuralError);
    Vector q(2);
    q << 1.0, 100.0;
    EXPECT_TRUE(sys->in_workspace(q));
    q << 1.6, 0.0;
    EXPECT_FALSE(sys->in_workspace(q));
}

TEST(Csv, SeventeenDigitsRoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(rng);
        EXPECT_EQ(std::stod(csv::format_double(v)), v);
    }
    EXPECT_EQ(csv::format_double(0.1), "0.10000000000000001");
}

TEST(Csv, RowsUseLfOnly) {
    std::ostringstream os;
    csv::write_header_block(os, {{"k", "v"}});
    csv::write_row(os, std::vector<double>{1.0, 2.5});
    EXPECT_EQ(os.str(), "# k = v\n1,2.5\n");
}

} // namespace
} // namespace clmatch
