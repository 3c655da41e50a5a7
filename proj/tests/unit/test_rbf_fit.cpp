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

#include <sstream>

#include "clmatch/cartpend.hpp"
#include "clmatch/fit.hpp"
#include "clmatch/linalg.hpp"
#include "clmatch/rbf_inertia.hpp"

#include "../support.hpp"

namespace clmatch {
namespace {

Matrix sym_random(std::mt19937_64 &rng, int n) {
    std::normal_distribution<double> nd;
    Matrix A(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            A(i, j) = nd(rng);
        }
    }
    return linalg::sym(A);
}

RBFInertiaModel random_model(std::uint64_t seed, int n, int r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.3, 2.0);
    std::vector<Vector> c;
    std::vector<double> w;
    std::vector<Matrix> W, B;
    for (int i = 0; i < r; ++i) {
        c.push_back(Vector::Random(n));
        w.push_back(u(rng));
        W.push_back(sym_random(rng, n));
        B.push_back(sym_random(rng, n));
    }
    return {c, w, W, B};
}

TEST(RBFInertia, SingleCenterInterpolates) {
    Matrix W(2, 2);
    W << 2, 0.5, 0.5, 1;
    const RBFInertiaModel m({Vector::Zero(2)}, {1.0}, {W}, {Matrix::Zero(2, 2)});
    EXPECT_EQ(m.evaluate(Vector::Zero(2)), W);
    EXPECT_DOUBLE_EQ(m.basis(0, Vector::Zero(2)), 1.0);
}

TEST(RBFInertia, FarFieldReturnsBias) {
    Matrix W = Matrix::Identity(2, 2), B = 3.0 * Matrix::Identity(2, 2);
    const RBFInertiaModel m({Vector::Zero(2)}, {50.0}, {W}, {B});
    Vector q(2);
    q << 1.0, 1.0;
    EXPECT_LE((m.evaluate(q) - B).norm(), 1e-300);
}

TEST(RBFInertia, ActiveCoordinatesIgnoreOthers) {
    const RBFInertiaModel m({Vector::Zero(2)}, {1.0}, {Matrix::Identity(2, 2)},
                            {Matrix::Zero(2, 2)}, {0});
    Vector a(2), b(2);
    a << 0.3, 0.0;
    b << 0.3, 17.0;
    EXPECT_EQ(m.evaluate(a), m.evaluate(b));
}

TEST(RBFInertia, RejectsInvalidParameters) {
    const Vector c = Vector::Zero(2);
    const Matrix I = Matrix::Identity(2, 2);
    Matrix A(2, 2);
    A << 1, 2, 0, 1;
    EXPECT_THROW(RBFInertiaModel({c}, {0.0}, {I}, {I}), std::invalid_argument);
    EXPECT_THROW(RBFInertiaModel({c}, {1.0}, {A}, {I}), std::invalid_argument);
    EXPECT_THROW(RBFInertiaModel({c}, {1.0, 2.0}, {I}, {I}), std::invalid_argument);
    EXPECT_THROW(RBFInertiaModel({c}, {1.0}, {I}, {I}, {3}), std::invalid_argument);
}

TEST(RBFInertia, EvaluateIsSymmetric) {
    const auto m = random_model(1, 3, 4);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) {
        const Matrix E = m.evaluate(testing::random_state(rng, 3, 2.0, 0.0).q);
        EXPECT_EQ(E, E.transpose());
    }
}

TEST(RBFInertia, MassFlowAgainstDifferences) {
    const auto m = random_model(2, 3, 5);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 100; ++k) {
        const State s = testing::random_state(rng, 3, 1.5, 2.0);
        const Matrix fd = finite_difference_mass_flow(
            [&](const Vector &q) { return m.evaluate(q); }, s.q, s.qd);
        EXPECT_LE((m.mass_flow(s.q, s.qd) - fd).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(RBFInertia, CoriolisSpecialCases) {
    const auto m = random_model(3, 2, 3);
    EXPECT_EQ(m.coriolis(State{Vector::Ones(2), Vector::Zero(2)}).norm(), 0.0);
    const RBFInertiaModel flat({Vector::Zero(2)}, {1.0}, {Matrix::Zero(2, 2)},
                               {Matrix::Identity(2, 2)});
    EXPECT_EQ(flat.coriolis(State{Vector::Ones(2), Vector::Ones(2)}).norm(), 0.0);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        const State s = testing::random_state(rng, 2, 1.5, 2.0);
        const Matrix F = finite_difference_mass_flow(
            [&](const Vector &q) { return m.evaluate(q); }, s.q, s.qd);
        EXPECT_LE((m.coriolis(s) - (F - 0.5 * F.transpose())).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(RBFInertia, SaveLoadIsBitExact) {
    const auto m = random_model(4, 2, 6);
    std::ostringstream a;
    m.save(a);
    std::istringstream in(a.str());
    const RBFInertiaModel back = RBFInertiaModel::load(in);
    std::ostringstream b;
    back.save(b);
    EXPECT_EQ(a.str(), b.str());
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_EQ(m.widths()[i], back.widths()[i]);
        EXPECT_EQ(m.weights()[i], back.weights()[i]);
        EXPECT_EQ(m.biases()[i], back.biases()[i]);
        EXPECT_EQ(m.centers()[i], back.centers()[i]);
    }
}

TEST(RBFInertia, LoadRejectsCorruptDocuments) {
    for (const char *doc : {"", "{", "{\"format\": \"other\"}", "[1, 2]",
                            "{\"format\": \"clmatch.rbf_inertia/1\", \"n\": 2, \"r\": 1}"}) {
        std::istringstream in(doc);
        EXPECT_THROW(RBFInertiaModel::load(in), ModelIoError) << doc;
    }
    EXPECT_THROW(RBFInertiaModel::load_file("/nonexistent/model.json"), ModelIoError);
}

// Constant inertia with the exact controlled pair: nothing to approximate.
TEST(Fit, ExactPairNeedsNoFitting) {
    ELSystemDefinition d;
    d.n = 2;
    d.m = 1;
    Matrix M(2, 2);
    M << 2.0, 0.5, 0.5, 1.0;
    d.mass_matrix = [M](const Vector &) { return M; };
    d.potential = [](const Vector &q) { return std::cos(q(0)); };
    d.potential_grad = [](const Vector &q) {
        Vector g(2);
        g << -std::sin(q(0)), 0.0;
        return g;
    };
    d.input_matrix = Matrix(2, 1);
    d.input_matrix << 0, 1;
    d.left_annihilator = Matrix(1, 2);
    d.left_annihilator << 1, 0;
    const ELSystem sys(d);

    CenterSet cs;
    // one center: W = 0 reproduces Mc = M everywhere
    cs.centers.push_back(Vector::Zero(2));
    cs.mass.push_back(M);
    cs.controlled_mass.push_back(M);
    FitConfig cfg;
    cfg.grid.axes = {GridAxis{-1.0, 1.0, 21}, GridAxis{0.0, 0.0, 1}};
    cfg.active_coords = {0};
    const FitResult r = fit(cs, sys, [&](const Vector &q) { return sys.potential_grad(q); }, cfg);
    EXPECT_LE(r.after.max_norm, 1e-9);
    EXPECT_TRUE(r.converged());
}

TEST(Fit, InitialWidths) {
    const auto cs = cartpend::center_family({});
    const auto grid = cartpend::default_grid({});
    const auto w = initial_widths(cs, grid, {0});
    for (double e : w) {
        EXPECT_NEAR(e, 1.0 / (2.0 * std::numbers::pi / 12.0), 1e-12);
    }
    const auto one = initial_widths(cartpend::center_family({}, 1), grid, {0});
    EXPECT_NEAR(one[0], 1.0 / (2.0 * 2.618), 1e-12);
}

TEST(Fit, RejectsInconsistentCenters) {
    const cartpend::CartPendParams p;
    auto cs = cartpend::center_family(p);
    cs.controlled_mass[0] *= 2.0;
    const auto sys = cartpend::build_system(p);
    EXPECT_THROW(fit(cs, *sys, [&](const Vector &q) { return cartpend::vc_grad(p, q); },
                     cartpend::default_fit_config(p)),
                 ConfigError);
}

TEST(Fit, SingleCenterResidualGrowsAwayFromCenter) {
    const cartpend::CartPendParams p;
    const auto ex = cartpend::default_experiment(p, 1);
    const auto &s = ex.fit.after.samples;
    const std::size_t mid = s.size() / 2;
    EXPECT_NEAR(s[mid].q(0), 0.0, 1e-15);
    EXPECT_LE(s[mid].norm, 1e-3 * ex.fit.after.max_norm);
    // the outermost sample sits where the stalled fit leaves Mc_hat nearly singular
    for (std::size_t k = mid; k + 2 < s.size(); ++k) {
        EXPECT_LE(s[k].norm, s[k + 1].norm + 1e-12) << "q1 = " << s[k].q(0);
    }
}

TEST(Fit, CartPendulumModelIsPositiveDefiniteAndAnchored) {
    const cartpend::CartPendParams p;
    const auto ex = cartpend::default_experiment(p, 11);
    EXPECT_LT(ex.fit.after.max_norm, ex.fit.before.max_norm);
    EXPECT_GT(ex.fit.min_grid_eigenvalue, 0.0);
    for (const auto &q : ex.fit_config.grid.points()) {
        EXPECT_GT(linalg::min_eigenvalue(ex.model->evaluate(q)), 0.0);
    }
    for (std::size_t i = 0; i < ex.centers.size(); ++i) {
        const Matrix &Mci = ex.centers.controlled_mass[i];
        EXPECT_LE((ex.model->evaluate(ex.centers.centers[i]) - Mci).norm(), 1e-2 * Mci.norm())
            << "center " << i + 1;
    }
    // W_i + B_i = M_ci
    for (std::size_t i = 0; i < ex.centers.size(); ++i) {
        EXPECT_LE((ex.model->weights()[i] + ex.model->biases()[i] -
                   ex.centers.controlled_mass[i]).norm(),
                  1e-12);
    }
}

TEST(Fit, Deterministic) {
    const cartpend::CartPendParams p;
    std::ostringstream a, b;
    cartpend::default_experiment(p, 5).model->save(a);
    cartpend::default_experiment(p, 5).model->save(b);
    EXPECT_EQ(a.str(), b.str());
}

} // namespace
} // namespace clmatch
