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

#ifndef CLMATCH_TESTS_SUPPORT_HPP
#define CLMATCH_TESTS_SUPPORT_HPP

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "clmatch/cartpend.hpp"
#include "clmatch/el_system.hpp"

namespace clmatch::testing {

/// Random 3-DoF, 1-input system: M(q) = B(q)^T B(q) + I, V = sum c_k cos q_k + q^T K q / 2.
inline std::shared_ptr<const ELSystem> random_system(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix B0(3, 3), B1(3, 3), B2(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            B0(i, j) = nd(rng);
            B1(i, j) = 0.5 * nd(rng);
            B2(i, j) = 0.5 * nd(rng);
        }
    }
    Vector c(3);
    c << nd(rng), nd(rng), nd(rng);
    Matrix K = Matrix::Identity(3, 3) * 0.3;

    ELSystemDefinition d;
    d.n = 3;
    d.m = 1;
    d.mass_matrix = [=](const Vector &q) {
        const Matrix B = B0 + B1 * std::sin(q(0)) + B2 * std::cos(q(1) - q(2));
        return Matrix(B.transpose() * B + Matrix::Identity(3, 3));
    };
    d.potential = [=](const Vector &q) {
        return c(0) * std::cos(q(0)) + c(1) * std::cos(q(1)) + c(2) * std::cos(q(2)) +
               0.5 * q.dot(K * q);
    };
    d.potential_grad = [=](const Vector &q) {
        Vector g(3);
        g << -c(0) * std::sin(q(0)), -c(1) * std::sin(q(1)), -c(2) * std::sin(q(2));
        return Vector(g + K * q);
    };
    d.input_matrix = Matrix::Zero(3, 1);
    d.input_matrix(2, 0) = 1.0;
    d.left_annihilator = Matrix::Zero(2, 3);
    d.left_annihilator(0, 0) = 1.0;
    d.left_annihilator(1, 1) = 1.0;
    return std::make_shared<const ELSystem>(std::move(d));
}

/// Controlled inertia of the cart-pendulum family written out entry by entry.
inline Matrix closed_form_mci(double m, double a1, double a2, double be, double c) {
    const double den = a2 * be * (a1 - m) * (a1 - m);
    Matrix Mc(2, 2);
    Mc(0, 0) = (-a1 * be + m * (be - a2 * (-c + m * m))) / den;
    Mc(0, 1) = m * (be * m - a1 * (be + a2 * (-c + m * m))) / den;
    Mc(1, 0) = Mc(0, 1);
    Mc(1, 1) = -m * (a1 * be * m - be * m * m + a1 * a1 * a2 * (-c + m * m)) / den;
    return Mc;
}

/// Controlled potential written in expanded form.
inline double closed_form_vc(const cartpend::CartPendParams &p, double s11, double s12,
                             const Vector &q) {
    const double q1 = q(0), q2 = q(1), qs = p.q2_star;
    return p.kp * (q2 * q2 / 2.0 - q2 * qs + qs * qs / 2.0 + q1 * (-q2 + qs) * s12 / s11 +
                   q1 * q1 * s12 * s12 / (2.0 * s11 * s11)) +
           p.a * std::cos(q1) / s11;
}

inline Vector fd_gradient(const std::function<double(const Vector &)> &f, const Vector &x,
                          double h = 1e-6) {
    Vector g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Vector xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        g(k) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

inline State random_state(std::mt19937_64 &rng, int n, double qmax, double vmax) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    State s{Vector(n), Vector(n)};
    for (int i = 0; i < n; ++i) {
        s.q(i) = qmax * u(rng);
        s.qd(i) = vmax * u(rng);
    }
    return s;
}

} // namespace clmatch::testing

#endif // CLMATCH_TESTS_SUPPORT_HPP
