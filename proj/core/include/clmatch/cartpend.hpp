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

#ifndef CLMATCH_CARTPEND_HPP
#define CLMATCH_CARTPEND_HPP

#include <memory>
#include <vector>

#include "clmatch/controller.hpp"
#include "clmatch/el_system.hpp"
#include "clmatch/fit.hpp"
#include "clmatch/matching.hpp"
#include "clmatch/rbf_inertia.hpp"

namespace clmatch::cartpend {

/// Cart with inverted pendulum, q = (pendulum angle, cart position).
struct CartPendParams {
    double a = 9.8; ///< g / l
    double b = 1.0; ///< 1 / l
    double c = 6.0; ///< (m + M) / (l^2 m)
    double q2_star = 0.0;
    double gamma = 0.5;
    double alpha2 = 20.0;
    double beta = 30.0;
    double kp = 0.01;
    double kv = 700.0;
    double phi = 0.002;

    /// Throws ConfigError naming the violated bound.
    void validate() const;
};

/// Half-width of the design region in q1.
inline constexpr double kRegionHalfWidth = 1.309;

std::shared_ptr<const ELSystem> build_system(const CartPendParams &p);

/// q1 positions of r centers: pi/2 - i pi/12 for r = 11, otherwise evenly
/// spaced over [-5pi/12, 5pi/12] (0 for r = 1).
std::vector<double> center_positions(int r);

/// (1 - gamma) * b * cos(5pi/12), the smallest m_i of the 11-center family.
double alpha1(const CartPendParams &p);
double s11(const CartPendParams &p);
double s12(const CartPendParams &p);

/// S with first row (-alpha1 alpha2, alpha2) for a center with m = b cos q1.
Matrix shape_matrix(const CartPendParams &p, double m);

/// Centers (q1_i, q2_star) with M_i and M_ci = S_i^{-1} M_i.
CenterSet center_family(const CartPendParams &p, int r = 11);

double vc(const CartPendParams &p, const Vector &q);
Vector vc_grad(const CartPendParams &p, const Vector &q);
Matrix vc_hessian(const CartPendParams &p, const Vector &q);

/// Closed-form R solving Sigma (Pi - R) = 0 with phi on the free direction.
/// Throws NumericError when Sigma(1,1) or Sigma(1,2) vanishes.
Matrix dissipative_R_cartpend(const CartPendParams &p, const KineticTerms &terms);
Matrix dissipative_R_cartpend(const CartPendParams &p, const ControllerSpec &spec,
                              const State &s);

/// 121 points over |q1| <= 1.309 at q2 = q2_star.
SampleGrid default_grid(const CartPendParams &p, int count = 121);
FitConfig default_fit_config(const CartPendParams &p);

ControllerSpec make_controller(const CartPendParams &p, std::shared_ptr<const ELSystem> sys,
                               ControlledInertia inertia);

struct Experiment {
    CartPendParams params;
    std::shared_ptr<const ELSystem> system;
    CenterSet centers;
    FitConfig fit_config;
    FitResult fit;
    std::shared_ptr<const RBFInertiaModel> model;
    ControllerSpec controller;
};

/// Builds the system and centers, fits Mc_hat and wires the controller.
Experiment default_experiment(const CartPendParams &p, int r = 11);
Experiment default_experiment(const CartPendParams &p, int r, const FitConfig &cfg);

/// Controller around an already fitted model.
ControllerSpec controller_for_model(const CartPendParams &p,
                                    std::shared_ptr<const RBFInertiaModel> model);

} // namespace clmatch::cartpend

#endif // CLMATCH_CARTPEND_HPP
