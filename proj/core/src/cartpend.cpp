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

#include "clmatch/cartpend.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "clmatch/linalg.hpp"

namespace clmatch::cartpend {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char *what) {
    if (!ok) {
        throw ConfigError(std::string("CartPendParams: ") + what);
    }
}

} // namespace

void CartPendParams::validate() const {
    require(a > 0.0 && std::isfinite(a), "a must be > 0");
    require(b > 0.0 && std::isfinite(b), "b must be > 0");
    require(c > 0.0 && std::isfinite(c), "c must be > 0");
    require(c > b * b, "c must exceed b^2 so that M(q) is positive-definite");
    require(std::isfinite(q2_star), "q2_star must be finite");
    require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    require(alpha2 > 0.0 && std::isfinite(alpha2), "alpha2 must be > 0");
    require(beta > 0.0 && std::isfinite(beta), "beta must be > 0");
    require(kp > 0.0 && std::isfinite(kp), "Kp must be > 0");
    require(kv > 0.0 && std::isfinite(kv), "Kv must be > 0");
    require(phi >= 0.0 && std::isfinite(phi), "phi must be >= 0");
}

std::shared_ptr<const ELSystem> build_system(const CartPendParams &p) {
    p.validate();
    ELSystemDefinition d;
    d.n = 2;
    d.m = 1;
    const double a = p.a;
    const double b = p.b;
    const double c = p.c;
    d.mass_matrix = [b, c](const Vector &q) {
        Matrix M(2, 2);
        const double bc = b * std::cos(q(0));
        M << 1.0, bc, bc, c;
        return M;
    };
    d.mass_flow = [b](const Vector &q, const Vector &qd) {
        Matrix F = Matrix::Zero(2, 2);
        const double bs = b * std::sin(q(0));
        F(0, 0) = -bs * qd(1);
        F(1, 0) = -bs * qd(0);
        return F;
    };
    d.potential = [a](const Vector &q) { return a * std::cos(q(0)); };
    d.potential_grad = [a](const Vector &q) {
        Vector g(2);
        g << -a * std::sin(q(0)), 0.0;
        return g;
    };
    d.input_matrix = Matrix(2, 1);
    d.input_matrix << 0.0, 1.0;
    d.left_annihilator = Matrix(1, 2);
    d.left_annihilator << 1.0, 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    Workspace ws;
    ws.lower = Vector(2);
    ws.upper = Vector(2);
    ws.lower << -kPi / 2.0, -inf;
    ws.upper << kPi / 2.0, inf;
    d.workspace = ws;
    d.coordinate_labels = {"q1[rad]", "q2[m]"};
    return std::make_shared<const ELSystem>(std::move(d));
}

std::vector<double> center_positions(int r) {
    if (r < 1) {
        throw ConfigError("center_positions: r must be >= 1");
    }
    std::vector<double> out(static_cast<std::size_t>(r));
    if (r == 11) {
        for (int i = 1; i <= 11; ++i) {
            out[static_cast<std::size_t>(i - 1)] = kPi / 2.0 - i * kPi / 12.0;
        }
        return out;
    }
    if (r == 1) {
        out[0] = 0.0;
        return out;
    }
    const double lo = -5.0 * kPi / 12.0;
    const double hi = 5.0 * kPi / 12.0;
    for (int i = 0; i < r; ++i) {
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (r - 1);
    }
    return out;
}

double alpha1(const CartPendParams &p) {
    return (1.0 - p.gamma) * p.b * std::cos(5.0 * kPi / 12.0);
}

double s11(const CartPendParams &p) { return -alpha1(p) * p.alpha2; }

double s12(const CartPendParams &p) { return p.alpha2; }

Matrix shape_matrix(const CartPendParams &p, double m) {
    const double a1 = alpha1(p);
    const double a2 = p.alpha2;
    const double be = p.beta;
    const double c = p.c;
    if (!(m > a1)) {
        std::ostringstream os;
        os << "shape_matrix: m = " << m << " must exceed alpha1 = " << a1;
        throw ConfigError(os.str());
    }
    Matrix S(2, 2);
    S(0, 0) = -a1 * a2;
    S(0, 1) = a2;
    S(1, 0) = a1 * a2 * (c - a1 * m) / (a1 - m) - be;
    S(1, 1) = ((c * a2 + be) * m - a1 * (be + a2 * m * m)) / (m * (m - a1));
    return S;
}

CenterSet center_family(const CartPendParams &p, int r) {
    p.validate();
    const auto sys = build_system(p);
    CenterSet cs;
    for (double q1 : center_positions(r)) {
        Vector qi(2);
        qi << q1, p.q2_star;
        const Matrix Mi = sys->mass_matrix(qi);
        const Matrix S = shape_matrix(p, p.b * std::cos(q1));
        const std::string what = "center_family: S" + std::to_string(cs.size() + 1);
        cs.centers.push_back(qi);
        cs.mass.push_back(Mi);
        cs.controlled_mass.push_back(linalg::sym(linalg::solve(S, Mi, what)));
    }
    cs.validate(2);
    return cs;
}

double vc(const CartPendParams &p, const Vector &q) {
    const double z = (q(1) - p.q2_star) - (s12(p) / s11(p)) * q(0);
    return 0.5 * p.kp * z * z + p.a * std::cos(q(0)) / s11(p);
}

Vector vc_grad(const CartPendParams &p, const Vector &q) {
    const double S11 = s11(p);
    const double S12 = s12(p);
    const double w = -(q(1) - p.q2_star) + q(0) * S12 / S11;
    Vector g(2);
    g << (p.kp * S12 * w - p.a * std::sin(q(0))) / S11, -p.kp * w;
    return g;
}

Matrix vc_hessian(const CartPendParams &p, const Vector &q) {
    const double S11 = s11(p);
    const double S12 = s12(p);
    Matrix H(2, 2);
    H(0, 0) = (p.kp * S12 * S12 - p.a * S11 * std::cos(q(0))) / (S11 * S11);
    H(0, 1) = -p.kp * S12 / S11;
    H(1, 0) = H(0, 1);
    H(1, 1) = p.kp;
    return H;
}

Matrix dissipative_R_cartpend(const CartPendParams &p, const KineticTerms &t) {
    const double S1 = t.Sigma(0, 0);
    const double S2 = t.Sigma(0, 1);
    const double scale = std::max(1.0, t.Sigma.norm());
    if (std::abs(S1) <= 1e-12 * scale || std::abs(S2) <= 1e-12 * scale) {
        std::ostringstream os;
        os << "dissipative_R_cartpend: Sigma = [" << S1 << ", " << S2
           << "] has a vanishing entry";
        throw NumericError(os.str(), std::numeric_limits<double>::infinity());
    }
    const Matrix &P = t.Pi;
    const double phi = p.phi;
    const double off = -phi * S2 / S1 + S1 * P(0, 0) / S2 + P(0, 1);
    Matrix R(2, 2);
    R(0, 0) = phi * S2 * S2 / (S1 * S1);
    R(0, 1) = off;
    R(1, 0) = off;
    R(1, 1) = phi - S1 * S1 * P(0, 0) / (S2 * S2) + P(1, 1);
    return R;
}

Matrix dissipative_R_cartpend(const CartPendParams &p, const ControllerSpec &spec,
                              const State &s) {
    return dissipative_R_cartpend(p, kinetic_terms(spec, s));
}

SampleGrid default_grid(const CartPendParams &p, int count) {
    SampleGrid g;
    g.axes = {GridAxis{-kRegionHalfWidth, kRegionHalfWidth, count},
              GridAxis{p.q2_star, p.q2_star, 1}};
    return g;
}

FitConfig default_fit_config(const CartPendParams &p) {
    FitConfig cfg;
    cfg.grid = default_grid(p);
    cfg.active_coords = {0};
    return cfg;
}

ControllerSpec make_controller(const CartPendParams &p, std::shared_ptr<const ELSystem> sys,
                               ControlledInertia inertia) {
    p.validate();
    ControllerSpec spec;
    spec.system = std::move(sys);
    spec.inertia = std::move(inertia);
    spec.vc = [p](const Vector &q) { return vc(p, q); };
    spec.vc_grad = [p](const Vector &q) { return vc_grad(p, q); };
    spec.kp = p.kp;
    spec.kv = Matrix::Constant(1, 1, p.kv);
    spec.phi = p.phi;
    spec.dissipation = [p](const ControllerSpec &, const State &, const KineticTerms &t) {
        return dissipative_R_cartpend(p, t);
    };
    spec.validate();
    return spec;
}

ControllerSpec controller_for_model(const CartPendParams &p,
                                    std::shared_ptr<const RBFInertiaModel> model) {
    if (!model || model->dof() != 2) {
        throw ConfigError("controller_for_model: expected a 2-DoF model");
    }
    return make_controller(p, build_system(p), ControlledInertia::from_model(std::move(model)));
}

Experiment default_experiment(const CartPendParams &p, int r, const FitConfig &cfg) {
    p.validate();
    auto sys = build_system(p);
    CenterSet cs = center_family(p, r);
    FitResult fr = fit(cs, *sys, [p](const Vector &q) { return vc_grad(p, q); }, cfg);
    auto model = std::make_shared<const RBFInertiaModel>(fr.model);
    ControllerSpec spec = make_controller(p, sys, ControlledInertia::from_model(model));
    return Experiment{p, std::move(sys), std::move(cs), cfg, std::move(fr), std::move(model),
                      std::move(spec)};
}

Experiment default_experiment(const CartPendParams &p, int r) {
    return default_experiment(p, r, default_fit_config(p));
}

} // namespace clmatch::cartpend
