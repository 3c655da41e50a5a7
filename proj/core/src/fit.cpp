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

#include "clmatch/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "clmatch/linalg.hpp"

namespace clmatch {

const char *to_string(FitStatus s) {
    switch (s) {
    case FitStatus::Converged:
        return "converged";
    case FitStatus::Stalled:
        return "stalled";
    case FitStatus::MaxIterations:
        return "max_iterations";
    }
    return "unknown";
}

void FitConfig::validate(int n) const {
    grid.validate(n);
    if (max_iterations < 0) {
        throw ConfigError("FitConfig: max_iterations must be >= 0");
    }
    if (!(initial_damping > 0.0) || !(residual_tolerance > 0.0) || !(pd_penalty_weight > 0.0)) {
        throw ConfigError("FitConfig: damping, tolerance and penalty weight must be > 0");
    }
    if (pd_floor < 0.0 || ridge < 0.0 || center_weight < 0.0) {
        throw ConfigError("FitConfig: pd_floor, center_weight and ridge must be >= 0");
    }
    for (int k : active_coords) {
        if (k < 0 || k >= n) {
            throw ConfigError("FitConfig: active coordinate out of range");
        }
    }
}

std::vector<double> initial_widths(const CenterSet &cs, const SampleGrid &grid,
                                   const std::vector<int> &active_coords) {
    const std::size_t r = cs.size();
    auto dist = [&](const Vector &a, const Vector &b) {
        if (active_coords.empty()) {
            return (a - b).norm();
        }
        double d2 = 0.0;
        for (int k : active_coords) {
            d2 += (a(k) - b(k)) * (a(k) - b(k));
        }
        return std::sqrt(d2);
    };
    std::vector<double> widths(r, 1.0);
    if (r == 1) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < grid.axes.size(); ++k) {
            const bool active =
                active_coords.empty() ||
                std::find(active_coords.begin(), active_coords.end(), static_cast<int>(k)) !=
                    active_coords.end();
            if (active) {
                const double ext = grid.axes[k].hi - grid.axes[k].lo;
                d2 += ext * ext;
            }
        }
        const double d = std::sqrt(d2);
        widths[0] = d > 0.0 ? 1.0 / (2.0 * d) : 1.0;
        return widths;
    }
    for (std::size_t i = 0; i < r; ++i) {
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < r; ++j) {
            if (j != i) {
                dmin = std::min(dmin, dist(cs.centers[i], cs.centers[j]));
            }
        }
        if (!(dmin > 0.0) || !std::isfinite(dmin)) {
            throw ConfigError("initial_widths: coincident centers");
        }
        widths[i] = 1.0 / (2.0 * dmin);
    }
    return widths;
}

namespace {

/// Least-squares problem over theta = [log eps_i, vech(W_i)]_i.
class MatchingProblem {
public:
    MatchingProblem(const CenterSet &cs, const ELSystem &sys, const VectorField &vc_grad,
                    const FitConfig &cfg)
        : cs_(cs), cfg_(cfg), n_(sys.dof()), p_(sys.dof() - sys.inputs()),
          t_(n_ * (n_ + 1) / 2), r_(cs.size()), Gp_(sys.left_annihilator()),
          probe_(RBFInertiaModel::from_centers(cs, std::vector<double>(cs.size(), 1.0),
                                               cfg.active_coords)) {
        points_ = cfg.grid.points();
        sum_mc_ = Matrix::Zero(n_, n_);
        for (const auto &Mc : cs.controlled_mass) {
            sum_mc_ += Mc;
        }
        for (const auto &q : points_) {
            mass_.push_back(sys.mass_matrix(q));
            grad_v_.push_back(sys.potential_grad(q));
            grad_vc_.push_back(vc_grad(q));
            std::vector<double> d2(r_);
            for (std::size_t i = 0; i < r_; ++i) {
                d2[i] = probe_.squared_distance(i, q);
            }
            dist2_.push_back(std::move(d2));
        }
        for (std::size_t j = 0; j < r_; ++j) {
            std::vector<double> d2(r_);
            for (std::size_t i = 0; i < r_; ++i) {
                d2[i] = probe_.squared_distance(i, cs.centers[j]);
            }
            center_dist2_.push_back(std::move(d2));
        }
    }

    Eigen::Index num_params() const { return static_cast<Eigen::Index>(r_ * (1 + t_)); }
    Eigen::Index num_residuals() const {
        return static_cast<Eigen::Index>(points_.size() * (p_ + 1) + 2 * r_ * t_);
    }
    const std::vector<Vector> &points() const { return points_; }

    Vector pack(const std::vector<double> &widths, const std::vector<Matrix> &weights) const {
        Vector theta(num_params());
        Eigen::Index o = 0;
        for (std::size_t i = 0; i < r_; ++i) {
            theta(o++) = std::log(widths[i]);
            for (int a = 0; a < n_; ++a) {
                for (int b = a; b < n_; ++b) {
                    theta(o++) = weights[i](a, b);
                }
            }
        }
        return theta;
    }

    void unpack(const Vector &theta, std::vector<double> &widths,
                std::vector<Matrix> &weights) const {
        widths.assign(r_, 0.0);
        weights.assign(r_, Matrix::Zero(n_, n_));
        Eigen::Index o = 0;
        for (std::size_t i = 0; i < r_; ++i) {
            widths[i] = std::exp(theta(o++));
            for (int a = 0; a < n_; ++a) {
                for (int b = a; b < n_; ++b) {
                    weights[i](a, b) = theta(o);
                    weights[i](b, a) = theta(o);
                    ++o;
                }
            }
        }
    }

    RBFInertiaModel model(const Vector &theta) const {
        std::vector<double> widths;
        std::vector<Matrix> weights;
        unpack(theta, widths, weights);
        std::vector<Matrix> biases;
        for (std::size_t i = 0; i < r_; ++i) {
            biases.push_back(cs_.controlled_mass[i] - weights[i]);
        }
        return {cs_.centers, std::move(widths), std::move(weights), std::move(biases),
                cfg_.active_coords};
    }

    /// Fills residuals (and the Jacobian when J != nullptr). Returns the max grid
    /// residual norm. Throws NumericError if Mc_hat is singular at a grid point.
    double evaluate(const Vector &theta, Vector &res, Matrix *J) const {
        std::vector<double> widths;
        std::vector<Matrix> weights;
        unpack(theta, widths, weights);
        res.setZero(num_residuals());
        if (J != nullptr) {
            J->setZero(num_residuals(), num_params());
        }
        const double sw = std::sqrt(cfg_.pd_penalty_weight);
        const Eigen::Index stride = 1 + t_;
        std::vector<double> h(r_);
        double max_norm = 0.0;
        for (std::size_t k = 0; k < points_.size(); ++k) {
            Matrix Mh = sum_mc_;
            for (std::size_t i = 0; i < r_; ++i) {
                h[i] = std::exp(-widths[i] * widths[i] * dist2_[k][i]);
                Mh += (h[i] - 1.0) * weights[i];
            }
            Eigen::PartialPivLU<Matrix> lu(Mh);
            if (!(lu.rcond() > 1e-14) || !Mh.allFinite()) {
                throw NumericError("fit: Mc_hat singular at a grid point",
                                   linalg::condition_number(Mh));
            }
            const Vector y = lu.solve(grad_vc_[k]);
            const Eigen::Index row = static_cast<Eigen::Index>(k) * p_;
            const Vector eps = Gp_ * (grad_v_[k] - mass_[k] * y);
            res.segment(row, p_) = eps;
            max_norm = std::max(max_norm, eps.norm());

            Eigen::SelfAdjointEigenSolver<Matrix> es(Mh);
            const double lam = es.eigenvalues()(0);
            const Eigen::Index pen_row =
                static_cast<Eigen::Index>(points_.size() * p_ + k);
            const bool pd_active = lam < cfg_.pd_floor;
            if (pd_active) {
                res(pen_row) = sw * (lam - cfg_.pd_floor);
            }
            if (J == nullptr) {
                continue;
            }
            // d eps / d theta = L (dMh/dtheta) y with L = G_perp M Mh^{-1} (Mh symmetric).
            const Matrix L = lu.solve(Matrix(mass_[k] * Gp_.transpose())).transpose();
            const Vector v = es.eigenvectors().col(0);
            for (std::size_t i = 0; i < r_; ++i) {
                const Eigen::Index col = static_cast<Eigen::Index>(i) * stride;
                const double dh = -2.0 * widths[i] * widths[i] * dist2_[k][i] * h[i];
                J->block(row, col, p_, 1) = dh * (L * (weights[i] * y));
                if (pd_active) {
                    (*J)(pen_row, col) = sw * dh * v.dot(weights[i] * v);
                }
                const double g = h[i] - 1.0;
                Eigen::Index o = col + 1;
                for (int a = 0; a < n_; ++a) {
                    for (int b = a; b < n_; ++b, ++o) {
                        if (a == b) {
                            J->block(row, o, p_, 1) = g * L.col(a) * y(a);
                            if (pd_active) {
                                (*J)(pen_row, o) = sw * g * v(a) * v(a);
                            }
                        } else {
                            J->block(row, o, p_, 1) = g * (L.col(a) * y(b) + L.col(b) * y(a));
                            if (pd_active) {
                                (*J)(pen_row, o) = sw * g * 2.0 * v(a) * v(b);
                            }
                        }
                    }
                }
            }
        }
        // Anchoring rows: vech(Mc_hat(q_j) - M_cj), off-diagonals scaled by sqrt(2).
        const double sc = std::sqrt(cfg_.center_weight);
        Eigen::Index rr = static_cast<Eigen::Index>(points_.size() * (p_ + 1));
        for (std::size_t j = 0; j < r_; ++j, rr += t_) {
            Matrix D = sum_mc_ - cs_.controlled_mass[j];
            for (std::size_t i = 0; i < r_; ++i) {
                h[i] = std::exp(-widths[i] * widths[i] * center_dist2_[j][i]);
                D += (h[i] - 1.0) * weights[i];
            }
            Eigen::Index e = rr;
            for (int a = 0; a < n_; ++a) {
                for (int b = a; b < n_; ++b, ++e) {
                    const double w = a == b ? sc : sc * std::sqrt(2.0);
                    res(e) = w * D(a, b);
                    if (J == nullptr) {
                        continue;
                    }
                    for (std::size_t i = 0; i < r_; ++i) {
                        const Eigen::Index col = static_cast<Eigen::Index>(i) * stride;
                        const double dh =
                            -2.0 * widths[i] * widths[i] * center_dist2_[j][i] * h[i];
                        (*J)(e, col) = w * dh * weights[i](a, b);
                        // the vech slot of (a, b) inside block i
                        const Eigen::Index slot = col + 1 + a * n_ - a * (a - 1) / 2 + (b - a);
                        (*J)(e, slot) = w * (h[i] - 1.0);
                    }
                }
            }
        }
        const double sr = std::sqrt(cfg_.ridge);
        for (std::size_t i = 0; i < r_; ++i) {
            Eigen::Index o = static_cast<Eigen::Index>(i) * stride + 1;
            for (int a = 0; a < n_; ++a) {
                for (int b = a; b < n_; ++b, ++o, ++rr) {
                    const double w = a == b ? sr : sr * std::sqrt(2.0);
                    res(rr) = w * theta(o);
                    if (J != nullptr) {
                        (*J)(rr, o) = w;
                    }
                }
            }
        }
        return max_norm;
    }

private:
    const CenterSet &cs_;
    const FitConfig &cfg_;
    int n_;
    int p_;
    int t_;
    std::size_t r_;
    Matrix Gp_;
    RBFInertiaModel probe_;
    Matrix sum_mc_;
    std::vector<Vector> points_;
    std::vector<Matrix> mass_;
    std::vector<Vector> grad_v_;
    std::vector<Vector> grad_vc_;
    std::vector<std::vector<double>> dist2_;
    std::vector<std::vector<double>> center_dist2_;
};

MatchingReport report_for(const ELSystem &sys, const RBFInertiaModel &model,
                          const VectorField &vc_grad, const std::vector<Vector> &points,
                          const Lemma1Result &lemma) {
    MatchingReport rep = matching_report(
        sys, [&model](const Vector &q) { return model.evaluate(q); }, vc_grad, points);
    rep.lemma1_passed = lemma.passed;
    rep.lemma1_deviation = lemma.max_deviation;
    return rep;
}

} // namespace

FitResult fit(const CenterSet &cs, const ELSystem &sys, const VectorField &vc_grad,
              const FitConfig &cfg) {
    cs.validate(sys.dof());
    cfg.validate(sys.dof());
    const Lemma1Result lemma = lemma1_check(cs, sys);
    if (!lemma.passed) {
        std::ostringstream os;
        os << "fit: center set fails the consistency check (deviation " << lemma.max_deviation
           << " between centers " << lemma.worst_i + 1 << " and " << lemma.worst_j + 1 << ")";
        throw ConfigError(os.str());
    }

    MatchingProblem prob(cs, sys, vc_grad, cfg);
    const auto widths0 = initial_widths(cs, cfg.grid, cfg.active_coords);
    Vector theta = prob.pack(widths0, cs.controlled_mass);

    Vector res;
    Matrix J;
    double max_norm = prob.evaluate(theta, res, &J);
    double cost = 0.5 * res.squaredNorm();

    FitResult out{prob.model(theta), {}, {}, FitStatus::MaxIterations, 0, cost, cost, 0.0};
    out.before = report_for(sys, out.model, vc_grad, prob.points(), lemma);

    FitStatus status = FitStatus::MaxIterations;
    if (max_norm <= cfg.residual_tolerance) {
        status = FitStatus::Converged;
    }

    Matrix A = J.transpose() * J;
    Vector g = J.transpose() * res;
    double mu = cfg.initial_damping * std::max(A.diagonal().maxCoeff(), 1e-300);
    double nu = 2.0;
    int it = 0;
    int small_steps = 0;
    Vector trial_res;
    Matrix trial_J;
    while (status == FitStatus::MaxIterations && it < cfg.max_iterations) {
        ++it;
        if (g.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, cost)) {
            status = FitStatus::Stalled;
            break;
        }
        Vector D = A.diagonal().cwiseMax(1e-12 * std::max(1.0, A.diagonal().maxCoeff()));
        Matrix lhs = A;
        lhs.diagonal() += mu * D;
        const Vector delta = lhs.ldlt().solve(-g);
        if (!delta.allFinite() ||
            delta.norm() <= 1e-14 * (theta.norm() + 1e-14)) {
            status = FitStatus::Stalled;
            break;
        }
        const Vector candidate = theta + delta;
        double trial_max = 0.0;
        double trial_cost = std::numeric_limits<double>::infinity();
        try {
            trial_max = prob.evaluate(candidate, trial_res, &trial_J);
            trial_cost = 0.5 * trial_res.squaredNorm();
        } catch (const NumericError &) {
            trial_cost = std::numeric_limits<double>::infinity();
        }
        const double predicted = 0.5 * delta.dot(mu * D.cwiseProduct(delta) - g);
        const double rho = (cost - trial_cost) / predicted;
        if (std::isfinite(trial_cost) && predicted > 0.0 && rho > 0.0) {
            const double rel_gain = (cost - trial_cost) / std::max(cost, 1e-300);
            theta = candidate;
            res.swap(trial_res);
            J.swap(trial_J);
            cost = trial_cost;
            max_norm = trial_max;
            A = J.transpose() * J;
            g = J.transpose() * res;
            mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
            nu = 2.0;
            if (max_norm <= cfg.residual_tolerance) {
                status = FitStatus::Converged;
                break;
            }
            small_steps = rel_gain < 1e-12 ? small_steps + 1 : 0;
            if (small_steps >= 20) {
                status = FitStatus::Stalled;
                break;
            }
        } else {
            mu *= nu;
            nu *= 2.0;
            if (mu > 1e30 || !std::isfinite(mu)) {
                status = FitStatus::Stalled;
                break;
            }
        }
    }

    out.model = prob.model(theta);
    out.status = status;
    out.iterations = it;
    out.final_cost = cost;
    out.after = report_for(sys, out.model, vc_grad, prob.points(), lemma);

    std::vector<Vector> violating;
    double lam_min = std::numeric_limits<double>::infinity();
    for (const auto &q : prob.points()) {
        const double lam = linalg::min_eigenvalue(out.model.evaluate(q));
        lam_min = std::min(lam_min, lam);
        if (!(lam > 0.0)) {
            violating.push_back(q);
        }
    }
    out.min_grid_eigenvalue = lam_min;
    if (!violating.empty()) {
        std::ostringstream os;
        os << "fit: fitted controlled inertia is not positive definite at " << violating.size()
           << " grid point(s); first at q = [" << violating.front().transpose() << "]";
        throw FitError(os.str(), std::move(violating));
    }
    return out;
}

} // namespace clmatch
