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

#include "clmatch/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "clmatch/csv.hpp"
#include "clmatch/linalg.hpp"
#include "clmatch/matching.hpp"

namespace clmatch {

double hc(const ControllerSpec &spec, const State &s) {
    spec.system->check_state(s);
    const Matrix Mc = spec.inertia.evaluate(s.q);
    return 0.5 * s.qd.dot(Mc * s.qd) + spec.vc(s.q);
}

Vector eps_bar(const ControllerSpec &spec, const Vector &q) {
    return pe_residual(*spec.system, spec.inertia.evaluate, spec.vc_grad, q);
}

Vector eps_hat(const ControllerSpec &spec, const Vector &q) {
    const ELSystem &sys = *spec.system;
    const Matrix &Gp = sys.left_annihilator();
    const Vector e = eps_bar(spec, q);
    const Matrix GGt = Gp * Gp.transpose();
    const Vector lifted = Gp.transpose() * linalg::solve(GGt, e, "eps_hat: G_perp G_perp^T");
    const Vector w = linalg::solve(sys.mass_matrix(q), lifted, "eps_hat: M(q)");
    return spec.inertia.evaluate(q) * w;
}

HcDot hc_dot(const ControllerSpec &spec, const State &s, const ControlBreakdown &b) {
    const ELSystem &sys = *spec.system;
    const Matrix &G = sys.input_matrix();
    const KineticTerms &t = b.terms;
    // G^T M^{-1} Mc qd
    const Vector w = G.transpose() * linalg::solve(t.M, Vector(t.Mc * s.qd), "hc_dot: M(q)");
    const Vector Rq = b.R * s.qd;
    const Vector eh = eps_hat(spec, s.q);

    HcDot d;
    const double dissip = s.qd.dot(Rq);
    const double damp = w.dot(spec.kv * w);
    const double err = s.qd.dot(eh);
    d.p_dot = -dissip - damp;
    d.eps = -err;
    d.total = -dissip - damp - err;
    return d;
}

HcDot hc_dot(const ControllerSpec &spec, const State &s) {
    return hc_dot(spec, s, control_breakdown(spec, s));
}

std::vector<std::pair<double, double>> ScanConfig::default_pairs() {
    std::vector<double> axis(16);
    for (int k = 0; k < 16; ++k) {
        axis[static_cast<std::size_t>(k)] = std::pow(10.0, -3.0 + 5.0 * k / 15.0);
    }
    std::vector<std::pair<double, double>> pairs{{0.0, 0.0}};
    for (double a1 : axis) {
        for (double a2 : axis) {
            pairs.emplace_back(a1, a2);
        }
    }
    return pairs;
}

namespace {

// Local quadratic least-squares value at each sample; windows are shifted
// inward at the ends so every fit uses `window` samples.
std::vector<double> smooth_quadratic(const std::vector<double> &y, int window) {
    const auto n = static_cast<int>(y.size());
    const int w = std::min(window, n);
    const int half = w / 2;
    std::vector<double> out(y.size());
    Matrix V(w, 3);
    for (int i = 0; i < n; ++i) {
        const int start = std::clamp(i - half, 0, n - w);
        Vector rhs(w);
        for (int j = 0; j < w; ++j) {
            const double x = static_cast<double>(start + j - i);
            V(j, 0) = 1.0;
            V(j, 1) = x;
            V(j, 2) = x * x;
            rhs(j) = y[static_cast<std::size_t>(start + j)];
        }
        const Vector c = V.colPivHouseholderQr().solve(rhs);
        out[static_cast<std::size_t>(i)] = c(0);
    }
    return out;
}

} // namespace

LyapunovScan lagrange_scan(const StateTrajectory &traj, const ScanConfig &cfg) {
    const std::size_t N = traj.rows.size();
    if (N < 5) {
        throw std::invalid_argument("lagrange_scan: at least 5 samples are required");
    }
    if (!(cfg.rho >= 0.0)) {
        throw std::invalid_argument("lagrange_scan: rho must be >= 0");
    }
    if (cfg.window < 3 || cfg.window % 2 == 0) {
        throw std::invalid_argument("lagrange_scan: window must be odd and >= 3");
    }
    const Eigen::Index n = traj.rows.front().q.size();
    if (cfg.q_star.size() != n) {
        throw std::invalid_argument("lagrange_scan: q_star has wrong size");
    }
    for (const auto &[a1, a2] : cfg.pairs) {
        if (!(a1 >= 0.0) || !(a2 >= 0.0)) {
            throw std::invalid_argument("lagrange_scan: coefficient pairs must be >= 0");
        }
    }
    const double h = traj.rows[1].t - traj.rows[0].t;
    if (!(h > 0.0)) {
        throw std::invalid_argument("lagrange_scan: time must be strictly increasing");
    }
    for (std::size_t k = 1; k < N; ++k) {
        const double hk = traj.rows[k].t - traj.rows[k - 1].t;
        if (std::abs(hk - h) > 1e-9 * h) {
            throw std::invalid_argument("lagrange_scan: samples must be uniformly spaced");
        }
    }

    LyapunovScan scan;
    scan.rho = cfg.rho;
    scan.t.resize(N);
    scan.v_dot.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
        scan.t[k] = traj.rows[k].t;
        scan.v_dot[k] = traj.rows[k].hc_dot;
    }
    const std::vector<double> sm = smooth_quadratic(scan.v_dot, cfg.window);
    scan.v_ddot.assign(N, 0.0);
    scan.v_dddot.assign(N, 0.0);
    scan.tested.assign(N, false);
    for (std::size_t k = 1; k + 1 < N; ++k) {
        scan.v_ddot[k] = (sm[k + 1] - sm[k - 1]) / (2.0 * h);
        scan.v_dddot[k] = (sm[k + 1] - 2.0 * sm[k] + sm[k - 1]) / (h * h);
        const auto &r = traj.rows[k];
        const double dist =
            std::sqrt((r.q - cfg.q_star).squaredNorm() + r.qd.squaredNorm());
        scan.tested[k] = dist > cfg.rho;
    }

    for (const auto &[a1, a2] : cfg.pairs) {
        LagrangePair p;
        p.alpha1 = a1;
        p.alpha2 = a2;
        p.worst_margin = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t k = 1; k + 1 < N; ++k) {
            if (!scan.tested[k]) {
                continue;
            }
            any = true;
            const double margin = a2 * scan.v_dddot[k] + a1 * scan.v_ddot[k] + scan.v_dot[k];
            if (margin > p.worst_margin) {
                p.worst_margin = margin;
                p.worst_time = scan.t[k];
            }
        }
        p.pass = any && p.worst_margin < 0.0;
        scan.verdict = scan.verdict || p.pass;
        scan.pairs.push_back(p);
    }
    return scan;
}

void write_scan_csv(std::ostream &os, const LyapunovScan &scan,
                    const std::vector<std::pair<std::string, std::string>> &header) {
    auto block = header;
    block.emplace_back("rho", csv::format_double(scan.rho));
    block.emplace_back("verdict", scan.verdict ? "pass" : "fail");
    csv::write_header_block(os, block);
    csv::write_row(os, std::vector<std::string>{"alpha1", "alpha2", "pass", "worst_margin",
                                                "worst_time[s]"});
    for (const auto &p : scan.pairs) {
        csv::write_row(os, std::vector<std::string>{
                               csv::format_double(p.alpha1), csv::format_double(p.alpha2),
                               p.pass ? "1" : "0", csv::format_double(p.worst_margin),
                               csv::format_double(p.worst_time)});
    }
}

PathIntegral error_path_integral(const StateTrajectory &traj) {
    if (traj.rows.empty()) {
        throw std::invalid_argument("error_path_integral: empty trajectory");
    }
    PathIntegral out;
    out.running.reserve(traj.rows.size());
    out.running.push_back(0.0);
    double acc = 0.0;
    for (std::size_t k = 1; k < traj.rows.size(); ++k) {
        const auto &a = traj.rows[k - 1];
        const auto &b = traj.rows[k];
        // qd^T eps_hat = -eps
        acc += 0.5 * (b.t - a.t) * (-a.eps - b.eps);
        out.running.push_back(acc);
        out.max_abs = std::max(out.max_abs, std::abs(acc));
    }
    out.value = acc;
    return out;
}

} // namespace clmatch
