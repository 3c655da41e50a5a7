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

#include "clmatch/el_system.hpp"

#include <sstream>

#include "clmatch/linalg.hpp"

namespace clmatch {

bool Workspace::contains(const Vector &q) const {
    if (q.size() != lower.size() || q.size() != upper.size()) {
        return false;
    }
    return (q.array() > lower.array()).all() && (q.array() < upper.array()).all();
}

namespace {

std::string shape(const Matrix &A) {
    std::ostringstream os;
    os << A.rows() << "x" << A.cols();
    return os.str();
}

} // namespace

ELSystem::ELSystem(ELSystemDefinition def) : def_(std::move(def)) {
    const int n = def_.n;
    const int m = def_.m;
    if (n < 1 || m < 1 || m > n) {
        throw StructuralError("ELSystem: need n >= 1 and 1 <= m <= n");
    }
    if (!def_.mass_matrix || !def_.potential || !def_.potential_grad) {
        throw StructuralError("ELSystem: mass_matrix, potential and potential_grad are required");
    }
    const Matrix &G = def_.input_matrix;
    const Matrix &Gp = def_.left_annihilator;
    if (G.rows() != n || G.cols() != m) {
        throw StructuralError("ELSystem: input matrix must be n x m, got " + shape(G));
    }
    if (Gp.rows() != n - m || Gp.cols() != n) {
        throw StructuralError("ELSystem: left annihilator must be (n-m) x n, got " + shape(Gp));
    }
    if (linalg::rank(G) != m) {
        throw StructuralError("ELSystem: rank G != m");
    }
    if (n > m && linalg::rank(Gp) != n - m) {
        throw StructuralError("ELSystem: rank G_perp != n - m");
    }
    // Annihilators are usually built from 0/1 selections; allow only roundoff.
    const double scale = std::max(1.0, Gp.norm() * G.norm());
    if (n > m && (Gp * G).norm() > 1e-14 * scale) {
        throw StructuralError("ELSystem: G_perp * G != 0");
    }
    if (def_.workspace) {
        if (def_.workspace->lower.size() != n || def_.workspace->upper.size() != n) {
            throw StructuralError("ELSystem: workspace bounds must have n entries");
        }
    }
    if (def_.coordinate_labels.empty()) {
        for (int i = 0; i < n; ++i) {
            def_.coordinate_labels.push_back("q" + std::to_string(i + 1));
        }
    } else if (static_cast<int>(def_.coordinate_labels.size()) != n) {
        throw StructuralError("ELSystem: need one coordinate label per degree of freedom");
    }
}

void ELSystem::check_configuration(const Vector &q) const {
    if (q.size() != def_.n) {
        std::ostringstream os;
        os << "ELSystem: configuration has " << q.size() << " entries, expected " << def_.n;
        throw StructuralError(os.str());
    }
}

void ELSystem::check_state(const State &s) const {
    check_configuration(s.q);
    if (s.qd.size() != def_.n) {
        std::ostringstream os;
        os << "ELSystem: velocity has " << s.qd.size() << " entries, expected " << def_.n;
        throw StructuralError(os.str());
    }
}

Matrix ELSystem::mass_matrix(const Vector &q) const {
    check_configuration(q);
    Matrix M = def_.mass_matrix(q);
    if (M.rows() != def_.n || M.cols() != def_.n) {
        throw StructuralError("ELSystem: mass_matrix returned " + shape(M));
    }
    return M;
}

Matrix ELSystem::mass_flow(const Vector &q, const Vector &qd) const {
    check_state({q, qd});
    if (def_.mass_flow) {
        Matrix F = def_.mass_flow(q, qd);
        if (F.rows() != def_.n || F.cols() != def_.n) {
            throw StructuralError("ELSystem: mass_flow returned " + shape(F));
        }
        return F;
    }
    return finite_difference_mass_flow(def_.mass_matrix, q, qd);
}

double ELSystem::potential(const Vector &q) const {
    check_configuration(q);
    return def_.potential(q);
}

Vector ELSystem::potential_grad(const Vector &q) const {
    check_configuration(q);
    Vector g = def_.potential_grad(q);
    if (g.size() != def_.n) {
        throw StructuralError("ELSystem: potential_grad returned wrong size");
    }
    return g;
}

bool ELSystem::in_workspace(const Vector &q) const {
    return !def_.workspace || def_.workspace->contains(q);
}

Matrix finite_difference_mass_flow(const MatrixField &mass_matrix, const Vector &q,
                                   const Vector &qd, double step) {
    const Eigen::Index n = q.size();
    Matrix F(n, n);
    Vector qp = q;
    Vector qm = q;
    for (Eigen::Index j = 0; j < n; ++j) {
        qp(j) = q(j) + step;
        qm(j) = q(j) - step;
        F.col(j) = (mass_matrix(qp) * qd - mass_matrix(qm) * qd) / (2.0 * step);
        qp(j) = q(j);
        qm(j) = q(j);
    }
    return F;
}

Matrix coriolis(const ELSystem &sys, const State &s) {
    return linalg::coriolis_from_flow(sys.mass_flow(s.q, s.qd));
}

Vector open_loop_accel(const ELSystem &sys, const State &s, const Vector &u) {
    sys.check_state(s);
    if (u.size() != sys.inputs()) {
        throw StructuralError("open_loop_accel: input has wrong size");
    }
    const Matrix M = sys.mass_matrix(s.q);
    const Vector rhs = sys.input_matrix() * u - coriolis(sys, s) * s.qd - sys.potential_grad(s.q);
    return linalg::solve(M, rhs, "open_loop_accel: mass matrix");
}

double total_energy(const ELSystem &sys, const State &s) {
    sys.check_state(s);
    return 0.5 * s.qd.dot(sys.mass_matrix(s.q) * s.qd) + sys.potential(s.q);
}

} // namespace clmatch
