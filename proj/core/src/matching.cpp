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

#include "clmatch/matching.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "clmatch/csv.hpp"
#include "clmatch/linalg.hpp"

namespace clmatch {

void CenterSet::validate(int n) const {
    if (centers.empty()) {
        throw StructuralError("CenterSet: at least one center is required");
    }
    if (mass.size() != centers.size() || controlled_mass.size() != centers.size()) {
        throw StructuralError("CenterSet: centers, M_i and M_ci must have equal length");
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (centers[i].size() != n || mass[i].rows() != n || mass[i].cols() != n ||
            controlled_mass[i].rows() != n || controlled_mass[i].cols() != n) {
            throw StructuralError("CenterSet: entry " + std::to_string(i) + " has wrong dimension");
        }
        const Matrix &Mc = controlled_mass[i];
        const double asym = (Mc - Mc.transpose()).norm();
        if (asym > 1e-12 * std::max(1.0, Mc.norm())) {
            throw ConfigError("CenterSet: M_c" + std::to_string(i + 1) + " is not symmetric");
        }
        if (!(linalg::min_eigenvalue(Mc) > 0.0)) {
            throw ConfigError("CenterSet: M_c" + std::to_string(i + 1) +
                              " is not positive definite");
        }
    }
}

void SampleGrid::validate(int n) const {
    if (static_cast<int>(axes.size()) != n) {
        throw ConfigError("SampleGrid: need one axis per coordinate");
    }
    for (const auto &a : axes) {
        if (a.count < 1) {
            throw ConfigError("SampleGrid: axis count must be >= 1");
        }
        if (a.count >= 2 && !(a.hi > a.lo)) {
            throw ConfigError("SampleGrid: sampled axis needs hi > lo");
        }
    }
}

std::size_t SampleGrid::size() const {
    std::size_t total = 1;
    for (const auto &a : axes) {
        total *= static_cast<std::size_t>(a.count);
    }
    return total;
}

std::vector<Vector> SampleGrid::points() const {
    const std::size_t n = axes.size();
    std::vector<Vector> out;
    out.reserve(size());
    std::vector<int> idx(n, 0);
    for (std::size_t k = 0; k < size(); ++k) {
        Vector q(static_cast<Eigen::Index>(n));
        for (std::size_t d = 0; d < n; ++d) {
            const auto &a = axes[d];
            q(static_cast<Eigen::Index>(d)) =
                a.count == 1 ? a.lo : a.lo + (a.hi - a.lo) * idx[d] / (a.count - 1);
        }
        out.push_back(std::move(q));
        for (std::size_t d = 0; d < n; ++d) {
            if (++idx[d] < axes[d].count) {
                break;
            }
            idx[d] = 0;
        }
    }
    return out;
}

Vector pe_residual(const ELSystem &sys, const MatrixField &mc_eval, const VectorField &vc_grad,
                   const Vector &q) {
    sys.check_configuration(q);
    const Matrix Mc = mc_eval(q);
    const Vector gVc = vc_grad(q);
    if (Mc.rows() != sys.dof() || Mc.cols() != sys.dof() || gVc.size() != sys.dof()) {
        throw StructuralError("pe_residual: controlled inertia or gradient has wrong size");
    }
    const Vector shaped = sys.mass_matrix(q) * linalg::solve(Mc, gVc, "pe_residual: Mc(q)");
    return sys.left_annihilator() * (sys.potential_grad(q) - shaped);
}

std::vector<Vector> pe_residual_at_centers(const CenterSet &cs, const ELSystem &sys,
                                           const VectorField &vc_grad) {
    cs.validate(sys.dof());
    std::vector<Vector> out;
    out.reserve(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const Vector &qi = cs.centers[i];
        const std::string what = "pe_residual_at_centers: M_c" + std::to_string(i + 1);
        const Vector shaped = cs.mass[i] * linalg::solve(cs.controlled_mass[i], vc_grad(qi), what);
        out.push_back(sys.left_annihilator() * (sys.potential_grad(qi) - shaped));
    }
    return out;
}

Lemma1Result lemma1_check(const CenterSet &cs, const ELSystem &sys, double tolerance) {
    cs.validate(sys.dof());
    std::vector<Matrix> rows;
    rows.reserve(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
        // G_perp M_i M_ci^{-1} = (M_ci^{-1} M_i G_perp^T)^T since both are symmetric.
        const Matrix t = linalg::solve(cs.controlled_mass[i],
                                       Matrix(cs.mass[i] * sys.left_annihilator().transpose()),
                                       "lemma1_check: M_c" + std::to_string(i + 1));
        rows.push_back(t.transpose());
    }
    Lemma1Result res;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            const double dev = (rows[i] - rows[j]).norm();
            if (dev > res.max_deviation) {
                res.max_deviation = dev;
                res.worst_i = i;
                res.worst_j = j;
            }
        }
    }
    res.passed = res.max_deviation <= tolerance;
    return res;
}

namespace {

void check_ke_inputs(const ELSystem &sys, const State &s, const Matrix &mc, const Matrix &cc,
                     const Matrix &J, const Matrix &R) {
    sys.check_state(s);
    const int n = sys.dof();
    for (const Matrix *A : {&mc, &cc, &J, &R}) {
        if (A->rows() != n || A->cols() != n) {
            throw StructuralError("ke_residual: matrix arguments must be n x n");
        }
    }
}

} // namespace

Vector ke_residual(const ELSystem &sys, const State &s, const Matrix &mc, const Matrix &cc,
                   const Matrix &J, const Matrix &R) {
    check_ke_inputs(sys, s, mc, cc, J, R);
    const Matrix M = sys.mass_matrix(s.q);
    const Matrix C = coriolis(sys, s);
    const Matrix bracket = mc * linalg::solve(M, C, "ke_residual: M(q)") - cc - (J + R);
    const Matrix sigma =
        sys.left_annihilator() * M * linalg::inverse(mc, "ke_residual: Mc(q)");
    return sigma * (bracket * s.qd);
}

Vector ke_residual_unreduced(const ELSystem &sys, const State &s, const Matrix &mc,
                             const Matrix &cc, const Matrix &J, const Matrix &R) {
    check_ke_inputs(sys, s, mc, cc, J, R);
    const Matrix M = sys.mass_matrix(s.q);
    const Matrix C = coriolis(sys, s);
    const Matrix MMcInv = M * linalg::inverse(mc, "ke_residual_unreduced: Mc(q)");
    return sys.left_annihilator() * ((C - MMcInv * cc - MMcInv * (J + R)) * s.qd);
}

MatchingReport matching_report(const ELSystem &sys, const MatrixField &mc_eval,
                               const VectorField &vc_grad, const std::vector<Vector> &points) {
    MatchingReport rep;
    rep.samples.reserve(points.size());
    double sum = 0.0;
    double sumsq = 0.0;
    for (const auto &q : points) {
        MatchingSample smp{q, pe_residual(sys, mc_eval, vc_grad, q), 0.0};
        smp.norm = smp.residual.norm();
        rep.max_norm = std::max(rep.max_norm, smp.norm);
        sum += smp.norm;
        sumsq += smp.norm * smp.norm;
        rep.samples.push_back(std::move(smp));
    }
    if (!points.empty()) {
        const double count = static_cast<double>(points.size());
        rep.mean_norm = sum / count;
        rep.rms_norm = std::sqrt(sumsq / count);
    }
    return rep;
}

void write_matching_csv(std::ostream &os, const MatchingReport &report,
                        const std::vector<std::pair<std::string, std::string>> &header) {
    csv::write_header_block(os, header);
    if (report.samples.empty()) {
        csv::write_row(os, std::vector<std::string>{"norm"});
        return;
    }
    std::vector<std::string> names;
    const auto n = report.samples.front().q.size();
    const auto p = report.samples.front().residual.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        names.push_back("q" + std::to_string(i + 1));
    }
    for (Eigen::Index i = 0; i < p; ++i) {
        names.push_back("eps" + std::to_string(i + 1));
    }
    names.emplace_back("norm");
    csv::write_row(os, names);
    std::vector<double> row;
    for (const auto &smp : report.samples) {
        row.clear();
        row.insert(row.end(), smp.q.data(), smp.q.data() + n);
        row.insert(row.end(), smp.residual.data(), smp.residual.data() + p);
        row.push_back(smp.norm);
        csv::write_row(os, row);
    }
}

} // namespace clmatch
