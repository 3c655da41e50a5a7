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

#include "clmatch/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace clmatch::linalg {

double condition_number(const Matrix &A) {
    if (A.size() == 0) {
        return 1.0;
    }
    Eigen::JacobiSVD<Matrix> svd(A);
    const auto &s = svd.singularValues();
    const double smax = s(0);
    const double smin = s(s.size() - 1);
    if (!(smin > 0.0) || !std::isfinite(smax)) {
        return std::numeric_limits<double>::infinity();
    }
    return smax / smin;
}

namespace {

// Threshold on reciprocal condition for declaring a matrix singular.
constexpr double kMinRcond = 1e-14;

Eigen::PartialPivLU<Matrix> checked_lu(const Matrix &A, std::string_view what) {
    if (A.rows() != A.cols()) {
        std::ostringstream os;
        os << what << ": expected a square matrix, got " << A.rows() << "x" << A.cols();
        throw StructuralError(os.str());
    }
    if (!A.allFinite()) {
        std::ostringstream os;
        os << what << ": matrix has non-finite entries";
        throw NumericError(os.str(), std::numeric_limits<double>::infinity());
    }
    Eigen::PartialPivLU<Matrix> lu(A);
    if (!(lu.rcond() > kMinRcond)) {
        const double cond = condition_number(A);
        std::ostringstream os;
        os << what << ": matrix is singular (condition number " << cond << ")";
        throw NumericError(os.str(), cond);
    }
    return lu;
}

} // namespace

Matrix solve(const Matrix &A, const Matrix &B, std::string_view what) {
    if (B.rows() != A.rows()) {
        throw StructuralError(std::string(what) + ": right-hand side row count mismatch");
    }
    return checked_lu(A, what).solve(B);
}

Vector solve(const Matrix &A, const Vector &b, std::string_view what) {
    if (b.size() != A.rows()) {
        throw StructuralError(std::string(what) + ": right-hand side size mismatch");
    }
    return checked_lu(A, what).solve(b);
}

Matrix inverse(const Matrix &A, std::string_view what) { return checked_lu(A, what).inverse(); }

double min_eigenvalue(const Matrix &A) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(A), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

Vector left_pseudo_solve(const Matrix &G, const Vector &b) {
    if (b.size() != G.rows()) {
        throw StructuralError("left_pseudo_solve: size mismatch");
    }
    return G.colPivHouseholderQr().solve(b);
}

Eigen::Index rank(const Matrix &A, double rel_tol) {
    if (A.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<Matrix> svd(A);
    const auto &s = svd.singularValues();
    const double thresh = rel_tol * std::max<double>(1.0, s(0));
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > thresh) {
            ++r;
        }
    }
    return r;
}

} // namespace clmatch::linalg
