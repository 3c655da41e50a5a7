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

#ifndef CLMATCH_LINALG_HPP
#define CLMATCH_LINALG_HPP

#include <string_view>

#include "clmatch/types.hpp"

namespace clmatch::linalg {

/// 2-norm condition number via SVD; infinity for singular input.
double condition_number(const Matrix &A);

/// Solves A X = B for general square A. Throws NumericError (carrying the
/// condition number) when A is singular to working precision.
Matrix solve(const Matrix &A, const Matrix &B, std::string_view what);
Vector solve(const Matrix &A, const Vector &b, std::string_view what);

/// Inverse of a square matrix with the same failure contract as solve().
Matrix inverse(const Matrix &A, std::string_view what);

inline Matrix sym(const Matrix &A) { return 0.5 * (A + A.transpose()); }
inline Matrix skew(const Matrix &A) { return 0.5 * (A - A.transpose()); }

/// C = F - 1/2 F^T where F = d(M qd)/dq.
inline Matrix coriolis_from_flow(const Matrix &F) { return F - 0.5 * F.transpose(); }

/// Smallest eigenvalue of the symmetric part of A.
double min_eigenvalue(const Matrix &A);

/// Least-squares left inverse (G^T G)^{-1} G^T applied to b, via column-pivoted QR.
Vector left_pseudo_solve(const Matrix &G, const Vector &b);

/// Numerical rank with relative threshold.
Eigen::Index rank(const Matrix &A, double rel_tol = 1e-12);

} // namespace clmatch::linalg

#endif // CLMATCH_LINALG_HPP
