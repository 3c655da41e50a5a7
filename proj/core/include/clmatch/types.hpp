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

#ifndef CLMATCH_TYPES_HPP
#define CLMATCH_TYPES_HPP

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace clmatch {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Generalized coordinates and velocities of an n-DoF mechanical system.
struct State {
    Vector q;
    Vector qd;
};

/// q -> n x n matrix (mass matrices, controlled inertia).
using MatrixField = std::function<Matrix(const Vector &)>;
/// q -> n-vector (potential gradients).
using VectorField = std::function<Vector(const Vector &)>;
/// q -> scalar (potentials).
using ScalarField = std::function<double(const Vector &)>;
/// (q, qd) -> n x n matrix, e.g. d(M(q) qd)/dq.
using FlowField = std::function<Matrix(const Vector &, const Vector &)>;

/// Dimension or shape mismatch between inputs.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Singular or non-finite quantity met during evaluation.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string &what, double condition = 0.0)
        : std::runtime_error(what), condition_(condition) {}
    /// Condition number estimate of the offending matrix, 0 when not applicable.
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Invalid user configuration (parameters outside their admissible range).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace clmatch

#endif // CLMATCH_TYPES_HPP
