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

#ifndef CLMATCH_RBF_INERTIA_HPP
#define CLMATCH_RBF_INERTIA_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "clmatch/matching.hpp"
#include "clmatch/types.hpp"

namespace clmatch {

/// Malformed or unreadable model document.
class ModelIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief Gaussian-blended controlled inertia
 *
 *   Mc_hat(q) = sum_i ( h_i(q) W_i + B_i ),   h_i(q) = exp(-(eps_i ||q - q_i||)^2)
 *
 * with weights W_i and biases B_i symmetric, so Mc_hat(q) is symmetric for
 * every q. Positive-definiteness is not structural; fit() enforces it on the
 * sample grid.
 *
 * The distance may be restricted to a subset of coordinates (active_coords),
 * which keeps Mc_hat independent of coordinates the open-loop inertia does not
 * depend on. An empty list means all coordinates.
 */
class RBFInertiaModel {
public:
    RBFInertiaModel(std::vector<Vector> centers, std::vector<double> widths,
                    std::vector<Matrix> weights, std::vector<Matrix> biases,
                    std::vector<int> active_coords = {});

    /// W_i = M_ci, B_i = 0.
    static RBFInertiaModel from_centers(const CenterSet &cs, std::vector<double> widths,
                                        std::vector<int> active_coords = {});

    int dof() const noexcept { return n_; }
    std::size_t size() const noexcept { return centers_.size(); }

    const std::vector<Vector> &centers() const noexcept { return centers_; }
    const std::vector<double> &widths() const noexcept { return widths_; }
    const std::vector<Matrix> &weights() const noexcept { return weights_; }
    const std::vector<Matrix> &biases() const noexcept { return biases_; }
    const std::vector<int> &active_coords() const noexcept { return active_; }

    /// Squared distance ||q - q_i||^2 over the active coordinates.
    double squared_distance(std::size_t i, const Vector &q) const;
    double basis(std::size_t i, const Vector &q) const;
    /// dh_i/dq = -2 eps_i^2 (q - q_i) h_i(q), zero on inactive coordinates.
    Vector basis_grad(std::size_t i, const Vector &q) const;

    Matrix evaluate(const Vector &q) const;
    /// Analytic d(Mc_hat(q) qd)/dq.
    Matrix mass_flow(const Vector &q, const Vector &qd) const;
    /// Cc_hat = d(Mc_hat qd)/dq - 1/2 (d(Mc_hat qd)/dq)^T.
    Matrix coriolis(const State &s) const;

    /// Flat JSON document, doubles written with 17 significant digits.
    void save(std::ostream &os) const;
    static RBFInertiaModel load(std::istream &is);
    void save_file(const std::string &path) const;
    static RBFInertiaModel load_file(const std::string &path);

private:
    int n_ = 0;
    std::vector<Vector> centers_;
    std::vector<double> widths_;
    std::vector<Matrix> weights_;
    std::vector<Matrix> biases_;
    std::vector<int> active_;
};

} // namespace clmatch

#endif // CLMATCH_RBF_INERTIA_HPP
