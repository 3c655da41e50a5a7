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

#include "clmatch/rbf_inertia.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "clmatch/csv.hpp"
#include "clmatch/linalg.hpp"

namespace clmatch {

namespace {

constexpr const char *kFormatTag = "clmatch.rbf_inertia/1";

bool is_symmetric(const Matrix &A) {
    return (A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff());
}

} // namespace

RBFInertiaModel::RBFInertiaModel(std::vector<Vector> centers, std::vector<double> widths,
                                 std::vector<Matrix> weights, std::vector<Matrix> biases,
                                 std::vector<int> active_coords)
    : centers_(std::move(centers)), widths_(std::move(widths)), weights_(std::move(weights)),
      biases_(std::move(biases)), active_(std::move(active_coords)) {
    const std::size_t r = centers_.size();
    if (r == 0) {
        throw StructuralError("RBFInertiaModel: at least one center is required");
    }
    if (widths_.size() != r || weights_.size() != r || biases_.size() != r) {
        throw StructuralError("RBFInertiaModel: centers, widths, weights, biases differ in length");
    }
    n_ = static_cast<int>(centers_.front().size());
    for (std::size_t i = 0; i < r; ++i) {
        if (centers_[i].size() != n_ || weights_[i].rows() != n_ || weights_[i].cols() != n_ ||
            biases_[i].rows() != n_ || biases_[i].cols() != n_) {
            throw StructuralError("RBFInertiaModel: entry " + std::to_string(i) +
                                  " has inconsistent dimension");
        }
        if (!(widths_[i] > 0.0) || !std::isfinite(widths_[i])) {
            throw StructuralError("RBFInertiaModel: widths must be positive and finite");
        }
        if (!is_symmetric(weights_[i]) || !is_symmetric(biases_[i])) {
            throw StructuralError("RBFInertiaModel: weights and biases must be symmetric");
        }
    }
    for (int k : active_) {
        if (k < 0 || k >= n_) {
            throw StructuralError("RBFInertiaModel: active coordinate out of range");
        }
    }
}

RBFInertiaModel RBFInertiaModel::from_centers(const CenterSet &cs, std::vector<double> widths,
                                              std::vector<int> active_coords) {
    std::vector<Matrix> biases;
    for (const auto &Mc : cs.controlled_mass) {
        biases.push_back(Matrix::Zero(Mc.rows(), Mc.cols()));
    }
    return {cs.centers, std::move(widths), cs.controlled_mass, std::move(biases),
            std::move(active_coords)};
}

double RBFInertiaModel::squared_distance(std::size_t i, const Vector &q) const {
    if (active_.empty()) {
        return (q - centers_[i]).squaredNorm();
    }
    double d2 = 0.0;
    for (int k : active_) {
        const double d = q(k) - centers_[i](k);
        d2 += d * d;
    }
    return d2;
}

double RBFInertiaModel::basis(std::size_t i, const Vector &q) const {
    const double e = widths_[i];
    return std::exp(-e * e * squared_distance(i, q));
}

Vector RBFInertiaModel::basis_grad(std::size_t i, const Vector &q) const {
    const double e = widths_[i];
    const double h = basis(i, q);
    Vector g = Vector::Zero(n_);
    if (active_.empty()) {
        g = -2.0 * e * e * h * (q - centers_[i]);
    } else {
        for (int k : active_) {
            g(k) = -2.0 * e * e * h * (q(k) - centers_[i](k));
        }
    }
    return g;
}

Matrix RBFInertiaModel::evaluate(const Vector &q) const {
    if (q.size() != n_) {
        throw StructuralError("RBFInertiaModel::evaluate: wrong configuration size");
    }
    Matrix out = Matrix::Zero(n_, n_);
    for (std::size_t i = 0; i < size(); ++i) {
        out += basis(i, q) * weights_[i] + biases_[i];
    }
    return out;
}

Matrix RBFInertiaModel::mass_flow(const Vector &q, const Vector &qd) const {
    if (q.size() != n_ || qd.size() != n_) {
        throw StructuralError("RBFInertiaModel::mass_flow: wrong state size");
    }
    Matrix F = Matrix::Zero(n_, n_);
    for (std::size_t i = 0; i < size(); ++i) {
        F.noalias() += (weights_[i] * qd) * basis_grad(i, q).transpose();
    }
    return F;
}

Matrix RBFInertiaModel::coriolis(const State &s) const {
    return linalg::coriolis_from_flow(mass_flow(s.q, s.qd));
}

void RBFInertiaModel::save(std::ostream &os) const {
    auto num = [](double v) {
        if (!std::isfinite(v)) {
            throw ModelIoError("RBFInertiaModel::save: non-finite parameter");
        }
        return csv::format_double(v);
    };
    auto vec = [&](const double *p, Eigen::Index len) {
        std::string s = "[";
        for (Eigen::Index k = 0; k < len; ++k) {
            if (k != 0) {
                s += ", ";
            }
            s += num(p[k]);
        }
        return s + "]";
    };
    auto row_major = [&](const Matrix &A) {
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R = A;
        return vec(R.data(), R.size());
    };
    os << "{\n";
    os << "  \"format\": \"" << kFormatTag << "\",\n";
    os << "  \"n\": " << n_ << ",\n";
    os << "  \"r\": " << size() << ",\n";
    os << "  \"active_coords\": [";
    for (std::size_t k = 0; k < active_.size(); ++k) {
        os << (k ? ", " : "") << active_[k];
    }
    os << "],\n";
    os << "  \"centers\": [\n";
    for (std::size_t i = 0; i < size(); ++i) {
        os << "    {\"q\": " << vec(centers_[i].data(), centers_[i].size())
           << ", \"eps\": " << num(widths_[i]) << ", \"weight\": " << row_major(weights_[i])
           << ", \"bias\": " << row_major(biases_[i]) << "}" << (i + 1 < size() ? "," : "")
           << "\n";
    }
    os << "  ]\n}\n";
}

RBFInertiaModel RBFInertiaModel::load(std::istream &is) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception &e) {
        throw ModelIoError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != kFormatTag) {
            throw ModelIoError("unsupported model format tag");
        }
        const int n = doc.at("n").get<int>();
        const auto r = doc.at("r").get<std::size_t>();
        if (n < 1) {
            throw ModelIoError("model dimension must be positive");
        }
        const auto &entries = doc.at("centers");
        if (!entries.is_array() || entries.size() != r) {
            throw ModelIoError("model declares r = " + std::to_string(r) +
                               " but lists a different number of centers");
        }
        auto read_vec = [](const nlohmann::json &j, std::size_t len) {
            const auto v = j.get<std::vector<double>>();
            if (v.size() != len) {
                throw ModelIoError("model entry has wrong length");
            }
            return v;
        };
        auto read_mat = [&](const nlohmann::json &j) {
            const auto v = read_vec(j, static_cast<std::size_t>(n) * n);
            Matrix A(n, n);
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    A(a, b) = v[static_cast<std::size_t>(a) * n + b];
                }
            }
            return A;
        };
        std::vector<Vector> centers;
        std::vector<double> widths;
        std::vector<Matrix> weights;
        std::vector<Matrix> biases;
        for (const auto &e : entries) {
            const auto q = read_vec(e.at("q"), static_cast<std::size_t>(n));
            centers.emplace_back(Eigen::Map<const Vector>(q.data(), n));
            widths.push_back(e.at("eps").get<double>());
            weights.push_back(read_mat(e.at("weight")));
            biases.push_back(read_mat(e.at("bias")));
        }
        std::vector<int> active;
        if (doc.contains("active_coords")) {
            active = doc.at("active_coords").get<std::vector<int>>();
        }
        return {std::move(centers), std::move(widths), std::move(weights), std::move(biases),
                std::move(active)};
    } catch (const nlohmann::json::exception &e) {
        throw ModelIoError(std::string("malformed model file: ") + e.what());
    } catch (const StructuralError &e) {
        throw ModelIoError(std::string("inconsistent model file: ") + e.what());
    }
}

void RBFInertiaModel::save_file(const std::string &path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw ModelIoError("cannot open " + path + " for writing");
    }
    save(os);
}

RBFInertiaModel RBFInertiaModel::load_file(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw ModelIoError("cannot open " + path);
    }
    return load(is);
}

} // namespace clmatch
