// Copyright 2026 The smmoney Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// 1 -> 2 cloning channels restricted to one photon per party.
//
// Choi convention: J = sum_{i,i'} |i><i'| (x) Phi(|i><i'|) on
// input (x) Ver1 (x) Ver2, each factor n-dimensional; basis index
// (i, j, k) -> i n^2 + j n + k. Trace preservation reads Tr_{V1 V2} J = I.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "smmoney/fock.hpp"

namespace smmoney {

inline constexpr double kChoiPsdTolerance = 1e-8;
inline constexpr double kChoiTraceTolerance = 1e-7;

class ChoiMatrix {
  public:
    ChoiMatrix() = default;

    ChoiMatrix(int n, Eigen::MatrixXcd j) : n_(n), j_(std::move(j)) {
        require_modes(n);
        const auto dim = static_cast<Eigen::Index>(n) * n * n;
        if (j_.rows() != dim || j_.cols() != dim) {
            throw std::invalid_argument("Choi matrix must be n^3 x n^3");
        }
        if ((j_ - j_.adjoint()).cwiseAbs().maxCoeff() > kChoiPsdTolerance) {
            throw std::invalid_argument("Choi matrix is not Hermitian");
        }
        if (min_eigenvalue() < -kChoiPsdTolerance) {
            throw std::invalid_argument("Choi matrix is not positive semidefinite");
        }
        if ((output_trace() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() > kChoiTraceTolerance) {
            throw std::invalid_argument("Choi matrix is not trace preserving");
        }
    }

    /// Ver1 receives the input untouched, Ver2 gets I/n.
    static ChoiMatrix identity_and_discard(int n) {
        ChoiMatrix c;
        c.n_ = n;
        c.j_ = Eigen::MatrixXcd::Zero(dim(n), dim(n));
        for (int i = 0; i < n; ++i) {
            for (int ip = 0; ip < n; ++ip) {
                for (int k = 0; k < n; ++k) {
                    c.j_(index(n, i, i, k), index(n, ip, ip, k)) = 1.0 / n;
                }
            }
        }
        return ChoiMatrix(n, std::move(c.j_));
    }

    /// Both verifiers get I/n regardless of the input.
    static ChoiMatrix discard_both(int n) {
        return ChoiMatrix(n, Eigen::MatrixXcd::Identity(dim(n), dim(n)) / static_cast<double>(n * n));
    }

    static Eigen::Index dim(int n) { return static_cast<Eigen::Index>(n) * n * n; }

    static Eigen::Index index(int n, int i, int j, int k) {
        return (static_cast<Eigen::Index>(i) * n + j) * n + k;
    }

    int modes() const { return n_; }
    const Eigen::MatrixXcd& matrix() const { return j_; }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (j_ + j_.adjoint()), Eigen::EigenvaluesOnly);
        return eig.eigenvalues().minCoeff();
    }

    Eigen::MatrixXcd output_trace() const {
        Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n_, n_);
        for (int i = 0; i < n_; ++i) {
            for (int ip = 0; ip < n_; ++ip) {
                for (int j = 0; j < n_; ++j) {
                    for (int k = 0; k < n_; ++k) {
                        t(i, ip) += j_(index(n_, i, j, k), index(n_, ip, j, k));
                    }
                }
            }
        }
        return t;
    }

    /// Exchanges the roles of Ver1 and Ver2.
    ChoiMatrix swapped() const {
        Eigen::MatrixXcd s(j_.rows(), j_.cols());
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    for (int ip = 0; ip < n_; ++ip)
                        for (int jp = 0; jp < n_; ++jp)
                            for (int kp = 0; kp < n_; ++kp)
                                s(index(n_, i, k, j), index(n_, ip, kp, jp)) =
                                    j_(index(n_, i, j, k), index(n_, ip, jp, kp));
        return ChoiMatrix(n_, std::move(s));
    }

  private:
    int n_ = 0;
    Eigen::MatrixXcd j_;
};

/// A cloning channel prepared for repeated application to one-photon inputs:
/// only the two single-verifier marginals are kept.
class ClonerChannel {
  public:
    explicit ClonerChannel(const ChoiMatrix& choi) : n_(choi.modes()) {
        const int n = n_;
        const auto& j = choi.matrix();
        ver1_.assign(static_cast<std::size_t>(n * n), Eigen::MatrixXcd::Zero(n, n));
        ver2_.assign(static_cast<std::size_t>(n * n), Eigen::MatrixXcd::Zero(n, n));
        for (int i = 0; i < n; ++i) {
            for (int ip = 0; ip < n; ++ip) {
                auto& m1 = ver1_[static_cast<std::size_t>(i * n + ip)];
                auto& m2 = ver2_[static_cast<std::size_t>(i * n + ip)];
                for (int a = 0; a < n; ++a) {
                    for (int b = 0; b < n; ++b) {
                        for (int c = 0; c < n; ++c) {
                            m1(a, b) += j(ChoiMatrix::index(n, i, a, c), ChoiMatrix::index(n, ip, b, c));
                            m2(a, b) += j(ChoiMatrix::index(n, i, c, a), ChoiMatrix::index(n, ip, c, b));
                        }
                    }
                }
            }
        }
    }

    int modes() const { return n_; }

    /// (eta, tau): the states reaching Ver1 and Ver2 for input rho.
    std::pair<SinglePhotonMixedState, SinglePhotonMixedState> apply(const Eigen::MatrixXcd& rho) const {
        const int n = n_;
        Eigen::MatrixXcd eta = Eigen::MatrixXcd::Zero(n, n);
        Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int ip = 0; ip < n; ++ip) {
                const Complex w = rho(i, ip);
                if (w == Complex(0.0)) {
                    continue;
                }
                eta += w * ver1_[static_cast<std::size_t>(i * n + ip)];
                tau += w * ver2_[static_cast<std::size_t>(i * n + ip)];
            }
        }
        // Remove rounding asymmetry before validation.
        return {SinglePhotonMixedState(0.5 * (eta + eta.adjoint())),
                SinglePhotonMixedState(0.5 * (tau + tau.adjoint()))};
    }

    std::pair<SinglePhotonMixedState, SinglePhotonMixedState> apply(const SinglePhotonMixedState& rho) const {
        return apply(rho.matrix());
    }

  private:
    int n_;
    std::vector<Eigen::MatrixXcd> ver1_;
    std::vector<Eigen::MatrixXcd> ver2_;
};

}  // namespace smmoney
