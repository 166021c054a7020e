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

// Linear optics in the one- and two-photon sectors over n modes.
//
// A holder photon (modes a_k) and a verifier reference photon (modes b_k)
// meet on n independent 50/50 beam splitters:
//
//     a_k^+ -> (c_k^+ + d_k^+) / sqrt(2),    b_k^+ -> (c_k^+ - d_k^+) / sqrt(2)
//
// Only click statistics are needed downstream, so results are stored as a
// dense distribution over the O(n^2) two-photon detector events instead of
// as a general 2n-mode Fock vector.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smmoney/core.hpp"

namespace smmoney {

using Complex = std::complex<double>;

/// Pure single-photon state: amplitude of the photon occupying mode k.
class SinglePhotonState {
  public:
    SinglePhotonState() = default;

    explicit SinglePhotonState(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
        require_modes(static_cast<int>(amps_.size()));
        double norm = 0.0;
        for (const auto& a : amps_) {
            norm += std::norm(a);
        }
        if (std::abs(norm - 1.0) > kTolerance) {
            throw std::invalid_argument("single-photon state is not normalized (norm^2 = " +
                                        std::to_string(norm) + ")");
        }
    }

    int modes() const { return static_cast<int>(amps_.size()); }

    /// 1-based mode access.
    Complex amplitude(int k) const { return amps_[static_cast<std::size_t>(k - 1)]; }

    std::span<const Complex> amplitudes() const { return amps_; }

  private:
    std::vector<Complex> amps_;
};

/// One-photon density matrix eta = sum_kl A_kl |1_k><1_l|.
class SinglePhotonMixedState {
  public:
    SinglePhotonMixedState() = default;

    explicit SinglePhotonMixedState(Eigen::MatrixXcd a) : a_(std::move(a)) {
        if (a_.rows() != a_.cols()) {
            throw std::invalid_argument("coefficient matrix must be square");
        }
        require_modes(static_cast<int>(a_.rows()));
        if ((a_ - a_.adjoint()).cwiseAbs().maxCoeff() > kTolerance) {
            throw std::invalid_argument("coefficient matrix is not Hermitian");
        }
        if (std::abs(a_.trace() - Complex(1.0)) > kTolerance) {
            throw std::invalid_argument("coefficient matrix trace is not 1");
        }
        const Eigen::MatrixXcd h = 0.5 * (a_ + a_.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -kTolerance) {
            throw std::invalid_argument("coefficient matrix is not positive semidefinite");
        }
    }

    static SinglePhotonMixedState from_pure(const SinglePhotonState& psi) {
        const int n = psi.modes();
        Eigen::MatrixXcd a(n, n);
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
                a(k, l) = psi.amplitude(k + 1) * std::conj(psi.amplitude(l + 1));
            }
        }
        return SinglePhotonMixedState(std::move(a));
    }

    static SinglePhotonMixedState maximally_mixed(int n) {
        require_modes(n);
        return SinglePhotonMixedState(Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n));
    }

    /// p * first + (1 - p) * second.
    static SinglePhotonMixedState mixture(double p, const SinglePhotonMixedState& first,
                                          const SinglePhotonMixedState& second) {
        if (p < 0.0 || p > 1.0 || first.modes() != second.modes()) {
            throw std::invalid_argument("invalid mixture");
        }
        return SinglePhotonMixedState(p * first.a_ + (1.0 - p) * second.a_);
    }

    int modes() const { return static_cast<int>(a_.rows()); }

    /// 1-based entry A_kl.
    Complex coefficient(int k, int l) const { return a_(k - 1, l - 1); }

    const Eigen::MatrixXcd& matrix() const { return a_; }

  private:
    Eigen::MatrixXcd a_;
};

enum class Port : std::uint8_t { kC = 0, kD = 1 };

inline char port_name(Port p) { return p == Port::kC ? 'C' : 'D'; }

/// Two-photon click pattern at the 2n output detectors.
struct DetectorEvent {
    enum class Kind : std::uint8_t { kTwoSameMode, kTwoDistinctModes };

    Kind kind = Kind::kTwoSameMode;
    int k = 1;
    Port port_k = Port::kC;
    int l = 1;  // equals k for kTwoSameMode
    Port port_l = Port::kC;

    static DetectorEvent same_mode(Port port, int mode) {
        return {Kind::kTwoSameMode, mode, port, mode, port};
    }

    /// Canonicalizes so that k < l.
    static DetectorEvent distinct_modes(int k, Port port_k, int l, Port port_l) {
        if (k == l) {
            throw std::invalid_argument("distinct-mode event needs two different modes");
        }
        if (k > l) {
            return {Kind::kTwoDistinctModes, l, port_l, k, port_k};
        }
        return {Kind::kTwoDistinctModes, k, port_k, l, port_l};
    }

    std::string label() const {
        std::string s;
        s += port_name(port_k);
        s += std::to_string(k);
        s += kind == Kind::kTwoSameMode ? "x2" : std::string(",") + port_name(port_l) + std::to_string(l);
        return s;
    }

    friend bool operator==(const DetectorEvent&, const DetectorEvent&) = default;
};

/// Exact probability of every detector event, in canonical order:
/// 2n same-mode events (C_1, D_1, C_2, ...), then four port pairs
/// (CC, CD, DC, DD) for each tuple in lexicographic order.
class OutcomeDistribution {
  public:
    OutcomeDistribution() = default;

    explicit OutcomeDistribution(int n) : n_(n), probs_(event_count(n), 0.0) { require_modes(n); }

    static std::size_t event_count(int n) {
        return 2 * static_cast<std::size_t>(n) + 4 * tuple_count(n);
    }

    int modes() const { return n_; }
    std::size_t size() const { return probs_.size(); }

    std::size_t index_of(const DetectorEvent& e) const {
        if (e.kind == DetectorEvent::Kind::kTwoSameMode) {
            return 2 * static_cast<std::size_t>(e.k - 1) + static_cast<std::size_t>(e.port_k);
        }
        return 2 * static_cast<std::size_t>(n_) + 4 * tuple_index(n_, {e.k, e.l}) +
               2 * static_cast<std::size_t>(e.port_k) + static_cast<std::size_t>(e.port_l);
    }

    DetectorEvent event_at(std::size_t index) const {
        const auto same = 2 * static_cast<std::size_t>(n_);
        if (index < same) {
            return DetectorEvent::same_mode(static_cast<Port>(index % 2), static_cast<int>(index / 2) + 1);
        }
        std::size_t rest = index - same;
        const std::size_t pair = rest / 4;
        const auto ports = rest % 4;
        // Invert the lexicographic tuple enumeration.
        int k = 1;
        std::size_t row = static_cast<std::size_t>(n_ - 1);
        std::size_t offset = pair;
        while (offset >= row) {
            offset -= row;
            --row;
            ++k;
        }
        const int l = k + 1 + static_cast<int>(offset);
        return DetectorEvent::distinct_modes(k, static_cast<Port>(ports / 2), l, static_cast<Port>(ports % 2));
    }

    double operator[](std::size_t index) const { return probs_[index]; }
    double& operator[](std::size_t index) { return probs_[index]; }

    double probability(const DetectorEvent& e) const { return probs_[index_of(e)]; }

    std::span<const double> probabilities() const { return probs_; }

    double same_mode_mass() const {
        double s = 0.0;
        for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i) {
            s += probs_[i];
        }
        return s;
    }

    double total() const {
        double s = 0.0;
        for (double p : probs_) {
            s += p;
        }
        return s;
    }

    /// Probability that tuple (k, l) is reported, with either parity.
    double tuple_mass(Tuple t) const {
        const std::size_t base = 2 * static_cast<std::size_t>(n_) + 4 * tuple_index(n_, t);
        return probs_[base] + probs_[base + 1] + probs_[base + 2] + probs_[base + 3];
    }

  private:
    int n_ = 0;
    std::vector<double> probs_;
};

/// |x> = n^{-1/2} sum_k (-1)^{x_k} |1_k>.
inline SinglePhotonState encode_note_state(const BitString& x) {
    const int n = x.size();
    require_modes(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<Complex> amps(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        amps[static_cast<std::size_t>(k - 1)] = x.sign(k) * scale;
    }
    return SinglePhotonState(std::move(amps));
}

/// The verifier's uniform reference state |beta>.
inline SinglePhotonState local_reference_state(int n) {
    require_modes(n);
    return encode_note_state(BitString::zeros(n));
}

namespace detail {

inline void require_same_modes(int holder, int reference) {
    if (holder != reference) {
        throw std::invalid_argument("holder has " + std::to_string(holder) + " modes but reference has " +
                                    std::to_string(reference));
    }
}

}  // namespace detail

/// Click distribution for a pure holder photon against a pure reference.
///
/// For k < l the output operator contains
///   (a_k b_l + a_l b_k)/2 (c_k c_l - d_k d_l) + (a_l b_k - a_k b_l)/2 c_k d_l
///   + (a_k b_l - a_l b_k)/2 d_k c_l,
/// and for a single mode a_k b_k/2 (c_k^2 - d_k^2), where c_k^2|0> = sqrt(2)|2>.
inline OutcomeDistribution interfere_pure(const SinglePhotonState& holder, const SinglePhotonState& reference) {
    const int n = holder.modes();
    detail::require_same_modes(n, reference.modes());
    OutcomeDistribution out(n);
    const auto a = holder.amplitudes();
    const auto b = reference.amplitudes();
    for (int k = 0; k < n; ++k) {
        const double p = 0.5 * std::norm(a[k] * b[k]);
        out[2 * static_cast<std::size_t>(k)] = p;
        out[2 * static_cast<std::size_t>(k) + 1] = p;
    }
    std::size_t idx = 2 * static_cast<std::size_t>(n);
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            const double same = 0.25 * std::norm(a[k] * b[l] + a[l] * b[k]);
            const double cross = 0.25 * std::norm(a[l] * b[k] - a[k] * b[l]);
            out[idx++] = same;   // C_k C_l
            out[idx++] = cross;  // C_k D_l
            out[idx++] = cross;  // D_k C_l
            out[idx++] = same;   // D_k D_l
        }
    }
    return out;
}

/// Click distribution for a mixed holder photon; linear in A.
inline OutcomeDistribution interfere_mixed(const SinglePhotonMixedState& holder, const SinglePhotonState& reference) {
    const int n = holder.modes();
    detail::require_same_modes(n, reference.modes());
    OutcomeDistribution out(n);
    const Eigen::MatrixXcd& a = holder.matrix();
    const auto b = reference.amplitudes();
    for (int k = 0; k < n; ++k) {
        const double p = 0.5 * std::norm(b[k]) * a(k, k).real();
        out[2 * static_cast<std::size_t>(k)] = p;
        out[2 * static_cast<std::size_t>(k) + 1] = p;
    }
    std::size_t idx = 2 * static_cast<std::size_t>(n);
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            const double diag = std::norm(b[l]) * a(k, k).real() + std::norm(b[k]) * a(l, l).real();
            const double coh = 2.0 * (b[l] * a(k, l) * std::conj(b[k])).real();
            const double same = 0.25 * (diag + coh);
            const double cross = 0.25 * (diag - coh);
            out[idx++] = same;
            out[idx++] = cross;
            out[idx++] = cross;
            out[idx++] = same;
        }
    }
    return out;
}

/// <x|eta|x> = (1/n) sum_ef (-1)^{x_e + x_f} A_ef.
inline double fidelity_with_note(const SinglePhotonMixedState& eta, const BitString& x) {
    const int n = eta.modes();
    detail::require_same_modes(n, x.size());
    Complex s = 0.0;
    for (int e = 1; e <= n; ++e) {
        for (int f = 1; f <= n; ++f) {
            s += x.sign(e) * x.sign(f) * eta.coefficient(e, f);
        }
    }
    return s.real() / static_cast<double>(n);
}

/// Probability that the verifier reports a tuple with the wrong parity,
/// summed over all tuples: (1 - F_x) / 2.
inline double incorrect_parity_probability(const SinglePhotonMixedState& eta, const BitString& x) {
    return 0.5 * (1.0 - fidelity_with_note(eta, x));
}

/// Wrong-parity mass read directly off a distribution. Same-port clicks
/// announce parity 0, cross-port clicks parity 1.
inline double wrong_parity_mass(const OutcomeDistribution& dist, const BitString& x) {
    const int n = dist.modes();
    detail::require_same_modes(n, x.size());
    double wrong = 0.0;
    std::size_t base = 2 * static_cast<std::size_t>(n);
    for (int k = 1; k <= n; ++k) {
        for (int l = k + 1; l <= n; ++l, base += 4) {
            const bool parity = x.parity({k, l});
            wrong += parity ? dist[base] + dist[base + 3] : dist[base + 1] + dist[base + 2];
        }
    }
    return wrong;
}

}  // namespace smmoney
