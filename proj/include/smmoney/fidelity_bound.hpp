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

// Optimal average fidelity of 1 -> 2 cloning of the note states.
//
// The program is
//     maximize  Tr(M J)  subject to  J >= 0,  Tr_{V1 V2} J = I,
// with M = 2^{-n} sum_x |x><x| (x) (|x><x| (x) I + I (x) |x><x|) / 2 and
// |x> the real sign vector of the note state. Its dual is
//     minimize  Tr(Y)    subject to  Y (x) I >= M,
// so any Y satisfying the constraint certifies an upper bound.
//
// The sign flips x -> x XOR s act as D_s (x) D_s (x) D_s and leave M and the
// constraint invariant. Averaging over them shows the optimum is attained on
// matrices that are block diagonal in the parity character e_i + e_j + e_k
// (mod 2) of the basis vector |i, j, k>. Inside such a block the output trace
// is diagonal, so the trace constraint only touches diagonal entries.
// There are n blocks of size 3n - 2 and C(n, 3) blocks of size 6.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "smmoney/adversary.hpp"
#include "smmoney/channel.hpp"
#include "smmoney/fock.hpp"
#include "smmoney/rng.hpp"

namespace smmoney {

inline constexpr int kMaxObjectiveModes = 12;
inline constexpr int kMaxSolverModes = 20;

struct FidelityObjective {
    int n = 0;
    Eigen::MatrixXd m;  // n^3 x n^3, real symmetric

    /// Closed form of M[(i j k), (i' j' k')].
    static double entry(int n, int i, int j, int k, int ip, int jp, int kp) {
        auto paired = [](int a, int b, int c, int d) {
            return (a == b && c == d) || (a == c && b == d) || (a == d && b == c);
        };
        double v = 0.0;
        if (k == kp && paired(i, ip, j, jp)) v += 1.0;
        if (j == jp && paired(i, ip, k, kp)) v += 1.0;
        return v / (2.0 * n * n);
    }
};

inline FidelityObjective build_objective(int n) {
    require_modes(n);
    if (n > kMaxObjectiveModes) {
        throw std::invalid_argument("objective is limited to n <= 12");
    }
    FidelityObjective obj;
    obj.n = n;
    const auto dim = ChoiMatrix::dim(n);
    obj.m = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int ip = 0; ip < n; ++ip)
                    for (int jp = 0; jp < n; ++jp)
                        for (int kp = 0; kp < n; ++kp) {
                            const double v = FidelityObjective::entry(n, i, j, k, ip, jp, kp);
                            if (v != 0.0) {
                                obj.m(ChoiMatrix::index(n, i, j, k), ChoiMatrix::index(n, ip, jp, kp)) = v;
                            }
                        }
    return obj;
}

struct SolverOptions {
    bool use_symmetry = true;
    int max_iterations = 20000;
    int check_every = 50;
    double gap_tolerance = 1e-6;
    double rho = 0.05;
    int restarts = 0;             // extra runs from random feasible points
    std::uint64_t seed = 0x5eed;  // for random starts
    int max_choi_modes = 8;       // assemble J_star only up to this n
};

struct FidelityResult {
    int n = 0;
    double f_bar_star = 0.0;   // Tr(M J_star) of the returned feasible J_star
    double dual_bound = 0.0;   // certified upper bound
    double gap = 0.0;
    int iterations = 0;
    bool converged = false;
    double restart_spread = 0.0;  // max |F_bar| difference across restarts
    std::optional<ChoiMatrix> j_star;  // kept when n <= SolverOptions::max_choi_modes

    double bound() const { return 0.5 + 1.0 / n; }
    double trivial_value() const { return 0.5 + 0.5 / n; }
};

namespace detail {

/// Basis vectors grouped into blocks that the optimizer keeps independent.
struct BlockLayout {
    int n = 0;
    std::vector<std::vector<int>> blocks;  // flat basis indices, ascending

    int input(int idx) const { return idx / (n * n); }
    int output(int idx) const { return idx % (n * n); }
};

inline BlockLayout make_layout(int n, bool use_symmetry) {
    BlockLayout layout;
    layout.n = n;
    const int dim = n * n * n;
    if (!use_symmetry) {
        layout.blocks.emplace_back(dim);
        for (int a = 0; a < dim; ++a) layout.blocks[0][static_cast<std::size_t>(a)] = a;
        return layout;
    }
    std::map<std::uint64_t, std::vector<int>> by_character;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const std::uint64_t ch = (std::uint64_t{1} << i) ^ (std::uint64_t{1} << j) ^ (std::uint64_t{1} << k);
                by_character[ch].push_back(static_cast<int>(ChoiMatrix::index(n, i, j, k)));
            }
    for (auto& [ch, members] : by_character) layout.blocks.push_back(std::move(members));
    return layout;
}

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct BlockMatrix {
    std::vector<Mat<Scalar>> b;
};

template <class Scalar>
BlockMatrix<Scalar> zeros_like(const BlockLayout& layout) {
    BlockMatrix<Scalar> out;
    for (const auto& blk : layout.blocks) {
        const auto s = static_cast<Eigen::Index>(blk.size());
        out.b.push_back(Mat<Scalar>::Zero(s, s));
    }
    return out;
}

template <class Scalar>
BlockMatrix<Scalar> restrict_objective(const BlockLayout& layout) {
    const int n = layout.n;
    auto out = zeros_like<Scalar>(layout);
    for (std::size_t bi = 0; bi < layout.blocks.size(); ++bi) {
        const auto& blk = layout.blocks[bi];
        for (std::size_t p = 0; p < blk.size(); ++p)
            for (std::size_t q = 0; q < blk.size(); ++q) {
                const int a = blk[p], b = blk[q];
                out.b[bi](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = FidelityObjective::entry(
                    n, a / (n * n), (a / n) % n, a % n, b / (n * n), (b / n) % n, b % n);
            }
    }
    return out;
}

/// Tr_out of a block matrix as an n x n matrix.
template <class Scalar>
Mat<Scalar> output_trace(const BlockMatrix<Scalar>& x, const BlockLayout& layout) {
    const int n = layout.n;
    Mat<Scalar> t = Mat<Scalar>::Zero(n, n);
    for (std::size_t bi = 0; bi < layout.blocks.size(); ++bi) {
        const auto& blk = layout.blocks[bi];
        for (std::size_t p = 0; p < blk.size(); ++p)
            for (std::size_t q = 0; q < blk.size(); ++q)
                if (layout.output(blk[p]) == layout.output(blk[q]))
                    t(layout.input(blk[p]), layout.input(blk[q])) +=
                        x.b[bi](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
    }
    return t;
}

/// Adds (D (x) I) restricted to the layout.
template <class Scalar>
void add_input_operator(BlockMatrix<Scalar>& x, const BlockLayout& layout, const Mat<Scalar>& d, double scale) {
    for (std::size_t bi = 0; bi < layout.blocks.size(); ++bi) {
        const auto& blk = layout.blocks[bi];
        for (std::size_t p = 0; p < blk.size(); ++p)
            for (std::size_t q = 0; q < blk.size(); ++q)
                if (layout.output(blk[p]) == layout.output(blk[q]))
                    x.b[bi](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) +=
                        scale * d(layout.input(blk[p]), layout.input(blk[q]));
    }
}

/// Orthogonal projection onto {X : Tr_out X = I}.
template <class Scalar>
void project_affine(BlockMatrix<Scalar>& x, const BlockLayout& layout) {
    const int n = layout.n;
    Mat<Scalar> delta = output_trace(x, layout) - Mat<Scalar>::Identity(n, n);
    add_input_operator(x, layout, delta, -1.0 / (static_cast<double>(n) * n));
}

template <class Scalar>
void project_psd(BlockMatrix<Scalar>& x) {
    for (auto& blk : x.b) {
        const Mat<Scalar> h = 0.5 * (blk + blk.adjoint());
        Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(h);
        const Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0);
        blk = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint();
    }
}

template <class Scalar>
double inner(const BlockMatrix<Scalar>& a, const BlockMatrix<Scalar>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.b.size(); ++i) s += std::real((a.b[i].adjoint() * b.b[i]).trace());
    return s;
}

template <class Scalar>
double norm(const BlockMatrix<Scalar>& a) {
    double s = 0.0;
    for (const auto& blk : a.b) s += blk.squaredNorm();
    return std::sqrt(s);
}

/// Λ^{-1/2} for a Hermitian positive-definite Λ.
template <class Scalar>
Mat<Scalar> inverse_sqrt(const Mat<Scalar>& lambda) {
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(0.5 * (lambda + lambda.adjoint()));
    Eigen::VectorXd vals = eig.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) <= 0.0) {
            throw std::runtime_error("output trace of the iterate is singular");
        }
        vals(i) = 1.0 / std::sqrt(vals(i));
    }
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint();
}

/// Early iterates can have a singular output trace; they are skipped.
template <class Scalar>
bool has_positive_output_trace(const BlockMatrix<Scalar>& z, const BlockLayout& layout) {
    const Mat<Scalar> t = output_trace(z, layout);
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(0.5 * (t + t.adjoint()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() > 1e-9;
}

/// Congruence (L (x) I) Z (L (x) I)^dagger with L = (Tr_out Z)^{-1/2}: PSD and
/// exactly trace preserving.
template <class Scalar>
BlockMatrix<Scalar> make_feasible(const BlockMatrix<Scalar>& z, const BlockLayout& layout) {
    const int n = layout.n;
    const Mat<Scalar> l = inverse_sqrt<Scalar>(output_trace(z, layout));
    auto out = zeros_like<Scalar>(layout);
    for (std::size_t bi = 0; bi < layout.blocks.size(); ++bi) {
        const auto& blk = layout.blocks[bi];
        const auto s = static_cast<Eigen::Index>(blk.size());
        // Left factor restricted to the block: K(p, p') = L(in p, in p') when outputs agree.
        Mat<Scalar> kmat = Mat<Scalar>::Zero(s, s);
        for (Eigen::Index p = 0; p < s; ++p)
            for (Eigen::Index q = 0; q < s; ++q)
                if (layout.output(blk[static_cast<std::size_t>(p)]) == layout.output(blk[static_cast<std::size_t>(q)]))
                    kmat(p, q) = l(layout.input(blk[static_cast<std::size_t>(p)]),
                                   layout.input(blk[static_cast<std::size_t>(q)]));
        out.b[bi] = kmat * z.b[bi] * kmat.adjoint();
        out.b[bi] = 0.5 * (out.b[bi] + out.b[bi].adjoint()).eval();
    }
    (void)n;
    return out;
}

/// Dual certificate from the scaled multiplier: Y = Tr_out(M - rho U)/n^2,
/// shifted by t I until Y (x) I - M >= 0. Returns Tr(Y) + n t.
template <class Scalar>
double dual_bound(const BlockMatrix<Scalar>& m, const BlockMatrix<Scalar>& u, double rho, const BlockLayout& layout) {
    const int n = layout.n;
    BlockMatrix<Scalar> r = m;
    for (std::size_t i = 0; i < r.b.size(); ++i) r.b[i] -= rho * u.b[i];
    Mat<Scalar> y = output_trace(r, layout) / (static_cast<double>(n) * n);
    y = (0.5 * (y + y.adjoint())).eval();
    // Slack S = Y (x) I - M on every block.
    BlockMatrix<Scalar> slack = zeros_like<Scalar>(layout);
    add_input_operator(slack, layout, y, 1.0);
    double min_eig = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < slack.b.size(); ++i) {
        const Mat<Scalar> s = slack.b[i] - m.b[i];
        Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    }
    const double t = std::max(0.0, -min_eig);
    return std::real(y.trace()) + n * t;
}

template <class Scalar>
BlockMatrix<Scalar> random_feasible(const BlockLayout& layout, Rng& rng) {
    auto z = zeros_like<Scalar>(layout);
    auto gauss = [&rng] {
        // Box-Muller; only needs to be generic, not exact.
        const double u1 = std::max(rng.uniform(), 1e-300);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * rng.uniform());
    };
    for (auto& blk : z.b) {
        Mat<Scalar> g(blk.rows(), blk.cols());
        for (Eigen::Index a = 0; a < g.rows(); ++a)
            for (Eigen::Index b = 0; b < g.cols(); ++b) {
                if constexpr (std::is_same_v<Scalar, double>) {
                    g(a, b) = gauss();
                } else {
                    g(a, b) = Scalar(gauss(), gauss());
                }
            }
        blk = g * g.adjoint();
    }
    return make_feasible(z, layout);
}

template <class Scalar>
Eigen::MatrixXcd assemble(const BlockMatrix<Scalar>& x, const BlockLayout& layout) {
    const auto dim = static_cast<Eigen::Index>(layout.n) * layout.n * layout.n;
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t bi = 0; bi < layout.blocks.size(); ++bi) {
        const auto& blk = layout.blocks[bi];
        for (std::size_t p = 0; p < blk.size(); ++p)
            for (std::size_t q = 0; q < blk.size(); ++q)
                full(blk[p], blk[q]) = Complex(x.b[bi](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)));
    }
    return full;
}

template <class Scalar>
struct RunOutcome {
    double primal = 0.0;
    double dual = 0.0;
    int iterations = 0;
    bool converged = false;
    BlockMatrix<Scalar> j;
};

template <class Scalar>
RunOutcome<Scalar> admm_run(const BlockMatrix<Scalar>& m, const BlockLayout& layout, BlockMatrix<Scalar> z,
                    const SolverOptions& opt) {
    auto u = zeros_like<Scalar>(layout);
    double rho = opt.rho;
    RunOutcome<Scalar> best;
    best.primal = -std::numeric_limits<double>::infinity();
    best.dual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opt.max_iterations; ++it) {
        BlockMatrix<Scalar> x = z;
        for (std::size_t i = 0; i < x.b.size(); ++i) x.b[i] = z.b[i] - u.b[i] + m.b[i] / rho;
        project_affine(x, layout);
        BlockMatrix<Scalar> z_old = z;
        z = x;
        for (std::size_t i = 0; i < z.b.size(); ++i) z.b[i] += u.b[i];
        project_psd(z);
        double r_primal = 0.0, r_dual = 0.0;
        for (std::size_t i = 0; i < u.b.size(); ++i) {
            u.b[i] += x.b[i] - z.b[i];
            r_primal += (x.b[i] - z.b[i]).squaredNorm();
            r_dual += (z.b[i] - z_old.b[i]).squaredNorm();
        }
        r_primal = std::sqrt(r_primal);
        r_dual = rho * std::sqrt(r_dual);

        const bool check = it % opt.check_every == 0 || it == opt.max_iterations;
        if (check && has_positive_output_trace(z, layout)) {
            const auto feasible = make_feasible(z, layout);
            const double primal = inner(m, feasible);
            const double dual = dual_bound(m, u, rho, layout);
            if (primal > best.primal) {
                best.primal = primal;
                best.j = feasible;
            }
            best.dual = std::min(best.dual, dual);
            best.iterations = it;
            if (best.dual - best.primal < opt.gap_tolerance) {
                best.converged = true;
                break;
            }
            // Residual balancing; U is rescaled to keep rho U fixed.
            if (r_primal > 10.0 * r_dual) {
                rho *= 2.0;
                for (auto& blk : u.b) blk /= 2.0;
            } else if (r_dual > 10.0 * r_primal) {
                rho /= 2.0;
                for (auto& blk : u.b) blk *= 2.0;
            }
        }
    }
    return best;
}

/// (J + swap_{V1 V2}(J)) / 2, which keeps feasibility and Tr(M J). The swap
/// (i, j, k) -> (i, k, j) preserves the parity character, hence every block.
template <class Scalar>
BlockMatrix<Scalar> symmetrize_verifiers(const BlockMatrix<Scalar>& x, const BlockLayout& layout) {
    const int n = layout.n;
    BlockMatrix<Scalar> out = x;
    for (std::size_t bi = 0; bi < layout.blocks.size(); ++bi) {
        const auto& blk = layout.blocks[bi];
        std::map<int, Eigen::Index> pos;
        for (std::size_t p = 0; p < blk.size(); ++p) pos[blk[p]] = static_cast<Eigen::Index>(p);
        std::vector<Eigen::Index> perm(blk.size());
        for (std::size_t p = 0; p < blk.size(); ++p) {
            const int a = blk[p];
            const int swapped = static_cast<int>(ChoiMatrix::index(n, a / (n * n), a % n, (a / n) % n));
            perm[p] = pos.at(swapped);
        }
        const auto s = static_cast<Eigen::Index>(blk.size());
        for (Eigen::Index p = 0; p < s; ++p)
            for (Eigen::Index q = 0; q < s; ++q)
                out.b[bi](p, q) = 0.5 * (x.b[bi](p, q) + x.b[bi](perm[static_cast<std::size_t>(p)],
                                                                  perm[static_cast<std::size_t>(q)]));
        out.b[bi] = (0.5 * (out.b[bi] + out.b[bi].adjoint())).eval();
    }
    return out;
}

}  // namespace detail

/// Solves the cloning program by ADMM with a dual certificate. Scalar is
/// double (real-symmetric iterates) or std::complex<double>. The objective
/// blocks come from the closed form, so no n^3 x n^3 matrix is formed unless
/// the Choi matrix of the optimum is requested.
template <class Scalar = double>
FidelityResult maximize_fidelity(int n, const SolverOptions& opt = {}) {
    require_modes(n);
    if (n > kMaxSolverModes) {
        throw std::invalid_argument("fidelity solver is limited to n <= " + std::to_string(kMaxSolverModes));
    }
    const auto layout = detail::make_layout(n, opt.use_symmetry);
    const auto m = detail::restrict_objective<Scalar>(layout);

    // Start from the channel that outputs I/n^2 for every input.
    detail::BlockMatrix<Scalar> start = detail::zeros_like<Scalar>(layout);
    for (auto& blk : start.b) {
        blk.setIdentity();
        blk /= static_cast<double>(n) * n;
    }
    auto run = detail::admm_run(m, layout, start, opt);

    FidelityResult result;
    result.n = n;
    result.iterations = run.iterations;
    Rng rng(opt.seed);
    double lo = run.primal, hi = run.primal;
    bool all_converged = run.converged;
    for (int r = 0; r < opt.restarts; ++r) {
        auto other = detail::admm_run(m, layout, detail::random_feasible<Scalar>(layout, rng), opt);
        lo = std::min(lo, other.primal);
        hi = std::max(hi, other.primal);
        run.dual = std::min(run.dual, other.dual);
        all_converged = all_converged && other.converged;
        result.iterations = std::max(result.iterations, other.iterations);
        if (other.primal > run.primal) {
            run.primal = other.primal;
            run.j = std::move(other.j);
        }
    }
    result.restart_spread = hi - lo;

    const auto sym = detail::symmetrize_verifiers(run.j, layout);
    result.f_bar_star = detail::inner(m, sym);
    result.dual_bound = run.dual;
    result.gap = result.dual_bound - result.f_bar_star;
    result.converged = all_converged && result.gap < opt.gap_tolerance;
    if (n <= opt.max_choi_modes) {
        result.j_star = ChoiMatrix(n, detail::assemble(sym, layout));
    }
    return result;
}

/// Tr(M J).
inline double average_fidelity(const FidelityObjective& obj, const ChoiMatrix& j) {
    return (obj.m.cast<Complex>().cwiseProduct(j.matrix().transpose())).sum().real();
}

struct CloningFigures {
    double f = 0.0;     // 2^{-n} sum_x <x|eta_x|x>
    double g = 0.0;     // same for tau_x
    double err1 = 0.0;  // Ver1 wrong-parity probability per copy
    double err2 = 0.0;

    double f_bar() const { return 0.5 * (f + g); }
    double combined_error() const { return err1 + err2; }
};

/// Exact figures of merit, averaged over all 2^n strings.
inline CloningFigures cloning_figures(const ClonerChannel& channel) {
    const int n = channel.modes();
    if (n > 16) {
        throw std::invalid_argument("exhaustive averaging is limited to n <= 16");
    }
    const auto ref = local_reference_state(n);
    CloningFigures out;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        const BitString x(n, bits);
        const auto [eta, tau] = channel.apply(SinglePhotonMixedState::from_pure(encode_note_state(x)));
        out.f += fidelity_with_note(eta, x);
        out.g += fidelity_with_note(tau, x);
        out.err1 += wrong_parity_mass(interfere_mixed(eta, ref), x);
        out.err2 += wrong_parity_mass(interfere_mixed(tau, ref), x);
    }
    const double inv = 1.0 / static_cast<double>(count);
    out.f *= inv;
    out.g *= inv;
    out.err1 *= inv;
    out.err2 *= inv;
    return out;
}

struct RateCheck {
    double analytic = 0.0;
    double empirical = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;

    bool within(double sigmas) const { return std::abs(empirical - analytic) <= sigmas * stderr_ + 1e-12; }
};

struct CrossCheck {
    CloningFigures figures;
    RateCheck ver1;
    RateCheck ver2;
    RateCheck combined;

    bool pass(double sigmas = 4.0) const {
        return ver1.within(sigmas) && ver2.within(sigmas) && combined.within(sigmas);
    }
};

/// Feeds the channel to the forgery simulator as a collective cloner and
/// compares per-copy wrong-parity rates with 1/2 (1 - F), 1/2 (1 - G) and
/// their sum 1 - (F + G)/2.
inline CrossCheck cross_check_with_adversary(const ChoiMatrix& j, std::size_t copies_per_trial, std::size_t trials,
                                             std::uint64_t seed, unsigned workers = 1) {
    const int n = j.modes();
    SchemeParams params;
    params.n = n;
    params.q = copies_per_trial;
    params.l_size = copies_per_trial;
    params.t_max = copies_per_trial;
    const auto strategy = AttackStrategy::collective(j);
    const ForgeryStats stats = simulate_forgery(strategy, params, trials, seed, workers);

    CrossCheck out;
    out.figures = cloning_figures(*strategy.cloner);
    auto rate = [](std::size_t wrong, std::size_t tested, double analytic) {
        RateCheck r;
        r.analytic = analytic;
        r.samples = tested;
        r.empirical = ForgeryStats::ratio(wrong, tested);
        r.stderr_ = std::sqrt(std::max(analytic * (1.0 - analytic), 0.0) / static_cast<double>(tested));
        return r;
    };
    out.ver1 = rate(stats.ver1.attacked_wrong, stats.ver1.attacked_tested, 0.5 * (1.0 - out.figures.f));
    out.ver2 = rate(stats.ver2.attacked_wrong, stats.ver2.attacked_tested, 0.5 * (1.0 - out.figures.g));
    out.combined.analytic = 1.0 - out.figures.f_bar();
    out.combined.empirical = out.ver1.empirical + out.ver2.empirical;
    out.combined.stderr_ = std::hypot(out.ver1.stderr_, out.ver2.stderr_);
    out.combined.samples = out.ver1.samples + out.ver2.samples;
    return out;
}

}  // namespace smmoney
