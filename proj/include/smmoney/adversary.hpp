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

// Forging strategies against single-photon notes and the analytic bounds
// they are measured against.
//
// A strategy has two layers. The per-copy attack (honest split,
// measure-and-resend, or a collective cloner) acts independently on every
// copy the forger knows nothing about. Around it, register manipulation and
// adaptive queries decide which positions never need forging at all:
//
//  * register manipulation marks (A-1)|L| positions consumed in each forged
//    note, on disjoint sets, so each verifier only ever draws from positions
//    the other note leaves genuine;
//  * adaptive forging spends A-2 Bank contacts on auxiliary verifications and
//    is granted full knowledge of those (A-2)|L| copies.
//
// Here A = ceil(T/|L|) is the number of Bank contacts a note allows.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smmoney/channel.hpp"
#include "smmoney/fock.hpp"
#include "smmoney/parallel.hpp"
#include "smmoney/protocol.hpp"
#include "smmoney/rng.hpp"

namespace smmoney {

enum class CopyAttack : std::uint8_t {
    kHonest,            // genuine copy to Ver1, fresh random copy to Ver2
    kMeasureResend,     // pair-basis measurement, same re-encoded state to both
    kCollectiveCloner,  // one cloning channel per copy
};

struct AttackStrategy {
    CopyAttack per_copy = CopyAttack::kHonest;
    std::shared_ptr<const ClonerChannel> cloner;  // kCollectiveCloner only
    bool register_manipulation = false;
    bool adaptive = false;
    std::vector<std::size_t> known_copies;  // adaptive: explicit queried set, else drawn at random
    bool generalized_basis = false;         // measure-and-resend on even n != 4

    static AttackStrategy honest() { return {}; }

    static AttackStrategy measure_resend(bool generalized = false) {
        AttackStrategy s;
        s.per_copy = CopyAttack::kMeasureResend;
        s.generalized_basis = generalized;
        return s;
    }

    static AttackStrategy collective(const ChoiMatrix& choi) {
        AttackStrategy s;
        s.per_copy = CopyAttack::kCollectiveCloner;
        s.cloner = std::make_shared<const ClonerChannel>(choi);
        return s;
    }

    AttackStrategy with_register_manipulation() const {
        AttackStrategy s = *this;
        s.register_manipulation = true;
        return s;
    }

    AttackStrategy with_adaptive(std::vector<std::size_t> known = {}) const {
        AttackStrategy s = *this;
        s.adaptive = true;
        s.known_copies = std::move(known);
        return s;
    }

    std::string name() const {
        std::string base;
        switch (per_copy) {
            case CopyAttack::kHonest: base = "honest"; break;
            case CopyAttack::kMeasureResend: base = "measure_resend"; break;
            case CopyAttack::kCollectiveCloner: base = "collective_cloner"; break;
        }
        if (register_manipulation) base += "+register";
        if (adaptive) base += "+adaptive";
        return base;
    }
};

/// Copies withheld from each verifier by register manipulation: (A-1)|L|.
inline std::size_t register_withheld(const SchemeParams& params) {
    return (params.max_bank_contacts() - 1) * params.l_size;
}

/// Copies learned through auxiliary Bank contacts: (A-2)|L| when A >= 2.
inline std::size_t adaptive_known(const SchemeParams& params) {
    const std::size_t a = params.max_bank_contacts();
    return a >= 2 ? (a - 2) * params.l_size : 0;
}

struct MeasureResendOutcome {
    Tuple learned;
    bool parity = false;
    SinglePhotonState resent;
};

/// Measures in the pair basis (|2i-1> +- |2i>)/sqrt(2) and re-encodes the
/// learned parity with uniformly random bits elsewhere.
inline MeasureResendOutcome measure_resend(const SinglePhotonMixedState& copy, Rng& rng, bool generalized = false) {
    const int n = copy.modes();
    if (n != 4 && !generalized) {
        throw std::invalid_argument("measure-and-resend basis is defined for n = 4; enable the generalized basis");
    }
    if (n % 2 != 0) {
        throw std::invalid_argument("generalized measure-and-resend basis needs an even mode count");
    }
    // Born probabilities <v|A|v> for v = (|a> + s|b>)/sqrt(2).
    std::vector<double> probs;
    probs.reserve(static_cast<std::size_t>(n));
    for (int a = 1; a < n; a += 2) {
        const int b = a + 1;
        const double diag = 0.5 * (copy.coefficient(a, a).real() + copy.coefficient(b, b).real());
        const double coh = copy.coefficient(a, b).real();
        probs.push_back(std::max(0.0, diag + coh));  // "+" outcome, parity 0
        probs.push_back(std::max(0.0, diag - coh));  // "-" outcome, parity 1
    }
    const std::size_t pick = sample_index(probs, rng);
    const int a = 2 * static_cast<int>(pick / 2) + 1;
    const bool parity = (pick % 2) == 1;

    std::uint64_t bits = rng.next();
    const bool ra = ((bits >> (a - 1)) & 1U) != 0;
    bits &= ~(std::uint64_t{1} << a);
    if (ra != parity) {
        bits |= std::uint64_t{1} << a;
    }
    return {{a, a + 1}, parity, encode_note_state(BitString(n, bits))};
}

enum class CopyOrigin : std::uint8_t {
    kAttacked,  // produced by the per-copy attack
    kGenuine,   // untouched copy routed through register manipulation
    kKnown,     // re-prepared from adaptive knowledge
    kWithheld,  // marked consumed, never tested
};

struct ForgedNotes {
    Note<PhotonCopy> first;
    Note<PhotonCopy> second;
    std::vector<CopyOrigin> origin_first;
    std::vector<CopyOrigin> origin_second;
    std::vector<std::size_t> known;       // positions learned adaptively
    std::size_t auxiliary_contacts = 0;   // Bank contacts spent before forging
};

inline std::pair<PhotonCopy, PhotonCopy> attack_copy(const AttackStrategy& strategy, const PhotonCopy& genuine,
                                                     Rng& rng) {
    const int n = copy_modes(genuine);
    switch (strategy.per_copy) {
        case CopyAttack::kHonest:
            return {genuine, PhotonCopy{BitString::random(n, rng)}};
        case CopyAttack::kMeasureResend: {
            auto m = measure_resend(density(genuine), rng, strategy.generalized_basis);
            return {PhotonCopy{m.resent}, PhotonCopy{m.resent}};
        }
        case CopyAttack::kCollectiveCloner: {
            if (!strategy.cloner || strategy.cloner->modes() != n) {
                throw std::invalid_argument("collective cloner does not match the note's mode count");
            }
            auto [eta, tau] = strategy.cloner->apply(density(genuine));
            return {PhotonCopy{std::move(eta)}, PhotonCopy{std::move(tau)}};
        }
    }
    throw std::logic_error("unhandled copy attack");
}

/// Turns one genuine note into two candidate notes for independent verifiers.
inline ForgedNotes forge_two_notes(const AttackStrategy& strategy, const Note<PhotonCopy>& note,
                                   const SchemeParams& params, Rng& rng) {
    params.validate();
    if (note.n != params.n || note.size() != params.q) {
        throw std::invalid_argument("note does not match scheme parameters");
    }
    const std::size_t q = params.q;
    const std::size_t withheld = strategy.register_manipulation ? register_withheld(params) : 0;

    std::vector<std::size_t> known = strategy.known_copies;
    if (strategy.adaptive) {
        if (known.size() > adaptive_known(params)) {
            throw std::invalid_argument("adaptive knowledge exceeds (A-2)|L| copies");
        }
        for (std::size_t j : known) {
            if (j >= q) throw std::invalid_argument("known copy index out of range");
        }
    } else if (!known.empty()) {
        throw std::invalid_argument("known copies given for a non-adaptive strategy");
    }

    // Random positions for the two withheld sets and any adaptive queries.
    std::vector<std::uint8_t> taken(q, 0);
    for (std::size_t j : known) taken[j] = 1;
    std::vector<std::size_t> pool;
    pool.reserve(q);
    for (std::size_t j = 0; j < q; ++j) {
        if (!taken[j]) pool.push_back(j);
    }
    const std::size_t extra_known = strategy.adaptive && strategy.known_copies.empty() ? adaptive_known(params) : 0;
    const std::size_t need = 2 * withheld + extra_known;
    if (pool.size() < need) {
        throw std::invalid_argument("note too short for the requested register/adaptive attack");
    }
    for (std::size_t i = 0; i < need; ++i) {
        const auto pick = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[pick]);
    }
    for (std::size_t i = 2 * withheld; i < need; ++i) {
        known.push_back(pool[i]);
    }

    ForgedNotes out;
    out.first.n = out.second.n = params.n;
    out.first.r.assign(q, 0);
    out.second.r.assign(q, 0);
    out.origin_first.assign(q, CopyOrigin::kAttacked);
    out.origin_second.assign(q, CopyOrigin::kAttacked);
    out.first.copies.reserve(q);
    out.second.copies.reserve(q);
    std::vector<std::uint8_t> role(q, 0);  // 1: withheld from Ver1, 2: withheld from Ver2, 3: known
    for (std::size_t i = 0; i < withheld; ++i) {
        role[pool[i]] = 1;
        role[pool[withheld + i]] = 2;
    }
    for (std::size_t j : known) role[j] = 3;

    for (std::size_t j = 0; j < q; ++j) {
        const PhotonCopy& genuine = note.copies[j];
        switch (role[j]) {
            case 1:
                out.first.copies.push_back(PhotonCopy::vacuum(params.n));
                out.second.copies.push_back(genuine);
                out.first.r[j] = 1;
                out.origin_first[j] = CopyOrigin::kWithheld;
                out.origin_second[j] = CopyOrigin::kGenuine;
                break;
            case 2:
                out.first.copies.push_back(genuine);
                out.second.copies.push_back(PhotonCopy::vacuum(params.n));
                out.second.r[j] = 1;
                out.origin_first[j] = CopyOrigin::kGenuine;
                out.origin_second[j] = CopyOrigin::kWithheld;
                break;
            case 3:
                out.first.copies.push_back(genuine);
                out.second.copies.push_back(genuine);
                out.origin_first[j] = out.origin_second[j] = CopyOrigin::kKnown;
                break;
            default: {
                auto [c1, c2] = attack_copy(strategy, genuine, rng);
                out.first.copies.push_back(std::move(c1));
                out.second.copies.push_back(std::move(c2));
            }
        }
    }
    std::sort(known.begin(), known.end());
    out.known = std::move(known);
    out.auxiliary_contacts = strategy.adaptive ? params.max_bank_contacts() - 2 : 0;
    if (strategy.adaptive && params.max_bank_contacts() < 2) {
        out.auxiliary_contacts = 0;
    }
    return out;
}

/// Minimum per-copy wrong-parity rate forced on Ver1 when the forger has no
/// auxiliary information, 1/4 - 1/(2n).
inline double e_min_asymptotic(int n) {
    require_formula_modes(n);
    return 0.25 - 0.5 / static_cast<double>(n);
}

/// e_min diluted by the copies the forger controls:
///   (q - (3A-4)|L|) / (q - (A-1)|L|) * (1/4 - 1/(2n)).
inline double e_min(const SchemeParams& params) {
    params.validate();
    const double q = static_cast<double>(params.q);
    const double known = static_cast<double>(2 * register_withheld(params) + adaptive_known(params));
    const double visible = q - static_cast<double>(register_withheld(params));
    if (visible <= 0.0 || q - known < 0.0) {
        throw std::invalid_argument("T|L| too large relative to q for a meaningful e_min");
    }
    return (q - known) / visible * e_min_asymptotic(params.n);
}

/// Lower bound on p_inc(Ver1) + p_inc(Ver2) for one copy, 1/2 - 1/n.
inline double optimal_collective_error_bound(int n) {
    require_formula_modes(n);
    return 0.5 - 1.0 / static_cast<double>(n);
}

/// Chernoff bound on both verifiers accepting a forged note:
/// exp(-2 delta^2 p11^2 (1-eps)^2 |L|).
inline double forge_probability_bound(const SchemeParams& params, double delta) {
    const double p11 = single_photon_conclusive_probability(params.n);
    const double x = delta * p11 * (1.0 - params.epsilon);
    return std::exp(-2.0 * x * x * static_cast<double>(params.l_size));
}

/// Measure-and-resend variant exp(-2 delta^2 (1 - p2) |L|).
inline double measure_resend_forge_bound(int n, std::size_t l_size, double delta) {
    return std::exp(-2.0 * delta * delta * single_photon_conclusive_probability(n) * static_cast<double>(l_size));
}

struct SecurityBounds {
    double e_min = 0.0;
    double c_adv = 0.0;
    double noise_tolerance = 0.0;
    double forge_prob_bound = 1.0;
};

/// Bank cut-off halfway across the honest/forger gap, (c - c_adv)/2.
inline double default_delta(const SchemeParams& params) { return 0.5 * e_min(params); }

inline SecurityBounds security_bounds(const SchemeParams& params) {
    SecurityBounds b;
    b.e_min = e_min(params);
    b.c_adv = 1.0 - b.e_min;
    b.noise_tolerance = 1.0 - b.c_adv;
    b.forge_prob_bound = forge_probability_bound(params, params.delta);
    return b;
}

/// Exact wrong-parity rate of measure-and-resend given a conclusive outcome.
/// The verifier's tuple is uniform; the learned pair is always right and every
/// other tuple holds at least one re-randomized bit, so it is a fair coin.
inline double measure_resend_error_given_conclusive(int n) {
    require_modes(n);
    const auto tuples = static_cast<double>(tuple_count(n));
    return 0.5 * (tuples - 1.0) / tuples;
}

struct VerifierTally {
    std::size_t passes = 0;
    std::size_t tested = 0;
    std::size_t conclusive = 0;
    std::size_t wrong = 0;
    std::size_t attacked_tested = 0;
    std::size_t attacked_conclusive = 0;
    std::size_t attacked_wrong = 0;
};

struct ForgeryTrial {
    Verdict ver1;
    Verdict ver2;
    std::size_t l_succ1 = 0, l_succ_cor1 = 0;
    std::size_t l_succ2 = 0, l_succ_cor2 = 0;
    VerifierTally tally1;
    VerifierTally tally2;
};

struct ForgeryStats {
    std::string strategy;
    std::size_t trials = 0;
    std::size_t joint_passes = 0;
    VerifierTally ver1;
    VerifierTally ver2;
    std::vector<ForgeryTrial> per_trial;

    double ver1_pass_rate() const { return ratio(ver1.passes, trials); }
    double ver2_pass_rate() const { return ratio(ver2.passes, trials); }
    double joint_pass_rate() const { return ratio(joint_passes, trials); }

    /// Conclusive-and-wrong probability per attacked copy, both verifiers pooled.
    double per_copy_error_rate() const {
        return ratio(ver1.attacked_wrong + ver2.attacked_wrong, ver1.attacked_tested + ver2.attacked_tested);
    }
    double error_rate_given_conclusive() const {
        return ratio(ver1.attacked_wrong + ver2.attacked_wrong,
                     ver1.attacked_conclusive + ver2.attacked_conclusive);
    }
    double inconclusive_rate() const {
        const auto tested = ver1.attacked_tested + ver2.attacked_tested;
        return ratio(tested - ver1.attacked_conclusive - ver2.attacked_conclusive, tested);
    }

    static double ratio(std::size_t a, std::size_t b) {
        return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
    }
};

namespace detail {

inline VerifierTally tally_session(const SessionResult& s, const BankSecret& secret,
                                   const std::vector<CopyOrigin>& origin) {
    VerifierTally t;
    t.passes = s.verdict.accepted() ? 1 : 0;
    for (const auto& rec : s.report.records) {
        const bool attacked = origin[rec.j] == CopyOrigin::kAttacked;
        const bool conclusive = rec.outcome.is_conclusive();
        const bool wrong = conclusive && secret.strings[rec.j].parity(*rec.outcome.tuple) != rec.outcome.parity;
        ++t.tested;
        t.conclusive += conclusive;
        t.wrong += wrong;
        if (attacked) {
            ++t.attacked_tested;
            t.attacked_conclusive += conclusive;
            t.attacked_wrong += wrong;
        }
    }
    return t;
}

inline void accumulate(VerifierTally& into, const VerifierTally& t) {
    into.passes += t.passes;
    into.tested += t.tested;
    into.conclusive += t.conclusive;
    into.wrong += t.wrong;
    into.attacked_tested += t.attacked_tested;
    into.attacked_conclusive += t.attacked_conclusive;
    into.attacked_wrong += t.attacked_wrong;
}

}  // namespace detail

/// The unforgeability game: forge, then let two independent verifiers run
/// full sessions against the same Bank record. Trial t uses the stream
/// derive_seed(seed, t).
inline ForgeryStats simulate_forgery(const AttackStrategy& strategy, const SchemeParams& params, std::size_t trials,
                                     std::uint64_t seed, unsigned workers = 1) {
    params.validate();
    if (trials == 0) {
        throw std::invalid_argument("need at least one trial");
    }
    const SinglePhotonBackend backend;
    auto results = run_trials(trials, workers, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        auto prepared = prepare_note(params, backend, rng);
        ForgedNotes forged = forge_two_notes(strategy, prepared.note, params, rng);
        BankSecret& secret = prepared.secret;
        secret.count = forged.auxiliary_contacts;
        ForgeryTrial trial;
        const SessionResult s1 = verify_note(forged.first, secret, params, backend, rng);
        const SessionResult s2 = verify_note(forged.second, secret, params, backend, rng);
        trial.ver1 = s1.verdict;
        trial.ver2 = s2.verdict;
        trial.l_succ1 = s1.report.l_succ;
        trial.l_succ2 = s2.report.l_succ;
        trial.l_succ_cor1 = count_correct(secret, s1.report);
        trial.l_succ_cor2 = count_correct(secret, s2.report);
        trial.tally1 = detail::tally_session(s1, secret, forged.origin_first);
        trial.tally2 = detail::tally_session(s2, secret, forged.origin_second);
        return trial;
    });
    ForgeryStats stats;
    stats.strategy = strategy.name();
    stats.trials = trials;
    for (const auto& t : results) {
        detail::accumulate(stats.ver1, t.tally1);
        detail::accumulate(stats.ver2, t.tally2);
        stats.joint_passes += (t.ver1.accepted() && t.ver2.accepted()) ? 1 : 0;
    }
    stats.per_trial = std::move(results);
    return stats;
}

}  // namespace smmoney
