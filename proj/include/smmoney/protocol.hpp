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

// Bank / verifier / holder state machines of the money mini-scheme.
//
// Note preparation draws q uniform strings and encodes one copy per string.
// A verification session is local testing by the verifier (register check,
// copy selection, per-copy sampling matching, conclusive-count check) and
// then a single classical message to the Bank, which compares parities
// against its secret strings.
//
// The protocol is written against a measurement backend so the same state
// machine drives single-photon and weak-coherent notes. A backend provides
//
//     using Copy = ...;
//     Copy encode(const BitString&) const;
//     CopyMeasurement measure(const Copy&, Rng&) const;
//     double conclusive_probability(int n) const;
//     static constexpr bool kPhotonCountCheck;

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "smmoney/core.hpp"
#include "smmoney/fock.hpp"
#include "smmoney/rng.hpp"
#include "smmoney/sampling_matching.hpp"

namespace smmoney {

struct SchemeParams {
    int n = 4;
    std::size_t q = 1000;
    std::size_t l_size = 100;  // |L|, copies tested per verification
    std::size_t t_max = 100;   // T, copies consumable over the note lifetime
    double epsilon = 0.2;      // verifier security factor
    double delta = 0.2;        // Bank cut-off

    void validate() const {
        if (n < 3) {
            throw std::invalid_argument("scheme needs n >= 3 modes for a forging gap");
        }
        require_modes(n);
        if (q == 0) {
            throw std::invalid_argument("note must contain at least one copy (q >= 1)");
        }
        if (l_size == 0 || l_size > q) {
            throw std::invalid_argument("need 1 <= |L| <= q");
        }
        if (t_max == 0 || t_max > q) {
            throw std::invalid_argument("need 1 <= T <= q");
        }
        if (!(epsilon >= 0.0 && epsilon <= 1.0) || !(delta >= 0.0 && delta <= 1.0)) {
            throw std::invalid_argument("epsilon and delta must lie in [0, 1]");
        }
    }

    /// ceil(T / |L|): Bank contacts allowed over the note lifetime.
    std::size_t max_bank_contacts() const { return (t_max + l_size - 1) / l_size; }
};

struct Thresholds {
    double expected_l_succ = 0.0;  // E_h[l_succ] = |L| * p_conclusive
    double l_min = 0.0;            // verifier's local cut
    double l_min_cor = 0.0;        // Bank's cut on correct parities
};

inline Thresholds expected_thresholds(const SchemeParams& params, double p_conclusive) {
    const double e = static_cast<double>(params.l_size) * p_conclusive;
    return {e, e * (1.0 - params.epsilon), e * (1.0 - params.delta)};
}

inline Thresholds expected_thresholds(const SchemeParams& params) {
    return expected_thresholds(params, single_photon_conclusive_probability(params.n));
}

/// The Bank's private record for one note.
struct BankSecret {
    std::vector<BitString> strings;
    std::size_t count = 0;  // Bank contacts so far
};

template <class Copy>
struct Note {
    int n = 0;
    std::vector<Copy> copies;
    std::vector<std::uint8_t> r;  // 1 marks a consumed copy

    std::size_t size() const { return copies.size(); }

    std::size_t consumed() const { return static_cast<std::size_t>(std::count(r.begin(), r.end(), 1)); }
};

template <class Copy>
struct PreparedNote {
    BankSecret secret;
    Note<Copy> note;
};

struct CopyMeasurement {
    SmOutcome outcome;
    bool photon_count_ok = true;
};

/// One copy of a single-photon note. A genuine copy carries its hidden
/// string; forged copies carry an explicit pure or mixed one-photon state.
/// `single_photon == false` stands for vacuum or multi-photon light, which
/// the verifier's photon-count check rejects outright.
struct PhotonCopy {
    std::variant<BitString, SinglePhotonState, SinglePhotonMixedState> state;
    bool single_photon = true;

    static PhotonCopy vacuum(int n) { return {BitString::zeros(n), false}; }
};

inline int copy_modes(const PhotonCopy& copy) {
    return std::visit(
        [](const auto& s) {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, BitString>) {
                return s.size();
            } else {
                return s.modes();
            }
        },
        copy.state);
}

inline SinglePhotonMixedState density(const PhotonCopy& copy) {
    return std::visit(
        [](const auto& s) -> SinglePhotonMixedState {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BitString>) {
                return SinglePhotonMixedState::from_pure(encode_note_state(s));
            } else if constexpr (std::is_same_v<T, SinglePhotonState>) {
                return SinglePhotonMixedState::from_pure(s);
            } else {
                return s;
            }
        },
        copy.state);
}

inline OutcomeDistribution photon_distribution(const PhotonCopy& copy) {
    return std::visit(
        [](const auto& s) -> OutcomeDistribution {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BitString>) {
                return interfere_pure(encode_note_state(s), local_reference_state(s.size()));
            } else if constexpr (std::is_same_v<T, SinglePhotonState>) {
                return interfere_pure(s, local_reference_state(s.modes()));
            } else {
                return interfere_mixed(s, local_reference_state(s.modes()));
            }
        },
        copy.state);
}

struct SinglePhotonBackend {
    using Copy = PhotonCopy;
    static constexpr bool kPhotonCountCheck = true;
    static constexpr std::string_view kName = "single_photon";

    Copy encode(const BitString& x) const { return Copy{x}; }

    double conclusive_probability(int n) const { return single_photon_conclusive_probability(n); }

    CopyMeasurement measure(const Copy& copy, Rng& rng) const {
        if (!copy.single_photon) {
            return {SmOutcome::inconclusive(), false};
        }
        return {classify(sample_event(photon_distribution(copy), rng)), true};
    }
};

enum class VerdictReason : std::uint8_t {
    kAccepted,
    kNoteExhausted,
    kPhotonCountFail,
    kLSuccBelowMin,
    kCountExceeded,
    kParityBelowThreshold,
    kUnknownSerial,
};

inline std::string_view reason_name(VerdictReason r) {
    switch (r) {
        case VerdictReason::kAccepted: return "accepted";
        case VerdictReason::kNoteExhausted: return "note-exhausted";
        case VerdictReason::kPhotonCountFail: return "photon-count-fail";
        case VerdictReason::kLSuccBelowMin: return "l_succ-below-min";
        case VerdictReason::kCountExceeded: return "count-exceeded";
        case VerdictReason::kParityBelowThreshold: return "parity-below-threshold";
        case VerdictReason::kUnknownSerial: return "unknown-serial";
    }
    return "unknown";
}

inline VerdictReason parse_reason(std::string_view name) {
    for (auto r : {VerdictReason::kAccepted, VerdictReason::kNoteExhausted, VerdictReason::kPhotonCountFail,
                   VerdictReason::kLSuccBelowMin, VerdictReason::kCountExceeded,
                   VerdictReason::kParityBelowThreshold, VerdictReason::kUnknownSerial}) {
        if (reason_name(r) == name) {
            return r;
        }
    }
    throw std::invalid_argument("unknown verdict reason: " + std::string(name));
}

struct Verdict {
    VerdictReason reason = VerdictReason::kAccepted;

    int bit() const { return reason == VerdictReason::kAccepted ? 1 : 0; }
    bool accepted() const { return reason == VerdictReason::kAccepted; }
};

struct VerifierRecord {
    std::size_t j = 0;  // copy index (0-based)
    SmOutcome outcome;
};

/// The single classical message sent from verifier to Bank.
struct VerifierReport {
    std::uint64_t session_id = 0;
    std::vector<VerifierRecord> records;
    std::size_t l_succ = 0;
};

struct LocalResult {
    Verdict verdict;  // kAccepted means "forward to the Bank"
    VerifierReport report;
};

template <class Backend>
PreparedNote<typename Backend::Copy> prepare_note(const SchemeParams& params, const Backend& backend, Rng& rng) {
    params.validate();
    PreparedNote<typename Backend::Copy> out;
    out.secret.strings.reserve(params.q);
    out.note.n = params.n;
    out.note.copies.reserve(params.q);
    for (std::size_t j = 0; j < params.q; ++j) {
        auto x = BitString::random(params.n, rng);
        out.note.copies.push_back(backend.encode(x));
        out.secret.strings.push_back(x);
    }
    out.note.r.assign(params.q, 0);
    return out;
}

inline PreparedNote<PhotonCopy> prepare_note(const SchemeParams& params, Rng& rng) {
    return prepare_note(params, SinglePhotonBackend{}, rng);
}

/// Uniform |L|-subset of the zero-marked positions (partial Fisher-Yates),
/// returned in ascending order.
inline std::optional<std::vector<std::size_t>> select_unconsumed(const std::vector<std::uint8_t>& r,
                                                                 std::size_t l_size, Rng& rng) {
    std::vector<std::size_t> free;
    free.reserve(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (r[j] == 0) {
            free.push_back(j);
        }
    }
    if (free.size() < l_size) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < l_size; ++i) {
        const auto pick = i + static_cast<std::size_t>(rng.below(free.size() - i));
        std::swap(free[i], free[pick]);
    }
    free.resize(l_size);
    std::sort(free.begin(), free.end());
    return free;
}

/// Verifier-side testing. Consumes the selected copies of `note`.
template <class Backend>
LocalResult local_test(Note<typename Backend::Copy>& note, const SchemeParams& params, const Backend& backend,
                       Rng& rng) {
    params.validate();
    LocalResult result;
    if (note.consumed() > params.t_max) {
        result.verdict.reason = VerdictReason::kNoteExhausted;
        return result;
    }
    auto selected = select_unconsumed(note.r, params.l_size, rng);
    if (!selected) {
        result.verdict.reason = VerdictReason::kNoteExhausted;
        return result;
    }
    bool photons_ok = true;
    result.report.records.reserve(selected->size());
    for (std::size_t j : *selected) {
        note.r[j] = 1;
        const CopyMeasurement m = backend.measure(note.copies[j], rng);
        if constexpr (Backend::kPhotonCountCheck) {
            photons_ok = photons_ok && m.photon_count_ok;
        }
        result.report.records.push_back({j, m.outcome});
        if (m.outcome.is_conclusive()) {
            ++result.report.l_succ;
        }
    }
    if (!photons_ok) {
        result.verdict.reason = VerdictReason::kPhotonCountFail;
        return result;
    }
    const Thresholds th = expected_thresholds(params, backend.conclusive_probability(params.n));
    if (static_cast<double>(result.report.l_succ) < th.l_min) {
        result.verdict.reason = VerdictReason::kLSuccBelowMin;
        return result;
    }
    result.verdict.reason = VerdictReason::kAccepted;
    return result;
}

/// Number of conclusive records whose parity matches the Bank's strings.
inline std::size_t count_correct(const BankSecret& secret, const VerifierReport& report) {
    std::size_t correct = 0;
    for (const auto& rec : report.records) {
        if (rec.outcome.is_conclusive() && secret.strings[rec.j].parity(*rec.outcome.tuple) == rec.outcome.parity) {
            ++correct;
        }
    }
    return correct;
}

inline void check_report(const BankSecret& secret, const VerifierReport& report) {
    std::vector<std::size_t> seen;
    seen.reserve(report.records.size());
    std::size_t conclusive = 0;
    for (const auto& rec : report.records) {
        if (rec.j >= secret.strings.size()) {
            throw ProtocolError("report references copy " + std::to_string(rec.j) + " of a " +
                                std::to_string(secret.strings.size()) + "-copy note");
        }
        if (rec.outcome.is_conclusive()) {
            ++conclusive;
            if (!TupleSet(secret.strings[rec.j].size()).contains(*rec.outcome.tuple)) {
                throw ProtocolError("report carries an invalid tuple");
            }
        }
        seen.push_back(rec.j);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        throw ProtocolError("report lists a copy index twice");
    }
    if (conclusive != report.l_succ) {
        throw ProtocolError("report l_succ does not match its conclusive records");
    }
}

/// Bank-side validation. Increments the contact counter unless the attempt is
/// refused for exceeding ceil(T/|L|).
inline Verdict bank_validate(BankSecret& secret, const VerifierReport& report, const SchemeParams& params,
                             double p_conclusive) {
    params.validate();
    if (secret.count >= params.max_bank_contacts()) {
        return {VerdictReason::kCountExceeded};
    }
    check_report(secret, report);
    const double l_succ_cor = static_cast<double>(count_correct(secret, report));
    const Thresholds th = expected_thresholds(params, p_conclusive);
    ++secret.count;
    if (l_succ_cor < th.l_min_cor) {
        return {VerdictReason::kParityBelowThreshold};
    }
    return {VerdictReason::kAccepted};
}

inline Verdict bank_validate(BankSecret& secret, const VerifierReport& report, const SchemeParams& params) {
    return bank_validate(secret, report, params, single_photon_conclusive_probability(params.n));
}

struct SessionResult {
    Verdict verdict;
    VerifierReport report;
    bool reached_bank = false;
};

/// Local testing followed, if it passes, by the Bank round trip.
template <class Backend>
SessionResult verify_note(Note<typename Backend::Copy>& note, BankSecret& secret, const SchemeParams& params,
                          const Backend& backend, Rng& rng) {
    LocalResult local = local_test(note, params, backend, rng);
    SessionResult out{local.verdict, std::move(local.report), false};
    if (!local.verdict.accepted()) {
        return out;
    }
    out.reached_bank = true;
    out.verdict = bank_validate(secret, out.report, params, backend.conclusive_probability(params.n));
    return out;
}

template <class Copy>
struct FullNote {
    std::string serial;
    Note<Copy> note;
};

/// Serial-number wrapper lifting the mini-scheme to many notes: each serial
/// routes verification to its own secret.
class Mint {
  public:
    template <class Copy>
    FullNote<Copy> issue_full_note(Note<Copy> note, BankSecret secret, std::string serial) {
        if (secrets_.contains(serial)) {
            throw ProtocolError("duplicate serial " + serial);
        }
        secrets_.emplace(serial, std::move(secret));
        return {std::move(serial), std::move(note)};
    }

    template <class Backend>
    SessionResult verify(FullNote<typename Backend::Copy>& full, const SchemeParams& params, const Backend& backend,
                         Rng& rng) {
        auto it = secrets_.find(full.serial);
        if (it == secrets_.end()) {
            return {{VerdictReason::kUnknownSerial}, {}, false};
        }
        return verify_note(full.note, it->second, params, backend, rng);
    }

    const BankSecret* secret(const std::string& serial) const {
        auto it = secrets_.find(serial);
        return it == secrets_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return secrets_.size(); }

  private:
    std::map<std::string, BankSecret> secrets_;
};

}  // namespace smmoney
