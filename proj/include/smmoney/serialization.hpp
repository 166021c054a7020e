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

// JSON wire and file formats. Parsing failures raise FormatError.

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "smmoney/adversary.hpp"
#include "smmoney/coherent.hpp"
#include "smmoney/fidelity_bound.hpp"
#include "smmoney/fock.hpp"
#include "smmoney/protocol.hpp"

namespace smmoney {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class FormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path + " for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << text;
    if (!out) {
        throw IoError("write to " + path + " failed");
    }
}

inline Json parse_json(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw FormatError(what + ": " + e.what());
    }
}

template <class T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw FormatError(std::string("missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

/// Library validation failures inside a document are format errors of that
/// document, not usage errors of the caller.
template <class F>
auto rethrow_as_format_error(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

// ---- outcomes and distributions -------------------------------------------

/// {copy_index, tuple: [k, l] | null, parity: 0/1 | null}
inline Json outcome_to_json(std::size_t copy_index, const SmOutcome& o) {
    Json j;
    j["copy_index"] = copy_index;
    if (o.is_conclusive()) {
        j["tuple"] = {o.tuple->k, o.tuple->l};
        j["parity"] = o.parity ? 1 : 0;
    } else {
        j["tuple"] = nullptr;
        j["parity"] = nullptr;
    }
    return j;
}

inline Json distribution_to_json(const OutcomeDistribution& dist) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < dist.size(); ++i) {
        arr.push_back({{"event", dist.event_at(i).label()}, {"probability", dist.probabilities()[i]}});
    }
    return arr;
}

/// Compact list of click events, [{step, detector}], steps 1-based.
inline Json clicks_to_json(const ClickRecord& rec) {
    Json arr = Json::array();
    for (std::size_t k = 0; k < rec.steps.size(); ++k) {
        if (rec.steps[k].d0) arr.push_back({{"step", k + 1}, {"detector", 0}});
        if (rec.steps[k].d1) arr.push_back({{"step", k + 1}, {"detector", 1}});
    }
    return arr;
}

// ---- verifier -> Bank report (one JSON object per line) --------------------

inline Json report_to_json(const VerifierReport& r) {
    Json recs = Json::array();
    for (const auto& rec : r.records) {
        Json e{{"j", rec.j}};
        if (rec.outcome.is_conclusive()) {
            e["k"] = rec.outcome.tuple->k;
            e["l"] = rec.outcome.tuple->l;
            e["d"] = rec.outcome.parity ? 1 : 0;
        } else {
            e["k"] = nullptr;
            e["l"] = nullptr;
            e["d"] = nullptr;
        }
        recs.push_back(std::move(e));
    }
    return {{"session_id", r.session_id}, {"records", recs}, {"l_succ", r.l_succ}};
}

inline VerifierReport report_from_json(const Json& j) {
    VerifierReport r;
    r.session_id = field<std::uint64_t>(j, "session_id");
    r.l_succ = field<std::size_t>(j, "l_succ");
    const Json recs = field<Json>(j, "records");
    if (!recs.is_array()) throw FormatError("'records' must be an array");
    for (const auto& e : recs) {
        VerifierRecord rec;
        rec.j = field<std::size_t>(e, "j");
        const Json d = field<Json>(e, "d");
        if (!d.is_null()) {
            const int bit = d.is_number_integer() ? d.get<int>() : -1;
            if (bit != 0 && bit != 1) throw FormatError("parity must be 0, 1 or null");
            rec.outcome = SmOutcome::conclusive({field<int>(e, "k"), field<int>(e, "l")}, bit == 1);
        }
        r.records.push_back(rec);
    }
    return r;
}

// ---- notes and secrets ------------------------------------------------------

inline Json amplitudes_to_json(std::span<const Complex> amps) {
    Json arr = Json::array();
    for (const auto& a : amps) arr.push_back({a.real(), a.imag()});
    return arr;
}

inline std::vector<Complex> amplitudes_from_json(const Json& arr) {
    if (!arr.is_array()) throw FormatError("amplitudes must be an array");
    std::vector<Complex> out;
    for (const auto& a : arr) {
        if (!a.is_array() || a.size() != 2) throw FormatError("amplitude must be [re, im]");
        if (!a[0].is_number() || !a[1].is_number()) throw FormatError("amplitude parts must be numbers");
        out.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
    return out;
}

inline Json copy_to_json(const PhotonCopy& c) {
    Json j;
    if (const auto* x = std::get_if<BitString>(&c.state)) {
        j["string"] = x->str();
    } else if (const auto* psi = std::get_if<SinglePhotonState>(&c.state)) {
        j["amplitudes"] = amplitudes_to_json(psi->amplitudes());
    } else {
        const auto& m = std::get<SinglePhotonMixedState>(c.state).matrix();
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            std::vector<Complex> row(static_cast<std::size_t>(m.cols()));
            for (Eigen::Index col = 0; col < m.cols(); ++col) row[static_cast<std::size_t>(col)] = m(r, col);
            rows.push_back(amplitudes_to_json(row));
        }
        j["density"] = rows;
    }
    if (!c.single_photon) j["single_photon"] = false;
    return j;
}

inline PhotonCopy copy_from_json(const Json& j, int n) {
    PhotonCopy c;
    if (j.contains("string")) {
        const auto x = BitString::parse(field<std::string>(j, "string"));
        if (x.size() != n) throw FormatError("copy string length differs from n");
        c.state = x;
    } else if (j.contains("amplitudes")) {
        c.state = SinglePhotonState(amplitudes_from_json(j.at("amplitudes")));
    } else if (j.contains("density")) {
        Eigen::MatrixXcd m(n, n);
        const Json& rows = j.at("density");
        if (!rows.is_array() || static_cast<int>(rows.size()) != n) throw FormatError("density must be n x n");
        for (int r = 0; r < n; ++r) {
            const auto row = amplitudes_from_json(rows[static_cast<std::size_t>(r)]);
            if (static_cast<int>(row.size()) != n) throw FormatError("density must be n x n");
            for (int col = 0; col < n; ++col) m(r, col) = row[static_cast<std::size_t>(col)];
        }
        c.state = SinglePhotonMixedState(m);
    } else {
        throw FormatError("copy needs one of 'string', 'amplitudes', 'density'");
    }
    if (j.contains("single_photon")) c.single_photon = j.at("single_photon").get<bool>();
    if (copy_modes(c) != n) throw FormatError("copy mode count differs from n");
    return c;
}

inline Json copy_to_json(const CoherentNoteCopy& c) { return {{"pulses", amplitudes_to_json(c.pulses)}}; }

inline CoherentNoteCopy coherent_copy_from_json(const Json& j, int n) {
    CoherentNoteCopy c{amplitudes_from_json(field<Json>(j, "pulses"))};
    if (c.modes() != n) throw FormatError("pulse train length differs from n");
    return c;
}

template <class Copy>
Json note_to_json(const Note<Copy>& note, std::string_view scheme, const std::string& serial = "") {
    Json copies = Json::array();
    for (const auto& c : note.copies) copies.push_back(copy_to_json(c));
    Json r = Json::array();
    for (auto b : note.r) r.push_back(static_cast<int>(b));
    Json j{{"schema_version", kSchemaVersion}, {"scheme", scheme}, {"n", note.n}, {"q", note.size()},
           {"copies", copies}, {"r", r}};
    if (!serial.empty()) j["serial"] = serial;
    return j;
}

inline void check_schema(const Json& j, std::string_view expected_scheme) {
    if (field<int>(j, "schema_version") != kSchemaVersion) throw FormatError("unsupported schema_version");
    if (field<std::string>(j, "scheme") != expected_scheme) {
        throw FormatError("note scheme is '" + field<std::string>(j, "scheme") + "', expected '" +
                          std::string(expected_scheme) + "'");
    }
}

template <class Copy, class CopyParser>
Note<Copy> note_from_json_impl(const Json& j, CopyParser parse_copy) {
    Note<Copy> note;
    note.n = field<int>(j, "n");
    const auto q = field<std::size_t>(j, "q");
    const Json copies = field<Json>(j, "copies");
    const Json r = field<Json>(j, "r");
    if (!copies.is_array() || copies.size() != q) throw FormatError("'copies' must hold q entries");
    if (!r.is_array() || r.size() != q) throw FormatError("'r' must hold q entries");
    for (const auto& c : copies) note.copies.push_back(parse_copy(c, note.n));
    for (const auto& b : r) {
        const int v = b.is_number_integer() ? b.get<int>() : -1;
        if (v != 0 && v != 1) throw FormatError("'r' entries must be 0 or 1");
        note.r.push_back(static_cast<std::uint8_t>(v));
    }
    return note;
}

inline Note<PhotonCopy> photon_note_from_json(const Json& j) {
    check_schema(j, SinglePhotonBackend::kName);
    return rethrow_as_format_error("note", [&] { return note_from_json_impl<PhotonCopy>(j, copy_from_json); });
}

inline Note<CoherentNoteCopy> coherent_note_from_json(const Json& j) {
    check_schema(j, CoherentBackend::kName);
    return rethrow_as_format_error(
        "note", [&] { return note_from_json_impl<CoherentNoteCopy>(j, coherent_copy_from_json); });
}

inline Json params_to_json(const SchemeParams& p) {
    return {{"n", p.n},           {"q", p.q},
            {"l_size", p.l_size}, {"t_max", p.t_max},
            {"epsilon", p.epsilon}, {"delta", p.delta}};
}

inline SchemeParams params_from_json(const Json& j) {
    SchemeParams p;
    p.n = field<int>(j, "n");
    p.q = field<std::size_t>(j, "q");
    p.l_size = field<std::size_t>(j, "l_size");
    p.t_max = field<std::size_t>(j, "t_max");
    p.epsilon = field<double>(j, "epsilon");
    p.delta = field<double>(j, "delta");
    return p;
}

/// Bank-side record. Carries the policy parameters so verification cannot be
/// run against a different threshold than the note was issued under.
inline Json secret_to_json(const BankSecret& s, const SchemeParams& p, std::string_view scheme) {
    Json strings = Json::array();
    for (const auto& x : s.strings) strings.push_back(x.str());
    return {{"schema_version", kSchemaVersion}, {"sensitive", true}, {"scheme", scheme},
            {"params", params_to_json(p)},      {"count", s.count},  {"strings", strings}};
}

struct SecretFile {
    BankSecret secret;
    SchemeParams params;
    std::string scheme;
};

inline SecretFile secret_from_json_impl(const Json& j) {
    if (field<int>(j, "schema_version") != kSchemaVersion) throw FormatError("unsupported schema_version");
    SecretFile f;
    f.scheme = field<std::string>(j, "scheme");
    f.params = params_from_json(field<Json>(j, "params"));
    f.params.validate();
    f.secret.count = field<std::size_t>(j, "count");
    for (const auto& s : field<Json>(j, "strings")) {
        if (!s.is_string()) throw FormatError("secret strings must be bit strings");
        auto x = BitString::parse(s.get<std::string>());
        if (x.size() != f.params.n) throw FormatError("secret string length differs from n");
        f.secret.strings.push_back(x);
    }
    if (f.secret.strings.size() != f.params.q) throw FormatError("secret must hold q strings");
    return f;
}

inline SecretFile secret_from_json(const Json& j) {
    return rethrow_as_format_error("secret", [&] { return secret_from_json_impl(j); });
}

// ---- attack and fidelity summaries -----------------------------------------

inline Json bounds_to_json(const SchemeParams& p) {
    Json j{{"e_min_asymptotic", e_min_asymptotic(p.n)},
           {"optimal_collective_error_bound", optimal_collective_error_bound(p.n)},
           {"forge_probability_bound", forge_probability_bound(p, p.delta)},
           {"measure_resend_forge_bound", measure_resend_forge_bound(p.n, p.l_size, p.delta)},
           {"measure_resend_error_given_conclusive", measure_resend_error_given_conclusive(p.n)}};
    try {
        j["e_min"] = e_min(p);
    } catch (const std::invalid_argument&) {
        j["e_min"] = nullptr;
    }
    return j;
}

inline Json forgery_to_json(const ForgeryStats& s, const SchemeParams& p, std::uint64_t seed) {
    auto tally = [](const VerifierTally& t) {
        return Json{{"passes", t.passes},
                    {"tested", t.tested},
                    {"conclusive", t.conclusive},
                    {"wrong", t.wrong},
                    {"attacked_tested", t.attacked_tested},
                    {"attacked_conclusive", t.attacked_conclusive},
                    {"attacked_wrong", t.attacked_wrong}};
    };
    return {{"strategy", s.strategy},
            {"params", params_to_json(p)},
            {"trials", s.trials},
            {"seed", seed},
            {"rates",
             {{"ver1_pass_rate", s.ver1_pass_rate()},
              {"ver2_pass_rate", s.ver2_pass_rate()},
              {"joint_pass_rate", s.joint_pass_rate()},
              {"per_copy_error_rate", s.per_copy_error_rate()},
              {"error_rate_given_conclusive", s.error_rate_given_conclusive()},
              {"inconclusive_rate", s.inconclusive_rate()}}},
            {"ver1", tally(s.ver1)},
            {"ver2", tally(s.ver2)},
            {"analytic_bounds", bounds_to_json(p)}};
}

inline std::string forgery_trials_csv(const ForgeryStats& s) {
    std::ostringstream out;
    out << "trial,ver1_reason,ver2_reason,l_succ1,l_succ_cor1,l_succ2,l_succ_cor2\n";
    for (std::size_t t = 0; t < s.per_trial.size(); ++t) {
        const auto& r = s.per_trial[t];
        out << t << ',' << reason_name(r.ver1.reason) << ',' << reason_name(r.ver2.reason) << ',' << r.l_succ1
            << ',' << r.l_succ_cor1 << ',' << r.l_succ2 << ',' << r.l_succ_cor2 << '\n';
    }
    return out.str();
}

inline Json fidelity_to_json(const FidelityResult& r) {
    return {{"n", r.n},
            {"F_bar_star", r.f_bar_star},
            {"bound", r.bound()},
            {"dual_bound", r.dual_bound},
            {"gap", r.gap},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"restart_spread", r.restart_spread}};
}

}  // namespace smmoney
