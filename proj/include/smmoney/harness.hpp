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

// Experiment configuration, strategy lookup and reproduction tables.
// Every analytic column is computed from the library's formulas.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smmoney/adversary.hpp"
#include "smmoney/coherent.hpp"
#include "smmoney/fidelity_bound.hpp"
#include "smmoney/parallel.hpp"
#include "smmoney/protocol.hpp"
#include "smmoney/sampling_matching.hpp"
#include "smmoney/serialization.hpp"

namespace smmoney {

class ConfigError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    std::string scheme = "single_photon";  // or "coherent"
    SchemeParams params;
    std::string strategy = "honest";
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out;              // empty: stdout
    std::string format = "json";  // or "csv"
    ClickRule click_rule = ClickRule::kAtLeastTwo;

    void validate() const;
};

/// Strategy names: a base ("honest", "measure_resend", "measure_resend_generalized",
/// "cloner_optimal", "cloner_identity", "cloner_discard") optionally followed by
/// "+register" and/or "+adaptive".
inline AttackStrategy make_strategy(const std::string& name, int n) {
    std::vector<std::string> parts;
    std::stringstream ss(name);
    for (std::string part; std::getline(ss, part, '+');) parts.push_back(part);
    if (parts.empty() || name.back() == '+') throw ConfigError("malformed strategy name '" + name + "'");

    AttackStrategy s;
    const std::string& base = parts[0];
    if (base == "honest") {
        s = AttackStrategy::honest();
    } else if (base == "measure_resend") {
        s = AttackStrategy::measure_resend(false);
    } else if (base == "measure_resend_generalized") {
        s = AttackStrategy::measure_resend(true);
    } else if (base == "cloner_identity") {
        s = AttackStrategy::collective(ChoiMatrix::identity_and_discard(n));
    } else if (base == "cloner_discard") {
        s = AttackStrategy::collective(ChoiMatrix::discard_both(n));
    } else if (base == "cloner_optimal") {
        if (n > 8) throw ConfigError("cloner_optimal needs n <= 8");
        auto r = maximize_fidelity(n);
        s = AttackStrategy::collective(*r.j_star);
    } else {
        throw ConfigError("unknown strategy '" + base + "'");
    }
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i] == "register") {
            s = s.with_register_manipulation();
        } else if (parts[i] == "adaptive") {
            s = s.with_adaptive();
        } else {
            throw ConfigError("unknown strategy modifier '" + parts[i] + "'");
        }
    }
    return s;
}

inline bool is_known_strategy(const std::string& name) {
    if (name.empty() || name.back() == '+') return false;
    static const std::vector<std::string> bases{"honest",          "measure_resend", "measure_resend_generalized",
                                                "cloner_optimal",  "cloner_identity", "cloner_discard"};
    std::stringstream ss(name);
    std::string part;
    if (!std::getline(ss, part, '+') || std::find(bases.begin(), bases.end(), part) == bases.end()) {
        return false;
    }
    while (std::getline(ss, part, '+')) {
        if (part != "register" && part != "adaptive") return false;
    }
    return true;
}

inline void ExperimentConfig::validate() const {
    if (trials == 0) throw ConfigError("trials must be >= 1");
    if (scheme != "single_photon" && scheme != "coherent") throw ConfigError("unknown scheme '" + scheme + "'");
    if (format != "json" && format != "csv") throw ConfigError("format must be json or csv");
    if (!is_known_strategy(strategy)) throw ConfigError("unknown strategy '" + strategy + "'");
    if (scheme == "coherent" && strategy.rfind("honest", 0) != 0) {
        throw ConfigError("forging strategies require the single_photon scheme");
    }
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

/// Applies the keys present in a JSON config; absent keys keep their values.
inline void apply_config_json(ExperimentConfig& cfg, const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    auto get = [&j](const char* key, auto& target) {
        if (j.contains(key)) {
            try {
                j.at(key).get_to(target);
            } catch (const Json::exception& e) {
                throw ConfigError(std::string("config key '") + key + "': " + e.what());
            }
        }
    };
    get("scheme", cfg.scheme);
    get("strategy", cfg.strategy);
    get("trials", cfg.trials);
    get("seed", cfg.seed);
    get("workers", cfg.workers);
    get("out", cfg.out);
    get("format", cfg.format);
    get("n", cfg.params.n);
    get("q", cfg.params.q);
    get("l_size", cfg.params.l_size);
    get("t_max", cfg.params.t_max);
    get("epsilon", cfg.params.epsilon);
    get("delta", cfg.params.delta);
    if (j.contains("click_rule")) {
        std::string rule;
        get("click_rule", rule);
        cfg.click_rule = parse_click_rule(rule);
    }
}

// ---- reproduction rows --------------------------------------------------------

enum class RowKind : std::uint8_t {
    kStatistical,  // |empirical - analytic| <= 4 stderr
    kExact,        // |empirical - analytic| <= 1e-9
    kUpperBound,   // empirical <= bound
    kLowerBound,   // empirical >= bound
};

struct ReproductionRow {
    std::string quantity;
    int n = 0;
    double analytic = 0.0;
    double empirical = 0.0;
    double stderr_ = 0.0;
    std::optional<double> bound;
    RowKind kind = RowKind::kStatistical;

    bool pass() const {
        switch (kind) {
            case RowKind::kStatistical:
                return std::abs(empirical - analytic) <= std::max(4.0 * stderr_, 1e-12);
            case RowKind::kExact:
                return std::abs(empirical - analytic) <= 1e-9;
            case RowKind::kUpperBound:
                return bound && empirical <= *bound;
            case RowKind::kLowerBound:
                return bound && empirical >= *bound;
        }
        return false;
    }
};

inline double binomial_stderr(double p, std::size_t samples) {
    return samples == 0 ? std::numeric_limits<double>::infinity()
                        : std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(samples));
}

struct HonestSmCounts {
    std::size_t runs = 0;
    std::size_t inconclusive = 0;
    std::size_t first_tuple = 0;  // conclusive on (1, 2)
    std::size_t wrong = 0;
};

/// Honest single-photon sampling matching on random strings.
inline HonestSmCounts honest_sm_counts(int n, std::size_t runs, std::uint64_t seed, unsigned workers) {
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (runs + kChunk - 1) / kChunk;
    auto parts = run_trials(chunks, workers, [&](std::size_t c) {
        Rng rng(derive_seed(seed, c));
        HonestSmCounts h;
        const std::size_t end = std::min(runs, (c + 1) * kChunk);
        const auto ref = local_reference_state(n);
        for (std::size_t t = c * kChunk; t < end; ++t) {
            const auto x = BitString::random(n, rng);
            const auto o = classify(sample_event(interfere_pure(encode_note_state(x), ref), rng));
            ++h.runs;
            if (!o.is_conclusive()) {
                ++h.inconclusive;
            } else {
                h.first_tuple += (*o.tuple == Tuple{1, 2});
                h.wrong += (x.parity(*o.tuple) != o.parity);
            }
        }
        return h;
    });
    HonestSmCounts total;
    for (const auto& h : parts) {
        total.runs += h.runs;
        total.inconclusive += h.inconclusive;
        total.first_tuple += h.first_tuple;
        total.wrong += h.wrong;
    }
    return total;
}

struct CoherentCounts {
    std::size_t runs = 0;
    std::size_t inconclusive = 0;
    std::size_t wrong = 0;
};

inline CoherentCounts honest_coherent_counts(int n, std::size_t runs, std::uint64_t seed, unsigned workers,
                                             ClickRule rule = ClickRule::kAtLeastTwo) {
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (runs + kChunk - 1) / kChunk;
    auto parts = run_trials(chunks, workers, [&](std::size_t c) {
        Rng rng(derive_seed(seed, c));
        CoherentCounts h;
        const std::size_t end = std::min(runs, (c + 1) * kChunk);
        for (std::size_t t = c * kChunk; t < end; ++t) {
            const auto x = BitString::random(n, rng);
            const auto run = run_sm_coherent(encode_coherent(x), rng, rule);
            ++h.runs;
            if (!run.outcome.is_conclusive()) {
                ++h.inconclusive;
            } else if (x.parity(*run.outcome.tuple) != run.outcome.parity) {
                ++h.wrong;
            }
        }
        return h;
    });
    CoherentCounts total;
    for (const auto& h : parts) {
        total.runs += h.runs;
        total.inconclusive += h.inconclusive;
        total.wrong += h.wrong;
    }
    return total;
}

/// Reference instance: |L| = 10^3, ten Bank contacts, A |L| / q = 1/1000.
inline SchemeParams reference_params(int n) {
    SchemeParams p;
    p.n = n;
    p.l_size = 1000;
    p.t_max = 10 * p.l_size;           // ten Bank contacts
    p.q = 1000 * p.max_bank_contacts() * p.l_size;  // lambda = 1/1000
    p.epsilon = 0.1;
    p.delta = default_delta(p);
    return p;
}

struct TableOptions {
    std::vector<int> modes{4, 8, 14};
    std::size_t sm_runs = 100000;
    std::size_t attack_trials = 200;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

inline std::vector<ReproductionRow> reproduction_table(const TableOptions& opt) {
    std::vector<ReproductionRow> rows;
    for (std::size_t idx = 0; idx < opt.modes.size(); ++idx) {
        const int n = opt.modes[idx];
        const std::uint64_t base = derive_seed(opt.seed, static_cast<std::uint64_t>(n));

        const auto sm = honest_sm_counts(n, opt.sm_runs, derive_seed(base, 1), opt.workers);
        const double p2 = 1.0 - single_photon_conclusive_probability(n);
        const double inc = ForgeryStats::ratio(sm.inconclusive, sm.runs);
        rows.push_back({"p2", n, p2, inc, binomial_stderr(p2, sm.runs), std::nullopt, RowKind::kStatistical});

        const auto exact = interfere_pure(encode_note_state(BitString::zeros(n)), local_reference_state(n));
        const double p_tuple = exact.tuple_mass({1, 2});
        const double emp_tuple = ForgeryStats::ratio(sm.first_tuple, sm.runs);
        rows.push_back({"p_tuple", n, p_tuple, emp_tuple, binomial_stderr(p_tuple, sm.runs), std::nullopt,
                        RowKind::kStatistical});
        rows.push_back({"honest_wrong_parity", n, 0.0, ForgeryStats::ratio(sm.wrong, sm.runs), 0.0, std::nullopt,
                        RowKind::kExact});

        // Noise tolerance two ways: the per-copy minimum error and half the
        // optimal collective combined-error bound.
        rows.push_back({"noise_tolerance", n, e_min_asymptotic(n), 0.5 * optimal_collective_error_bound(n), 0.0,
                        std::nullopt, RowKind::kExact});
        const SchemeParams ref = reference_params(n);
        rows.push_back({"e_min_lambda_1e-3", n, e_min(ref), e_min(ref), 0.0, e_min_asymptotic(n),
                        RowKind::kUpperBound});

        const auto coh = honest_coherent_counts(n, opt.sm_runs, derive_seed(base, 2), opt.workers);
        const double pn = p_not11(n);
        rows.push_back({"p_not11", n, pn, ForgeryStats::ratio(coh.inconclusive, coh.runs),
                        binomial_stderr(pn, coh.runs), std::nullopt, RowKind::kStatistical});
        rows.push_back({"coherent_wrong_parity", n, 0.0, ForgeryStats::ratio(coh.wrong, coh.runs), 0.0,
                        std::nullopt, RowKind::kExact});

        const auto fid = maximize_fidelity(n, SolverOptions{.max_choi_modes = 0});
        rows.push_back({"f_bar_star", n, fid.f_bar_star, fid.dual_bound, 0.0, fid.bound() + 1e-3,
                        RowKind::kUpperBound});

        rows.push_back({"forge_probability_bound", n, forge_probability_bound(ref, ref.delta),
                        security_bounds(ref).forge_prob_bound, 0.0, std::nullopt, RowKind::kExact});
    }

    // Measure-and-resend at n = 4 with |L| = 10^3.
    SchemeParams mr;
    mr.n = 4;
    mr.l_size = 1000;
    mr.q = 2000;
    mr.t_max = 2000;  // one Bank contact per forged note
    mr.epsilon = 0.2;
    mr.delta = 1.0 / 6.0;
    const auto stats = simulate_forgery(AttackStrategy::measure_resend(), mr, opt.attack_trials,
                                        derive_seed(opt.seed, 0xA77AC), opt.workers);
    const std::size_t tested = stats.ver1.attacked_tested + stats.ver2.attacked_tested;
    const std::size_t conclusive = stats.ver1.attacked_conclusive + stats.ver2.attacked_conclusive;
    const double p_inc = 1.0 - single_photon_conclusive_probability(4);
    // Both verifiers see the same resent state, so the rates are estimated per
    // verifier copy; the pooled stderr treats the two halves as independent.
    rows.push_back({"measure_resend_inconclusive", 4, p_inc, stats.inconclusive_rate(),
                    binomial_stderr(p_inc, tested), std::nullopt, RowKind::kStatistical});
    const double mr_err = measure_resend_error_given_conclusive(4);
    rows.push_back({"measure_resend_error", 4, mr_err, stats.error_rate_given_conclusive(),
                    binomial_stderr(mr_err, conclusive), std::nullopt, RowKind::kStatistical});
    const double mr_bound = measure_resend_forge_bound(4, mr.l_size, mr.delta);
    rows.push_back({"measure_resend_joint_pass", 4, mr_bound, stats.joint_pass_rate(), 0.0,
                    std::max(mr_bound, 3.0 / static_cast<double>(opt.attack_trials)), RowKind::kUpperBound});
    return rows;
}

inline std::string rows_to_csv(const std::vector<ReproductionRow>& rows) {
    std::ostringstream out;
    out << std::setprecision(10);
    out << "quantity,n,analytic,empirical,stderr,bound,pass\n";
    for (const auto& r : rows) {
        out << r.quantity << ',' << r.n << ',' << r.analytic << ',' << r.empirical << ',' << r.stderr_ << ',';
        if (r.bound) out << *r.bound;
        out << ',' << (r.pass() ? "true" : "false") << '\n';
    }
    return out.str();
}

inline Json rows_to_json(const std::vector<ReproductionRow>& rows) {
    Json arr = Json::array();
    for (const auto& r : rows) {
        arr.push_back({{"quantity", r.quantity},
                       {"n", r.n},
                       {"analytic", r.analytic},
                       {"empirical", r.empirical},
                       {"stderr", r.stderr_},
                       {"bound", r.bound ? Json(*r.bound) : Json(nullptr)},
                       {"pass", r.pass()}});
    }
    return arr;
}

// ---- sweep over n ----------------------------------------------------------------

struct SweepPoint {
    int n = 0;
    double p2 = 0.0;
    double p2_empirical = 0.0;
    double noise_tolerance = 0.0;
    double p_not11 = 0.0;
    double f_bar_star = 0.0;
    double f_bar_bound = 0.0;
    double forge_bound = 0.0;
};

inline std::vector<SweepPoint> sweep(int n_min, int n_max, std::size_t runs, std::uint64_t seed, unsigned workers) {
    std::vector<SweepPoint> out;
    for (int n = n_min; n <= n_max; ++n) {
        SweepPoint p;
        p.n = n;
        p.p2 = 1.0 - single_photon_conclusive_probability(n);
        const auto sm = honest_sm_counts(n, runs, derive_seed(seed, static_cast<std::uint64_t>(n)), workers);
        p.p2_empirical = ForgeryStats::ratio(sm.inconclusive, sm.runs);
        p.noise_tolerance = e_min_asymptotic(n);
        p.p_not11 = p_not11(n);
        const auto fid = maximize_fidelity(n, SolverOptions{.max_choi_modes = 0});
        p.f_bar_star = fid.f_bar_star;
        p.f_bar_bound = fid.bound();
        const auto ref = reference_params(n);
        p.forge_bound = forge_probability_bound(ref, ref.delta);
        out.push_back(p);
    }
    return out;
}

inline std::string sweep_to_csv(const std::vector<SweepPoint>& pts) {
    std::ostringstream out;
    out << std::setprecision(10);
    out << "n,p2,p2_empirical,noise_tolerance,p_not11,f_bar_star,f_bar_bound,forge_bound\n";
    for (const auto& p : pts) {
        out << p.n << ',' << p.p2 << ',' << p.p2_empirical << ',' << p.noise_tolerance << ',' << p.p_not11 << ','
            << p.f_bar_star << ',' << p.f_bar_bound << ',' << p.forge_bound << '\n';
    }
    return out.str();
}

inline Json sweep_to_json(const std::vector<SweepPoint>& pts) {
    Json arr = Json::array();
    for (const auto& p : pts) {
        arr.push_back({{"n", p.n},
                       {"p2", p.p2},
                       {"p2_empirical", p.p2_empirical},
                       {"noise_tolerance", p.noise_tolerance},
                       {"p_not11", p.p_not11},
                       {"f_bar_star", p.f_bar_star},
                       {"f_bar_bound", p.f_bar_bound},
                       {"forge_bound", p.forge_bound}});
    }
    return arr;
}

}  // namespace smmoney
