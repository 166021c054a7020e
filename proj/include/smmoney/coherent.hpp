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

// Weak-coherent realization: a copy is a train of n pulses with amplitudes
// (-1)^{x_k}/sqrt(n). At time step k the pulse meets a local-oscillator pulse
// of amplitude 1/sqrt(n) on a balanced beam splitter; output D0 carries
// (beta + alpha)/sqrt(2), D1 carries (beta - alpha)/sqrt(2), and a threshold
// detector fires with probability 1 - exp(-|amplitude|^2).

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smmoney/core.hpp"
#include "smmoney/fock.hpp"
#include "smmoney/protocol.hpp"
#include "smmoney/rng.hpp"
#include "smmoney/sampling_matching.hpp"

namespace smmoney {

struct CoherentNoteCopy {
    std::vector<Complex> pulses;  // per-step amplitude alpha_k

    int modes() const { return static_cast<int>(pulses.size()); }

    double mean_photon_number() const {
        double s = 0.0;
        for (const auto& a : pulses) s += std::norm(a);
        return s;
    }
};

inline CoherentNoteCopy encode_coherent(const BitString& x) {
    require_modes(x.size());
    const double amp = 1.0 / std::sqrt(static_cast<double>(x.size()));
    CoherentNoteCopy c;
    c.pulses.reserve(static_cast<std::size_t>(x.size()));
    for (int k = 1; k <= x.size(); ++k) {
        c.pulses.emplace_back(x.sign(k) * amp);
    }
    return c;
}

struct StepClicks {
    bool d0 = false;
    bool d1 = false;
};

struct ClickRecord {
    std::vector<StepClicks> steps;  // one entry per time step, in order

    std::size_t size() const { return steps.size(); }
};

/// When a click pattern counts as conclusive.
enum class ClickRule : std::uint8_t {
    /// Two or more single-click steps and no double-click step; the reported
    /// pair is drawn uniformly from the single-click steps.
    kAtLeastTwo,
    /// Exactly two single-click steps and no other clicks.
    kExactlyTwo,
};

inline std::string_view click_rule_name(ClickRule r) {
    return r == ClickRule::kAtLeastTwo ? "at_least_two" : "exactly_two";
}

inline ClickRule parse_click_rule(std::string_view s) {
    if (s == "at_least_two") return ClickRule::kAtLeastTwo;
    if (s == "exactly_two") return ClickRule::kExactlyTwo;
    throw std::invalid_argument("unknown click rule: " + std::string(s));
}

inline double click_probability(Complex amplitude) { return 1.0 - std::exp(-std::norm(amplitude)); }

/// Honest per-step click probability, 1 - exp(-2/n).
inline double honest_click_probability(int n) {
    require_formula_modes(n);
    return 1.0 - std::exp(-2.0 / static_cast<double>(n));
}

/// Probability that fewer than two steps click: (1-p1)^n + n p1 (1-p1)^{n-1}.
inline double p_not11(int n) {
    const double p1 = honest_click_probability(n);
    const double miss = 1.0 - p1;
    return std::pow(miss, n) + n * p1 * std::pow(miss, n - 1);
}

inline double coherent_conclusive_probability(int n, ClickRule rule) {
    if (rule == ClickRule::kAtLeastTwo) {
        return 1.0 - p_not11(n);
    }
    const double p1 = honest_click_probability(n);
    return static_cast<double>(tuple_count(n)) * p1 * p1 * std::pow(1.0 - p1, n - 2);
}

struct CoherentRun {
    ClickRecord clicks;
    SmOutcome outcome;
};

/// Streaming classification of click steps. State beyond the record is the
/// count of single-click steps, a double-click flag and a two-slot reservoir
/// of (step, detector), so the kept pair is uniform over single-click steps.
class ClickClassifier {
  public:
    explicit ClickClassifier(ClickRule rule) : rule_(rule) {}

    /// Steps must arrive in increasing order.
    void feed(int step, StepClicks clicks, Rng& rng) {
        if (clicks.d0 && clicks.d1) {
            double_click_ = true;
            return;
        }
        if (!clicks.d0 && !clicks.d1) {
            return;
        }
        ++singles_;
        if (singles_ <= 2) {
            slot_step_[singles_ - 1] = step;
            slot_det_[singles_ - 1] = clicks.d1;
        } else if (rule_ == ClickRule::kAtLeastTwo && rng.below(singles_) < 2) {
            const auto victim = rng.below(2);
            slot_step_[victim] = step;
            slot_det_[victim] = clicks.d1;
        }
    }

    SmOutcome result() const {
        const bool enough = rule_ == ClickRule::kAtLeastTwo ? singles_ >= 2 : singles_ == 2;
        if (double_click_ || !enough) {
            return SmOutcome::inconclusive();
        }
        const int a = slot_step_[0] < slot_step_[1] ? 0 : 1;
        const int b = 1 - a;
        return SmOutcome::conclusive({slot_step_[a], slot_step_[b]}, slot_det_[a] != slot_det_[b]);
    }

  private:
    ClickRule rule_;
    std::size_t singles_ = 0;
    bool double_click_ = false;
    int slot_step_[2] = {0, 0};
    bool slot_det_[2] = {false, false};
};

/// Interferes the pulses with the local oscillator one step at a time.
inline CoherentRun run_sm_coherent(const CoherentNoteCopy& copy, Rng& rng,
                                   ClickRule rule = ClickRule::kAtLeastTwo) {
    const int n = copy.modes();
    require_modes(n);
    const double lo = 1.0 / std::sqrt(static_cast<double>(n));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    CoherentRun run;
    run.clicks.steps.reserve(static_cast<std::size_t>(n));
    ClickClassifier classifier(rule);
    for (int k = 1; k <= n; ++k) {
        const Complex alpha = copy.pulses[static_cast<std::size_t>(k - 1)];
        StepClicks s;
        s.d0 = rng.bernoulli(click_probability((lo + alpha) * inv_sqrt2));
        s.d1 = rng.bernoulli(click_probability((lo - alpha) * inv_sqrt2));
        run.clicks.steps.push_back(s);
        classifier.feed(k, s, rng);
    }
    run.outcome = classifier.result();
    return run;
}

/// Measurement backend for the shared protocol state machine. There is no
/// photon-count check; the verifier's conclusive rate is set by the rule.
struct CoherentBackend {
    using Copy = CoherentNoteCopy;
    static constexpr bool kPhotonCountCheck = false;
    static constexpr std::string_view kName = "coherent";

    ClickRule rule = ClickRule::kAtLeastTwo;

    Copy encode(const BitString& x) const { return encode_coherent(x); }

    double conclusive_probability(int n) const { return coherent_conclusive_probability(n, rule); }

    CopyMeasurement measure(const Copy& copy, Rng& rng) const {
        return {run_sm_coherent(copy, rng, rule).outcome, true};
    }
};

inline LocalResult coherent_local_test(Note<CoherentNoteCopy>& note, const SchemeParams& params, Rng& rng,
                                       ClickRule rule = ClickRule::kAtLeastTwo) {
    return local_test(note, params, CoherentBackend{rule}, rng);
}

inline Verdict coherent_bank_validate(BankSecret& secret, const VerifierReport& report, const SchemeParams& params,
                                      ClickRule rule = ClickRule::kAtLeastTwo) {
    return bank_validate(secret, report, params, coherent_conclusive_probability(params.n, rule));
}

}  // namespace smmoney
